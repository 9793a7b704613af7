"""Product-state tests and the constructive disentangling unitary.

The numerically robust product test uses the second Schmidt coefficient of
the reshaped amplitude matrix. The algebraically equivalent cross-ratio
conditions ``a_1 a_{n d2 + k} = a_k a_{n d2 + 1}`` are provided as
:func:`cross_ratio_residual` for diagnostics; a state is product exactly
when all cross ratios vanish, which happens exactly when the Schmidt rank
is 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Partition,
    PureState,
    StateSet,
    _orthonormal_completion,
    triangularize,
)
from .errors import (
    BoundExceededError,
    InvalidDimensionError,
    NotUnitaryError,
    PartitionMismatchError,
)
from .rng import RunSeed, complex_normal

UNITARITY_TOL = 1e-12
DEFAULT_PRODUCT_TOL = 1e-9


@dataclass(frozen=True)
class Unitary:
    """d x d unitary matrix (global phase carries no meaning here)."""

    entries: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidDimensionError("entries must be a square matrix")
        residual = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
        if residual > UNITARITY_TOL:
            raise NotUnitaryError(f"unitarity residual {residual:.3e} exceeds {UNITARITY_TOL}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def apply(self, state: PureState) -> PureState:
        return PureState(self.entries @ state.amplitudes)

    def apply_set(self, states: StateSet) -> StateSet:
        return StateSet(states.vectors @ self.entries.T)


@dataclass(frozen=True)
class ProductVerdict:
    is_product: bool
    residual: float
    tol: float


def haar_random_unitary(d: int, seed: RunSeed) -> Unitary:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    if d < 1:
        raise InvalidDimensionError("dimension must be >= 1")
    z = complex_normal(seed.generator(), (d, d))
    q, r = np.linalg.qr(z)
    # fix the phase ambiguity of QR so the distribution is exactly Haar
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return Unitary(q * phases)


def second_schmidt_coefficient(vec: np.ndarray, d1: int, d2: int) -> float:
    s = np.linalg.svd(np.asarray(vec).reshape(d1, d2), compute_uv=False)
    return float(s[1]) if s.size > 1 else 0.0


def is_product_bipartite(state: PureState, d1: int, d2: int,
                         tol: float = DEFAULT_PRODUCT_TOL) -> ProductVerdict:
    """Product test across the (d1 | d2) cut; residual is the 2nd Schmidt coefficient."""
    if d1 * d2 != state.dim:
        raise PartitionMismatchError(f"{d1}*{d2} != {state.dim}")
    if tol <= 0:
        raise InvalidDimensionError("tolerance must be positive")
    residual = second_schmidt_coefficient(state.amplitudes, d1, d2)
    return ProductVerdict(is_product=residual < tol, residual=residual, tol=tol)


def cross_ratio_residual(state: PureState, d1: int, d2: int) -> float:
    """Largest violation of the separability cross ratios (1-based pattern
    ``a_1 a_{n d2 + k} = a_k a_{n d2 + 1}``, n = 1..d1-1, k = 2..d2)."""
    if d1 * d2 != state.dim:
        raise PartitionMismatchError(f"{d1}*{d2} != {state.dim}")
    a = state.amplitudes
    worst = 0.0
    for n in range(1, d1):
        for k in range(2, d2 + 1):
            worst = max(worst, abs(a[0] * a[n * d2 + k - 1] - a[k - 1] * a[n * d2]))
    return worst


def is_fully_product(state: PureState, p: Partition,
                     tol: float = DEFAULT_PRODUCT_TOL) -> ProductVerdict:
    """Product test across every nested cut (d_1 | rest), (d_2 | rest), ...

    At each cut the dominant right singular vector carries the remaining
    factors into the next stage; the verdict residual is the worst second
    Schmidt coefficient seen along the cascade.
    """
    if p.product != state.dim:
        raise PartitionMismatchError(f"partition {p} does not match dimension {state.dim}")
    if tol <= 0:
        raise InvalidDimensionError("tolerance must be positive")
    vec = state.amplitudes
    residual = 0.0
    remaining = p.product
    for dm in p.factors[:-1]:
        rest = remaining // dm
        _, s, vh = np.linalg.svd(vec.reshape(dm, rest))
        if s.size > 1:
            residual = max(residual, float(s[1]))
        vec = vh[0]
        remaining = rest
    return ProductVerdict(is_product=residual < tol, residual=residual, tol=tol)


# --- unitary JSON schema: {"d": int, "rows": [[[re, im], ...], ...]} ---

def unitary_to_dict(u: Unitary) -> dict:
    return {
        "d": u.dim,
        "rows": [[[float(z.real), float(z.imag)] for z in row] for row in u.entries],
    }


def unitary_from_dict(data: dict) -> Unitary:
    d = int(data["d"])
    rows = data["rows"]
    if len(rows) != d or any(len(r) != d for r in rows):
        raise InvalidDimensionError("rows disagree with declared dimension")
    return Unitary(np.array([[complex(re, im) for re, im in row] for row in rows]))


def _basis_ket(p: Partition, digits) -> np.ndarray:
    vec = np.zeros(p.product, dtype=complex)
    vec[p.flat_index(digits)] = 1.0
    return vec


def disentangling_unitary(states: StateSet, p: Partition) -> Unitary:
    """Global unitary mapping every state of a small set to a fully product state.

    Works for up to ``max(p.factors) + 1`` states: the first ``d'`` states are
    rotated into the subspace spanned by kets with all small factors in their
    first level, and the extra direction of the last state is sent to a
    tensor-product completion chosen so that its image factorizes exactly.
    """
    d = p.product
    if states.dim != d:
        raise PartitionMismatchError(f"partition {p} does not match dimension {states.dim}")
    d_prime = max(p.factors)
    m = p.factors.index(d_prime)
    n = states.n_states
    if n > d_prime + 1:
        raise BoundExceededError(
            f"no construction guaranteed for {n} states with largest factor {d_prime}")

    tf = triangularize(states)
    span = min(n, d_prime)  # states beyond the span-count contribute the extra direction
    basis = tf.basis[:span]
    if basis.shape[0] < d_prime:
        basis = np.vstack([basis, _orthonormal_completion(basis, d_prime - basis.shape[0])])

    others = [f for i, f in enumerate(p.factors) if i != m]

    def embed(factor_vec: np.ndarray, rest_vec: np.ndarray) -> np.ndarray:
        # factor_vec lives on subsystem m, rest_vec on the remaining factors in order
        tensor = np.multiply.outer(factor_vec, rest_vec.reshape(others))
        return np.moveaxis(tensor, 0, m).reshape(d)

    ones_rest = np.zeros(int(np.prod(others)), dtype=complex)
    ones_rest[0] = 1.0  # |1...1> on the remaining factors

    domain_rows = [basis[j] for j in range(d_prime)]
    range_rows = [embed(np.eye(d_prime, dtype=complex)[j], ones_rest) for j in range(d_prime)]

    if n == d_prime + 1:
        head = tf.coeffs[n - 1, : n - 1]
        alpha = float(np.linalg.norm(head))
        beta = float(tf.coeffs[n - 1, n - 1].real)
        if alpha < 1e-12:
            psi = np.eye(d_prime, dtype=complex)[0]  # direction is free; reuse the first one
        else:
            psi = np.zeros(d_prime, dtype=complex)
            psi[: n - 1] = head / alpha
        if beta < 1e-12:
            chi = _product_rest(others, 0.0)  # unused by the state image; any product completion
        else:
            chi = _product_rest(others, alpha) - alpha * ones_rest
            chi /= np.linalg.norm(chi)
        domain_rows.append(tf.basis[n - 1])
        range_rows.append(embed(psi, chi))

    dmat = np.array(domain_rows)
    rmat = np.array(range_rows)
    dmat = np.vstack([dmat, _orthonormal_completion(dmat, d - dmat.shape[0])])
    rmat = np.vstack([rmat, _orthonormal_completion(rmat, d - rmat.shape[0])])
    return Unitary(rmat.T @ dmat.conj())


def _product_rest(others, alpha: float) -> np.ndarray:
    """Unit product state on the remaining factors with <1...1| overlap alpha.

    Each factor carries ``alpha**(1/len(others))`` on its first level and the
    rest on its second, so the tensor product overlaps |1...1> by exactly alpha.
    """
    per = alpha ** (1.0 / len(others)) if alpha > 0 else 0.0
    vec = np.array([1.0 + 0j])
    for f in others:
        factor = np.zeros(f, dtype=complex)
        factor[0] = per
        factor[1] = np.sqrt(max(0.0, 1.0 - per * per))
        vec = np.kron(vec, factor)
    return vec
