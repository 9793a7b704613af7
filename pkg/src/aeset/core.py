"""State vectors, tensor-factor indexing, entropy, Haar sampling, triangularization.

Conventions used throughout the package:

* A pure state on ``C^d`` is a unit-norm complex amplitude vector in a flat
  computational basis.
* A partition ``(d_1, ..., d_k)`` of ``d`` orders the tensor factors with
  subsystem 1 most significant: the basis ket with 1-based digits
  ``|i_1 ... i_k>`` sits at 0-based flat index
  ``sum_m (i_m - 1) * prod_{m' > m} d_{m'}``.
* Entanglement entropies are reported in bits (log base 2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidCountError,
    InvalidDimensionError,
    PartitionMismatchError,
    TooManyStatesError,
)
from .rng import RunSeed, complex_normal

NORM_TOL = 1e-12
DEPENDENCE_TOL = 1e-10
SPECTRUM_FLOOR = 1e-15


@dataclass(frozen=True)
class Partition:
    """Ordered tensor-factor dimensions ``(d_1, ..., d_k)``."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(int(f) for f in self.factors)
        object.__setattr__(self, "factors", factors)
        if len(factors) < 2:
            raise PartitionMismatchError("a partition needs at least two factors")
        if any(f < 2 for f in factors):
            raise PartitionMismatchError("every factor must be >= 2")

    @property
    def product(self) -> int:
        return math.prod(self.factors)

    @property
    def k(self) -> int:
        return len(self.factors)

    def tail_products(self) -> tuple:
        """Suffix products: entry i (0-based) is ``d_{i+1} * ... * d_k`` (1-based), entry 0 is d."""
        tails = []
        acc = 1
        for f in reversed(self.factors):
            acc *= f
            tails.append(acc)
        return tuple(reversed(tails))  # tails[i] = d_i * d_{i+1} * ... * d_k

    def flat_index(self, digits) -> int:
        """0-based flat index of the basis ket with 1-based digits."""
        if len(digits) != self.k:
            raise PartitionMismatchError("digit count must equal the number of factors")
        idx = 0
        for digit, f in zip(digits, self.factors):
            if not (1 <= digit <= f):
                raise PartitionMismatchError("digit out of range for its factor")
            idx = idx * f + (digit - 1)
        return idx

    def __str__(self):
        return "x".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class PureState:
    """Unit-norm complex amplitude vector over the flat computational basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.ndim != 1 or amps.shape[0] < 2:
            raise InvalidDimensionError("amplitudes must be a vector of length >= 2")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidDimensionError(f"state norm {norm!r} deviates from 1 by more than {NORM_TOL}")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class StateSet:
    """Ordered collection of pure states sharing one dimension.

    ``vectors`` is the (N, d) array of amplitudes, one state per row.
    """

    vectors: np.ndarray

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=complex)
        object.__setattr__(self, "vectors", vecs)
        if vecs.ndim != 2 or vecs.shape[0] < 1:
            raise InvalidCountError("need an (N, d) array with N >= 1")
        if vecs.shape[1] < 2:
            raise InvalidDimensionError("dimension must be >= 2")
        norms = np.linalg.norm(vecs, axis=1)
        if np.max(np.abs(norms - 1.0)) > NORM_TOL:
            raise InvalidDimensionError("every state must have unit norm")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def n_states(self) -> int:
        return self.vectors.shape[0]

    def state(self, i: int) -> PureState:
        return PureState(self.vectors[i])

    def __len__(self):
        return self.n_states


@dataclass(frozen=True)
class TriangularForm:
    """Lower-triangular Gram-Schmidt presentation of an ordered state set.

    Row i of ``coeffs`` holds the coefficients of state i in the orthonormal
    basis ``basis`` (rows), so ``states[i] = sum_j coeffs[i, j] * basis[j]``.
    Diagonal entries are real and >= 0; a zero diagonal marks a state that is
    linearly dependent on its predecessors.
    """

    coeffs: np.ndarray
    basis: np.ndarray
    residual_rank: int
    dependent: tuple = field(default=())


def haar_random_state(d: int, seed: RunSeed) -> PureState:
    """Haar-uniform pure state on ``C^d`` (normalized complex Gaussians)."""
    if d < 2:
        raise InvalidDimensionError("dimension must be >= 2")
    z = complex_normal(seed.generator(), (d,))
    return PureState(z / np.linalg.norm(z))


def haar_random_state_set(d: int, n: int, seed: RunSeed) -> StateSet:
    """N independent Haar states drawn from one deterministic stream."""
    if d < 2:
        raise InvalidDimensionError("dimension must be >= 2")
    if n < 1:
        raise InvalidCountError("need at least one state")
    z = complex_normal(seed.generator(), (n, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return StateSet(z)


def _schmidt_values(vec: np.ndarray, d1: int, d2: int) -> np.ndarray:
    return np.linalg.svd(vec.reshape(d1, d2), compute_uv=False)


def _entropy_from_schmidt(s: np.ndarray) -> float:
    lam = s * s
    lam = lam[lam > SPECTRUM_FLOOR]
    return float(-np.sum(lam * np.log2(lam))) if lam.size else 0.0


def entanglement_entropy(state: PureState, d1: int, d2: int) -> float:
    """Von Neumann entropy (bits) across the (d1 | d2) cut."""
    if d1 * d2 != state.dim:
        raise PartitionMismatchError(f"{d1}*{d2} != {state.dim}")
    return _entropy_from_schmidt(_schmidt_values(state.amplitudes, d1, d2))


def _subsystem_entropies_vec(vec: np.ndarray, p: Partition) -> np.ndarray:
    d = vec.shape[0]
    tensor = vec.reshape(p.factors)
    out = np.empty(p.k)
    for m, dm in enumerate(p.factors):
        mat = np.moveaxis(tensor, m, 0).reshape(dm, d // dm)
        out[m] = _entropy_from_schmidt(np.linalg.svd(mat, compute_uv=False))
    return out


def subsystem_entropies(state: PureState, p: Partition) -> np.ndarray:
    """Entropy of each subsystem against the rest; all zero iff fully product."""
    if p.product != state.dim:
        raise PartitionMismatchError(f"partition {p} does not match dimension {state.dim}")
    return _subsystem_entropies_vec(state.amplitudes, p)


def _orthonormal_completion(basis_rows: np.ndarray, count: int) -> np.ndarray:
    """Extend the orthonormal rows with `count` more, Gram-Schmidt over canonical vectors."""
    d = basis_rows.shape[1]
    rows = [basis_rows[i] for i in range(basis_rows.shape[0])]
    added = []
    for j in range(d):
        if len(added) == count:
            break
        cand = np.zeros(d, dtype=complex)
        cand[j] = 1.0
        for row in rows:
            cand -= np.vdot(row, cand) * row
        norm = np.linalg.norm(cand)
        if norm < DEPENDENCE_TOL:
            continue
        cand /= norm
        rows.append(cand)
        added.append(cand)
    if len(added) < count:
        raise InvalidDimensionError("could not complete the orthonormal basis")
    return np.array(added)


def triangularize(states: StateSet) -> TriangularForm:
    """Gram-Schmidt the states in order into a lower-triangular coefficient form.

    A residual below ``DEPENDENCE_TOL`` flags the state as linearly dependent:
    its diagonal coefficient is set to 0 and the basis slot is filled by a
    canonical orthonormal completion.
    """
    n, d = states.vectors.shape
    if n > d:
        raise TooManyStatesError(f"cannot triangularize {n} states in dimension {d}")
    coeffs = np.zeros((n, n), dtype=complex)
    basis = np.zeros((n, d), dtype=complex)
    dependent = []
    rank = 0
    for i in range(n):
        vec = states.vectors[i].copy()
        for j in range(i):
            coeffs[i, j] = np.vdot(basis[j], states.vectors[i])
            vec -= coeffs[i, j] * basis[j]
        norm = np.linalg.norm(vec)
        if norm < DEPENDENCE_TOL:
            dependent.append(i)
            coeffs[i, i] = 0.0
            basis[i] = _orthonormal_completion(basis[:i], 1)[0]
        else:
            coeffs[i, i] = norm
            basis[i] = vec / norm
            rank += 1
    return TriangularForm(coeffs=coeffs, basis=basis, residual_rank=rank, dependent=tuple(dependent))


# --- state-set JSON schema: {"d": int, "states": [[[re, im], ...], ...]} ---

def state_set_to_dict(states: StateSet) -> dict:
    return {
        "d": states.dim,
        "states": [[[float(a.real), float(a.imag)] for a in row] for row in states.vectors],
    }


def state_set_from_dict(data: dict) -> StateSet:
    d = int(data["d"])
    rows = []
    for state in data["states"]:
        if len(state) != d:
            raise InvalidDimensionError("state length disagrees with declared dimension")
        rows.append([complex(re, im) for re, im in state])
    return StateSet(np.array(rows, dtype=complex))


def save_state_set(states: StateSet, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_set_to_dict(states), fh)


def load_state_set(path) -> StateSet:
    with open(path) as fh:
        return state_set_from_dict(json.load(fh))
