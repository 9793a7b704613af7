"""Generators for the explicit absolutely-entangled families and their
parameter thresholds.

Families provided:

* ``star_states`` -- the one-parameter family ``phi_1 = xi_1``,
  ``phi_i = a xi_1 + sqrt(1 - a^2) xi_i`` with ``N = sum(d_i) - k + 2``
  states, absolutely entangled for any multipartition once ``a`` exceeds
  the closed-form threshold of ``star_amin``.
* ``tetra_states`` -- N states in C^4 built from unit sphere points in
  general position (every 4 form a tetrahedron); every 4-subset becomes
  certified as ``a -> 1``.
* ``n5_symmetric_set`` -- the explicit symmetric 5-state two-qubit family.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import Partition, StateSet
from .criterion import detects
from .errors import (
    InvalidCountError,
    InvalidDimensionError,
    SearchFailedError,
    TooManyStatesError,
)
from .rng import RunSeed

DEFAULT_COPLANARITY_TOL = 1e-3
DEFAULT_RESOLUTION = 1e-3


@dataclass(frozen=True)
class AminReport:
    """Closed-form threshold data for the star family on one partition.

    ``terms[i]`` is ``sqrt((d_i - 1) D_i / ((d_i - 1 + 1/(k-1)) (D_i + 1/(k-1))))``
    with ``D_i = sum_{j>i} (d_j - 1) + (k - 1 - i)/(k - 1)``; the guaranteed
    threshold is ``amin_max`` (max over i = 1..k-1). ``amin_min`` is reported
    alongside because published tabulations quote the minimum term for some
    multipartitions.
    """

    partition: Partition
    n_states: int
    D: tuple
    terms: tuple
    amin_max: float
    amin_min: float


@dataclass(frozen=True)
class AminTable:
    dim: int
    rows: tuple  # AminReport per multiplicative partition
    all_n_states: int
    all_amin_max: float
    all_amin_min: float


@dataclass(frozen=True)
class SpherePoints:
    points: np.ndarray  # (N, 3) unit vectors
    min_tetra_det: float

    @property
    def n_points(self) -> int:
        return self.points.shape[0]


def star_state_count(p: Partition) -> int:
    return sum(p.factors) - p.k + 2


def star_states(p: Partition, a: float) -> StateSet:
    """phi_1 = xi_1 and phi_i = a xi_1 + sqrt(1-a^2) xi_i, i = 2..N."""
    if not (0.0 < a < 1.0):
        raise InvalidCountError("parameter a must lie strictly in (0, 1)")
    d = p.product
    n = star_state_count(p)
    if n > d:
        raise TooManyStatesError(f"{n} states exceed dimension {d}")
    vecs = np.zeros((n, d), dtype=complex)
    vecs[0, 0] = 1.0
    vecs[1:, 0] = a
    b = math.sqrt(1.0 - a * a)
    for i in range(1, n):
        vecs[i, i] = b
    return StateSet(vecs)


def star_amin(p: Partition) -> AminReport:
    """Closed-form AES threshold for the star family on partition p."""
    k = p.k
    inv = 1.0 / (k - 1)
    ds = p.factors
    D = []
    terms = []
    for i in range(1, k):  # 1-based index into the factors, up to k-1
        Di = sum(dj - 1 for dj in ds[i:]) + (k - 1 - i) * inv
        di = ds[i - 1]
        term = math.sqrt((di - 1) * Di / ((di - 1 + inv) * (Di + inv)))
        D.append(Di)
        terms.append(term)
    return AminReport(
        partition=p,
        n_states=star_state_count(p),
        D=tuple(D),
        terms=tuple(terms),
        amin_max=max(terms),
        amin_min=min(terms),
    )


def star_amin_general_n(d1: int, d2: int, n: int) -> float:
    """Bipartite star-family threshold when the family is extended to n states.

    Derived from the block-sum bound with I = n - 1; decreases from
    sqrt((d1-1)(d2-1)/(d1 d2)) at n = d1 + d2 down to 1/sqrt(d) at n = d1 d2.
    """
    d = d1 * d2
    if not (d1 + d2 <= n <= d):
        raise InvalidCountError(f"n must lie in [{d1 + d2}, {d}]")
    denom = (n - 1) * (n - d1) - (d2 - 1) * (n - 1) + (d1 - 1) * (d2 - 1)
    return math.sqrt((d1 - 1) * (d2 - 1) / denom)


def multiplicative_partitions(d: int) -> list:
    """All factorizations of d into >= 2 factors, each >= 2, nondecreasing."""
    if d < 4:
        raise InvalidDimensionError("need a composite dimension >= 4")
    out = [t for t in _factorizations(d, 2) if len(t) >= 2]
    if not out:
        raise InvalidDimensionError(f"{d} is prime: no nontrivial partition")
    return sorted(out, key=lambda t: (len(t), t))


def _factorizations(n: int, min_f: int):
    found = [(n,)] if n >= min_f else []
    f = min_f
    while f * f <= n:
        if n % f == 0:
            for rest in _factorizations(n // f, f):
                found.append((f,) + rest)
        f += 1
    return found


def amin_table(d: int) -> AminTable:
    """One AminReport per multiplicative partition of d, plus the row covering
    every partition at once (largest N and largest threshold)."""
    rows = tuple(star_amin(Partition(t)) for t in multiplicative_partitions(d))
    return AminTable(
        dim=d,
        rows=rows,
        all_n_states=max(r.n_states for r in rows),
        all_amin_max=max(r.amin_max for r in rows),
        all_amin_min=max(r.amin_min for r in rows),
    )


def _tetra_det(points: np.ndarray, subset) -> float:
    mat = np.ones((4, 4))
    mat[:, :3] = points[list(subset)]
    return abs(np.linalg.det(mat))


def sphere_points_general_position(n: int, seed: RunSeed,
                                   tol: float = DEFAULT_COPLANARITY_TOL) -> SpherePoints:
    """n uniform unit sphere points such that every 4-subset spans a tetrahedron.

    Candidates creating a near-coplanar 4-subset (|det| < tol on the homogeneous
    4x4 determinant) are rejected and redrawn; coplanar configurations have
    measure zero, so this terminates with probability one.
    """
    if n < 4:
        raise InvalidCountError("need at least 4 points")
    if tol <= 0:
        raise InvalidCountError("tolerance must be positive")
    gen = seed.generator()
    points = np.zeros((n, 3))
    count = 0
    while count < n:
        cand = gen.standard_normal(3)
        norm = np.linalg.norm(cand)
        if norm < 1e-6:
            continue
        points[count] = cand / norm
        count += 1
        if count >= 4:
            ok = all(
                _tetra_det(points, prev + (count - 1,)) >= tol
                for prev in itertools.combinations(range(count - 1), 3)
            )
            if not ok:
                count -= 1
    min_det = min(_tetra_det(points, s) for s in itertools.combinations(range(n), 4))
    return SpherePoints(points=points, min_tetra_det=float(min_det))


def validate_sphere_points(points: np.ndarray, tol: float = DEFAULT_COPLANARITY_TOL) -> SpherePoints:
    """Wrap externally supplied points, enforcing the general-position invariants."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 4:
        raise InvalidCountError("need an (N, 3) array with N >= 4")
    if np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) > 1e-12:
        raise InvalidCountError("points must be unit vectors")
    min_det = min(_tetra_det(pts, s) for s in itertools.combinations(range(pts.shape[0]), 4))
    if min_det < tol:
        raise InvalidCountError(f"4-subset determinant {min_det:.3e} below tolerance {tol}")
    return SpherePoints(points=pts, min_tetra_det=float(min_det))


def tetra_states(pts: SpherePoints, a: float) -> StateSet:
    """N states in C^4: a xi_1 + sqrt(1-a^2) (v_i1 xi_2 + v_i2 xi_3 + v_i3 xi_4)."""
    if not (0.0 < a < 1.0):
        raise InvalidCountError("parameter a must lie strictly in (0, 1)")
    n = pts.n_points
    vecs = np.zeros((n, 4), dtype=complex)
    vecs[:, 0] = a
    vecs[:, 1:] = math.sqrt(1.0 - a * a) * pts.points
    return StateSet(vecs)


def n5_symmetric_set(b: float) -> StateSet:
    """The explicit symmetric family of 5 two-qubit states."""
    if not (0.0 < b < 1.0):
        raise InvalidCountError("parameter b must lie strictly in (0, 1)")
    r = math.sqrt(1.0 - b * b)
    vecs = np.zeros((5, 4), dtype=complex)
    vecs[0, 0] = 1.0
    for i in (1, 2, 3):
        vecs[i, 0] = b
        vecs[i, i] = r
    vecs[4, 0] = b
    vecs[4, 1:] = r / math.sqrt(3.0)
    return StateSet(vecs)


@dataclass(frozen=True)
class CriticalAReport:
    resolution: float
    per_subset: dict  # subset tuple (0-based) -> critical a
    overall: float  # smallest a at which every required subset is detected


def critical_a_search(family, subsets=None, resolution: float = DEFAULT_RESOLUTION) -> CriticalAReport:
    """Bisect for the smallest parameter at which the required 4-subsets pass
    the permutation scan.

    ``family`` maps a parameter in (0, 1) to a StateSet; detection must be
    monotone in the parameter for this family. ``subsets`` defaults to every
    4-subset of the generated set.
    """
    if resolution <= 0:
        raise InvalidCountError("resolution must be positive")
    probe = family(0.5)
    if subsets is None:
        subsets = list(itertools.combinations(range(probe.n_states), 4))
    per_subset = {}
    for subset in subsets:
        per_subset[tuple(subset)] = _bisect_subset(family, tuple(subset), resolution)
    return CriticalAReport(
        resolution=resolution,
        per_subset=per_subset,
        overall=max(per_subset.values()),
    )


def _bisect_subset(family, subset, resolution: float) -> float:
    def detected(a: float) -> bool:
        states = family(a)
        return detects(StateSet(states.vectors[list(subset)]))

    hi = 1.0 - resolution
    if not detected(hi):
        raise SearchFailedError(f"subset {subset} not detected even at a = {hi}")
    lo = 0.0
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if mid <= 0.0 or mid >= 1.0:
            break
        if detected(mid):
            hi = mid
        else:
            lo = mid
    return hi


def tetra_asymptotic_threshold(pts: SpherePoints, subset) -> float:
    """Parameter-free detection threshold for one 4-subset of the tetra family.

    Built from the Gram-Schmidt coefficients of the edge vectors
    ``u_i = v_i - v_0``; the criterion threshold of the subset converges to
    this value as the family parameter approaches 1, so a value below 1
    guarantees the searched critical parameter stays below 1.
    """
    subset = tuple(subset)
    if len(subset) != 4:
        raise InvalidCountError("need exactly 4 point indices")
    v = pts.points[list(subset)]
    u = v[1:] - v[0]
    # real Gram-Schmidt of the three edge directions
    q = np.zeros((3, 3))
    coeff = np.zeros((3, 3))
    for i in range(3):
        vec = u[i] / np.linalg.norm(u[i])
        for j in range(i):
            coeff[i, j] = q[j] @ vec
            vec = vec - coeff[i, j] * q[j]
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            raise InvalidCountError("subset is degenerate: edges not independent")
        coeff[i, i] = norm
        q[i] = vec / norm
    U21, U22 = abs(coeff[1, 0]), abs(coeff[1, 1])
    U31, U32, U33 = abs(coeff[2, 0]), abs(coeff[2, 1]), abs(coeff[2, 2])
    g = (U21 + 1.0) / U22
    L = 1.0 + g * g + (U31 / U33 + (U32 / U33) * g + 1.0 / U33) ** 2
    return 1.0 - 2.0 / (L + 1.0)
