"""Sufficient test certifying that four two-qubit states form an absolutely
entangled set, plus the all-subsets scan for larger sets.

For an ordered, triangularized set the test compares
``c = min(|c_21|, |c_31|, |c_41|)`` against ``1 - 2/(L + 1)`` with

    L = 1 + (r_32 + sqrt(r_32^2 + 1))^2
          + (r_42 + r_43 (r_32 + sqrt(r_32^2 + 1)) + sqrt(1 + r_42^2 + r_43^2))^2

and ``r_ij = |c_ij| / |c_ii|``. The test is one-sided: a negative verdict
never implies the set is not absolutely entangled. Since every bracket in L
is at least 1, L >= 3 and the threshold is at least 1/2, which gives a cheap
necessary condition (all overlaps with the leading state above 1/2) used to
prune the 24-permutation scan.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import StateSet, TriangularForm, triangularize
from .errors import InvalidCountError, InvalidDimensionError

DIAG_TOL = 1e-12

_PERMUTATIONS4 = tuple(itertools.permutations(range(4)))


@dataclass(frozen=True)
class CriterionVerdict:
    detected: bool
    permutation: tuple
    c: float
    L: float  # may be math.inf when the ordered set degenerates
    threshold: float

    @property
    def margin(self) -> float:
        return self.c - self.threshold


@dataclass(frozen=True)
class SubsetReport:
    subset_indices: tuple
    verdict: CriterionVerdict


def compute_L(tf: TriangularForm) -> float:
    """L of a 4-row triangular form; inf when c_33 or c_44 vanishes."""
    coeffs = tf.coeffs
    if coeffs.shape != (4, 4):
        raise InvalidCountError("need a triangular form of exactly 4 states")
    return _compute_L_raw(np.abs(coeffs))


def _compute_L_raw(a: np.ndarray) -> float:
    if a[2, 2] < DIAG_TOL or a[3, 3] < DIAG_TOL:
        return math.inf
    r32 = a[2, 1] / a[2, 2]
    r42 = a[3, 1] / a[3, 3]
    r43 = a[3, 2] / a[3, 3]
    b32 = r32 + math.sqrt(r32 * r32 + 1.0)
    return 1.0 + b32 * b32 + (r42 + r43 * b32 + math.sqrt(1.0 + r42 * r42 + r43 * r43)) ** 2


def _verdict_for_order(vectors: np.ndarray, perm: tuple) -> CriterionVerdict:
    tf = triangularize(StateSet(vectors[list(perm)]))
    a = np.abs(tf.coeffs)
    c = float(min(a[1, 0], a[2, 0], a[3, 0]))
    L = _compute_L_raw(a)
    threshold = 1.0 if math.isinf(L) else 1.0 - 2.0 / (L + 1.0)
    detected = bool(c > threshold and a[1, 1] > DIAG_TOL)
    return CriterionVerdict(detected=detected, permutation=perm, c=c, L=L, threshold=threshold)


def check_ordering(states: StateSet) -> CriterionVerdict:
    """Evaluate the criterion for the states in the order given."""
    _require_four_twoqubit(states)
    return _verdict_for_order(states.vectors, (0, 1, 2, 3))


def scan_permutations(states: StateSet) -> CriterionVerdict:
    """Try all 24 orderings (lexicographic); first detection wins, otherwise
    the ordering with the largest margin ``c - threshold`` is reported."""
    _require_four_twoqubit(states)
    best = None
    for perm in _PERMUTATIONS4:
        verdict = _verdict_for_order(states.vectors, perm)
        if verdict.detected:
            return verdict
        if best is None or verdict.margin > best.margin:
            best = verdict
    return best


def detects(states: StateSet) -> bool:
    """Fast detection-only version of :func:`scan_permutations`."""
    _require_four_twoqubit(states)
    return _detects_vectors(states.vectors)


def _detects_vectors(vectors: np.ndarray) -> bool:
    gram = np.abs(vectors.conj() @ vectors.T)
    for first in range(4):
        rest = [i for i in range(4) if i != first]
        if min(gram[first, i] for i in rest) <= 0.5:
            continue
        for tail in itertools.permutations(rest):
            if _verdict_for_order(vectors, (first,) + tail).detected:
                return True
    return False


def scan_subsets(states: StateSet) -> list:
    """Run the permutation scan on every 4-subset of the set.

    If all subsets are certified, any global unitary leaves at least N - 3 of
    the states entangled (each 4-subset keeps at least one).
    """
    if states.dim != 4:
        raise InvalidDimensionError("the criterion applies to dimension 4 only")
    if states.n_states < 4:
        raise InvalidCountError("need at least 4 states")
    reports = []
    for subset in itertools.combinations(range(states.n_states), 4):
        verdict = scan_permutations(StateSet(states.vectors[list(subset)]))
        reports.append(SubsetReport(subset_indices=subset, verdict=verdict))
    return reports


def all_subsets_certified(reports) -> bool:
    return all(r.verdict.detected for r in reports)


def _require_four_twoqubit(states: StateSet) -> None:
    if states.dim != 4:
        raise InvalidDimensionError("the criterion applies to dimension 4 only")
    if states.n_states != 4:
        raise InvalidCountError("need exactly 4 states")
