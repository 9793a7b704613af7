"""Monte-Carlo estimation of the relative volume of absolutely entangled sets,
the parameter-counting saturation threshold, and the block-sum diagnostics.

Sampling uses one derived seed per sample index, so sharding the sample range
over any number of workers reproduces the single-threaded detection count
exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from multiprocessing import Pool

import numpy as np

from .constructions import star_amin
from .core import Partition, StateSet
from .criterion import _detects_vectors
from .errors import (
    InvalidCountError,
    NotUnitaryError,
    PartitionMismatchError,
    UnsupportedConfigurationError,
)
from .optimizer import OptimizerConfig, minimize_total_entropy
from .rng import RunSeed, complex_normal
from .separability import Unitary


CHAIN_TOL = 1e-9


@dataclass(frozen=True)
class VolumeEstimate:
    partition: Partition
    n_states: int
    samples: int
    detected: int
    fraction: float
    stddev_counts: float  # sqrt(samples * f * (1 - f)), binomial bookkeeping
    method: str  # "criterion-only" | "criterion-then-optimizer"
    seed: RunSeed


@dataclass(frozen=True)
class BlockSums:
    S: tuple
    B: tuple
    T: tuple
    total: float  # I = N - 1


@dataclass(frozen=True)
class ChainReport:
    D: tuple
    S: tuple
    violations: tuple  # 1-based chain indices with S^(i) <= D_i
    first_violation: int
    inconclusive: bool  # parameter at or below the closed-form threshold


def saturation_threshold(d1: int, d2: int) -> int:
    """floor((d1+1)(d2+1)/2): above this set size almost every set is AES."""
    if d1 < 2 or d2 < 2:
        raise InvalidCountError("factors must be >= 2")
    return (d1 + 1) * (d2 + 1) // 2


def separability_constraint_count(n: int, d1: int, d2: int) -> int:
    """Real constraints imposed by separability of all n states."""
    return 2 * n * (d1 - 1) * (d2 - 1)


def local_quotient_parameter_count(d1: int, d2: int) -> int:
    """Real parameters of SU(d) modulo local unitaries."""
    return (d1 * d1 - 1) * (d2 * d2 - 1)


def _sample_vectors(d: int, n: int, seed: RunSeed, index: int) -> np.ndarray:
    z = complex_normal(seed.child(index).child(0).generator(), (n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _count_criterion(args) -> int:
    seed, start, stop = args
    count = 0
    for i in range(start, stop):
        if _detects_vectors(_sample_vectors(4, 4, seed, i)):
            count += 1
    return count


def estimate_volume_lower(p: Partition, n: int, samples: int, seed: RunSeed,
                          workers: int = 1) -> VolumeEstimate:
    """Criterion-only lower-bound estimator (restricted to (2,2) with 4 states)."""
    if tuple(p.factors) != (2, 2) or n != 4:
        raise UnsupportedConfigurationError("the criterion covers (2,2) with N = 4 only")
    if samples < 1:
        raise InvalidCountError("need at least one sample")
    detected = _run_sharded(_count_criterion, seed, samples, workers)
    return _estimate(p, n, samples, detected, "criterion-only", seed)


def _count_full(args) -> int:
    seed, start, stop, p_factors, n, cfg = args
    p = Partition(p_factors)
    d = p.product
    count = 0
    for i in range(start, stop):
        vectors = _sample_vectors(d, n, seed, i)
        if _classify_sample(vectors, p, n, cfg, seed.child(i).child(1)):
            count += 1
    return count


def _classify_sample(vectors: np.ndarray, p: Partition, n: int,
                     cfg: OptimizerConfig, opt_seed: RunSeed) -> bool:
    if p.product == 4 and n >= 4:
        for subset in itertools.combinations(range(n), 4):
            if _detects_vectors(vectors[list(subset)]):
                return True
    result = minimize_total_entropy(StateSet(vectors), p, replace(cfg, seed=opt_seed))
    return result.classified_aes


def estimate_volume(p: Partition, n: int, samples: int, seed: RunSeed,
                    cfg: OptimizerConfig = OptimizerConfig(),
                    workers: int = 1) -> VolumeEstimate:
    """Criterion-first, optimizer-fallback estimator of the relative AES volume."""
    if samples < 1:
        raise InvalidCountError("need at least one sample")
    if n < 1:
        raise InvalidCountError("need at least one state per set")
    args_extra = (tuple(p.factors), n, cfg)
    detected = _run_sharded(_count_full, seed, samples, workers, args_extra)
    return _estimate(p, n, samples, detected, "criterion-then-optimizer", seed)


def _run_sharded(counter, seed: RunSeed, samples: int, workers: int, extra=()) -> int:
    if workers <= 1:
        return counter((seed, 0, samples) + extra)
    bounds = np.linspace(0, samples, workers + 1).astype(int)
    tasks = [(seed, int(a), int(b)) + extra for a, b in zip(bounds[:-1], bounds[1:])]
    with Pool(processes=workers) as pool:
        return sum(pool.map(counter, tasks))


def _estimate(p, n, samples, detected, method, seed) -> VolumeEstimate:
    f = detected / samples
    return VolumeEstimate(
        partition=p, n_states=n, samples=samples, detected=detected,
        fraction=f, stddev_counts=math.sqrt(samples * f * (1.0 - f)),
        method=method, seed=seed,
    )


def _reduced_unitary(us, d: int) -> np.ndarray:
    """Validate and strip to the (d-1) x (d-1) block acting on xi_2..xi_d."""
    mat = us.entries if isinstance(us, Unitary) else np.asarray(us, dtype=complex)
    if mat.shape == (d, d):
        if abs(abs(mat[0, 0]) - 1.0) > 1e-10:
            raise NotUnitaryError("unitary must fix the image of xi_1 up to phase")
        mat = mat[1:, 1:]
    if mat.shape != (d - 1, d - 1):
        raise PartitionMismatchError(f"expected a {d-1}x{d-1} or {d}x{d} matrix")
    residual = np.max(np.abs(mat.conj().T @ mat - np.eye(d - 1)))
    if residual > 1e-10:
        raise NotUnitaryError(f"unitarity residual {residual:.3e}")
    return mat


def block_sums(us, p: Partition, n: int) -> BlockSums:
    """Squared-norm sums over the nested column blocks of the first n-1 rows.

    Columns are indexed by the 0-based flat basis index f = 1..d-1. At chain
    level i the region is f < tail_{i-1}; the inner block S collects
    f < tail_i, the comb B collects the columns f = m * tail_i, and T is the
    remainder (tail_i is the product of factors after the i-th).
    """
    d = p.product
    if n < 2 or n > d:
        raise InvalidCountError("need 2 <= n <= d")
    mat = _reduced_unitary(us, d)
    m = np.abs(mat[: n - 1, :]) ** 2
    tails = p.tail_products()  # tails[0] = d
    S, B, T = [], [], []
    for i in range(1, p.k):
        region = tails[i - 1]  # columns f = 1..region-1 at this level
        tail = tails[i]
        s_val = float(m[:, 0 : tail - 1].sum())  # f in 1..tail-1 -> cols 0..tail-2
        b_cols = [mm * tail - 1 for mm in range(1, p.factors[i - 1])]
        b_val = float(m[:, b_cols].sum())
        t_cols = [f - 1 for f in range(1, region) if f >= tail and f % tail != 0]
        t_val = float(m[:, t_cols].sum())
        S.append(s_val)
        B.append(b_val)
        T.append(t_val)
    return BlockSums(S=tuple(S), B=tuple(B), T=tuple(T), total=float(m.sum()))


def necessary_condition_chain(states: StateSet, us, p: Partition) -> ChainReport:
    """Evaluate the chain S^(i) > D_i required for a unitary to make the whole
    star family separable; the last link always fails, pinning down a witness.

    The report is conclusive (certifies an entangled image) only when the
    family parameter exceeds the closed-form threshold; below it the report
    carries ``inconclusive=True``.
    """
    n = states.n_states
    report = star_amin(p)
    if n != report.n_states:
        raise InvalidCountError(f"expected the {report.n_states}-state family for {p}")
    a = float(abs(states.vectors[1, 0]))
    sums = block_sums(us, p, n)
    violations = tuple(
        i + 1 for i, (s, dd) in enumerate(zip(sums.S, report.D)) if s <= dd + CHAIN_TOL
    )
    return ChainReport(
        D=report.D,
        S=sums.S,
        violations=violations,
        first_violation=violations[0] if violations else 0,
        inconclusive=a <= report.amin_max,
    )
