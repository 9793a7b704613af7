"""Deterministic, splittable random number generation.

All sampling in this package is a pure function of a :class:`RunSeed`.
Streams are backed by numpy's counter-based Philox engine with the
128-bit key ``(seed << 64) | stream``; Gaussian draws are produced by an
explicit Box-Muller transform from 64-bit uniforms so the byte stream is
fully pinned down by this module (not by numpy's default normal
algorithm, which is free to change between releases).

Derived seeds (``RunSeed.child``) use a splitmix64-style finalizer so
that per-sample or per-restart streams are statistically independent and
order-independent, which is what makes sharded Monte-Carlo runs
reproduce single-threaded counts exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    """splitmix64 finalizer; bijective on 64-bit integers."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


@dataclass(frozen=True)
class RunSeed:
    """Seed plus stream counter; identical values reproduce draws bit-for-bit."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64):
            raise ValueError("seed must fit in 64 bits")
        if not (0 <= self.stream <= _MASK64):
            raise ValueError("stream must fit in 64 bits")

    def child(self, index: int) -> "RunSeed":
        """Derive an independent seed for sub-task `index` (sample, restart, ...)."""
        mixed = _mix64(self.seed ^ _mix64((self.stream << 1) | 1) ^ _mix64((index * _GOLDEN) & _MASK64))
        return RunSeed(mixed, index & _MASK64)

    def generator(self) -> np.random.Generator:
        key = ((self.seed & _MASK64) << 64) | (self.stream & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))


def standard_normal(gen: np.random.Generator, n: int) -> np.ndarray:
    """n standard normals via Box-Muller from 64-bit uniforms.

    Draws are consumed in pairs; for odd n the spare value is discarded.
    """
    m = (n + 1) // 2
    u1 = gen.random(m)
    u2 = gen.random(m)
    # u1 is in [0, 1); flip to (0, 1] so the log is finite
    r = np.sqrt(-2.0 * np.log1p(-u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * m)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:n]


def complex_normal(gen: np.random.Generator, shape) -> np.ndarray:
    """Array of standard complex Gaussians (independent re/im parts)."""
    n = int(np.prod(shape))
    re = standard_normal(gen, n)
    im = standard_normal(gen, n)
    return (re + 1j * im).reshape(shape)
