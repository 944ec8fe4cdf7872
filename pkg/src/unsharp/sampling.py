"""Seeded Monte Carlo draws from joint outcome tables.

Generator: xorshift64* (shifts 12, 25, 27; output multiplier
0x2545F4914F6CDD1D). A uniform double is the top 53 bits of the output times
2**-53, mapped to a cell by inverse CDF over the row-major flattened table.

Stream rule: stream k of seed s starts from splitmix64(s + k * 0x9E3779B97F4A7C15)
(mod 2**64). Parallel runs must use distinct (seed, stream) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BadN
from .uncertainty import JointProbTable, conditional_shannon

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def initial_state(seed: int, stream: int = 0) -> np.uint64:
    s = kernels.splitmix64((int(seed) + int(stream) * _GAMMA) & _MASK64)
    return np.uint64(s or _GAMMA)


@dataclass(frozen=True)
class SampleRun:
    seed: int
    n: int
    counts: np.ndarray
    labels_a: tuple[int, ...]
    labels_b: tuple[int, ...]
    stream: int = 0

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n

    def to_table(self) -> JointProbTable:
        return JointProbTable(self.labels_a, self.labels_b, self.frequencies())


def table_cdf(t: JointProbTable) -> np.ndarray:
    flat = t.p.ravel()
    cdf = np.cumsum(flat)
    # u < 1 always, so pinning the tail keeps trailing zero cells unreachable
    last = int(np.flatnonzero(flat)[-1])
    cdf[last:] = 1.0
    return cdf


def sample_table(t: JointProbTable, n: int, seed: int, stream: int = 0) -> SampleRun:
    if int(n) != n or n < 1:
        raise BadN(f"sample count must be a positive integer, got {n!r}")
    if not 0 <= int(seed) <= _MASK64:
        raise BadN(f"seed must fit in 64 unsigned bits, got {seed!r}")
    counts, _ = kernels.xorshift_sample(table_cdf(t), int(n), initial_state(seed, stream))
    counts = np.asarray(counts, dtype=np.int64).reshape(t.p.shape)
    counts.setflags(write=False)
    return SampleRun(int(seed), int(n), counts, t.labels_a, t.labels_b, int(stream))


def empirical_correlation(run: SampleRun) -> float:
    return float(np.asarray(run.labels_a) @ run.counts @ np.asarray(run.labels_b)) / run.n


def empirical_conditional_entropy(run: SampleRun) -> float:
    """Plug-in estimate of H(A|B) from the observed frequencies."""
    return conditional_shannon(run.to_table())


def sigma_mean(values: np.ndarray, probs: np.ndarray, n: int) -> float:
    """Standard error of the sample mean of ``values`` drawn with ``probs``."""
    mean = float(np.dot(values, probs))
    var = float(np.dot(values**2, probs)) - mean**2
    return float(np.sqrt(max(var, 0.0) / n))
