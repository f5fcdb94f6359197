"""Shared numerics: heat kernels, signed lattice sums, partitions, KS
statistics and seeded random streams."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import stats

K_MAX = 10**6
MASS_TOL = 1e-9


def heat_kernel(t: float, x, y):
    """Gaussian transition density p_t(x, y) on the line."""
    if t <= 0:
        raise ValueError("heat kernel needs t > 0")
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    out = np.exp(-d * d / (2.0 * t)) / math.sqrt(2.0 * math.pi * t)
    return float(out) if out.ndim == 0 else out


def signed_series_sum(
    term: Callable[[int], float],
    tail_bound: Callable[[int], float],
    tol: float = 1e-12,
    k_max: int = K_MAX,
) -> float:
    """Sum term(k) over all integers k.

    The window [-K, K] grows until tail_bound(K), a bound on the mass of
    all terms with |k| > K, drops below tol.
    """
    parts = [term(0)]
    k = 0
    while tail_bound(k) >= tol:
        k += 1
        if k > k_max:
            raise ArithmeticError("series tail did not drop below tolerance")
        parts.append(term(k))
        parts.append(term(-k))
    return math.fsum(parts)


def gaussian_tail(scale: float, amp: float = 1.0) -> Callable[[int], float]:
    """Tail bound for terms dominated by amp*(1+|k|)*exp(-scale*(|k|-1)^2)."""

    def bound(k: int) -> float:
        if k < 2:
            return math.inf
        m = k - 1
        return 4.0 * amp * (k + 2) * math.exp(-scale * m * m) / max(1.0 - math.exp(-scale), 1e-300)

    return bound


# theta-type sums with a Poisson-dual branch for small A


def _direct_window(A: float) -> int:
    return int(math.ceil(math.sqrt(40.0 / A))) + 2


def _dual_window(A: float) -> int:
    return int(math.ceil(math.sqrt(40.0 * A) / math.pi)) + 2


def log_theta_linear(A: float, c: float) -> float:
    """log of sum_k (k+c) exp(-A (k+c)^2) for 0 < c < 1/2.

    The sum is positive there. For small A the direct sum cancels
    catastrophically, so the Poisson-resummed form is used instead.
    """
    if not 0.0 < c < 0.5 + 1e-15:
        raise ValueError("c must lie in (0, 1/2]")
    if A >= math.pi:
        K = _direct_window(A)
        ks = np.arange(-K, K + 1)
        v = ks + c
        s = math.fsum(v * np.exp(-A * v * v))
        return math.log(s) if s > 0 else -math.inf
    R = _dual_window(A)
    r = np.arange(1, R + 1)
    lead = math.pi**2 / A
    w = r * np.exp(-lead * (r * r - 1.0)) * np.sin(2.0 * math.pi * r * c)
    s = math.fsum(w)
    if s <= 0:
        return -math.inf
    return math.log(2.0 * math.pi / A) + 0.5 * math.log(math.pi / A) - lead + math.log(s)


def log_theta_difference(A: float, mu1: float, mu2: float) -> float:
    """log of sum_m [exp(-A (m-mu1)^2) - exp(-A (m-mu2)^2)].

    Returns -inf when the difference vanishes to working precision.
    """
    if A >= math.pi:
        K = _direct_window(A)
        m = np.arange(-K, K + 1)
        base = math.floor(mu1)
        m1 = m + base
        base2 = math.floor(mu2)
        m2 = m + base2
        s = math.fsum(np.concatenate([np.exp(-A * (m1 - mu1) ** 2), -np.exp(-A * (m2 - mu2) ** 2)]))
        return math.log(s) if s > 1e-300 else -math.inf
    R = _dual_window(A)
    r = np.arange(1, R + 1)
    lead = math.pi**2 / A
    w = np.exp(-lead * (r * r - 1.0)) * (
        np.cos(2.0 * math.pi * r * mu1) - np.cos(2.0 * math.pi * r * mu2)
    )
    s = math.fsum(w)
    if s <= 1e-15 * R:
        return -math.inf
    return math.log(2.0) + 0.5 * math.log(math.pi / A) - lead + math.log(s)


@lru_cache(maxsize=None)
def _partition_table(m: int) -> tuple[int, ...]:
    p = [1] + [0] * m
    for n in range(1, m + 1):
        total = 0
        j = 1
        while True:
            g1 = j * (3 * j - 1) // 2
            if g1 > n:
                break
            sign = 1 if j % 2 else -1
            total += sign * p[n - g1]
            g2 = j * (3 * j + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            j += 1
        p[n] = total
    return tuple(p)


def partition_table(m: int) -> tuple[int, ...]:
    """p(0), ..., p(m) by the pentagonal-number recurrence."""
    size = 64
    while size < m:
        size *= 2
    return _partition_table(size)[: m + 1]


def partition_number(m: int) -> int:
    if m < 0:
        return 0
    return partition_table(m)[m]


@lru_cache(maxsize=1024)
def log_euler_product(a: float) -> float:
    """log of prod_{n>=1} 1/(1 - e^{-a n})."""
    if a <= 0:
        raise ValueError("a must be positive")
    n_max = int(math.ceil(40.0 / a)) + 1
    n = np.arange(1, n_max + 1)
    return -float(np.sum(np.log1p(-np.exp(-a * n))))


@dataclass
class DiscreteMeasure:
    """Finite measure with atoms (rows of points) and weights summing to 1."""

    points: np.ndarray
    weights: np.ndarray
    deficit: float = 0.0

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.shape[0] != self.weights.shape[0]:
            raise ValueError("points and weights differ in length")
        if np.any(self.weights < 0):
            raise ValueError("negative weight")

    @classmethod
    def normalized(cls, points, weights, max_deficit: float = MASS_TOL) -> "DiscreteMeasure":
        """Renormalize raw weights whose total should be 1 up to truncation."""
        w = np.asarray(weights, dtype=float)
        total = float(w.sum())
        deficit = abs(1.0 - total)
        if deficit > max_deficit:
            raise ValueError(f"mass deficit {deficit:.3e} exceeds {max_deficit:.1e}")
        return cls(points, w / total, deficit)

    def total(self) -> float:
        return float(self.weights.sum())

    def mean(self) -> np.ndarray:
        return np.tensordot(self.weights, self.points, axes=(0, 0))

    def __len__(self) -> int:
        return len(self.weights)


@dataclass
class EmpiricalSample:
    values: np.ndarray
    seed: int
    stream: tuple[int, ...] = ()
    replicas: int = field(default=0)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if not self.replicas:
            self.replicas = len(self.values)


def _values(sample) -> np.ndarray:
    v = sample.values if isinstance(sample, EmpiricalSample) else sample
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("empty sample")
    return v


def ks_statistic(sample, cdf: Callable) -> float:
    """Sup distance between the empirical CDF of sample and cdf."""
    return float(stats.kstest(_values(sample), cdf).statistic)


def ks_two_sample(a, b) -> float:
    return float(stats.ks_2samp(_values(a), _values(b)).statistic)


def lattice_jitter(values: np.ndarray, cell: float, rng: np.random.Generator) -> np.ndarray:
    """Spread lattice-valued samples uniformly over cells of width cell.

    A KS distance against a continuous law is otherwise dominated by the
    jump of the empirical CDF at each atom.
    """
    return np.asarray(values, dtype=float) + cell * (rng.random(np.shape(values)) - 0.5)


def derive_stream(seed: int, path: Sequence[int] = ()) -> np.random.Generator:
    """Counter-based generator keyed by (seed, path)."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def block_layout(replicas: int, block: int) -> list[tuple[int, int]]:
    """Fixed (start, size) blocks; results never depend on worker count."""
    return [(s, min(block, replicas - s)) for s in range(0, replicas, block)]


def run_blocks(fn: Callable[[int, int, int], np.ndarray], replicas: int, block: int, threads: int = 1):
    """Evaluate fn(block_index, start, size) over all blocks, in order.

    Each block draws from its own stream, so the concatenated result is
    independent of the number of threads.
    """
    layout = block_layout(replicas, block)
    if threads <= 1 or len(layout) == 1:
        parts = [fn(i, s, n) for i, (s, n) in enumerate(layout)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda a: fn(a[0], *a[1]), enumerate(layout)))
    return np.concatenate(parts, axis=0)
