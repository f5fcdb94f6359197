"""Walks on the sl2 weight lattice: Schur functions, the Doob transform of
the killed drifted walk, Clebsch-Gordan kernels and the Bessel(3) limit."""

from __future__ import annotations

import math

import numpy as np

from .core_numerics import DiscreteMeasure, derive_stream, heat_kernel, run_blocks


def _check_q(q: float) -> None:
    if q <= 0:
        raise ValueError("q must be positive")


def schur_value(x: int, q: float) -> float:
    """Character of V(x) at q: (q^{x+1} - q^{-(x+1)}) / (q - 1/q)."""
    _check_q(q)
    if x < -1:
        raise ValueError("x must be >= -1")
    if q == 1.0:
        return float(x + 1)
    g = math.log(q)
    return math.sinh((x + 1) * g) / math.sinh(g)


def walk_kernel(x: int, y: int, q: float) -> float:
    _check_q(q)
    if abs(x - y) != 1:
        return 0.0
    return q ** (y - x) / (q + 1.0 / q)


def _h(x: int, q: float) -> float:
    return q ** (-x) * schur_value(x, q)


def doob_kernel(x: int, y: int, q: float) -> float:
    """Killed walk conditioned to stay nonnegative, via h(x) = q^{-x} s_x(q)."""
    if x < 0 or y < 0:
        raise ValueError("states are nonnegative")
    k = walk_kernel(x, y, q)
    if k == 0.0:
        return 0.0
    return _h(y, q) / _h(x, q) * k


def _free_n_step(x: int, y: int, n: int, q: float) -> float:
    d = y - x
    if abs(d) > n or (n - d) % 2:
        return 0.0
    up = (n + d) // 2
    return math.comb(n, up) * q**d / (q + 1.0 / q) ** n


def reflected_n_step(x: int, y: int, n: int, q: float) -> float:
    """n-step transition of the Doob chain by the reflection principle."""
    _check_q(q)
    if x < 0 or y < 0:
        return 0.0
    killed = _free_n_step(x, y, n, q) - q ** (2 * y + 2) * _free_n_step(x, -y - 2, n, q)
    return _h(y, q) / _h(x, q) * killed


def doob_matrix(size: int, q: float) -> np.ndarray:
    """Doob kernel on the window {0, ..., size-1}; rows near the top leak."""
    m = np.zeros((size, size))
    for x in range(size):
        for y in (x - 1, x + 1):
            if 0 <= y < size:
                m[x, y] = doob_kernel(x, y, q)
    return m


def step_measure(omega: int, q: float) -> DiscreteMeasure:
    """Weights q^y / ch V(omega)(q) on {-omega, -omega+2, ..., omega}."""
    _check_q(q)
    if omega < 1:
        raise ValueError("omega must be >= 1")
    ys = np.arange(-omega, omega + 1, 2)
    w = np.array([q**float(y) for y in ys])
    return DiscreteMeasure.normalized(ys[:, None], w / schur_value(omega, q))


def weight_mult(omega: int, y: int) -> int:
    """Multiplicity (0 or 1) of weight y in V(omega)."""
    return int(abs(y) <= omega and (omega - y) % 2 == 0)


def clebsch_gordan_mult(x: int, omega: int, z: int) -> int:
    """Multiplicity of V(z) in V(omega) (x) V(x), Brauer-Klimyk form."""
    return weight_mult(omega, z - x) - weight_mult(omega, -(z + 1) - (x + 1))


def rep_markov_kernel(x: int, omega: int, z: int, q: float) -> float:
    if x < 0 or z < 0:
        raise ValueError("states are nonnegative")
    m = clebsch_gordan_mult(x, omega, z)
    if m == 0:
        return 0.0
    return schur_value(z, q) / (schur_value(x, q) * schur_value(omega, q)) * m


def bessel3_transition(x: float, y: float, t: float, gamma: float = 0.0) -> float:
    """Transition density of Brownian motion with drift gamma conditioned to
    stay positive; x = 0 gives the entrance density."""
    if t <= 0:
        raise ValueError("t must be positive")
    if y < 0:
        raise ValueError("y must be nonnegative")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if y == 0:
        return 0.0
    if x == 0:
        if gamma == 0:
            return math.sqrt(2.0 / math.pi) * t**-1.5 * y * y * math.exp(-y * y / (2 * t))
        return -math.expm1(-2 * gamma * y) * y / (gamma * t) * heat_kernel(t, gamma * t, y)
    # the Gaussian kernels carry the drift: p_t(x + gamma t, y)
    shift = gamma * t
    killed = heat_kernel(t, x + shift, y) - math.exp(-2 * gamma * x) * heat_kernel(t, -x + shift, y)
    if gamma == 0:
        return y / x * killed
    return -math.expm1(-2 * gamma * y) / -math.expm1(-2 * gamma * x) * killed


def bessel3_entrance_cdf(y, t: float = 1.0):
    """CDF of the norm of a 3-dimensional Gaussian with variance t."""
    from scipy import stats

    return stats.chi.cdf(np.asarray(y) / math.sqrt(t), df=3)


def _transition_table(omega: int, q: float, size: int) -> np.ndarray:
    """Row-wise cumulative transition table over z = x - omega + 2i."""
    tab = np.zeros((size, omega + 1))
    for x in range(size):
        row = [
            rep_markov_kernel(x, omega, z, q) if z >= 0 else 0.0
            for z in range(x - omega, x + omega + 1, 2)
        ]
        c = np.cumsum(row)
        tab[x] = c / c[-1]
    return tab


def simulate_doob_chain(
    n_steps: int,
    omega: int = 1,
    q: float = 1.0,
    seed: int = 0,
    replicas: int = 1,
    threads: int = 1,
    block: int = 20000,
    stream: tuple[int, ...] = (1,),
) -> np.ndarray:
    """Paths of the chain with kernel rep_markov_kernel started at 0.

    Returns an integer array of shape (replicas, n_steps + 1).
    """
    size = n_steps * omega + omega + 2
    tab = _transition_table(omega, q, size)

    def block_fn(b: int, start: int, count: int) -> np.ndarray:
        rng = derive_stream(seed, (*stream, b))
        u = rng.random((count, n_steps))
        path = np.zeros((count, n_steps + 1), dtype=np.int64)
        x = np.zeros(count, dtype=np.int64)
        for s in range(n_steps):
            cdf = tab[x]
            i = (u[:, s, None] >= cdf).sum(axis=1)
            i = np.minimum(i, omega)
            x = x - omega + 2 * i
            path[:, s + 1] = x
        return path

    return run_blocks(block_fn, replicas, block, threads)
