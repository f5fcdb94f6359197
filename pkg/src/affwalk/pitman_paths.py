"""Pitman and Levy transforms for the two walls of the affine chamber
{0 <= x <= t}, their iterates, string coordinates and time inversion.

Paths are sampled on a strictly increasing grid starting at 0. Values may
carry leading replica axes; the time axis is always the last one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_numerics import DiscreteMeasure, derive_stream, run_blocks

# spatial parts of alpha_0, alpha_1 and pairings with the coroots in the
# quotient coordinates (t, x)
ALPHA = {0: np.array([0.0, -2.0]), 1: np.array([0.0, 2.0])}
COROOT = {0: np.array([1.0, -1.0]), 1: np.array([0.0, 1.0])}


@dataclass
class SpaceTimePath:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times[0] != 0 or np.any(np.diff(self.times) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        if self.values.shape[-1] != self.times.shape[0]:
            raise ValueError("values and times differ in length")


def _correction(i: int, times: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Nonnegative running correction xi for the wall of alpha_i."""
    if i == 1:
        return 0.0 - np.minimum.accumulate(f, axis=-1)
    return 0.0 - np.minimum.accumulate(times - f, axis=-1)


def _apply(i: int, times, f, coeff: float) -> np.ndarray:
    xi = _correction(i, times, f)
    return f + coeff * ALPHA[i][1] / 2.0 * xi


def pitman_transform(i: int, path: SpaceTimePath) -> SpaceTimePath:
    """P_1 f = f - 2 inf f; P_0 f = f + 2 inf (s - f)."""
    return SpaceTimePath(path.times, _apply(i, path.times, path.values, 2.0))


def levy_transform(i: int, path: SpaceTimePath) -> SpaceTimePath:
    """L_1 f = f - inf f; L_0 f = f + inf (s - f)."""
    return SpaceTimePath(path.times, _apply(i, path.times, path.values, 1.0))


def iterate_pitman(path: SpaceTimePath, n: int, start_index: int = 0, cap: bool = True) -> SpaceTimePath:
    """L_{n+1} P_n ... P_0 applied to path, with wall indices alternating
    from start_index. Without cap the final Levy step is omitted."""
    f = path.values
    i = start_index
    for _ in range(n + 1):
        f = _apply(i, path.times, f, 2.0)
        i ^= 1
    if cap:
        f = _apply(i, path.times, f, 1.0)
    return SpaceTimePath(path.times, f)


def string_coordinates(path: SpaceTimePath, n_max: int, start_index: int = 0) -> np.ndarray:
    """xi_k(t) for k = 0..n_max, shape (n_max+1, ..., len(times)).

    Stage k adds xi_k * alpha_k to the path.
    """
    f = path.values
    i = start_index
    out = []
    for _ in range(n_max + 1):
        xi = _correction(i, path.times, f)
        out.append(xi)
        f = f + ALPHA[i][1] * xi
        i ^= 1
    return np.stack(out)


def sigma_partial(x, start_index: int = 0) -> np.ndarray:
    """sum_{k<n} x_k alpha_k + x_n alpha_n / 2 in quotient coordinates."""
    x = np.asarray(x, dtype=float)
    s = np.zeros(2)
    for k, v in enumerate(x):
        w = 1.0 if k < len(x) - 1 else 0.5
        s = s + w * v * ALPHA[(start_index + k) % 2]
    return s


def in_gamma_infinity(x, tol: float = 0.0) -> bool:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return True
    if x[0] < -tol or np.any(x < -tol):
        return False
    for k in range(1, len(x) - 1):
        if x[k] / k < x[k + 1] / (k + 1) - tol:
            return False
    return True


def in_gamma_lambda(x, lam, tol: float = 0.0) -> bool:
    """Crystal membership x in Gamma(lam), lam = (t, x) in the chamber.

    The last coordinate enters sigma with weight 1/2, as in the capped
    iteration; only stages up to len(x)-1 are checked.
    """
    x = np.asarray(x, dtype=float)
    if not in_gamma_infinity(x, tol):
        raise ValueError("x is not in Gamma(infinity)")
    lam = np.asarray(lam, dtype=float)
    sig = sigma_partial(x)
    partial = np.zeros(2)
    for k, v in enumerate(x):
        a = ALPHA[k % 2]
        lhs = float((sig - partial - 0.5 * v * a) @ COROOT[k % 2])
        if lhs > float(lam @ COROOT[k % 2]) + tol:
            return False
        partial = partial + v * a
    return True


@dataclass
class LimitResult:
    value: np.ndarray
    stages: np.ndarray
    converged: np.ndarray


def highest_weight_limit(
    path: SpaceTimePath, tol: float = 1e-6, n_max: int = 200, start_index: int = 0, n_min: int = 0
) -> LimitResult:
    """Endpoint of L_{n+1} P_n ... P_0 path once consecutive capped values
    at the endpoint differ by less than tol.

    Each replica freezes at its own stopping stage; replicas that never
    settle keep the value at n_max and are flagged.
    """
    times = path.times
    f = np.atleast_2d(path.values).astype(float)
    i = start_index
    prev = None
    value = np.full(f.shape[0], np.nan)
    stages = np.full(f.shape[0], n_max)
    done = np.zeros(f.shape[0], dtype=bool)
    for k in range(n_max + 1):
        xi = _correction(i, times, f)
        capped = f[:, -1] + 0.5 * ALPHA[i][1] * xi[:, -1]
        if prev is not None and k >= n_min:
            hit = (~done) & (np.abs(capped - prev) < tol)
            value[hit] = capped[hit]
            stages[hit] = k
            done |= hit
            if done.all():
                break
        prev = capped
        f = f + ALPHA[i][1] * xi
        i ^= 1
    value[~done] = prev[~done]
    return LimitResult(value, stages, done)


def brownian_paths(times: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    dt = np.diff(times)
    inc = rng.standard_normal((count, len(dt))) * np.sqrt(dt)
    out = np.zeros((count, len(times)))
    np.cumsum(inc, axis=1, out=out[:, 1:])
    return out


def log_grid(lo: float, hi: float, points: int) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(lo, hi, points)])


def time_inversion_pipeline(times: np.ndarray, b: np.ndarray, n: int, t_out: np.ndarray | None = None) -> tuple:
    """t -> t * (L_{n+1} P_n ... P_0 b)(1/t) on the inverted grid.

    b is sampled on times (starting at 0). Returns (t, values) with t the
    reciprocals of the positive forward times, in increasing order.
    """
    path = SpaceTimePath(times, b)
    g = iterate_pitman(path, n).values
    s = times[1:]
    t = 1.0 / s[::-1]
    vals = t * g[..., 1:][..., ::-1]
    if t_out is not None:
        idx = np.abs(t[None, :] - np.atleast_1d(t_out)[:, None]).argmin(axis=1)
        return t[idx], vals[..., idx]
    return t, vals


def sample_lambda(
    t_end: float,
    replicas: int,
    seed: int,
    grid: np.ndarray | None = None,
    n_stages: int = 40,
    threads: int = 1,
    block: int = 2000,
    stream: tuple[int, ...] = (3,),
) -> np.ndarray:
    """Pairs (b_t, capped value at t) after n_stages Pitman steps."""
    if grid is None:
        grid = default_grid(t_end)

    def block_fn(bi: int, start: int, count: int) -> np.ndarray:
        rng = derive_stream(seed, (*stream, bi))
        f = brownian_paths(grid, count, rng)
        g = iterate_pitman(SpaceTimePath(grid, f), n_stages).values
        return np.stack([f[:, -1], g[:, -1]], axis=1)

    return run_blocks(block_fn, replicas, block, threads)


def default_grid(t_end: float = 1.0, step: float = 1e-3) -> np.ndarray:
    return np.linspace(0.0, t_end, int(round(t_end / step)) + 1)


def inversion_grid(t_min: float = 1e-3, t_max: float = 1.0, step: float = 1e-3, points: int = 200) -> np.ndarray:
    """Forward grid for time inversion: uniform up to 1/t_max, geometric
    from there to 1/t_min, so the inverted grid spans [t_min, t_max]."""
    s1 = 1.0 / t_max
    head = np.linspace(0.0, s1, int(round(s1 / step)) + 1)
    if t_min >= t_max:
        return head
    tail = np.geomspace(s1, 1.0 / t_min, points + 1)[1:]
    return np.concatenate([head, tail])


def consecutive_gap(path: SpaceTimePath, n: int, start_index: int = 0) -> np.ndarray:
    """sup over the grid of |P_{n+1}...P_0 f - P_n...P_0 f|.

    The two iterates differ by 2 xi_{n+1}, a running maximum, so the sup
    sits at the last grid point.
    """
    xi = string_coordinates(path, n + 1, start_index)[n + 1]
    return 2.0 * np.max(xi, axis=-1)


def sample_gaps(
    ns,
    replicas: int,
    seed: int,
    grid: np.ndarray | None = None,
    threads: int = 1,
    block: int = 1000,
    stream: tuple[int, ...] = (7,),
) -> np.ndarray:
    """Consecutive-iterate gaps at the end of the grid, one column per n."""
    ns = sorted(int(n) for n in ns)
    if grid is None:
        grid = default_grid(1.0)

    def block_fn(bi: int, start: int, count: int) -> np.ndarray:
        rng = derive_stream(seed, (*stream, bi))
        f = brownian_paths(grid, count, rng)
        out = np.empty((count, len(ns)))
        col = {n + 1: j for j, n in enumerate(ns)}
        i = 0
        for k in range(ns[-1] + 2):
            xi = _correction(i, grid, f)
            if k in col:
                out[:, col[k]] = 2.0 * xi[:, -1]
            f += ALPHA[i][1] * xi
            i ^= 1
        return out

    return run_blocks(block_fn, replicas, block, threads)


def sample_interval(
    t_out: float,
    replicas: int,
    seed: int,
    n_stages: int = 40,
    grid: np.ndarray | None = None,
    threads: int = 1,
    block: int = 2000,
    stream: tuple[int, ...] = (8,),
) -> np.ndarray:
    """Values at t_out of the time-inverted pipeline, one per replica."""
    if grid is None:
        grid = inversion_grid(t_max=max(t_out, 1e-3))

    def block_fn(bi: int, start: int, count: int) -> np.ndarray:
        rng = derive_stream(seed, (*stream, bi))
        b = brownian_paths(grid, count, rng)
        _, v = time_inversion_pipeline(grid, b, n_stages, np.array([t_out]))
        return v[:, 0]

    return run_blocks(block_fn, replicas, block, threads)


def dh_conditional_histogram(
    t: float,
    lam_bin: tuple[float, float],
    replicas: int,
    seed: int,
    samples: np.ndarray | None = None,
    bins: int = 40,
    **kw,
) -> DiscreteMeasure:
    """Empirical law of b_t given that the capped limit at t lies in lam_bin."""
    lo, hi = lam_bin
    if not (0 < lo < hi < t):
        raise ValueError("bin must sit inside the chamber interior")
    if samples is None:
        samples = sample_lambda(t, replicas, seed, **kw)
    sel = samples[(samples[:, 1] >= lo) & (samples[:, 1] < hi), 0]
    if sel.size == 0:
        raise ValueError("no replica fell in the bin")
    mid = 0.5 * (lo + hi)
    edges = np.linspace(mid - t, mid + t, bins + 1)
    h, _ = np.histogram(np.clip(sel, edges[0], edges[-1]), bins=edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    return DiscreteMeasure.normalized(centers[:, None], h / h.sum())
