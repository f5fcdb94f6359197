"""The affine algebra A1^(1): level-1 weights, Weyl-Kac characters, the
dominant-weight Markov chain and the conditioned space-time Brownian motion.

Weights are written x*Lambda0 + y*alpha1/2 + e*delta and stored as the triple
(level, spatial, e). The Weyl vector is (2, 1, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core_numerics import (
    DiscreteMeasure,
    derive_stream,
    gaussian_tail,
    log_euler_product,
    log_theta_difference,
    log_theta_linear,
    partition_number,
    run_blocks,
    signed_series_sum,
)

RHO = (2, 1, 0)


@dataclass(frozen=True)
class AffineWeight:
    t: float
    x: float

    def dominant(self) -> bool:
        return 0 <= self.x <= self.t


@dataclass(frozen=True)
class AffineWeylElement:
    """t_{k alpha1} (translation) or s o t_{k alpha1} (reflection)."""

    kind: str
    k: int

    def __post_init__(self) -> None:
        if self.kind not in ("translation", "reflection"):
            raise ValueError("kind must be 'translation' or 'reflection'")

    @property
    def det(self) -> int:
        return 1 if self.kind == "translation" else -1


def basic_rep_multiplicity(j: int, N: int) -> int:
    """Multiplicity of Lambda0 + j*alpha1 - N*delta in V(Lambda0)."""
    return partition_number(N - j * j)


def weyl_apply(w: AffineWeylElement, lam):
    t, y, e = lam
    k = w.k
    y2 = y + 2 * k * t
    e2 = e - (k * y + k * k * t)
    if w.kind == "reflection":
        y2 = -y2
    return (t, y2, e2)


# characters at z = a*d


def _log_numerator(level: int, y: int, a: float) -> float:
    """log sum_k (u + 2kL) exp(-a(k u + k^2 L)), u = y+1, L = level+2."""
    L = level + 2
    u = y + 1
    return a * u * u / (4.0 * L) + math.log(2.0 * L) + log_theta_linear(a * L, u / (2.0 * L))


@lru_cache(maxsize=65536)
def log_char(level: int, y: int, a: float) -> float:
    """log ch V(level*Lambda0 + y*alpha1/2) evaluated at a*d."""
    if a <= 0:
        raise ValueError("a must be positive")
    if not 0 <= y <= level:
        raise ValueError("weight is not dominant")
    return _log_numerator(level, y, a) - _log_numerator(0, 0, a)


def char_ratio(lam, a: float) -> float:
    """ch V(lam)(a*d) as the ratio of b-derivatives of the Weyl-Kac sums."""
    level, y = _level_spatial(lam)
    return math.exp(log_char(level, y, a))


def _level_spatial(lam) -> tuple[int, int]:
    if isinstance(lam, AffineWeight):
        return int(lam.t), int(lam.x)
    return int(lam[0]), int(lam[1])


def char_two_variable(level: int, y: int, a: float, b: float) -> float:
    """Weyl-Kac quotient at a*d + b*alpha1^vee, direct sums (b != 0)."""
    L = level + 2
    u = y + 1

    def num(k):
        return math.sinh(b * (u + 2 * k * L)) * math.exp(-a * (k * u + k * k * L))

    def den(k):
        return math.sinh(b * (1 + 4 * k)) * math.exp(-a * (k + 2 * k * k))

    amp = math.exp(abs(b) * (u + 1))
    top = signed_series_sum(num, gaussian_tail(a * L - 2 * abs(b), amp * (2 * L)))
    bot = signed_series_sum(den, gaussian_tail(2 * a - 2 * abs(b), amp * 4))
    return top / bot


def char_weight_series(a: float, n_max: int | None = None) -> float:
    """sum_{j,N} p(N - j^2) e^{-aN}: the level-1 character by its weights."""
    if n_max is None:
        n_max = _series_cutoff(a)
    total = []
    jm = int(math.isqrt(n_max))
    for j in range(-jm, jm + 1):
        for N in range(j * j, n_max + 1):
            total.append(basic_rep_multiplicity(j, N) * math.exp(-a * N))
    return math.fsum(total)


def _series_cutoff(a: float, tol: float = 1e-17) -> int:
    # p(n) <= exp(pi sqrt(2n/3)); stop once that times e^{-an} is negligible
    n = 1
    while math.pi * math.sqrt(2 * n / 3) - a * n > math.log(tol) or n < 10:
        n += 1
    return n + 20


def step_measure_level1(a: float, tail: float = 1e-10) -> DiscreteMeasure:
    """Law of the weight Lambda0 + j*alpha1 - N*delta: p(N-j^2) e^{-aN}/ch."""
    if a <= 0:
        raise ValueError("a must be positive")
    log_ch = log_char(1, 0, a)
    pts, ws = [], []
    mass = 0.0
    N = 0
    while mass < 1.0 - tail:
        jm = math.isqrt(N)
        for j in range(-jm, jm + 1):
            m = basic_rep_multiplicity(j, N)
            if m:
                w = math.exp(math.log(m) - a * N - log_ch)
                pts.append((j, N))
                ws.append(w)
                mass += w
        N += 1
    return DiscreteMeasure.normalized(np.array(pts), np.array(ws))


def spatial_step_law(a: float) -> tuple[np.ndarray, np.ndarray]:
    """Marginal law of the spatial step 2j of step_measure_level1."""
    # summing p(N - j^2) e^{-aN} over N gives e^{-a j^2} times the Euler product
    jm = int(math.ceil(math.sqrt(40.0 / a))) + 1
    j = np.arange(-jm, jm + 1)
    w = np.exp(-a * j * j)
    return 2 * j, w / w.sum()


# Brauer-Klimyk for V(Lambda0) (x) V(lambda)


def _bk_terms(k: int, x: int, y: int, z_max: int):
    """Affine Weyl terms (sign, j, N0) for lambda = (k, x), beta = (k+1, y).

    The weight of V(Lambda0) reached is Lambda0 + j alpha1 - (N0 + z) delta
    for the delta-shifted target beta - z delta. Terms that vanish for every
    shift z <= z_max are skipped.
    """
    if (y - x) % 2:
        return
    K = k + 3
    m = 0
    while True:
        live = False
        for mm in sorted({m, -m}):
            j = (y - x) // 2 + mm * K
            n0 = mm * (y + 1) + mm * mm * K
            j2 = mm * K - (x + y + 2) // 2
            n2 = -mm * (y + 1) + mm * mm * K
            if n0 - j * j >= -z_max:
                live = True
                yield 1, j, n0
            if n2 - j2 * j2 >= -z_max:
                live = True
                yield -1, j2, n2
        # N0 - j^2 is concave in m with its vertex at |m| < 1
        if not live and m >= 2:
            return
        m += 1


def tensor_multiplicity(lam, beta, z: int) -> int:
    """Multiplicity of V(beta - z delta) in V(Lambda0) (x) V(lam), exactly."""
    k, x = _level_spatial(lam)
    k2, y = _level_spatial(beta)
    if k2 != k + 1:
        raise ValueError("level mismatch")
    total = 0
    for sign, j, n0 in _bk_terms(k, x, y, z):
        total += sign * partition_number(n0 + z - j * j)
    return total


def tensor_mult_projected(lam, beta, a: float, z_max: int = 200000) -> float:
    """sum_z e^{-a z} mult(V(beta - z delta)) by direct delta-shift summation."""
    k, x = _level_spatial(lam)
    k2, y = _level_spatial(beta)
    if k2 != k + 1:
        raise ValueError("level mismatch")
    if (y - x) % 2 or not (0 <= y <= k2):
        return 0.0
    terms = list(_bk_terms(k, x, y, z_max))
    parts = []
    quiet = 0
    z = 0
    while z <= z_max:
        m = sum(s * partition_number(n0 + z - j * j) for s, j, n0 in terms)
        c = m * math.exp(-a * z) if m else 0.0
        parts.append(c)
        s = math.fsum(parts)
        if s > 0 and c < 1e-12 * s and z > 4:
            quiet += 1
            if quiet >= 3:
                return s
        else:
            quiet = 0
        z += 1
    raise ArithmeticError("delta-shift series did not stabilise")


def log_tensor_mult_projected(k: int, x: int, y: int, a: float) -> float:
    """log of the delta-shift sum in closed form.

    Summing over all shifts turns each Weyl term into e^{a c_w} times the
    Euler product, and the alternating sum is a difference of two Gaussian
    theta series.
    """
    if (y - x) % 2 or not (0 <= y <= k + 1):
        return -math.inf
    K = k + 3
    Q = K * (K - 1)
    bp = (y + 1) - K * (y - x)
    bm = K * (x + y + 2) - (y + 1)
    B = bp * bp / (4.0 * Q) - (y - x) ** 2 / 4.0
    lt = log_theta_difference(a * Q, bp / (2.0 * Q), bm / (2.0 * Q))
    return log_euler_product(a) + a * B + lt


def chain_kernel(lam, beta, a: float) -> float:
    """Transition probability of the projected dominant-weight chain."""
    k, x = _level_spatial(lam)
    k2, y = _level_spatial(beta)
    if k2 != k + 1:
        return 0.0
    lt = log_tensor_mult_projected(k, x, y, a)
    if lt == -math.inf:
        return 0.0
    return math.exp(log_char(k2, y, a) + lt - log_char(k, x, a) - log_char(1, 0, a))


@lru_cache(maxsize=256)
def chain_level_matrix(k: int, a: float) -> np.ndarray:
    """Transition matrix from level k (rows x=0..k) to level k+1 (cols y)."""
    m = np.zeros((k + 1, k + 2))
    for x in range(k + 1):
        for y in range(x % 2, k + 2, 2):
            m[x, y] = chain_kernel((k, x), (k + 1, y), a)
    return m


def chain_marginal(n: int, a: float | None = None) -> np.ndarray:
    """Exact law of the spatial coordinate after n steps from (0, 0)."""
    a = 2.0 / n if a is None else a
    p = np.array([1.0])
    for k in range(n):
        m = chain_level_matrix(k, a)
        p = p @ (m / m.sum(axis=1, keepdims=True))
    return p


def simulate_affine_chain(
    n: int,
    T: float = 1.0,
    a: float | None = None,
    seed: int = 0,
    replicas: int = 1,
    threads: int = 1,
    block: int = 20000,
    stream: tuple[int, ...] = (2,),
) -> np.ndarray:
    """Spatial coordinates (alpha1/2 units, unrescaled) of floor(nT) steps.

    The level after m steps is m, so dividing row m by n gives the rescaled
    path (m/n, x_m/n).
    """
    a = 2.0 / n if a is None else a
    steps = int(math.floor(n * T))
    cdfs = []
    for k in range(steps):
        m = chain_level_matrix(k, a)
        c = np.cumsum(m, axis=1)
        cdfs.append(c / c[:, -1:])

    def block_fn(b: int, start: int, count: int) -> np.ndarray:
        rng = derive_stream(seed, (*stream, b))
        u = rng.random((count, steps))
        out = np.zeros((count, steps + 1), dtype=np.int64)
        x = np.zeros(count, dtype=np.int64)
        for k in range(steps):
            c = cdfs[k][x]
            x = np.minimum((u[:, k, None] >= c).sum(axis=1), k + 1)
            out[:, k + 1] = x
        return out

    return run_blocks(block_fn, replicas, block, threads)


# the space-time harmonic function and the conditioned process


def phi_hat_2d(t: float, x: float) -> float:
    """sum_k (x + 2kt) exp(-2(kx + k^2 t)) on 0 <= x <= t."""
    if t <= 0 or not (-1e-12 <= x <= t + 1e-12):
        raise ValueError("(t, x) outside the chamber")

    def term(k):
        return (x + 2 * k * t) * math.exp(-2 * (k * x + k * k * t))

    # |term(k)| <= (3|k| t) exp(-2 t (|k|-1)^2) once |k| >= 2
    return signed_series_sum(term, gaussian_tail(2 * t, 3 * t + x))


def _interval_modes(s: float) -> np.ndarray:
    n_max = int(math.ceil(math.sqrt(80.0 / (math.pi**2 * max(s, 1e-12))))) + 3
    return np.arange(1, n_max + 1)


def interval_entrance_density(s: float, z):
    """Density at time s of Brownian motion started at 0 and conditioned to
    stay in (0, 1): 2 sin(pi z) sum_n n sin(n pi z) e^{-(n^2-1) pi^2 s / 2}."""
    z = np.asarray(z, dtype=float)
    n = _interval_modes(s)
    w = n * np.exp(-(n * n - 1.0) * math.pi**2 * s / 2.0)
    out = 2.0 * np.sin(math.pi * z) * (np.sin(np.multiply.outer(z, n) * math.pi) @ w)
    return np.where((z > 0) & (z < 1), out, 0.0)


def interval_entrance_cdf(s: float, z):
    z = np.clip(np.asarray(z, dtype=float), 0.0, 1.0)
    n = _interval_modes(s)
    w = n * np.exp(-(n * n - 1.0) * math.pi**2 * s / 2.0)
    zz = np.multiply.outer(z, np.ones_like(n, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.where(n == 1, zz, np.sin((n - 1) * math.pi * zz) / ((n - 1) * math.pi))
    hi = np.sin((n + 1) * math.pi * zz) / ((n + 1) * math.pi)
    return np.clip((lo - hi) @ w, 0.0, 1.0)


def interval_entrance_density_images(s: float, z: float) -> float:
    """Same density from the alternating image sum of heat kernels."""
    if not 0 < z < 1:
        return 0.0

    def term(k):
        v = z + 2 * k
        return v * math.exp(-v * v / (2 * s))

    acc = signed_series_sum(term, gaussian_tail(2.0 / s, 3.0))
    return (2.0 / math.pi) * math.sin(math.pi * z) * math.exp(math.pi**2 * s / 2) * acc / (
        s * math.sqrt(2 * math.pi * s)
    )


def conditioned_density(t: float, y):
    """Density of a_t for the process conditioned by phi_hat_2d from (0, 0).

    a_t / t has the law of the interval process at time 1/t.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    y = np.asarray(y, dtype=float)
    if np.any((y <= 0) | (y >= t)):
        raise ValueError("y must lie in (0, t)")
    out = interval_entrance_density(1.0 / t, y / t) / t
    return float(out) if out.ndim == 0 else out


def conditioned_density_phi(t: float, y: float) -> float:
    """Same density written with phi_hat_2d:
    (2/pi) e^{pi^2/2t} (2 pi t)^{-1/2} sin(pi y/t) e^{-y^2/2t} phi_hat_2d(t, y)."""
    c = (2.0 / math.pi) * math.exp(math.pi**2 / (2 * t)) / math.sqrt(2 * math.pi * t)
    return c * math.sin(math.pi * y / t) * math.exp(-y * y / (2 * t)) * phi_hat_2d(t, y)


def conditioned_cdf(t: float, y):
    return interval_entrance_cdf(1.0 / t, np.asarray(y, dtype=float) / t)
