"""SU(2) as unit quaternions: exponentials, radial parts in the alcove,
the radial process of a Brownian sheet, Haar sampling and the
Kirillov-Frenkel conditional expectation.

Algebra coordinates v = (v1, v2, v3) stand for i*pi*(v1 s1 + v2 s2 + v3 s3)
with s_k the Pauli matrices, so v3 is the coordinate along alpha1/2 (the
root alpha1 takes the value v3 on the Cartan element i*pi*v3*s3).
Quaternion units i, j, k are the matrices -i s1, -i s2, -i s3, which makes
the Hamilton product agree with the matrix product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_numerics import derive_stream, run_blocks, signed_series_sum, gaussian_tail


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product along the last axis, (w, x, y, z) layout."""
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def qinv(q: np.ndarray) -> np.ndarray:
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def identity(shape=()) -> np.ndarray:
    out = np.zeros((*shape, 4))
    out[..., 0] = 1.0
    return out


def su2_exp(v: np.ndarray) -> np.ndarray:
    """exp(i pi v.s) = cos(pi|v|) + i sin(pi|v|) (v/|v|).s as a quaternion
    (vector part -sin(pi|v|) v/|v| in the units above)."""
    v = np.asarray(v, dtype=float)
    r = np.sqrt(np.sum(v * v, axis=-1))
    ang = math.pi * r
    # sin(pi r)/r, continuous at r = 0
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(r > 1e-8, np.sin(ang) / np.where(r > 0, r, 1.0), math.pi * (1 - ang * ang / 6))
    out = np.empty((*v.shape[:-1], 4))
    out[..., 0] = np.cos(ang)
    out[..., 1:] = -v * k[..., None]
    return out


def to_matrix(q: np.ndarray) -> np.ndarray:
    """2x2 unitary matrix of a quaternion: w - x(i s1) - y(i s2) - z(i s3)."""
    w, x, y, z = q
    return np.array([[w - 1j * z, -1j * x - y], [-1j * x + y, w + 1j * z]])


def normalize(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def stochastic_exponential(tau: float, increments: np.ndarray, step: float | None = None) -> np.ndarray:
    """Left-to-right product of exp(dx_i / tau) over the time axis (-2)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if step is not None and step <= 0:
        raise ValueError("step must be positive")
    inc = np.asarray(increments, dtype=float)
    x = identity(inc.shape[:-2])
    for i in range(inc.shape[-2]):
        x = qmul(x, su2_exp(inc[..., i, :] / tau))
    return normalize(x)


def radial_part(X: np.ndarray, tau: float) -> np.ndarray:
    """Alcove coordinate a in [0, tau] with X conjugate to exp(a/tau)."""
    w = np.clip(np.asarray(X)[..., 0], -1.0, 1.0)
    theta = np.arccos(w) / (2 * math.pi)
    return 2 * tau * theta


@dataclass
class SheetSample:
    radial: np.ndarray  # (replicas, len(t_grid))
    cartan: np.ndarray  # (replicas, len(t_grid)) alpha1/2 coordinate of x_1^t


def sheet_radial_process(
    t_grid,
    s_step: float = 1e-3,
    seed: int = 0,
    replicas: int = 1,
    threads: int = 1,
    block: int = 5000,
    stream: tuple[int, ...] = (4,),
) -> SheetSample:
    """Radial part at each level t of the stochastic exponential of x^t / t.

    The sheet x_s^t is built from independent Brownian paths in s, one per
    level increment, each coordinate with variance (t_j - t_{j-1}) per unit
    s, so that the Cartan coordinate of x_1^t is a standard Brownian motion
    in t.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0) or t_grid[0] <= 0:
        raise ValueError("t_grid must be positive and increasing")
    n_s = int(round(1.0 / s_step))
    dts = np.diff(np.concatenate([[0.0], t_grid]))

    def block_fn(b: int, start: int, count: int) -> np.ndarray:
        rng = derive_stream(seed, (*stream, b))
        X = identity((count, len(t_grid)))
        cart = np.zeros((count, len(t_grid)))
        for i in range(n_s):
            # one s-step of every level's sheet, built incrementally in t
            dx = rng.standard_normal((count, len(t_grid), 3)) * np.sqrt(dts * s_step)[None, :, None]
            dx = np.cumsum(dx, axis=1)
            X = qmul(X, su2_exp(dx / t_grid[None, :, None]))
            cart += dx[..., 2]
            if i % 64 == 63:
                X = normalize(X)
        X = normalize(X)
        rad = radial_part(X, 1.0) * t_grid[None, :]
        return np.stack([rad, cart], axis=-1)

    out = run_blocks(block_fn, replicas, block, threads)
    return SheetSample(out[..., 0], out[..., 1])


def haar_su2(rng: np.random.Generator, size=()) -> np.ndarray:
    g = rng.standard_normal((*np.atleast_1d(size), 4)) if size != () else rng.standard_normal(4)
    return normalize(g)


def torus(x) -> np.ndarray:
    """T_x = diag(e^{2 i pi x}, e^{-2 i pi x})."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((*x.shape, 4))
    out[..., 0] = np.cos(2 * math.pi * x)
    out[..., 3] = -np.sin(2 * math.pi * x)
    return out


def conjugation_product_radial(
    a: float, b: float, seed: int = 0, draws: int = 1, threads: int = 1, block: int = 200000, stream=(5,)
) -> np.ndarray:
    """Radial coordinate in [0, 1] of u T_{a/2} u^{-1} T_{b/2}, u Haar."""
    if not (0 <= a <= 1 and 0 <= b <= 1):
        raise ValueError("a and b must lie in [0, 1]")
    ta = torus(a / 2)
    tb = torus(b / 2)

    def block_fn(bi: int, start: int, count: int) -> np.ndarray:
        rng = derive_stream(seed, (*stream, bi))
        u = haar_su2(rng, count)
        g = qmul(qmul(qmul(u, ta), qinv(u)), tb)
        return radial_part(g, 1.0)

    return run_blocks(block_fn, draws, block, threads)


# Kirillov-Frenkel


def _weyl_sum(theta: float, xc: float, tau: float, a: float, deriv: int = 0) -> float:
    """Affine Weyl orbit sum of exp<w(tau L0 + phi_a), theta d + X>, or its
    derivatives in X, with xi = xc/2 the pairing of alpha1/2 with X."""
    xi = xc / 2.0

    def term(m):
        e1 = -theta * (m * a + m * m * tau)
        c1 = a + 2 * m * tau
        e2 = theta * (m * a - m * m * tau)
        c2 = -a + 2 * m * tau
        return (c1 / 2.0) ** deriv * math.exp(e1 + c1 * xi) - (c2 / 2.0) ** deriv * math.exp(e2 + c2 * xi)

    amp = (abs(a) + 2 * tau + 1) ** (deriv + 1) * math.exp(abs(xi) * (a + 2 * tau))
    scale = max(theta * tau - 2 * abs(xi) * tau, 1e-3)
    return signed_series_sum(term, gaussian_tail(scale, amp))


def phi_hat_general(theta: float, xc: float, tau: float, a: float) -> float:
    """phi_hat_{theta d + X}(tau Lambda0 + phi_a) for rank one.

    The prefactor is 1/sin(pi xc / theta); where it blows up the Weyl sum
    vanishes and the value is taken by continuity.
    """
    if theta <= 0 or tau <= 0:
        raise ValueError("theta and tau must be positive")
    s = math.sin(math.pi * xc / theta)
    if abs(s) > 1e-6:
        return _weyl_sum(theta, xc, tau, a) / s
    # l'Hopital in xc
    ds = math.pi / theta * math.cos(math.pi * xc / theta)
    return _weyl_sum(theta, xc, tau, a, deriv=1) / ds


def kf_ratio(theta: float, xc: float, tau: float, a: float) -> float:
    return phi_hat_general(theta, xc, tau, a) / phi_hat_general(theta, 0.0, tau, a)


@dataclass
class KFResult:
    estimate: float
    formula: float
    std_error: float
    count: int

    @property
    def z(self) -> float:
        return abs(self.estimate - self.formula) / self.std_error


def kf_samples(
    theta: float,
    tau: float,
    replicas: int,
    seed: int,
    s_step: float = 1e-3,
    threads: int = 1,
    block: int = 20000,
    stream=(6,),
) -> np.ndarray:
    """(radial a, Cartan coordinate of x_1) for Brownian paths x with
    sqrt(theta/tau) x standard for the form with (theta|theta) = 2.

    Under that form the coordinate vectors have squared length 1/2, so each
    v-coordinate carries variance 2 tau/theta per unit s.
    """
    n_s = int(round(1.0 / s_step))
    var = 2.0 * tau / theta * s_step

    def block_fn(b: int, start: int, count: int) -> np.ndarray:
        rng = derive_stream(seed, (*stream, b))
        X = identity((count,))
        cart = np.zeros(count)
        for i in range(n_s):
            dx = rng.standard_normal((count, 3)) * math.sqrt(var)
            X = qmul(X, su2_exp(dx / tau))
            cart += dx[:, 2]
            if i % 64 == 63:
                X = normalize(X)
        X = normalize(X)
        return np.stack([radial_part(X, tau), cart], axis=1)

    return run_blocks(block_fn, replicas, block, threads)


def kirillov_frenkel_check(
    theta: float,
    tau: float,
    a_bin: tuple[float, float],
    xc: float,
    replicas: int = 100000,
    seed: int = 0,
    samples: np.ndarray | None = None,
    **kw,
) -> KFResult:
    """Monte Carlo E[exp((X|x_1)) | rad in a_bin] against the phi_hat ratio."""
    lo, hi = a_bin
    if not (0 < lo < hi < tau):
        raise ValueError("bin must lie inside (0, tau)")
    if samples is None:
        samples = kf_samples(theta, tau, replicas, seed, **kw)
    sel = samples[(samples[:, 0] >= lo) & (samples[:, 0] < hi), 1]
    if sel.size < 2:
        raise ValueError("bin is empty")
    # (X|x_1) = (xc/2) * Cartan coordinate
    v = np.exp(0.5 * xc * sel)
    est = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(v.size))
    return KFResult(est, kf_ratio(theta, xc, tau, 0.5 * (lo + hi)), se, int(v.size))
