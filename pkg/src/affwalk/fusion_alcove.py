"""Fusion hypergroup of type A at level k: discretized characters, fusion
coefficients by the affine alternating sum and by alcove path counting,
Doob kernels on alcoves, circular walk spectra and the SU(2) compact Horn
measures.

Weights of sl_d are stored as integer d-tuples in a gl_d lift, normalized
so that the last entry is 0. For SU(2) an integer n stands for (n, 0).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from functools import lru_cache

import numpy as np

from .core_numerics import DiscreteMeasure

MAX_DIM = 10**5


def _as_weight(lam, d: int | None = None) -> tuple[int, ...]:
    if isinstance(lam, (int, np.integer)):
        lam = (int(lam), 0)
    lam = tuple(int(v) for v in lam)
    if d is not None and len(lam) != d:
        raise ValueError(f"expected a weight of length {d}")
    return tuple(v - lam[-1] for v in lam)


def rho(d: int) -> tuple[int, ...]:
    return tuple(range(d - 1, -1, -1))


def in_alcove(lam, k: int) -> bool:
    lam = _as_weight(lam)
    return all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1)) and lam[0] - lam[-1] <= k


def alcove_weights(k: int, d: int = 2) -> list[tuple[int, ...]]:
    """All of P_+^k, in lexicographic order of the lift."""
    out = []

    def rec(prefix, bound):
        if len(prefix) == d - 1:
            out.append(tuple(prefix) + (0,))
            return
        for v in range(bound, -1, -1):
            rec(prefix + [v], v)

    rec([], k)
    return sorted(out)


def _perm_sign(p) -> int:
    p = list(p)
    s = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


# discretized characters


def _special_point(sigma, k: int, d: int) -> np.ndarray:
    if isinstance(sigma, (int, np.integer)) and d != 2:
        if sigma != 0:
            raise ValueError("integer sigma only stands for an SU(2) weight or 0")
        sigma = (0,) * d
    sigma = _as_weight(sigma, d)
    v = np.array(sigma, dtype=float) + np.array(rho(d), dtype=float)
    return (v - v.mean()) / (k + d)


def upsilon(lam, sigma, k: int) -> complex:
    """Upsilon_lam(sigma) by the Weyl character formula; lam may be any
    integral weight, sigma in P_+^k."""
    lam = _as_weight(lam)
    d = len(lam)
    c = _special_point(sigma, k, d)
    z = np.exp(-2j * math.pi * c)
    lr = np.array(lam) + np.array(rho(d))
    num = np.linalg.det(z[None, :] ** lr[:, None])
    den = np.linalg.det(z[None, :] ** np.array(rho(d))[:, None])
    return complex(num / den)


def upsilon_su2(n: int, m: int, k: int) -> float:
    if not (0 <= n <= k and 0 <= m <= k):
        raise ValueError("indices must lie in the alcove {0..k}")
    return math.sin(math.pi * (n + 1) * (m + 1) / (k + 2)) / math.sin(math.pi * (m + 1) / (k + 2))


def upsilon_zero(lam, k: int) -> float:
    """Product of sin(pi (lam+rho|alpha)/(k+d)) / sin(pi (rho|alpha)/(k+d))
    over positive roots."""
    lam = _as_weight(lam)
    if not in_alcove(lam, k):
        raise ValueError("weight outside the alcove")
    d = len(lam)
    lr = np.array(lam) + np.array(rho(d))
    out = 1.0
    for i in range(d):
        for j in range(i + 1, d):
            out *= math.sin(math.pi * (lr[i] - lr[j]) / (k + d)) / math.sin(math.pi * (j - i) / (k + d))
    return out


def upsilon_zero_pairwise(x, k: int) -> float:
    """Same quantity written with x_i - x_j + j - i."""
    x = _as_weight(x)
    d = len(x)
    out = 1.0
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            out *= math.sin(math.pi * (x[i - 1] - x[j - 1] + j - i) / (k + d)) / math.sin(math.pi * (j - i) / (k + d))
    return out


# SU(2) closed rule


def fusion_su2(i: int, j: int, k: int) -> set[int]:
    if not (0 <= i <= k and 0 <= j <= k):
        raise ValueError("indices must lie in {0..k}")
    return {s for s in range(abs(i - j), min(i + j, 2 * k - i - j) + 1) if (i + j + s) % 2 == 0}


def verlinde_residual_su2(k: int) -> float:
    """max over sigma, i, j of |U_i U_j - sum_s N_ij^s U_s|."""
    U = np.array([[upsilon_su2(n, m, k) for m in range(k + 1)] for n in range(k + 1)])
    worst = 0.0
    for i in range(k + 1):
        for j in range(k + 1):
            rhs = sum(U[s] for s in fusion_su2(i, j, k))
            worst = max(worst, float(np.max(np.abs(U[i] * U[j] - rhs))))
    return worst


def verlinde_coefficients(k: int, d: int = 2) -> dict:
    """N_{lam,gam}^beta as floats, solved from the character identity
    U_lam U_gam = sum_beta N U_beta on the alcove points."""
    A = alcove_weights(k, d)
    U = np.array([[upsilon(lam, s, k) for s in A] for lam in A])
    inv = np.linalg.inv(U.T)
    out = {}
    for a, lam in enumerate(A):
        for g, gam in enumerate(A):
            coeffs = inv @ (U[a] * U[g])
            for b, beta in enumerate(A):
                out[(lam, gam, beta)] = coeffs[b]
    return out


# weight multiplicities of tensor powers


def _ssyt_contents(shape: tuple[int, ...], d: int):
    """Contents of all semistandard tableaux of the given shape, entries 1..d."""
    cells = [(r, c) for r, n in enumerate(shape) for c in range(n)]
    grid: dict = {}

    def rec(idx):
        if idx == len(cells):
            cnt = [0] * d
            for v in grid.values():
                cnt[v - 1] += 1
            yield tuple(cnt)
            return
        r, c = cells[idx]
        lo = 1
        if c > 0:
            lo = max(lo, grid[(r, c - 1)])
        if r > 0:
            lo = max(lo, grid[(r - 1, c)] + 1)
        for v in range(lo, d + 1):
            grid[(r, c)] = v
            yield from rec(idx + 1)
        grid.pop((r, c), None)

    yield from rec(0)


@lru_cache(maxsize=None)
def module_weights(gam: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Weight multiset of V(gam) in the gl_d lift."""
    d = len(gam)
    shape = tuple(v for v in gam if v > 0)
    dim = 1
    for i in range(d):
        for j in range(i + 1, d):
            dim = dim * (gam[i] - gam[j] + j - i)
    for i in range(d):
        for j in range(i + 1, d):
            dim //= j - i
    if dim > MAX_DIM:
        raise ValueError(f"module dimension {dim} above bound {MAX_DIM}")
    c = Counter(_ssyt_contents(shape, d))
    return tuple(sorted(c.items()))


@lru_cache(maxsize=None)
def _power_weights(gam: tuple[int, ...], p: int) -> dict:
    if p == 0:
        return {tuple([0] * len(gam)): 1}
    prev = _power_weights(gam, p - 1)
    out: Counter = Counter()
    for w, m in prev.items():
        for v, n in module_weights(gam):
            out[tuple(a + b for a, b in zip(w, v))] += m * n
    return dict(out)


def tensor_power_weight_mult(gam, p: int, beta) -> int:
    """Multiplicity of beta (gl_d lift) in V(gam)^{tensor p}."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    gam = _as_weight(gam)
    beta = tuple(int(v) for v in (beta if not isinstance(beta, (int, np.integer)) else (beta, 0)))
    return _power_weights(gam, p).get(beta, 0)


def _lift_target(lam, gam, p, beta):
    """beta shifted along e so that its size matches lam + p*gam, or None."""
    excess = sum(lam) + p * sum(gam) - sum(beta)
    d = len(lam)
    if excess % d:
        return None
    c = excess // d
    return tuple(b + c for b in beta)


def fusion_bkf(lam, gam, p: int, beta, k: int) -> int:
    """Affine alternating sum over W_k of weight multiplicities of V(gam)^p."""
    lam, gam, beta = _as_weight(lam), _as_weight(gam), _as_weight(beta)
    for w in (lam, gam, beta):
        if not in_alcove(w, k):
            raise ValueError("weights must lie in the alcove")
    d = len(lam)
    beta = _lift_target(lam, gam, p, beta)
    if beta is None:
        return 0
    weights = _power_weights(gam, p)
    L = k + d
    r = rho(d)
    lr = [a + b for a, b in zip(lam, r)]
    br = [a + b for a, b in zip(beta, r)]
    lo = [min(w[i] for w in weights) for i in range(d)]
    hi = [max(w[i] for w in weights) for i in range(d)]
    total = 0
    for perm in itertools.permutations(range(d)):
        sgn = _perm_sign(perm)
        sb = [br[perm[i]] for i in range(d)]
        # need sb + L nu - lr inside the support box
        ranges = [
            range(math.ceil((lo[i] + lr[i] - sb[i]) / L), math.floor((hi[i] + lr[i] - sb[i]) / L) + 1)
            for i in range(d)
        ]
        for nu in itertools.product(*ranges[:-1]):
            last = -sum(nu)
            if last not in ranges[-1]:
                continue
            nu = (*nu, last)
            mu = tuple(sb[i] + L * nu[i] - lr[i] for i in range(d))
            total += sgn * weights.get(mu, 0)
    return total


def fusion_coefficient(lam, gam, beta, k: int) -> int:
    return fusion_bkf(lam, gam, 1, beta, k)


def minuscule_steps(gam) -> list[tuple[int, ...]]:
    gam = _as_weight(gam)
    if any(v not in (0, 1) for v in gam):
        raise ValueError("walk mode needs a minuscule weight (1,..,1,0,..,0)")
    return [w for w, _ in module_weights(gam)]


def alcove_count_bruteforce(lam, beta, p: int, k: int, gam=None) -> int:
    """Number of p-step paths from lam to beta with steps in W.gam that stay
    in P_+^k."""
    lam, beta = _as_weight(lam), _as_weight(beta)
    d = len(lam)
    gam = _as_weight(gam) if gam is not None else _as_weight((1,) + (0,) * (d - 1))
    steps = minuscule_steps(gam)
    cur = {lam: 1} if in_alcove(lam, k) else {}
    for _ in range(p):
        nxt: Counter = Counter()
        for w, m in cur.items():
            for s in steps:
                v = _as_weight(tuple(a + b for a, b in zip(w, s)))
                if in_alcove(v, k):
                    nxt[v] += m
        cur = nxt
    return cur.get(beta, 0)


# Markov chains on the alcove


def alcove_doob_kernel(lam, beta, gam, k: int) -> float:
    n = fusion_coefficient(lam, gam, beta, k)
    if n == 0:
        return 0.0
    return n * upsilon_zero(beta, k) / (upsilon_zero(lam, k) * upsilon_zero(gam, k))


def doob_matrix(k: int, gam, d: int = 2) -> tuple[list, np.ndarray]:
    A = alcove_weights(k, d)
    Q = np.array([[alcove_doob_kernel(a, b, gam, k) for b in A] for a in A])
    return A, Q


def invariant_measure(k: int, d: int = 2) -> np.ndarray:
    """mu(z) = Upsilon_z(0)^2, normalized."""
    mu = np.array([upsilon_zero(z, k) ** 2 for z in alcove_weights(k, d)])
    return mu / mu.sum()


def asymptotic_ratio(lam, beta, gam, p: int, k: int) -> float:
    n = fusion_bkf(lam, gam, p, beta, k)
    return n / (upsilon_zero(gam, k) ** p * upsilon_zero(lam, k) * upsilon_zero(beta, k))


# circular walk / gamblers' ruin


def _compositions(total: int, parts: int):
    for cut in itertools.combinations(range(1, total), parts - 1):
        b = (0, *cut, total)
        yield tuple(b[i + 1] - b[i] for i in range(parts))


def ruin_kernel(d: int, N: int) -> tuple[list, np.ndarray]:
    """Killed kernel on gap vectors g (g_i >= 1, sum N) of d ordered
    particles on Z/NZ; a uniform particle steps +-1 with probability 1/2."""
    if N <= d:
        raise ValueError("need N > d")
    states = list(_compositions(N, d))
    idx = {s: i for i, s in enumerate(states)}
    K = np.zeros((len(states), len(states)))
    for s in states:
        for i in range(d):
            for sgn in (1, -1):
                g = list(s)
                # particle i sits between gap i-1 (behind) and gap i (ahead)
                g[i] -= sgn
                g[(i - 1) % d] += sgn
                t = tuple(g)
                if t in idx:
                    K[idx[s], idx[t]] += 1.0 / (2 * d)
    return states, K


def circle_walk_spectrum(d: int, N: int) -> np.ndarray:
    _, K = ruin_kernel(d, N)
    return np.sort(np.linalg.eigvalsh(K))


def circle_walk_prediction(d: int, N: int) -> np.ndarray:
    """(Upsilon_std(sigma) + Upsilon_std*(sigma)) / 2d over sigma in P_+^{N-d}."""
    if N <= d:
        raise ValueError("need N > d")
    k = N - d
    std = (1,) + (0,) * (d - 1)
    dual = (1,) * (d - 1) + (0,)
    vals = [(upsilon(std, s, k) + upsilon(dual, s, k)).real / (2 * d) for s in alcove_weights(k, d)]
    return np.sort(np.array(vals))


# compact Horn problem for SU(2)


def horn_support(a: float, b: float) -> tuple[float, float]:
    u = abs(a - b)
    v = min(a + b, 2 - (a + b))
    return min(u, v), max(u, v)


def horn_density_su2(a: float, b: float, x):
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError("a and b must lie in (0, 1)")
    r, s = horn_support(a, b)
    x = np.asarray(x, dtype=float)
    val = 0.5 * math.pi * np.sin(math.pi * x) / (math.sin(math.pi * a) * math.sin(math.pi * b))
    out = np.where((x >= r) & (x <= s), val, 0.0)
    return float(out) if out.ndim == 0 else out


def horn_cdf_su2(a: float, b: float, x):
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError("a and b must lie in (0, 1)")
    r, s = horn_support(a, b)
    x = np.clip(np.asarray(x, dtype=float), r, s)
    out = (math.cos(math.pi * r) - np.cos(math.pi * x)) / (2 * math.sin(math.pi * a) * math.sin(math.pi * b))
    return float(out) if out.ndim == 0 else out


def horn_mu_k(a: float, b: float, k: int) -> DiscreteMeasure:
    """Atoms (s+1)/(k+2) weighted by N_{xi,gam}^s U_s(0)/(U_xi(0) U_gam(0))."""
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError("a and b must lie in (0, 1)")
    xi, gam = math.floor(k * a), math.floor(k * b)
    ss = sorted(fusion_su2(xi, gam, k))
    u = lambda n: upsilon_su2(n, 0, k)
    w = np.array([u(s) / (u(xi) * u(gam)) for s in ss])
    pts = np.array([(s + 1) / (k + 2) for s in ss])
    return DiscreteMeasure.normalized(pts[:, None], w, max_deficit=1e-12)


def horn_tv(a: float, b: float, k: int) -> float:
    """Total variation between mu_k and the limit density, with each atom
    owning the cell between the midpoints to its neighbours."""
    m = horn_mu_k(a, b, k)
    x = m.points[:, 0]
    edges = np.concatenate([[0.0], 0.5 * (x[1:] + x[:-1]), [1.0]])
    F = horn_cdf_su2(a, b, edges)
    cell = np.diff(F)
    return 0.5 * float(np.abs(m.weights - cell).sum())
