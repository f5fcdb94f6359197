"""The fourteen acceptance criteria as callable checks.

Each check returns a CriterionResult holding its gating statistics; the
command line `verify` and tests/test_acceptance.py both call these.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import affine_a11 as aff
from . import experiments as ex
from . import fusion_alcove as fus
from . import group_radial as gr
from . import pitman_paths as pit
from . import sl2_walks as sl2
from .experiments import Stat

DEFAULT_SEED = 42


@dataclass
class CriterionResult:
    number: int
    title: str
    anchor: str
    stats: list[Stat]
    runtime: float = 0.0
    runtime_limit: float | None = None
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok = all(s.passed for s in self.stats)
        if self.runtime_limit is not None:
            ok = ok and self.runtime < self.runtime_limit
        return ok

    def line(self) -> str:
        parts = []
        for s in self.stats:
            thr = f"[{s.threshold[0]}, {s.threshold[1]}]" if s.op == "in" else f"{s.op} {s.threshold:g}"
            parts.append(f"{s.name}={s.value:.4g} ({thr})")
        limit = f" limit {self.runtime_limit:g}s" if self.runtime_limit is not None else ""
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number:2d} {self.title}: " + "; ".join(parts) + f" [{self.runtime:.1f}s{limit}]"

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "anchor": self.anchor,
            "passed": self.passed,
            "runtime_s": round(self.runtime, 3),
            "runtime_limit_s": self.runtime_limit,
            "statistics": [s.to_dict() for s in self.stats],
            "detail": self.detail,
        }


def _timed(number, title, anchor, limit=None):
    def deco(fn):
        def run(seed: int = DEFAULT_SEED, threads: int = 1) -> CriterionResult:
            t0 = time.perf_counter()
            stats, detail = fn(seed=seed, threads=threads)
            dt = time.perf_counter() - t0
            return CriterionResult(number, title, anchor, stats, dt, limit, detail)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.number = number
        return run

    return deco


@_timed(1, "reflection identity", "sl2 Doob kernel, reflection principle for n-step transitions", 1.0)
def reflection_identity(seed, threads):
    worst = 0.0
    for q in (1.0, math.exp(0.3)):
        M = sl2.doob_matrix(48, q)
        P = np.eye(48)
        for n in range(1, 21):
            P = P @ M
            for x in range(26):
                for y in range(26):
                    worst = max(worst, abs(P[x, y] - sl2.reflected_n_step(x, y, n, q)))
    return [Stat("max_abs_error", worst, 1e-12)], {}


@_timed(2, "fusion alternating sum equals alcove path counts", "fusion analogue of the Brauer-Klimyk rule", 30.0)
def fusion_equivalence(seed, threads):
    a = ex.fusion_bkf_check(d=2, k_max=6, p_max=12)
    b = ex.fusion_bkf_check(d=3, k_max=4, p_max=8)
    return [
        Stat("su2_mismatches", a.stats[0].value, 0, "=="),
        Stat("su3_mismatches", b.stats[0].value, 0, "=="),
    ], {"su2_nonzero": len(a.rows), "su3_nonzero": len(b.rows)}


@_timed(3, "Verlinde residual", "structure constants of the discretized characters", 5.0)
def verlinde_residual(seed, threads):
    worst, mism = 0.0, 0
    for k in range(1, 11):
        r = ex.fusion_verlinde(k)
        worst = max(worst, r.stats[0].value)
        mism += r.stats[1].value
    return [Stat("max_residual", worst, 1e-10), Stat("closed_rule_mismatches", mism, 0, "==")], {}


@_timed(4, "level-1 character cross-check", "Weyl-Kac character of the basic module")
def character_crosscheck(seed, threads):
    worst = 0.0
    detail = {}
    for a in (0.2, 0.5, 1.0):
        closed = aff.char_ratio((1, 0), a)
        series = aff.char_weight_series(a)
        rel = abs(closed - series) / abs(series)
        detail[str(a)] = {"closed": closed, "series": series}
        worst = max(worst, rel)
    return [Stat("max_relative_error", worst, 1e-8)], detail


@_timed(5, "space-time harmonicity of phi_hat", "harmonic function of the affine chamber")
def harmonicity(seed, threads):
    h = 1e-3
    worst = 0.0
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < 100:
        t = rng.uniform(0.3, 3.0)
        x = rng.uniform(0.0, t)
        if 2 * h < x < t - 2 * h:
            pts.append((t, x))
    for t, x in pts:
        f = aff.phi_hat_2d
        # fourth-order central stencils
        dt = (-f(t + 2 * h, x) + 8 * f(t + h, x) - 8 * f(t - h, x) + f(t - 2 * h, x)) / (12 * h)
        dxx = (
            -f(t, x + 2 * h) + 16 * f(t, x + h) - 30 * f(t, x) + 16 * f(t, x - h) - f(t, x - 2 * h)
        ) / (12 * h * h)
        worst = max(worst, abs(dt + 0.5 * dxx))
    return [Stat("max_heat_operator", worst, 1e-6)], {}


@_timed(6, "sl2 chain to Bessel(3)", "central limit for the q = 1 Doob chain", 60.0)
def bessel_clt(seed, threads):
    r = ex.sl2_clt(n=200, replicas=100000, seed=seed, threads=threads)
    return r.stats, {}


@_timed(7, "triangle identity at t = 1", "Pitman limit, affine chain and sheet radial part agree in law", 600.0)
def triangle_identity(seed, threads):
    r = ex.triangle(t=1.0, replicas=100000, seed=seed, threads=threads)
    return r.stats, r.params["reference_ks"]


@_timed(8, "gap of two between consecutive Pitman iterates", "non-convergence of plain Pitman iterates")
def gap_of_two(seed, threads):
    r = ex.pitman_gap(ns=(30, 40, 60, 100), replicas=10000, seed=seed, threads=threads)
    return r.stats, {"grid": "uniform, step 1e-3"}


@_timed(9, "interval theorem", "time inversion of the capped Pitman iteration")
def interval_theorem(seed, threads):
    r = ex.pitman_interval(t=1.0, replicas=100000, seed=seed, threads=threads)
    return r.stats, {}


@_timed(10, "Kirillov-Frenkel formula", "conditional Laplace transform given the radial part", 600.0)
def kirillov_frenkel(seed, threads):
    r = ex.radial_kf(theta=1.0, tau=1.0, center=0.5, width=0.02, x_coords=(0.5, 1.0), replicas=1000000, seed=seed, threads=threads)
    detail = {f"x{row[0]:g}_w{row[1]:g}": {"mc": row[2], "formula": row[3], "se": row[4], "count": int(row[5])} for row in r.rows}
    verdicts = [s.passed for s in r.stats]
    # halving the bin must not flip the verdict for either X
    flips = sum(verdicts[i] != verdicts[i + 1] for i in range(0, len(verdicts), 2))
    return r.stats + [Stat("verdict_flips", flips, 0, "==")], detail


@_timed(11, "compact Horn problem", "radial part of a Haar-conjugated product in SU(2)")
def compact_horn(seed, threads):
    stats = []
    for i, (a, b) in enumerate(((0.5, 0.5), (0.25, 0.25), (0.25, 0.5))):
        r = ex.radial_horn(a, b, replicas=1000000, seed=seed, threads=threads, stream=i)
        stats.append(Stat(f"ks_a{a:g}_b{b:g}", r.stats[0].value, 0.005))
    stats.append(Stat("tv_mu200", fus.horn_tv(0.5, 0.5, 200), 0.02))
    return stats, {}


@_timed(12, "circular walk spectrum", "discretized characters diagonalize the killed walk")
def circle_spectrum(seed, threads):
    return ex.fusion_spectrum(3, 6).stats, {}


@_timed(13, "invariant measure and positivity", "Doob transform of the fusion kernel")
def invariant_positivity(seed, threads):
    r2 = ex.fusion_doob(k_max=10, d=2)
    worst = r2.stats[0].value
    # SU(3): standard module and its dual up to level 10
    for k in range(1, 11):
        for g in ((1, 0, 0), (1, 1, 0)):
            A, Q = fus.doob_matrix(k, g, 3)
            mu = fus.invariant_measure(k, 3)
            worst = max(worst, float(np.max(np.abs(mu @ Q - mu))))
    neg = 0
    count = 0
    for k in range(1, 11):
        for i in range(k + 1):
            for j in range(k + 1):
                for s in range(k + 1):
                    neg += fus.fusion_coefficient(i, j, s, k) < 0
                    count += 1
    for k in range(1, 5):
        A = fus.alcove_weights(k, 3)
        for lam in A:
            for g in A:
                for b in A:
                    neg += fus.fusion_coefficient(lam, g, b, k) < 0
                    count += 1
    return [Stat("max_invariance_error", worst, 1e-12), Stat("negative_coefficients", neg, 0, "==")], {"coefficients_checked": count}


def _fingerprints(seed: int, threads: int) -> list[bytes]:
    out = [
        sl2.simulate_doob_chain(50, seed=seed, replicas=3000, threads=threads, block=700).tobytes(),
        aff.simulate_affine_chain(30, seed=seed, replicas=3000, threads=threads, block=700).tobytes(),
        pit.sample_lambda(1.0, 900, seed, n_stages=10, threads=threads, block=250).tobytes(),
        pit.sample_interval(1.0, 900, seed, n_stages=10, threads=threads, block=250).tobytes(),
        gr.sheet_radial_process([0.5, 1.0], s_step=1e-2, seed=seed, replicas=900, threads=threads, block=250).radial.tobytes(),
        gr.kf_samples(1.0, 1.0, 900, seed, s_step=1e-2, threads=threads, block=250).tobytes(),
        gr.conjugation_product_radial(0.3, 0.6, seed=seed, draws=5000, threads=threads, block=1200).tobytes(),
    ]
    return out


@_timed(14, "determinism across runs and thread counts", "seeded counter-based streams")
def determinism(seed, threads):
    ref = _fingerprints(seed, 1)
    diffs = 0
    for th in (1, 2, 4, max(threads, 3)):
        diffs += sum(a != b for a, b in zip(ref, _fingerprints(seed, th)))
    return [Stat("differing_outputs", diffs, 0, "==")], {"experiments": len(ref)}


CRITERIA: list[Callable[..., CriterionResult]] = [
    reflection_identity,
    fusion_equivalence,
    verlinde_residual,
    character_crosscheck,
    harmonicity,
    bessel_clt,
    triangle_identity,
    gap_of_two,
    interval_theorem,
    kirillov_frenkel,
    compact_horn,
    circle_spectrum,
    invariant_positivity,
    determinism,
]


def verify_all(seed: int = DEFAULT_SEED, threads: int = 1, only=None, progress: Callable[[str], None] | None = None) -> list[CriterionResult]:
    out = []
    for c in CRITERIA:
        if only and c.number not in only:
            continue
        r = c(seed=seed, threads=threads)
        if progress:
            progress(r.line())
        out.append(r)
    return out
