import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from affwalk import affine_a11 as aff
from affwalk.core_numerics import ks_statistic, partition_number


def test_basic_rep_multiplicity():
    assert aff.basic_rep_multiplicity(0, 0) == 1
    assert aff.basic_rep_multiplicity(1, 1) == 1
    assert aff.basic_rep_multiplicity(0, 2) == 2
    assert aff.basic_rep_multiplicity(2, 3) == 0


def test_multiplicities_match_character_expansion():
    # q-expansion of the level-1 character at b = 0: sum_j q^{j^2} / prod(1 - q^n)
    a = 0.7
    for N in range(12):
        coeff = sum(partition_number(N - j * j) for j in range(-4, 5))
        direct = sum(aff.basic_rep_multiplicity(j, N) for j in range(-4, 5))
        assert coeff == direct
    assert aff.char_ratio((1, 0), a) == pytest.approx(aff.char_weight_series(a), rel=1e-10)


def test_weyl_apply():
    e = aff.AffineWeylElement("translation", 0)
    assert aff.weyl_apply(e, (1.0, 0.3, -0.2)) == (1.0, 0.3, -0.2)
    assert aff.weyl_apply(aff.AffineWeylElement("translation", 1), (1, 0, 0)) == (1, 2, -1)
    assert aff.AffineWeylElement("reflection", 3).det == -1
    with pytest.raises(ValueError):
        aff.AffineWeylElement("glide", 1)


@given(st.integers(-5, 5), st.integers(-5, 5), st.floats(0, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_translation_group_law(p, q, t, y, e):
    tp, tq = aff.AffineWeylElement("translation", p), aff.AffineWeylElement("translation", q)
    lhs = aff.weyl_apply(tp, aff.weyl_apply(tq, (t, y, e)))
    rhs = aff.weyl_apply(aff.AffineWeylElement("translation", p + q), (t, y, e))
    assert np.allclose(lhs, rhs, atol=1e-9, rtol=1e-12)


def test_char_ratio():
    assert aff.char_ratio((0, 0), 0.5) == pytest.approx(1.0, abs=1e-15)
    for a in (0.2, 0.5, 1.0):
        assert abs(aff.char_ratio(aff.AffineWeight(1, 0), a) / aff.char_weight_series(a) - 1) < 1e-8
    with pytest.raises(ValueError):
        aff.char_ratio((1, 0), 0.0)


def test_two_variable_character():
    for level, y in ((1, 0), (1, 1), (3, 2)):
        for b in (0.05, 0.3):
            v = aff.char_two_variable(level, y, 0.8, b)
            assert v == pytest.approx(aff.char_two_variable(level, y, 0.8, -b), rel=1e-12)
        # b -> 0 recovers the derivative form
        assert aff.char_two_variable(level, y, 0.8, 1e-5) == pytest.approx(aff.char_ratio((level, y), 0.8), rel=1e-8)


def test_step_measure_level1():
    a = 0.5
    m = aff.step_measure_level1(a)
    pts = [tuple(p) for p in m.points.astype(int)]
    w = dict(zip(pts, m.weights))
    assert w[(0, 0)] == pytest.approx(1.0 / aff.char_ratio((1, 0), a), rel=1e-9)
    for (j, N), v in w.items():
        if (-j, N) in w:
            assert w[(-j, N)] == pytest.approx(v, rel=1e-12)
        assert N >= j * j
    assert m.total() == pytest.approx(1.0, abs=1e-9)
    assert m.deficit < 1e-9


def _projected_product_identity(k, x, a, b):
    lhs = aff.char_two_variable(1, 0, a, b) * aff.char_two_variable(k, x, a, b)
    rhs = sum(
        aff.tensor_mult_projected((k, x), (k + 1, y), a) * aff.char_two_variable(k + 1, y, a, b)
        for y in range(k + 2)
    )
    return lhs, rhs


def test_tensor_mult_against_character_product():
    assert aff.tensor_multiplicity((0, 0), (1, 0), 0) == 1
    assert aff.tensor_mult_projected((0, 0), (1, 0), 0.6) == pytest.approx(1.0)
    assert aff.tensor_mult_projected((0, 0), (1, 1), 0.6) == 0.0
    # the product of characters, as a function of b, fixes every coefficient;
    # b stays inside |b| < a/2 where the Weyl denominator has no zero
    for k, x in ((1, 0), (1, 1), (2, 1), (4, 2)):
        for b in (0.0001, 0.2, 0.4):
            lhs, rhs = _projected_product_identity(k, x, 0.9, b)
            assert rhs == pytest.approx(lhs, rel=1e-9)


def test_closed_form_projection_matches_direct():
    for k in range(6):
        for x in range(k + 1):
            for y in range(k + 2):
                d = aff.tensor_mult_projected((k, x), (k + 1, y), 0.7)
                lc = aff.log_tensor_mult_projected(k, x, y, 0.7)
                c = 0.0 if lc == -math.inf else math.exp(lc)
                assert c == pytest.approx(d, rel=1e-9, abs=1e-14)


def test_tensor_multiplicities_nonnegative():
    for k in range(5):
        for x in range(k + 1):
            for y in range(k + 2):
                for z in range(12):
                    assert aff.tensor_multiplicity((k, x), (k + 1, y), z) >= 0
    with pytest.raises(ValueError):
        aff.tensor_multiplicity((1, 0), (3, 0), 0)


def test_chain_kernel():
    assert aff.chain_kernel((0, 0), (1, 0), 0.3) == pytest.approx(1.0, abs=1e-12)
    for a in (0.02, 0.3, 1.0):
        for k in range(13):
            m = aff.chain_level_matrix(k, a)
            assert np.allclose(m.sum(axis=1), 1.0, atol=1e-8)
            for x in range(k + 1):
                # parity of the spatial coordinate flips at each step
                assert np.all(m[x, (x + 1) % 2 :: 2] == 0)


def test_phi_hat_2d():
    for t in (0.3, 1.0, 4.0):
        assert aff.phi_hat_2d(t, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert aff.phi_hat_2d(t, t) == pytest.approx(0.0, abs=1e-12)
        assert aff.phi_hat_2d(t, 0.4 * t) > 0
    assert abs(aff.phi_hat_2d(50.0, 1.3) / 1.3 - 1) < 1e-6
    with pytest.raises(ValueError):
        aff.phi_hat_2d(1.0, 2.0)


def test_phi_hat_space_time_harmonic():
    h = 1e-3
    f = aff.phi_hat_2d
    for t, x in ((0.5, 0.2), (1.0, 0.7), (2.5, 1.0)):
        dt = (-f(t + 2 * h, x) + 8 * f(t + h, x) - 8 * f(t - h, x) + f(t - 2 * h, x)) / (12 * h)
        dxx = (-f(t, x + 2 * h) + 16 * f(t, x + h) - 30 * f(t, x) + 16 * f(t, x - h) - f(t, x - 2 * h)) / (12 * h * h)
        assert abs(dt + 0.5 * dxx) < 1e-6


def test_conditioned_density():
    for t in (0.3, 1.0, 3.0):
        mass, _ = integrate.quad(lambda y: aff.conditioned_density(t, y), 0, t, points=[t / 2])
        assert mass == pytest.approx(1.0, abs=1e-6)
        for y in (0.1 * t, 0.37 * t):
            # phi_hat form and the image sum agree with the mode expansion
            assert aff.conditioned_density_phi(t, y) == pytest.approx(aff.conditioned_density(t, y), rel=1e-8)
            assert aff.interval_entrance_density_images(1 / t, y / t) / t == pytest.approx(aff.conditioned_density(t, y), rel=1e-8)
    with pytest.raises(ValueError):
        aff.conditioned_density(1.0, 1.0)


def test_conditioned_density_mirror_defect():
    # the mirror y -> t - y only reverses the even sine modes, so the law is
    # symmetric up to terms of order e^{-3 pi^2 / 2t}
    for t in (0.3, 1.0, 3.0):
        s = 1.0 / t
        for y in (0.1 * t, 0.37 * t):
            z = y / t
            n = np.arange(2, 40, 2)
            even_modes = 4 * np.sin(np.pi * z) * np.sum(n * np.sin(n * np.pi * z) * np.exp(-(n * n - 1.0) * np.pi**2 * s / 2)) / t
            defect = aff.conditioned_density(t, y) - aff.conditioned_density(t, t - y)
            assert defect == pytest.approx(even_modes, abs=1e-12)


def test_conditioned_cdf_matches_density():
    t = 1.0
    for y in (0.2, 0.5, 0.9):
        q, _ = integrate.quad(lambda u: aff.conditioned_density(t, u), 0, y)
        assert aff.conditioned_cdf(t, y) == pytest.approx(q, abs=1e-9)


def test_simulated_chain_path_properties():
    n = 40
    p = aff.simulate_affine_chain(n, seed=3, replicas=500)
    levels = np.arange(p.shape[1])
    assert np.all(p >= 0) and np.all(p <= levels[None, :])
    # the chain lives on the even sublattice, steps are even
    assert np.all(np.diff(p, axis=1) % 2 == 0)


def test_chain_marginal_matches_simulation():
    n = 30
    p = aff.chain_marginal(n)
    sim = aff.simulate_affine_chain(n, seed=4, replicas=20000)[:, -1]
    emp = np.bincount(sim, minlength=n + 1) / len(sim)
    assert np.max(np.abs(np.cumsum(emp) - np.cumsum(p))) < 0.02


def test_chain_marginal_near_conditioned_law():
    n = 100
    p = aff.chain_marginal(n)
    x = np.arange(n + 1) / n
    cdf = np.cumsum(p)
    # compare at cell midpoints between lattice atoms
    mids = (x[1:-1:2] + x[2::2]) / 2
    diff = np.abs(np.interp(mids, x, cdf, left=0) - aff.conditioned_cdf(1.0, mids))
    assert diff.max() < 0.03


def test_spatial_step_variance():
    # per-step spatial variance of the level-1 walk is 2 * (n/2) / n^2 per unit time at a = 2/n
    n = 200
    steps, w = aff.spatial_step_law(2.0 / n)
    var = float(np.sum(w * steps**2)) / n
    assert var == pytest.approx(1.0, rel=0.02)
