import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from affwalk import fusion_alcove as fus


def test_alcove_weights():
    assert fus.alcove_weights(3, 2) == [(0, 0), (1, 0), (2, 0), (3, 0)]
    A = fus.alcove_weights(4, 3)
    assert len(A) == math.comb(4 + 2, 2)
    assert all(fus.in_alcove(w, 4) for w in A)
    assert not fus.in_alcove((5, 0), 4)
    assert fus.rho(3) == (2, 1, 0)


def test_upsilon_su2_examples():
    for k in range(1, 6):
        for m in range(k + 1):
            assert fus.upsilon_su2(0, m, k) == pytest.approx(1.0)
    assert fus.upsilon_su2(1, 0, 1) == pytest.approx(1.0)
    assert fus.upsilon_su2(1, 1, 1) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        fus.upsilon_su2(3, 0, 2)


def test_upsilon_general_matches_su2():
    for k in range(1, 7):
        for n in range(k + 1):
            for m in range(k + 1):
                assert fus.upsilon(n, m, k).real == pytest.approx(fus.upsilon_su2(n, m, k), abs=1e-12)


def test_fusion_su2_rule():
    assert fus.fusion_su2(1, 1, 1) == {0}
    assert fus.fusion_su2(1, 1, 2) == {0, 2}
    for k in range(1, 6):
        for j in range(k + 1):
            assert fus.fusion_su2(0, j, k) == {j}


def test_upsilon_zero():
    for k in range(1, 8):
        assert fus.upsilon_zero((0, 0, 0), k) == pytest.approx(1.0)
        for n in range(k + 1):
            assert fus.upsilon_zero(n, k) == pytest.approx(fus.upsilon_su2(n, 0, k), abs=1e-12)
        for d in (3, 4):
            for lam in fus.alcove_weights(k, d):
                u = fus.upsilon_zero(lam, k)
                assert u > 0
                assert u == pytest.approx(fus.upsilon_zero_pairwise(lam, k), rel=1e-12)
                assert u == pytest.approx(fus.upsilon(lam, 0, k).real, rel=1e-10)
    with pytest.raises(ValueError):
        fus.upsilon_zero((5, 0), 3)


def test_verlinde_residual():
    for k in range(1, 11):
        assert fus.verlinde_residual_su2(k) < 1e-10


def _w_k_action(lam, perm, nu, k):
    d = len(lam)
    lr = [a + b for a, b in zip(lam, fus.rho(d))]
    v = [lr[perm[i]] + (k + d) * nu[i] for i in range(d)]
    return tuple(a - b for a, b in zip(v, fus.rho(d)))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.sampled_from([2, 3]), st.data())
def test_alternating_symmetry(k, d, data):
    A = fus.alcove_weights(k, d)
    lam = data.draw(st.sampled_from(A))
    sig = data.draw(st.sampled_from(A))
    perm = data.draw(st.permutations(range(d)))
    nu = data.draw(st.lists(st.integers(-2, 2), min_size=d - 1, max_size=d - 1))
    nu = nu + [-sum(nu)]
    w_lam = _w_k_action(lam, perm, nu, k)
    lhs = fus.upsilon(w_lam, sig, k)
    rhs = fus._perm_sign(perm) * fus.upsilon(lam, sig, k)
    assert abs(lhs - rhs) < 1e-9


def test_tensor_power_weights():
    assert fus.tensor_power_weight_mult(1, 1, (1, 0)) == 1
    assert fus.tensor_power_weight_mult(1, 1, (0, 1)) == 1
    for p in range(1, 10):
        for j in range(p + 1):
            assert fus.tensor_power_weight_mult(1, p, (p - j, j)) == math.comb(p, j)
    for gam in ((1, 0, 0), (1, 1, 0), (2, 1, 0)):
        dim = sum(m for _, m in fus.module_weights(gam))
        for p in (1, 2, 3):
            assert sum(fus._power_weights(gam, p).values()) == dim**p
    assert sum(m for _, m in fus.module_weights((2, 1, 0))) == 8
    with pytest.raises(ValueError):
        fus.tensor_power_weight_mult(1, -1, (0, 0))


def test_module_dimension_bound():
    with pytest.raises(ValueError):
        fus.module_weights((60, 30, 0, 0, 0))


def test_bkf_examples():
    assert fus.fusion_bkf(0, 1, 2, 0, 2) == 1
    assert fus.fusion_bkf(0, 1, 2, 2, 2) == 1
    assert fus.fusion_bkf(0, 1, 2, 1, 2) == 0
    for k in range(1, 11):
        for i in range(k + 1):
            for j in range(k + 1):
                rule = fus.fusion_su2(i, j, k)
                for s in range(k + 1):
                    assert fus.fusion_coefficient(i, j, s, k) == (1 if s in rule else 0)


def test_bkf_equals_bruteforce_su2():
    for k in range(1, 7):
        for p in range(0, 13):
            for lam in range(k + 1):
                for beta in range(k + 1):
                    if p == 0:
                        assert fus.alcove_count_bruteforce(lam, beta, 0, k) == (lam == beta)
                        continue
                    assert fus.fusion_bkf(lam, 1, p, beta, k) == fus.alcove_count_bruteforce(lam, beta, p, k)


@pytest.mark.parametrize("gam", [(1, 0, 0), (1, 1, 0)])
def test_bkf_equals_bruteforce_su3(gam):
    for k in range(1, 5):
        A = fus.alcove_weights(k, 3)
        for p in range(1, 9):
            for lam in A:
                for beta in A:
                    assert fus.fusion_bkf(lam, gam, p, beta, k) == fus.alcove_count_bruteforce(lam, beta, p, k, gam)


def test_bruteforce_monotone_in_level():
    for p in range(1, 9):
        for lam in range(3):
            for beta in range(3):
                counts = [fus.alcove_count_bruteforce(lam, beta, p, k) for k in range(2, 8)]
                assert counts == sorted(counts)


def test_verlinde_solve_matches_bkf_su3():
    k = 3
    N = fus.verlinde_coefficients(k, 3)
    for (lam, gam, beta), v in N.items():
        n = fus.fusion_coefficient(lam, gam, beta, k)
        assert abs(v - n) < 1e-9
        assert n >= 0
        assert n == fus.fusion_coefficient(gam, lam, beta, k)


def test_identity_element():
    for d, k in ((2, 5), (3, 3)):
        A = fus.alcove_weights(k, d)
        for g in A:
            for b in A:
                assert fus.fusion_coefficient(A[0], g, b, k) == (g == b)


def test_minuscule_steps():
    assert sorted(fus.minuscule_steps((1, 0, 0))) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    with pytest.raises(ValueError):
        fus.minuscule_steps((2, 0, 0))


def test_doob_kernel():
    A, Q = fus.doob_matrix(2, 1)
    assert Q[0, 1] == pytest.approx(1.0)
    for d, gams, ks in ((2, [(1, 0)], range(1, 11)), (3, [(1, 0, 0), (1, 1, 0)], range(1, 7))):
        for k in ks:
            mu = fus.invariant_measure(k, d)
            for g in gams:
                _, Q = fus.doob_matrix(k, g, d)
                assert np.allclose(Q.sum(axis=1), 1.0, atol=1e-12)
                assert np.max(np.abs(mu @ Q - mu)) < 1e-12


def test_asymptotic_ratio():
    k = 3
    # lam + beta + p must be even for the SU(2) chain to connect them
    r1 = fus.asymptotic_ratio(0, 0, 1, 60, k)
    r2 = fus.asymptotic_ratio(1, 3, 1, 60, k)
    assert abs(r1 / r2 - 1) < 0.01
    seq = [fus.asymptotic_ratio(0, 2, 1, p, k) for p in range(60, 72, 2)]
    assert all(abs(a / b - 1) < 0.005 for a, b in zip(seq, seq[1:]))
    # level 0: a single state
    assert fus.asymptotic_ratio(0, 0, 0, 5, 0) == fus.asymptotic_ratio(0, 0, 0, 9, 0)


def test_circle_walk_spectrum():
    eigs = fus.circle_walk_spectrum(3, 6)
    pred = fus.circle_walk_prediction(3, 6)
    assert len(eigs) == len(pred) == math.comb(5, 2)
    assert np.max(np.abs(eigs - pred)) < 1e-10
    assert np.all(np.abs(eigs) <= 1 + 1e-12)
    for N in range(3, 10):
        cos = np.sort(np.cos(np.pi * np.arange(1, N) / N))
        assert np.allclose(fus.circle_walk_spectrum(2, N), cos, atol=1e-12)
        assert np.allclose(fus.circle_walk_prediction(2, N), cos, atol=1e-12)
    for d, N in ((3, 7), (4, 7), (3, 9)):
        assert np.allclose(fus.circle_walk_spectrum(d, N), fus.circle_walk_prediction(d, N), atol=1e-10)
    with pytest.raises(ValueError):
        fus.circle_walk_spectrum(3, 3)


def test_ruin_kernel_substochastic():
    states, K = fus.ruin_kernel(3, 7)
    assert np.all(K.sum(axis=1) <= 1 + 1e-15)
    assert np.allclose(K, K.T)
    assert all(min(s) >= 1 and sum(s) == 7 for s in states)


def test_horn_density():
    f = lambda x: fus.horn_density_su2(0.5, 0.5, x)
    assert f(0.3) == pytest.approx(0.5 * math.pi * math.sin(0.3 * math.pi))
    assert integrate.quad(f, 0, 1)[0] == pytest.approx(1.0, abs=1e-10)
    g = lambda x: fus.horn_density_su2(0.25, 0.25, x)
    assert g(0.2) == pytest.approx(math.pi * math.sin(0.2 * math.pi))
    assert g(0.6) == 0.0
    assert integrate.quad(g, 0, 0.5)[0] == pytest.approx(1.0, abs=1e-10)
    for a, b in ((0.3, 0.45), (0.8, 0.7), (0.1, 0.95)):
        r, s = fus.horn_support(a, b)
        assert integrate.quad(lambda x: fus.horn_density_su2(a, b, x), r, s)[0] == pytest.approx(1.0, abs=1e-10)
        assert fus.horn_cdf_su2(a, b, s) == pytest.approx(1.0)
        assert fus.horn_density_su2(a, b, r - 0.01) == 0.0


def test_horn_mu_k():
    for a, b in ((0.5, 0.5), (0.25, 0.5), (0.3, 0.45), (0.8, 0.7)):
        r, s = fus.horn_support(a, b)
        for k in (10, 50, 200):
            m = fus.horn_mu_k(a, b, k)
            assert m.total() == pytest.approx(1.0, abs=1e-12)
            assert m.deficit < 1e-12
            x = m.points[:, 0]
            assert x.min() >= r - 2 / k and x.max() <= s + 2 / k
    assert fus.horn_tv(0.5, 0.5, 200) < 0.02


def test_horn_tv_decreasing_generic():
    tv = [fus.horn_tv(0.3, 0.45, k) for k in (50, 100, 200)]
    assert tv[0] > tv[1] > tv[2]


def test_horn_mu_k_is_a_cell_discretization():
    # mu_k is the cell discretization of the limit density taken at the
    # effective parameters (floor(k a) + 1) / (k + 2)
    for a, b, k in ((0.25, 0.25, 50), (0.3, 0.45, 100), (0.5, 0.5, 200), (0.8, 0.7, 64)):
        m = fus.horn_mu_k(a, b, k)
        ae = (math.floor(k * a) + 1) / (k + 2)
        be = (math.floor(k * b) + 1) / (k + 2)
        x = m.points[:, 0]
        h = 1 / (k + 2)
        cells = fus.horn_cdf_su2(ae, be, x + h) - fus.horn_cdf_su2(ae, be, x - h)
        assert np.allclose(m.weights, cells, atol=1e-12)
    assert fus.horn_tv(0.5, 0.5, 200) < 1e-12
