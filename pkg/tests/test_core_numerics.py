import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from affwalk import core_numerics as cn


def test_heat_kernel_values():
    assert cn.heat_kernel(1.0, 0.0, 0.0) == pytest.approx(0.3989422804, abs=1e-10)
    assert cn.heat_kernel(0.7, 0.3, -1.1) == cn.heat_kernel(0.7, -1.1, 0.3)
    mass, _ = integrate.quad(lambda y: cn.heat_kernel(1.0, 0.0, y), -40, 40)
    assert mass == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        cn.heat_kernel(0.0, 0.0, 0.0)


def test_signed_series_sum_examples():
    tail = cn.gaussian_tail(1.0)
    assert cn.signed_series_sum(lambda k: math.exp(-k * k), tail, 1e-12) == pytest.approx(1.772637205, abs=1e-9)
    assert cn.signed_series_sum(lambda k: k * math.exp(-k * k), tail, 1e-12) == pytest.approx(0.0, abs=1e-15)
    assert cn.signed_series_sum(lambda k: 1.0 if k == 0 else 0.0, lambda K: 0.0 if K >= 1 else 1.0) == 1.0


def test_signed_series_sum_gives_up():
    with pytest.raises(ArithmeticError):
        cn.signed_series_sum(lambda k: 1.0, lambda K: 1.0, k_max=50)


@given(st.floats(0.05, 3.0))
@settings(max_examples=30, deadline=None)
def test_series_window_independent(scale):
    term = lambda k: math.exp(-scale * k * k)
    s1 = cn.signed_series_sum(term, cn.gaussian_tail(scale), 1e-12)
    # a window twice as wide
    tail2 = lambda K: cn.gaussian_tail(scale)(max(K // 2, 0)) if K >= 4 else math.inf
    s2 = cn.signed_series_sum(term, tail2, 1e-12)
    assert abs(s1 - s2) < 1e-12


def _partitions_brute(m):
    def count(n, largest):
        if n == 0:
            return 1
        return sum(count(n - p, p) for p in range(1, min(n, largest) + 1))

    return count(m, m)


def test_partition_numbers():
    assert cn.partition_number(0) == 1
    assert cn.partition_number(5) == 7
    assert cn.partition_number(-3) == 0
    for m in range(26):
        assert cn.partition_number(m) == _partitions_brute(m)
    assert cn.partition_number(40) == 37338
    assert cn.partition_number(100) == 190569292


def test_partition_numbers_agree_with_generating_function():
    # coefficients of prod 1/(1-q^n) up to q^40
    coeffs = np.zeros(41, dtype=object)
    coeffs[0] = 1
    for n in range(1, 41):
        for m in range(n, 41):
            coeffs[m] += coeffs[m - n]
    assert [cn.partition_number(m) for m in range(41)] == list(coeffs)


def test_ks_statistic():
    unif = lambda x: np.clip(x, 0.0, 1.0)
    assert cn.ks_statistic([0.5], unif) == pytest.approx(0.5)
    # ecdf is 1/2 on [0, 1) while the step cdf is 0 there
    step = lambda x: (np.asarray(x) >= 1.0).astype(float)
    assert cn.ks_statistic([0.0, 1.0], step) == pytest.approx(0.5)
    rng = cn.derive_stream(7, (0,))
    assert cn.ks_statistic(rng.random(100000), unif) < 0.01
    with pytest.raises(ValueError):
        cn.ks_statistic([], unif)


def test_ks_accepts_empirical_sample():
    s = cn.EmpiricalSample([0.25, 0.75], seed=1, stream=(2,))
    assert s.replicas == 2
    assert cn.ks_statistic(s, lambda x: np.clip(x, 0, 1)) == pytest.approx(0.25)
    assert cn.ks_two_sample(s, [0.25, 0.75]) == 0.0


def test_derive_stream():
    a = cn.derive_stream(42, (1,)).random(100)
    b = cn.derive_stream(42, (1,)).random(100)
    c = cn.derive_stream(42, (2,)).random(100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    x = cn.derive_stream(42, (3, 0)).standard_normal(100000)
    y = cn.derive_stream(42, (3, 1)).standard_normal(100000)
    assert abs(np.corrcoef(x, y)[0, 1]) < 0.01


def test_run_blocks_thread_independent():
    def fn(b, start, count):
        return cn.derive_stream(5, (9, b)).random(count)

    ref = cn.run_blocks(fn, 1000, 128, threads=1)
    for th in (2, 3, 8):
        assert np.array_equal(ref, cn.run_blocks(fn, 1000, 128, threads=th))
    assert cn.block_layout(10, 4) == [(0, 4), (4, 4), (8, 2)]


def test_discrete_measure():
    m = cn.DiscreteMeasure.normalized([[0.0], [1.0]], [0.25, 0.75 - 1e-12])
    assert m.total() == pytest.approx(1.0, abs=1e-15)
    assert m.deficit < 1e-9
    assert m.mean()[0] == pytest.approx(0.75, abs=1e-9)
    with pytest.raises(ValueError):
        cn.DiscreteMeasure.normalized([[0.0]], [0.5])
    with pytest.raises(ValueError):
        cn.DiscreteMeasure([[0.0], [1.0]], [1.5, -0.5])


def test_log_theta_helpers_match_high_precision():
    # small A cancels catastrophically in floats, so the oracle runs at 60 digits
    with mpmath.workdps(60):
        def lin(A, c):
            return mpmath.log(mpmath.nsum(lambda k: (k + c) * mpmath.exp(-A * (k + c) ** 2), [-mpmath.inf, mpmath.inf]))

        def diff(A, m1, m2):
            f = lambda k: mpmath.exp(-A * (k - m1) ** 2) - mpmath.exp(-A * (k - m2) ** 2)
            return mpmath.log(mpmath.nsum(f, [-mpmath.inf, mpmath.inf]))

        for A, c in itertools.product((0.3, 2.0, 15.0), (0.1, 0.25, 0.4)):
            assert cn.log_theta_linear(A, c) == pytest.approx(float(lin(A, c)), abs=1e-8)
        for A, m1, m2 in ((0.5, 0.2, 0.45), (5.0, 0.1, 0.4), (12.0, 0.0, 0.3)):
            assert cn.log_theta_difference(A, m1, m2) == pytest.approx(float(diff(A, m1, m2)), abs=1e-8)


def test_lattice_jitter_stays_in_cell():
    rng = cn.derive_stream(1, ())
    v = np.arange(10.0)
    j = cn.lattice_jitter(v, 0.5, rng)
    assert np.all(np.abs(j - v) <= 0.25)
