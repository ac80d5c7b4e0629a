import math

import numpy as np
import pytest
import sympy

from euclidscheme.charsums import kloosterman_vector, moments, tol_sum
from euclidscheme.equidist import (
    CosMultiple,
    CosPower,
    Indicator,
    Tabulated,
    angle_sample,
    empirical_expectation,
    ks_distance,
    moment_asymptotics_report,
    sato_tate_cdf,
    sato_tate_expectation,
    trig_identity_check,
)
from euclidscheme.gf import field_for_q, odd_prime_powers
from euclidscheme.walks import catalan

# first recorded value; a regression anchor, not a theoretical constant
KS_ANCHOR_10007 = 0.004273886367752167


def test_closed_form_expectations():
    assert sato_tate_expectation(CosMultiple(2)) == -0.5
    assert sato_tate_expectation(CosMultiple(0)) == 1
    for n in (1, 3, 4, 5, 9):
        assert sato_tate_expectation(CosMultiple(n)) == 0
    assert sato_tate_expectation(CosPower(2)) == 0.25
    assert sato_tate_expectation(CosPower(0)) == 1
    assert sato_tate_expectation(CosPower(3)) == 0
    assert sato_tate_expectation(Indicator(0, math.pi)) == pytest.approx(1)
    with pytest.raises(TypeError):
        sato_tate_expectation(lambda th: th)


@pytest.mark.parametrize("n", range(0, 11))
def test_closed_forms_agree_with_quadrature(n):
    assert sato_tate_expectation(Tabulated(CosPower(n))) == pytest.approx(sato_tate_expectation(CosPower(n)), abs=1e-10)
    assert sato_tate_expectation(Tabulated(CosMultiple(n))) == pytest.approx(sato_tate_expectation(CosMultiple(n)), abs=1e-10)


def test_custom_expectation():
    # theta -> pi - theta symmetry of the density puts the mean at pi / 2
    assert sato_tate_expectation(Tabulated(lambda th: th)) == pytest.approx(math.pi / 2, abs=1e-10)
    a, b = 0.3, 2.1
    assert sato_tate_expectation(Tabulated(Indicator(a, b))) == pytest.approx(sato_tate_expectation(Indicator(a, b)), abs=1e-8)


def test_cdf():
    assert sato_tate_cdf(0.0) == 0
    assert sato_tate_cdf(math.pi) == pytest.approx(1)
    grid = np.linspace(0, math.pi, 10_001)
    assert np.all(np.diff(sato_tate_cdf(grid)) >= 0)
    for a, b in [(0.0, 1.0), (0.5, 2.5), (1.0, math.pi)]:
        assert sato_tate_expectation(Tabulated(Indicator(a, b))) == pytest.approx(float(sato_tate_cdf(b) - sato_tate_cdf(a)), abs=1e-8)


@pytest.mark.parametrize("q", [3, 7, 25, 101, 499])
def test_empirical_examples(q):
    assert empirical_expectation(q, CosPower(0)) == pytest.approx(1)
    assert empirical_expectation(q, CosPower(1)) == pytest.approx(1 / (2 * math.sqrt(q) * (q - 1)))
    assert empirical_expectation(q, CosPower(2)) == pytest.approx((q * q - q - 1) / (4 * q * (q - 1)))
    s = angle_sample(q)
    assert len(s.angles) == q - 1
    assert s.angles.min() >= 0 and s.angles.max() <= math.pi
    assert np.all(np.diff(s.angles) >= 0)


@pytest.mark.parametrize("q", odd_prime_powers(499)[::7])
def test_moment_bridge(q):
    k = kloosterman_vector(field_for_q(q))[1:]
    table = moments(field_for_q(q), 10)
    for ell in range(1, 11):
        bridge = 2**ell * q ** (ell / 2) * (q - 1) * empirical_expectation(q, CosPower(ell))
        # absolute tol_sum for small moments, float precision of the summands beyond
        tol = tol_sum(q) + 1e-12 * float(np.sum(np.abs(k) ** ell))
        assert abs(bridge - table.entry(ell).raw) <= tol


def test_indicator_counts_exactly():
    q = 101
    s = angle_sample(q)
    for a, b in [(0.0, 1.0), (0.7, 0.7), (1.2, 2.9), (0.0, math.pi)]:
        count = sum(1 for th in s.angles if a <= th <= b)
        assert empirical_expectation(q, Indicator(a, b)) == count / (q - 1)


def test_ks_distance_range_and_anchor():
    for q in (3, 9, 101, 1009):
        assert 0 <= ks_distance(q) <= 1
    value = ks_distance(10007)
    assert value < 0.05
    assert abs(value - KS_ANCHOR_10007) < 1e-12


def test_ks_trend():
    near_100 = [ks_distance(p) for p in sympy.primerange(90, 120)]
    near_10000 = [ks_distance(p) for p in (10007, 10009, 10037)]
    assert np.median(near_100) > np.median(near_10000)


def test_moment_report():
    rows = moment_asymptotics_report(101, 3)
    assert [r.catalan for r in rows] == [1, 2, 5]
    assert [catalan(m) for m in (1, 2, 3)] == [1, 2, 5]
    for q in (101, 499, 1009):
        r1 = moment_asymptotics_report(q, 1)[0]
        assert 0.99 <= r1.even_ratio <= 1
        assert r1.even_moment == q * q - q - 1
    r = moment_asymptotics_report(10007, 2)[1]
    assert 0.8 <= r.even_ratio <= 1.2


def test_trig_identities():
    for ell in range(1, 9):
        assert trig_identity_check(ell) < 1e-10
    theta = np.linspace(0, math.pi, 101)
    assert np.allclose(2 * np.cos(theta) ** 2, np.cos(2 * theta) + 1)
    rhs = sum(math.comb(5, k) * np.cos((5 - 2 * k) * theta) for k in range(3))
    assert np.allclose(16 * np.cos(theta) ** 5, rhs)
    with pytest.raises(ValueError):
        trig_identity_check(0)
