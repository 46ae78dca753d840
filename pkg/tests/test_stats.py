import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_winding.stats import Welford, ks_sech, power_fit, scaling_fit, sech_cdf


def test_welford_matches_two_pass():
    x = np.random.default_rng(0).normal(3.0, 2.0, size=10**6)
    w = Welford().extend(x)
    mean = x.sum() / len(x)
    var = ((x - mean) ** 2).sum() / (len(x) - 1)
    assert w.count == len(x)
    assert abs(w.mean - mean) < 1e-12
    assert abs(w.variance - var) < 1e-12 * var


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=60), st.integers(0, 60))
@settings(max_examples=200)
def test_welford_merge(xs, cut):
    cut = min(cut, len(xs))
    a = Welford().extend(xs[:cut])
    b = Welford().extend(xs[cut:])
    m = a.merge(b)
    full = Welford().extend(xs)
    assert m.count == full.count
    assert m.mean == pytest.approx(full.mean, rel=1e-9, abs=1e-6)
    assert m.variance == pytest.approx(full.variance, rel=1e-7, abs=1e-4)


def test_ci_needs_thirty_samples():
    w = Welford().extend(range(29))
    assert all(math.isnan(v) for v in w.ci())
    w.add(29.0)
    lo, hi = w.ci()
    assert lo < w.mean < hi
    assert hi - lo == pytest.approx(2 * 1.959963984540054 * w.stderr)


def test_scaling_fit_exact():
    n = np.array([2**k for k in range(10, 21, 2)], dtype=float)
    y = 0.1 + np.log(np.log(n)) / (2 * math.pi)
    fit = scaling_fit(n, y * n)
    assert fit.b == pytest.approx(1 / (2 * math.pi), abs=1e-9)
    assert fit.a == pytest.approx(0.1, abs=1e-9)
    assert fit.b_in_units_of_reference == pytest.approx(1.0, abs=1e-8)
    assert max(abs(r) for r in fit.residuals) < 1e-12


def test_scaling_fit_constant_and_errors():
    n = [1e3, 1e4, 1e5]
    fit = scaling_fit(n, [0.3 * v for v in n])
    assert fit.b == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        scaling_fit([1e3, 1e4], [1, 2])


def test_power_fit():
    x = np.array([2.0, 4.0, 8.0, 16.0])
    p, c = power_fit(x, 3 * x**1.7)
    assert p == pytest.approx(1.7) and c == pytest.approx(3.0)


def test_sech_cdf():
    assert sech_cdf(0.0) == pytest.approx(0.5)
    xs = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(sech_cdf(xs) + sech_cdf(-xs), 1.0)
    # density is (1/2) sech(pi x / 2)
    h = 1e-6
    for x in (-1.0, 0.3, 2.0):
        d = (sech_cdf(x + h) - sech_cdf(x - h)) / (2 * h)
        assert d == pytest.approx(0.5 / math.cosh(math.pi * x / 2), rel=1e-6)


def test_ks_point_mass():
    assert ks_sech(np.zeros(100)) == pytest.approx(0.5)


def test_ks_symmetric_sample_median():
    x = np.random.default_rng(1).standard_normal(1001)
    x = np.concatenate([x, -x])
    assert np.median(x) == pytest.approx(0.0, abs=1e-12)


def test_ks_exact_sample_small():
    # inverse-CDF sample of the sech law: x = (2/pi) ln tan(pi u / 2)
    u = np.random.default_rng(2).random(20_000)
    x = (2 / math.pi) * np.log(np.tan(math.pi * u / 2))
    assert ks_sech(x) < 0.015
    with pytest.raises(ValueError):
        ks_sech([])
