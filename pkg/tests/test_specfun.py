import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarbond.specfun import (SPLIT, BesselDomainError, k0, k0_small, k0k1, k1)

mpmath.mp.dps = 30


def oracle(x):
    return float(mpmath.besselk(0, x)), float(mpmath.besselk(1, x))


@pytest.mark.parametrize("x", [1e-12, 1e-6, 4.523e-4, 0.1, 0.5, 1.0, 1.999, 2.0, 2.001,
                               3.0, 10.0, 50.0, 200.0, 600.0])
def test_matches_mpmath(x):
    ref0, ref1 = oracle(x)
    got0, got1 = k0k1(x)
    assert got0 == pytest.approx(ref0, rel=1e-13)
    assert got1 == pytest.approx(ref1, rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-12, max_value=2.8))
def test_log_uniform_accuracy(logx):
    x = 10.0**logx
    ref0, ref1 = oracle(x)
    assert abs(k0(x) / ref0 - 1) < 1e-12
    assert abs(k1(x) / ref1 - 1) < 1e-12


def test_known_values():
    assert k0(1.0) == pytest.approx(0.42102443824070834, rel=1e-15)
    assert k1(1.0) == pytest.approx(0.6019072301972346, rel=1e-15)


def test_continuity_across_split():
    lo, hi = np.nextafter(SPLIT, 0), np.nextafter(SPLIT, 3)
    assert abs(k0(hi) / k0(lo) - 1) < 1e-14
    assert abs(k1(hi) / k1(lo) - 1) < 1e-14


def test_derivative_relation():
    # K0' = -K1, checked by a centred difference
    x, h = 1.7, 1e-5
    deriv = (k0(x + h) - k0(x - h)) / (2 * h)
    assert deriv == pytest.approx(-k1(x), rel=1e-9)


def test_small_argument_form():
    x = 1e-8
    assert k0(x) == pytest.approx(k0_small(x), rel=1e-14)
    assert k0(x) == pytest.approx(18.5366, abs=1e-4)


def test_underflow_to_zero():
    assert k0(800.0) == 0.0 and k1(800.0) == 0.0


def test_array_shape_and_scalar_type():
    x = np.linspace(0.5, 5.0, 12).reshape(3, 4)
    a0, a1 = k0k1(x)
    assert a0.shape == (3, 4) and a1.shape == (3, 4)
    assert isinstance(k0(1.5), float)
    np.testing.assert_allclose(a0.ravel(), [k0(v) for v in x.ravel()], rtol=0)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_domain_errors(bad):
    with pytest.raises(BesselDomainError):
        k0(bad)
    with pytest.raises(BesselDomainError):
        k1(np.array([1.0, bad]))


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-3, max_value=300.0))
def test_monotone_and_ordered(x):
    # both decrease, and K1 > K0 > 0 for every x > 0
    y = x * 1.01
    assert k0(y) < k0(x)
    assert k1(y) < k1(x)
    assert k1(x) > k0(x) > 0
