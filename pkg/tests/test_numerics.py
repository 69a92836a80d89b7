"""Kernel-level checks: anchored window integrals against frozen
high-precision values, and the overflow-guard scaling helpers."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collardiff.errors import QuadratureError
from collardiff.numerics import (adaptive_quad, cexpm1, exp_cos2_integral,
                                 exp_cos2_window, exp_scale, scale_complex,
                                 vec_exp_cos2_window)

# mpmath (mp.dps=60) evaluations of integral exp(a*(s-anchor))*cos(b*s)^2
# over [s1, s2], anchor at the growing endpoint.  The b values are
# ell/(2*pi) for ell in {0.1, 0.5, 1.0, 1e-4, 0.3, 1.2}; the last wide
# case sits at window coordinates ~1e5 where the naive antiderivative
# overflows.
FROZEN_WINDOWS = [
    (2.0, 0.1 / (2 * math.pi), -30.0, 30.0, 0.39762699742948485, 30.0),
    (-4.0, 0.5 / (2 * math.pi), -10.0, 3.0, 0.12737480949699235, -10.0),
    (64.0, 1.0 / (2 * math.pi), 0.25, 5.5, 0.0064528009268962872, 5.5),
    (2.0, 1e-4 / (2 * math.pi), -90000.0, 98000.0, 6.1445463564152003e-5, 98000.0),
    (0.0, 0.3 / (2 * math.pi), -20.0, 20.0, 29.875771726344529, 0.0),
    (-12.0, 1.2 / (2 * math.pi), 1.0, 1.0625, 0.042297758577870752, 1.0),
]


@pytest.mark.parametrize("a,b,s1,s2,expected,anchor", FROZEN_WINDOWS)
def test_window_integral_frozen(a, b, s1, s2, expected, anchor):
    val, anc = exp_cos2_window(a, b, s1, s2)
    assert anc == anchor
    assert val == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("a,b,s1,s2,expected,anchor", FROZEN_WINDOWS)
def test_vec_window_matches_scalar(a, b, s1, s2, expected, anchor):
    vals, ancs = vec_exp_cos2_window(np.array([a, a]), b, s1, s2)
    assert ancs[0] == anchor
    assert vals[0] == vals[1] == pytest.approx(expected, rel=1e-13)


def test_window_rejects_reversed_endpoints():
    with pytest.raises(ValueError):
        exp_cos2_window(1.0, 0.5, 2.0, 1.0)


@given(a=st.floats(-8, 8), b=st.floats(1e-3, 1.0),
       s1=st.floats(-12, 12), h=st.floats(1e-6, 8))
def test_window_against_quadrature(a, b, s1, h):
    # independent route: QUADPACK on the anchored integrand directly
    s2 = s1 + h
    val, anc = exp_cos2_window(a, b, s1, s2)
    ref = adaptive_quad(lambda s: math.exp(a * (s - anc)) * math.cos(b * s) ** 2,
                        s1, s2, tol_abs=1e-13, tol_rel=1e-12)
    assert val == pytest.approx(ref, rel=1e-9, abs=1e-12)


@given(a=st.floats(-60, 60), b=st.floats(1e-3, 1.0))
def test_window_additivity(a, b):
    # [s1,s2] splits at the midpoint; totals must agree after unanchoring
    s1, sm, s2 = -3.0, 0.4, 5.0
    whole = exp_cos2_integral(a, b, s1, s2)
    parts = exp_cos2_integral(a, b, s1, sm) + exp_cos2_integral(a, b, sm, s2)
    assert whole == pytest.approx(parts, rel=1e-11)


def test_cexpm1_tiny():
    z = complex(1e-9, -3e-10)
    # quadratic term is ~1e-18; linear agreement to ~1e-25 abs
    assert abs(cexpm1(z) - (z + 0.5 * z * z)) < 1e-24


def test_cexpm1_moderate():
    z = complex(0.7, -2.1)
    assert cexpm1(z) == pytest.approx(cmath.exp(z) - 1.0, rel=1e-14)


def test_exp_scale_ranges():
    assert exp_scale(2.0, 10.0) == pytest.approx(2.0 * math.exp(10.0), rel=1e-15)
    assert exp_scale(0.0, 1e9) == 0.0
    # mag ~ 1e-300 with t = 1000: naive exp(t) overflows, product is finite
    assert exp_scale(1e-300, 1000.0) == pytest.approx(
        math.exp(math.log(1e-300) + 1000.0), rel=1e-12)
    assert exp_scale(1.0, 800.0) == math.inf
    assert exp_scale(-1.0, 800.0) == -math.inf
    assert exp_scale(1.0, -800.0) == 0.0


def test_scale_complex_keeps_phase():
    z = complex(3.0, 4.0)
    w = scale_complex(z, -750.0)
    assert w.real == pytest.approx(0.6 * abs(w), rel=1e-9)
    assert scale_complex(0j, 1e6) == 0j


def test_adaptive_quad_known_value():
    v = adaptive_quad(lambda x: math.exp(-x * x), -8.0, 8.0,
                      tol_abs=1e-13, tol_rel=1e-13)
    assert v == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_adaptive_quad_failure_raises():
    # 1/x is not integrable at 0; QUADPACK reports non-convergence
    with pytest.raises(QuadratureError):
        adaptive_quad(lambda x: 1.0 / x, 0.0, 1.0, limit=10)
