import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from curvednbody.roots import argmax_unimodal, bisect, cauchy_bound, polish_newton, real_roots, sign_changes


def test_bisect_matches_brentq():
    f = lambda x: math.cos(x) - x
    assert bisect(f, 0, 1) == pytest.approx(brentq(f, 0, 1, xtol=1e-15), abs=1e-14)


def test_bisect_requires_bracket():
    with pytest.raises(ValueError):
        bisect(lambda x: x * x + 1, -1, 1)


def test_bisect_exact_endpoint():
    assert bisect(lambda x: x, 0.0, 1.0) == 0.0


def test_sign_changes_and_argmax():
    f = lambda x: math.sin(x)
    assert len(sign_changes(f, 0.5, 9.0, 100)) == 2
    crit = argmax_unimodal(math.cos, 0.1, 7.0, 200)
    # maxima of sin on (0.1, 7): pi/2 only; 3 pi/2 is a minimum
    assert crit == pytest.approx([math.pi / 2], abs=1e-13)


real = st.floats(-5, 5, allow_nan=False).filter(lambda x: abs(x) > 1e-3)


@given(st.lists(real, min_size=1, max_size=4, unique=True), st.floats(0.1, 10))
def test_real_roots_recovers_constructed_roots(rs, lead):
    rs = sorted(rs)
    if min(np.diff(rs), default=1) < 1e-3:
        return
    p = lead * np.poly(rs)
    got = real_roots(p)
    assert len(got) == len(rs)
    assert np.allclose(got, rs, atol=1e-9)


@given(st.lists(st.floats(-3, 3), min_size=5, max_size=5))
def test_real_roots_against_numpy(c):
    c = np.array(c)
    if abs(c[0]) < 1e-2:
        return
    ref = np.roots(c)
    ref = np.sort(ref[np.abs(ref.imag) < 1e-9].real)
    # skip near-double roots where the real count is ill-conditioned
    if len(ref) > 1 and np.min(np.diff(ref)) < 1e-4:
        return
    crit = np.roots(np.polyder(c))
    if np.any(np.abs(np.polyval(c, crit.real[np.abs(crit.imag) < 1e-6])) < 1e-6):
        return
    got = real_roots(c)
    assert len(got) == len(ref)
    assert np.allclose(got, ref, atol=1e-8)


def test_double_root_found_once():
    p = np.poly([1.0, 1.0, -2.0])
    got = real_roots(p)
    assert got == pytest.approx([-2.0, 1.0], abs=1e-6)


def test_no_real_roots():
    assert real_roots([1, 0, 1]) == []
    assert real_roots([3.0]) == []


def test_cauchy_bound_contains_roots():
    p = np.poly([-7.5, 0.2, 3.0])
    assert cauchy_bound(p) > 7.5


def test_polish_newton_improves():
    p = np.poly([math.sqrt(2)])
    x = polish_newton(p, 1.4)
    assert abs(x - math.sqrt(2)) < 1e-6
    assert polish_newton(p, math.sqrt(2)) == pytest.approx(math.sqrt(2), abs=1e-15)
