import math

import numpy as np
import pytest
from hypothesis import assume, given

from conftest import points, radii, random_points
from curvednbody.errors import SingularPair
from curvednbody.geometry import (
    INFINITY,
    SQRT2M1,
    RegionLabel,
    SpaceForm,
    antipode,
    check_nonsingular,
    classify_region,
    conformal_factor,
    cot_geodesic,
    detect_singular,
    geodesic_distance,
    sphere_lift,
)


def lift_oracle(z, R):
    # textbook inverse stereographic projection from the north pole (0, 0, R)
    x, y = z.real, z.imag
    s = x * x + y * y
    return np.array([2 * R * R * x, 2 * R * R * y, R * (s - R * R)]) / (R * R + s)


def cot_oracle(z1, z2, R):
    p, q = lift_oracle(z1, R), lift_oracle(z2, R)
    return np.dot(p, q) / np.linalg.norm(np.cross(p, q))


def test_spaceform_rejects_bad_radius():
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            SpaceForm(bad)


def test_lift_lies_on_sphere(rng):
    for R in (0.5, 1.0, 2.0):
        z = random_points(rng, 50, R)
        p = sphere_lift(z, R)
        assert np.allclose(np.linalg.norm(p, axis=-1), R, rtol=1e-14)
        assert np.allclose(p, np.array([lift_oracle(w, R) for w in z]), atol=1e-14)
    assert np.allclose(sphere_lift(INFINITY, 2.0), [0, 0, 2.0])
    assert np.allclose(sphere_lift(0, 2.0), [0, 0, -2.0])


def test_conformal_factor_matches_pullback(rng):
    # |d lift|^2 / |dz|^2 computed by central differences
    h = 1e-6
    for R in (0.5, 1.0, 2.0):
        for z in random_points(rng, 20, R):
            for dz in (h, 1j * h):
                d = (lift_oracle(z + dz, R) - lift_oracle(z - dz, R)) / (2 * h)
                assert np.dot(d, d) == pytest.approx(conformal_factor(z, R), rel=1e-7)


@pytest.mark.parametrize("z1,z2,R,expected", [
    (0, 1, 1.0, math.pi / 2),
    (0, 2, 2.0, math.pi),  # equator at |z| = R: distance R pi/2
    (0, INFINITY, 1.0, math.pi),
    (1, -1, 1.0, math.pi),
    (1, 1j, 1.0, math.pi / 2),
    (SQRT2M1, -SQRT2M1, 1.0, math.pi / 2),
])
def test_distance_anchors(z1, z2, R, expected):
    assert geodesic_distance(z1, z2, R) == pytest.approx(expected, abs=1e-14)


@given(points, points, radii)
def test_distance_symmetric_and_bounded(z1, z2, R):
    d = geodesic_distance(z1, z2, R)
    assert d == pytest.approx(geodesic_distance(z2, z1, R), abs=1e-15)
    assert 0 <= d <= math.pi * R + 1e-12


@given(points, points, points)
def test_triangle_inequality(a, b, c):
    assert geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-12


@given(points, points, radii)
def test_cot_matches_lift_oracle(z1, z2, R):
    assume(abs(z1 - z2) > 1e-3 and abs(R * R + np.conj(z2) * z1) > 1e-3)
    c = cot_geodesic(z1, z2, R)
    assert c == pytest.approx(cot_oracle(z1, z2, R), rel=1e-9, abs=1e-9)


def test_cot_vectorized(rng):
    z1, z2 = random_points(rng, 100), random_points(rng, 100)
    c = cot_geodesic(z1, z2)
    assert c.shape == (100,)
    assert np.allclose(c, 1 / np.tan(geodesic_distance(z1, z2)), rtol=1e-10)


def test_cot_singular_pairs():
    with pytest.raises(SingularPair) as e:
        cot_geodesic(0.3, 0.3)
    assert e.value.kind == "collision"
    with pytest.raises(SingularPair) as e:
        cot_geodesic(0.5, antipode(0.5, 1.0), 1.0)
    assert e.value.kind == "antipodal"


def test_cot_known_value():
    # quarter circle apart: cot(pi/2) = 0; 60 degrees: cot = 1/sqrt 3
    assert cot_geodesic(0, 1) == pytest.approx(0, abs=1e-15)
    z = math.tan(math.pi / 6)  # polar angle pi/3 from the south pole
    assert cot_geodesic(0, z) == pytest.approx(1 / math.sqrt(3), rel=1e-14)


@given(points, radii)
def test_antipode_involution(z, R):
    assume(abs(z) > 1e-6)
    w = antipode(z, R)
    assert antipode(w, R) == pytest.approx(z, rel=1e-12)
    assert geodesic_distance(z, w, R) == pytest.approx(math.pi * R, rel=1e-7)


def test_antipode_poles_and_arrays():
    assert antipode(0) == INFINITY
    assert antipode(INFINITY) == 0
    out = antipode(np.array([0, INFINITY, 2j]), 2.0)
    assert np.isinf(out[0]) and out[1] == 0 and out[2] == pytest.approx(-2j)


def test_detect_singular():
    rep = detect_singular([0.1, 0.1 + 1e-14, 0.7], 1.0)
    assert rep.collision_pairs == {(0, 1)} and rep.singular
    rep = detect_singular([0.5, -2.0, 0.1], 1.0)
    assert rep.antipodal_pairs == {(0, 1)}
    rep = detect_singular([0, INFINITY], 1.0)
    assert rep.antipodal_pairs == {(0, 1)}
    assert not detect_singular([0.1, 0.2j, INFINITY]).singular
    with pytest.raises(ValueError):
        detect_singular([0.1])
    with pytest.raises(ValueError):
        detect_singular([0.1, 0.2], tol=0)
    with pytest.raises(SingularPair):
        check_nonsingular([INFINITY, INFINITY])


@pytest.mark.parametrize("z,label", [
    (0, RegionLabel.P_S),
    (0.2, RegionLabel.Omega1),
    (SQRT2M1, RegionLabel.T_S),
    (0.7j, RegionLabel.Omega2),
    (1.0, RegionLabel.E_R),
    (1.5, RegionLabel.Omega3),
    (1 / SQRT2M1, RegionLabel.T_N),
    (-5.0, RegionLabel.Omega4),
    (INFINITY, RegionLabel.P_N),
])
def test_region_labels(z, label):
    assert classify_region(z) is label


@given(points, radii)
def test_region_mirror_under_antipode(z, R):
    assume(abs(z) > 1e-6)
    assert classify_region(antipode(z, R), R) is classify_region(z, R).mirror


def test_region_scales_with_radius():
    assert classify_region(2 * SQRT2M1, 2.0) is RegionLabel.T_S
    assert classify_region(2.0, 2.0) is RegionLabel.E_R
    assert classify_region(1.0, 2.0) is RegionLabel.Omega2
