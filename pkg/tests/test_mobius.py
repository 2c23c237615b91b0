import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import assume, given, strategies as st

from conftest import points
from curvednbody.errors import InvalidKind, SingularMatrix
from curvednbody.geometry import INFINITY, geodesic_distance
from curvednbody.mobius import (
    GENERATORS,
    I2,
    KillingKind,
    apply_mobius,
    canonical_sign,
    conjugator_to_rotation,
    exp_subgroup,
    flow_class,
    in_su2,
    iwasawa_decompose,
    killing_field,
    mat,
    mat_det,
    mat_inv,
    mobius_derivative,
)

KINDS = list(KillingKind)
times = st.floats(-3, 3, allow_nan=False)


def random_sl2(rng):
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return A / np.sqrt(mat_det(A))


def random_su2(rng):
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
    n = math.hypot(abs(a), abs(b))
    a, b = a / n, b / n
    return mat(a, -np.conj(b), b, np.conj(a))


@pytest.mark.parametrize("kind", KINDS)
@given(t=times)
def test_exp_closed_form_matches_expm(kind, t):
    assert np.allclose(exp_subgroup(kind, t), scipy.linalg.expm(t * GENERATORS[kind]), atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_one_parameter_group(kind):
    A = exp_subgroup(kind, 0.3) @ exp_subgroup(kind, 0.9)
    assert np.allclose(A, exp_subgroup(kind, 1.2), atol=1e-14)
    assert np.allclose(exp_subgroup(kind, 0.0), I2)


@pytest.mark.parametrize("kind", KINDS)
@given(z=points)
def test_killing_field_is_flow_velocity(kind, z):
    h = 1e-6
    fd = (apply_mobius(exp_subgroup(kind, h), z) - apply_mobius(exp_subgroup(kind, -h), z)) / (2 * h)
    v = killing_field(kind, z)
    assert abs(fd - v) <= 1e-6 * max(1.0, abs(v))


def test_killing_field_values():
    z = 0.3 + 0.4j
    assert killing_field("elliptic-a", z) == 1 + z * z
    assert killing_field("elliptic-b", z) == 2j * z
    assert killing_field("elliptic-c", z) == 1j * (1 - z * z)
    assert killing_field("hyperbolic", z) == z
    assert killing_field("parabolic", z) == 1


@given(z=points, t=times)
def test_hyperbolic_flow_scales(z, t):
    assert apply_mobius(exp_subgroup(KillingKind.HYPERBOLIC, t), z) == pytest.approx(z * math.exp(t), rel=1e-13)


@pytest.mark.parametrize("kind", [KillingKind.ELLIPTIC_A, KillingKind.ELLIPTIC_B, KillingKind.ELLIPTIC_C])
@given(z1=points, z2=points, t=times)
def test_elliptic_flows_are_isometries(kind, z1, z2, t):
    A = exp_subgroup(kind, t)
    assert in_su2(A)
    d = geodesic_distance(apply_mobius(A, z1), apply_mobius(A, z2))
    assert d == pytest.approx(geodesic_distance(z1, z2), abs=1e-9)


def test_apply_mobius_infinity():
    A = mat(1, 2, 3, 4)
    assert apply_mobius(A, INFINITY) == pytest.approx(1 / 3)
    assert apply_mobius(A, -4 / 3) == INFINITY
    assert apply_mobius(mat(2, 0, 0, 0.5), INFINITY) == INFINITY


@given(z=points)
def test_mobius_derivative(z):
    A = mat(1 + 1j, 2, 0.5j, 1)
    assume(abs(A[1, 0] * z + A[1, 1]) > 1e-2)
    h = 1e-6
    fd = (apply_mobius(A, z + h) - apply_mobius(A, z - h)) / (2 * h)
    assert abs(fd - mobius_derivative(A, z)) <= 1e-6 * max(1, abs(fd))


def test_mat_inv(rng):
    A = random_sl2(rng)
    assert np.allclose(mat_inv(A) @ A, I2)
    with pytest.raises(SingularMatrix):
        mat_inv(mat(1, 2, 2, 4))


def test_iwasawa_shape(rng):
    for _ in range(100):
        A = random_sl2(rng)
        P, R, S = iwasawa_decompose(A)
        assert np.allclose(P @ R @ S, A, atol=1e-12)
        assert in_su2(S)
        assert P[0, 1] == P[1, 0] == 0 and P[0, 0].real > 0 and P[1, 1].real > 0
        assert abs(P[0, 0].imag) == abs(P[1, 1].imag) == 0
        assert np.allclose(np.diag(R), 1) and R[1, 0] == 0


def test_iwasawa_against_scipy_rq(rng):
    # A = T S with T upper triangular; scipy's RQ factor agrees after fixing phases
    for _ in range(50):
        A = random_sl2(rng)
        T, Q = scipy.linalg.rq(A)
        D = np.diag(np.exp(-1j * np.angle(np.diag(T))))
        T = T @ D
        P, R, _ = iwasawa_decompose(A)
        assert np.allclose(P @ R, T, atol=1e-12)


def test_iwasawa_trivial_on_su2(rng):
    for _ in range(50):
        U = random_su2(rng)
        P, R, S = iwasawa_decompose(U)
        assert np.allclose(P, I2, atol=1e-12) and np.allclose(R, I2, atol=1e-12)
        assert np.allclose(S, U, atol=1e-12)


def test_iwasawa_on_subgroups():
    H = exp_subgroup(KillingKind.HYPERBOLIC, 1.0)
    P, R, S = iwasawa_decompose(H)
    assert np.allclose(P, H) and np.allclose(R, I2) and np.allclose(S, I2)
    N = exp_subgroup(KillingKind.PARABOLIC, 2.5)
    P, R, S = iwasawa_decompose(N)
    assert np.allclose(R, N) and np.allclose(P, I2) and np.allclose(S, I2)


def test_iwasawa_rejects_non_sl2():
    with pytest.raises(SingularMatrix):
        iwasawa_decompose(mat(1, 0, 0, 2))


@pytest.mark.parametrize("A,tag", [
    (I2, "identity"),
    (-I2, "identity"),
    (exp_subgroup("elliptic-b", 0.7), "elliptic"),
    (exp_subgroup("elliptic-a", 2.0), "elliptic"),
    (exp_subgroup("hyperbolic", 1.0), "hyperbolic"),
    (exp_subgroup("parabolic", 1.0), "parabolic"),
    (mat(0, 1, -1, 1), "elliptic"),
    (mat(1 + 1j, 0, 0, 1 / (1 + 1j)), "loxodromic"),
])
def test_flow_class(A, tag):
    assert flow_class(A) == tag


def test_canonical_sign():
    A = mat(-1, 2, 3, 4)
    assert np.allclose(canonical_sign(A), -A)
    assert np.allclose(canonical_sign(mat(0, -1j, 1, 0)), mat(0, 1j, -1, 0))


@pytest.mark.parametrize("kind", [KillingKind.ELLIPTIC_A, KillingKind.ELLIPTIC_C])
def test_conjugator_pushforward(kind, rng):
    A = conjugator_to_rotation(kind)
    assert in_su2(A)
    h = 1e-6
    for z in rng.normal(size=50) + 1j * rng.normal(size=50):
        w = apply_mobius(A, z)
        fd = (apply_mobius(A, z * np.exp(2j * h)) - apply_mobius(A, z * np.exp(-2j * h))) / (2 * h)
        assert abs(fd - killing_field(kind, w)) <= 1e-6 * max(1, abs(fd))


def test_conjugator_rejects_other_kinds():
    for bad in ("elliptic-b", "hyperbolic", "parabolic", "nope"):
        with pytest.raises(InvalidKind):
            conjugator_to_rotation(bad)
