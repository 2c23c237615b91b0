"""Moebius transformations, the five generator flows and Iwasawa factorization.

Matrices are plain 2x2 complex numpy arrays.  The three elliptic generators
act isometrically on the unit-radius chart (R = 1).
"""
from __future__ import annotations

import cmath
import enum
import math
from typing import NamedTuple

import numpy as np

from .errors import InvalidKind, SingularMatrix
from .geometry import INFINITY, is_infinity

I2 = np.eye(2, dtype=complex)


class KillingKind(str, enum.Enum):
    ELLIPTIC_A = "elliptic-a"
    ELLIPTIC_B = "elliptic-b"
    ELLIPTIC_C = "elliptic-c"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"

    @property
    def is_elliptic(self):
        return self in (KillingKind.ELLIPTIC_A, KillingKind.ELLIPTIC_B, KillingKind.ELLIPTIC_C)


# Lie algebra generators X1..X5
GENERATORS = {
    KillingKind.ELLIPTIC_A: np.array([[0, 1], [-1, 0]], dtype=complex),
    KillingKind.ELLIPTIC_B: np.array([[1j, 0], [0, -1j]], dtype=complex),
    KillingKind.ELLIPTIC_C: np.array([[0, 1j], [1j, 0]], dtype=complex),
    KillingKind.HYPERBOLIC: np.array([[0.5, 0], [0, -0.5]], dtype=complex),
    KillingKind.PARABOLIC: np.array([[0, 1], [0, 0]], dtype=complex),
}


def mat(a, b, c, d):
    return np.array([[a, b], [c, d]], dtype=complex)


def mat_mul(A, B):
    return np.asarray(A, dtype=complex) @ np.asarray(B, dtype=complex)


def mat_det(A):
    return complex(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])


def mat_inv(A, tol=0.0):
    det = mat_det(A)
    if abs(det) <= tol:
        raise SingularMatrix(f"determinant {det} is zero")
    return np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]], dtype=complex) / det


def in_sl2(A, tol=1e-12) -> bool:
    return abs(mat_det(A) - 1) <= tol


def in_su2(A, tol=1e-12) -> bool:
    A = np.asarray(A, dtype=complex)
    return in_sl2(A, tol) and np.max(np.abs(A.conj().T @ A - I2)) <= tol


def canonical_sign(A):
    """Pick the representative of {A, -A} whose first nonzero entry has
    positive real part (positive imaginary part when the real part is 0)."""
    A = np.asarray(A, dtype=complex)
    for x in A.ravel():
        if x != 0:
            if x.real < 0 or (x.real == 0 and x.imag < 0):
                return -A
            return A
    return A


def apply_mobius(A, z):
    """(az + b)/(cz + d), with the point at infinity handled as a value."""
    a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    z = complex(z)
    if is_infinity(z):
        return complex(a / c) if c != 0 else INFINITY
    den = c * z + d
    if den == 0:
        return INFINITY
    return complex((a * z + b) / den)


def mobius_derivative(A, z):
    """f_A'(z) = det A / (cz + d)^2."""
    den = A[1, 0] * z + A[1, 1]
    return complex(mat_det(A) / den**2)


def exp_subgroup(kind, t):
    kind = KillingKind(kind)
    if kind is KillingKind.ELLIPTIC_A:
        c, s = math.cos(t), math.sin(t)
        return mat(c, s, -s, c)
    if kind is KillingKind.ELLIPTIC_B:
        e = cmath.exp(1j * t)
        return mat(e, 0, 0, 1 / e)
    if kind is KillingKind.ELLIPTIC_C:
        c, s = math.cos(t), math.sin(t)
        return mat(c, 1j * s, 1j * s, c)
    if kind is KillingKind.HYPERBOLIC:
        return mat(math.exp(t / 2), 0, 0, math.exp(-t / 2))
    return mat(1, t, 0, 1)


def killing_field(kind, z):
    """Velocity of the flow of ``kind`` at the finite point ``z``."""
    kind = KillingKind(kind)
    if kind is KillingKind.ELLIPTIC_A:
        return 1 + z * z
    if kind is KillingKind.ELLIPTIC_B:
        return 2j * z
    if kind is KillingKind.ELLIPTIC_C:
        return 1j * (1 - z * z)
    if kind is KillingKind.HYPERBOLIC:
        return z * (1 + 0j)
    return np.ones_like(z, dtype=complex) if np.ndim(z) else 1 + 0j


class IwasawaFactors(NamedTuple):
    P: np.ndarray  # positive real diagonal
    R: np.ndarray  # unipotent upper triangular
    S: np.ndarray  # special unitary


def iwasawa_decompose(A, tol=1e-9) -> IwasawaFactors:
    """Factor A in SL(2,C) as P @ R @ S.

    The rows of A are orthonormalized bottom-up, giving A = T @ S with T upper
    triangular with positive diagonal; T then splits as P @ R.
    """
    A = np.asarray(A, dtype=complex)
    det = mat_det(A)
    if abs(det - 1) > tol:
        raise SingularMatrix(f"matrix is not in SL(2,C): det = {det}")
    r1, r2 = A[0], A[1]
    t22 = np.linalg.norm(r2)
    s2 = r2 / t22
    t12 = np.vdot(s2, r1)
    w = r1 - t12 * s2
    t11 = np.linalg.norm(w)
    s1 = w / t11
    S = np.array([s1, s2])
    P = mat(t11, 0, 0, t22)
    R = mat(1, t12 / t11, 0, 1)
    return IwasawaFactors(P, R, S)


def flow_class(A, tol=1e-12) -> str:
    """Trace classification of the Moebius map of A (identity, elliptic,
    parabolic, hyperbolic, loxodromic)."""
    A = np.asarray(A, dtype=complex)
    if np.max(np.abs(A - I2)) <= tol or np.max(np.abs(A + I2)) <= tol:
        return "identity"
    tr = A[0, 0] + A[1, 1]
    if abs(tr.imag) > tol:
        return "loxodromic"
    a = abs(tr.real)
    if abs(a - 2) <= tol:
        return "parabolic"
    return "elliptic" if a < 2 else "hyperbolic"


_CONJUGATORS = {
    # alpha1 = 1/sqrt(2), alpha2 = 0: z -> (z + i)/(iz + 1), sends 0, inf to i, -i
    KillingKind.ELLIPTIC_A: mat(1, 1j, 1j, 1) / math.sqrt(2),
    # z -> (z - 1)/(z + 1), sends 0, inf to -1, 1
    KillingKind.ELLIPTIC_C: mat(1, -1, 1, 1) / math.sqrt(2),
}


def conjugator_to_rotation(kind):
    """SU(2) matrix A whose map pushes the rotation field 2iz forward to ``kind``.

    If z(t) solves dz/dt = 2iz then w(t) = f_A(z(t)) solves the flow of
    ``kind``.  Only the two coaxal elliptic kinds are accepted.
    """
    try:
        kind = KillingKind(kind)
    except ValueError:
        raise InvalidKind(f"unknown kind {kind!r}") from None
    if kind not in _CONJUGATORS:
        raise InvalidKind(f"no rotation conjugator for {kind.value}")
    return canonical_sign(_CONJUGATORS[kind].copy())
