"""Residual systems for Moebius solutions and the special-configuration solvers.

A configuration moving under the flow of one of the five Killing fields is a
solution of the equations of motion iff, body by body,

    LHS_kind(z_k) = sum_{j != k} m_j T[k, j]

with T from :func:`curvednbody.dynamics.pair_force_terms`.  The solvers reduce
this system for symmetric two-, three- and four-body configurations to a
single scalar equation F(alpha) = G(alpha) on 0 < alpha < R and bracket its
roots by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import geometry as geo
from .dynamics import SystemConfig, SystemState, integrate, pair_force_terms, Tolerances
from .errors import SingularPair
from .geometry import INFINITY, SQRT2M1, antipode, check_nonsingular, classify_region, is_infinity
from .mobius import KillingKind, apply_mobius, killing_field
from .roots import argmax_unimodal, bisect, cauchy_bound, polish_newton, real_roots

ELLIPTIC_VARIANTS = {
    "a": KillingKind.ELLIPTIC_A,
    "b": KillingKind.ELLIPTIC_B,
    "c": KillingKind.ELLIPTIC_C,
}

TANGENT_RTOL = 1e-12
BRANCH_TOL = 1e-10


def _lhs(kind, z, R):
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    den = (R**2 + r2) ** 4
    if kind is KillingKind.ELLIPTIC_A:
        return 16 * R**6 * (1 + z * z) * (R**2 * z - np.conj(z)) / den
    if kind is KillingKind.ELLIPTIC_B:
        return 32 * R**6 * (r2 - R**2) * z / den
    if kind is KillingKind.ELLIPTIC_C:
        return 16 * R**6 * (1 - z * z) * (np.conj(z) + R**2 * z) / den
    if kind is KillingKind.HYPERBOLIC:
        return 8 * R**6 * (R**2 - r2) * z / den
    return -16 * R**6 * np.conj(z) / den


def _rhs_finite(z, m, R):
    return pair_force_terms(z, R) @ m


@dataclass
class ResidualReport:
    kind: KillingKind
    per_body: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    diagnostic: Optional[dict] = None

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.per_body)))

    @property
    def max_scaled(self) -> float:
        """Residual scaled by max(1, |LHS|) per body."""
        return float(np.max(np.abs(self.per_body) / np.maximum(1.0, np.abs(self.lhs))))

    def to_dict(self):
        d = {
            "kind": self.kind.value,
            "per_body": [abs(r) for r in self.per_body],
            "max_abs": self.max_abs,
            "max_scaled": self.max_scaled,
        }
        if self.diagnostic is not None:
            d["diagnostic"] = self.diagnostic
        return d


def residual(kind, positions, config, tol=1e-12) -> ResidualReport:
    """Residual LHS - RHS of the invariance system of ``kind`` at ``positions``.

    The north pole (INFINITY) is accepted for the elliptic kinds only: a body
    there contributes its limiting term m_j z_k/|z_k|^3 to the others, and its
    own equation is evaluated in the antipodal chart, which commutes with the
    rotation flows.
    """
    kind = KillingKind(kind)
    R = config.R
    m = config.masses
    z = np.array([complex(w) for w in positions])
    if len(z) != config.n:
        raise ValueError("positions and masses differ in length")
    check_nonsingular(z, R, tol)
    inf = np.isinf(z)
    if not inf.any():
        lhs = _lhs(kind, z, R)
        rhs = _rhs_finite(z, m, R)
        return ResidualReport(kind, lhs - rhs, lhs, rhs)
    if not kind.is_elliptic:
        raise ValueError(f"the point at infinity is not supported for {kind.value}")
    fin = ~inf
    lhs = np.zeros(len(z), dtype=complex)
    rhs = np.zeros(len(z), dtype=complex)
    zf = z[fin]
    lhs[fin] = _lhs(kind, zf, R)
    rhs[fin] = _rhs_finite(zf, m[fin], R) + m[inf].sum() * zf / np.abs(zf) ** 3
    w = antipode(z, R)
    lw = _lhs(kind, w, R)
    rw = _rhs_finite(w, m, R)
    lhs[inf] = lw[inf]
    rhs[inf] = rw[inf]
    return ResidualReport(kind, lhs - rhs, lhs, rhs)


def residual_elliptic(variant, positions, config) -> ResidualReport:
    try:
        kind = ELLIPTIC_VARIANTS[variant]
    except KeyError:
        kind = KillingKind(variant)
        if not kind.is_elliptic:
            raise ValueError(f"{variant!r} is not an elliptic variant") from None
    return residual(kind, positions, config)


def _radial_signs(rep, z):
    z = np.asarray(z, dtype=complex)
    lr = (rep.lhs * np.conj(z)).real
    rr = (rep.rhs * np.conj(z)).real
    return {
        "radial_lhs": lr.tolist(),
        "radial_rhs": rr.tolist(),
        "opposite_signs": [bool(a * b < 0) for a, b in zip(lr, rr)],
    }


def residual_hyperbolic(positions, config) -> ResidualReport:
    """Residual for the homothetic flow dz/dt = z, with a radial sign diagnostic."""
    rep = residual(KillingKind.HYPERBOLIC, positions, config)
    rep.diagnostic = _radial_signs(rep, positions)
    return rep


def residual_parabolic(positions, config) -> ResidualReport:
    """Residual for the translation flow dz/dt = 1.

    When all bodies share one real part t the nonexistence certificate at that
    t is attached as the diagnostic.
    """
    rep = residual(KillingKind.PARABOLIC, positions, config)
    z = np.asarray(positions, dtype=complex)
    if np.ptp(z.real) <= 1e-12 * max(1.0, np.max(np.abs(z.real))):
        cert = parabolic_certificate(z.imag, config.masses, config.R, t=float(z.real[0]))
        rep.diagnostic = cert.to_dict()
    return rep


@dataclass
class ParabolicCertificate:
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def contradiction(self) -> bool:
        return bool(np.all(self.lhs < 0) and np.all(self.rhs > 0))

    def to_dict(self):
        return {
            "lhs": self.lhs.tolist(),
            "rhs": self.rhs.tolist(),
            "contradiction": self.contradiction,
        }


def parabolic_certificate(betas, masses, R=1.0, t=0.0, tol=1e-12) -> ParabolicCertificate:
    """Both sides of the real-part equation for bodies at z_l = t + i beta_l.

    LHS_k = -16 R^6 / (R^2 + |z_k|^2)^4 is negative, and
    RHS_k = sum_j m_j (R^2 + |z_j|^2)^2 (beta_j - beta_k)^2 / (|z_j - z_k|^3 |R^2 + conj(z_j) z_k|^3)
    is positive for distinct betas, so no translation-invariant solution exists.
    """
    b = np.asarray(betas, dtype=float)
    m = np.asarray(masses, dtype=float)
    z = t + 1j * b
    check_nonsingular(z, R, tol)
    zk, zj = z[:, None], z[None, :]
    diff = np.abs(zj - zk)
    anti = np.abs(R**2 + np.conj(zj) * zk)
    eye = np.eye(len(z), dtype=bool)
    den = np.where(eye, 1.0, diff**3 * anti**3)
    W = np.where(eye, 0.0, (R**2 + np.abs(zj) ** 2) ** 2 * (b[None, :] - b[:, None]) ** 2 / den)
    lhs = -16 * R**6 / (R**2 + np.abs(z) ** 2) ** 4
    return ParabolicCertificate(lhs, W @ m)


@dataclass
class HyperbolicScan:
    alphas: np.ndarray
    residual: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def sign_changes(self):
        s = np.sign(self.residual)
        return [int(i) for i in np.nonzero(s[:-1] * s[1:] <= 0)[0]]

    @property
    def opposite_signs(self) -> bool:
        return bool(np.all(self.lhs * self.rhs < 0))

    def to_dict(self):
        return {
            "alpha_min": float(self.alphas[0]),
            "alpha_max": float(self.alphas[-1]),
            "points": len(self.alphas),
            "sign_changes": self.sign_changes,
            "lhs_rhs_opposite_everywhere": self.opposite_signs,
            "residual_min": float(np.min(self.residual)),
        }


def hyperbolic_scan(alphas, m=1.0, R=1.0) -> HyperbolicScan:
    """Residual of the homothetic system for the equal-mass pair (alpha, -alpha).

    On the real axis both sides are real; the scan records body 1.
    """
    cfg = SystemConfig([m, m], R)
    res, lhs, rhs = [], [], []
    for a in alphas:
        rep = residual(KillingKind.HYPERBOLIC, [a, -a], cfg)
        res.append(rep.per_body[0].real)
        lhs.append(rep.lhs[0].real)
        rhs.append(rep.rhs[0].real)
    return HyperbolicScan(np.asarray(alphas, float), np.array(res), np.array(lhs), np.array(rhs))


# --- two-body ratio equation -------------------------------------------------


def two_body_lambda_poly(m1, m2, alpha, R=1.0):
    """Coefficients (highest first) of
    m1 (R^2 - a^2)(R^2 + l^2 a^2)^2 + m2 l (R^2 - l^2 a^2)(R^2 + a^2)^2."""
    a2 = alpha * alpha
    c1 = m1 * (R**2 - a2)
    c2 = m2 * (R**2 + a2) ** 2
    return np.array([c1 * a2 * a2, -c2 * a2, 2 * c1 * R**2 * a2, c2 * R**2, c1 * R**4])


def two_body_lambda_roots(m1, m2, alpha, R=1.0):
    """Real roots ``ratio_lambda`` of the two-body quartic (z2 = ratio_lambda * z1)."""
    if not 0 < alpha < R:
        raise ValueError("alpha must lie in (0, R)")
    if m1 <= 0 or m2 <= 0:
        raise ValueError("masses must be positive")
    p = two_body_lambda_poly(m1, m2, alpha, R)
    B = max(10 * R**2 / alpha**2, cauchy_bound(p))
    return [float(polish_newton(p, x)) for x in real_roots(p, -B, B)]


def equal_mass_lambdas(alpha, R=1.0):
    """Closed-form roots for m1 = m2, sorted."""
    a = alpha
    return sorted([-1.0, R**2 / a**2, R * (a - R) / (a * (a + R)), -R * (R + a) / (a * (a - R))])


# --- existence functions -----------------------------------------------------


def two_body_F(alpha, R=1.0):
    """|R^2 - a^2| |a| / (R^2 + a^2)^2; maximum 1/(4R) at a = (sqrt 2 - 1) R."""
    a = alpha
    return abs(R**2 - a * a) * abs(a) / (R**2 + a * a) ** 2


def _two_body_dF(a, R):
    return (R**4 - 6 * R**2 * a * a + a**4) / (R**2 + a * a) ** 3


def euler3_F(alpha, R=1.0):
    a = alpha
    return 32 * (a * R**2 * (R**2 - a * a) / (R**2 + a * a) ** 2) ** 3


def euler3_G(alpha, m, M, R=1.0):
    a = alpha
    return M * ((R**2 - a * a) / (R**2 + a * a)) ** 2 + m / 4


def square4_F(alpha, m, R=1.0):
    a = abs(alpha)
    return 32 * R**6 * a**3 / (m * (R**2 + a * a) ** 6)


def square4_G(alpha, R=1.0):
    a = alpha
    d = abs(R**2 - a * a)
    if d == 0:
        return math.inf
    return 1 / (4 * d**3) + 1 / math.sqrt(2 * (a**4 + R**4) ** 3)


@dataclass
class FGAnalysis:
    """Intersections of F and G on (0, R).

    ``ratio`` is F/G rewritten so that it scales inversely with the masses;
    its maximum sits at ``alpha_tan``.  ``mass_threshold`` is the mass (or,
    for several masses, the common mass scale factor) at which F and G touch.
    """

    F: Callable
    G: Callable
    ratio: Callable
    alpha_tan: float
    ratio_max: float
    mass_threshold: float
    intersections: list = field(default_factory=list)

    @property
    def tangent(self):
        return any(kind == "tangent" for _, kind in self.intersections)


def _analyse(F, G, ratio, alpha_tan, mass_scale, R):
    rmax = ratio(alpha_tan)
    out = FGAnalysis(F, G, ratio, alpha_tan, rmax, mass_scale * rmax)
    if abs(rmax - 1) <= TANGENT_RTOL * max(1.0, rmax):
        out.intersections.append((alpha_tan, "tangent"))
    elif rmax > 1:
        h = lambda a: ratio(a) - 1
        for lo, hi in ((0.0, alpha_tan), (alpha_tan, R)):
            out.intersections.append((bisect(h, lo, hi, xtol=1e-14 * R), "transversal"))
    return out


def two_body_analysis(m, family, R=1.0) -> FGAnalysis:
    """Family 1: F = m^(1/3)/(4 2^(1/3) R^2); family 2: F = m/(8 R^4)."""
    F = lambda a: two_body_F(a, R)
    if family == 1:
        g = m ** (1 / 3) / (4 * 2 ** (1 / 3) * R**2)
        ratio = lambda a: 128 * R**6 * two_body_F(a, R) ** 3 / m
    elif family == 2:
        g = m / (8 * R**4)
        ratio = lambda a: 8 * R**4 * two_body_F(a, R) / m
    else:
        raise ValueError("family must be 1 or 2")
    return _analyse(F, lambda a: g, ratio, SQRT2M1 * R, m, R)


def _interior_argmax(dlog, R):
    eps = 1e-9 * R
    crit = argmax_unimodal(dlog, eps, R - eps, n=2000, xtol=1e-15 * R)
    if not crit:
        raise RuntimeError("no interior maximum found")
    return crit


def euler3_analysis(m, M, R=1.0) -> FGAnalysis:
    """Bodies (m, M, m) at (alpha, 0, -alpha); ``mass_threshold`` is the common
    factor s such that masses (s m, s M) give a tangency."""
    F = lambda a: euler3_F(a, R)
    G = lambda a: euler3_G(a, m, M, R)

    def ratio(a):
        return F(a) / G(a) if 0 < a < R else 0.0

    def dlog(a):
        c = (R**2 - a * a) / (R**2 + a * a)
        dc = -4 * a * R**2 / (R**2 + a * a) ** 2
        dF = 3 * _two_body_dF(a, R) / two_body_F(a, R)
        return dF - 2 * M * c * dc / G(a)

    crit = _interior_argmax(dlog, R)
    a_tan = max(crit, key=ratio)
    return _analyse(F, G, ratio, a_tan, 1.0, R)


def square4_analysis(m, R=1.0) -> FGAnalysis:
    """Equal masses m at (alpha, -alpha, i alpha, -i alpha)."""
    F = lambda a: square4_F(a, m, R)
    G = lambda a: square4_G(a, R)

    def ratio(a):
        return F(a) / G(a) if 0 < a < R else 0.0

    def dlog(a):
        q = a**4 + R**4
        g = G(a)
        dg = 1.5 * a / (R**2 - a * a) ** 4 - 3 * math.sqrt(2) * a**3 / q**2.5
        return 3 / a - 12 * a / (R**2 + a * a) - dg / g

    crit = _interior_argmax(dlog, R)
    a_tan = max(crit, key=ratio)
    return _analyse(F, G, ratio, a_tan, m, R)


# --- solution branches -------------------------------------------------------


@dataclass
class SolutionBranch:
    kind: KillingKind
    positions: list
    velocities: list
    regions: list
    degenerate: bool
    family_label: str
    masses: list
    R: float
    alpha: float
    residual_max: float = math.nan

    @property
    def config(self):
        return SystemConfig(self.masses, self.R)

    def to_dict(self):
        from .io import encode_complex

        return {
            "kind": self.kind.value,
            "family_label": self.family_label,
            "R": self.R,
            "masses": list(self.masses),
            "positions": [encode_complex(z) for z in self.positions],
            "velocities": [encode_complex(v) for v in self.velocities],
            "regions": [r.value for r in self.regions],
            "degenerate": self.degenerate,
            "residual_max": self.residual_max,
        }


def make_branch(kind, positions, masses, R, label, alpha, degenerate=False):
    kind = KillingKind(kind)
    positions = [complex(z) for z in positions]
    vel = [INFINITY if is_infinity(z) else complex(killing_field(kind, z)) for z in positions]
    cfg = SystemConfig(masses, R)
    br = SolutionBranch(
        kind,
        positions,
        vel,
        [classify_region(z, R) for z in positions],
        degenerate,
        label,
        [float(x) for x in masses],
        float(R),
        float(alpha),
    )
    br.residual_max = residual(kind, positions, cfg).max_abs
    return br


def conjugate_branch(br: SolutionBranch, label) -> SolutionBranch:
    """The antipodal image of a whole branch (an isometry commuting with the
    rotation flow), e.g. the pair (alpha, -alpha) becomes (-R^2/alpha, R^2/alpha)."""
    pos = [antipode(z, br.R) for z in br.positions]
    return make_branch(br.kind, pos, br.masses, br.R, label, br.alpha, br.degenerate)


def two_body_solve(m, R=1.0):
    """All rotation-invariant equal-mass two-body branches on the real axis.

    Family 1 pairs alpha with -alpha, family 2 pairs it with
    R(alpha - R)/(alpha + R); each comes with its antipodal image.  At the
    threshold m = 2 R^3 both families collapse to the degenerate pair on the
    southern tropic and its image on the northern tropic.
    """
    if m <= 0:
        raise ValueError("mass must be positive")
    kind = KillingKind.ELLIPTIC_B
    masses = [m, m]
    out = []
    an1 = two_body_analysis(m, 1, R)
    if an1.tangent:
        a = an1.alpha_tan
        br = make_branch(kind, [a, -a], masses, R, "3.a", a, degenerate=True)
        return [br, conjugate_branch(br, "3.b")]
    for family, an in ((1, an1), (2, two_body_analysis(m, 2, R))):
        for (a, _), sub in zip(an.intersections, "ab"):
            partner = -a if family == 1 else R * (a - R) / (a + R)
            br = make_branch(kind, [a, partner], masses, R, f"{family}.{sub}.i", a)
            out += [br, conjugate_branch(br, f"{family}.{sub}.ii")]
    return out


def euler3_solve(m, M, R=1.0):
    """Eulerian configuration: mass M at the south pole, two masses m at +-alpha.

    The antipodal images carry the central mass to the north pole (INFINITY).
    """
    if m <= 0 or M <= 0:
        raise ValueError("masses must be positive")
    an = euler3_analysis(m, M, R)
    out = []
    tags = ["tan"] if an.tangent else ["1", "2"]
    for (a, how), tag in zip(an.intersections, tags):
        br = make_branch(KillingKind.ELLIPTIC_B, [a, 0, -a], [m, M, m], R,
                         f"euler3.{tag}", a, degenerate=how == "tangent")
        out += [br, conjugate_branch(br, f"euler3.{tag}.conj")]
    return out


def square4_solve(m, R=1.0):
    """Square of four equal masses on one circle, with its antipodal image."""
    if m <= 0:
        raise ValueError("mass must be positive")
    an = square4_analysis(m, R)
    out = []
    tags = ["tan"] if an.tangent else ["1", "2"]
    for (a, how), tag in zip(an.intersections, tags):
        br = make_branch(KillingKind.ELLIPTIC_B, [a, -a, 1j * a, -1j * a], [m] * 4, R,
                         f"square4.{tag}", a, degenerate=how == "tangent")
        out += [br, conjugate_branch(br, f"square4.{tag}.conj")]
    return out


def transport_branch(br: SolutionBranch, kind) -> SolutionBranch:
    """Push a rotation-invariant branch through the SU(2) conjugator onto the
    coaxal flow ``kind`` (unit-radius chart)."""
    from .mobius import conjugator_to_rotation

    A = conjugator_to_rotation(kind)
    pos = [apply_mobius(A, z) for z in br.positions]
    return make_branch(kind, pos, br.masses, br.R, br.family_label + "." + KillingKind(kind).value,
                       br.alpha, br.degenerate)


@dataclass
class InvarianceReport:
    max_residual: float
    max_radius_drift: float
    final_deviation: float
    energy_drift: float
    angmom_drift: float
    steps: int


def verify_invariance(br: SolutionBranch, horizon=math.pi, opts=None, check=True) -> InvarianceReport:
    """Integrate a branch and measure how well the flow keeps it a solution.

    Branches with a body at the north pole are integrated in the antipodal
    chart.  ``final_deviation`` compares the end state with the exact flow of
    the Killing field applied to the initial positions.
    """
    from .dynamics import conserved_drift
    from .mobius import exp_subgroup

    if check and not br.residual_max <= BRANCH_TOL:
        raise ValueError(f"branch residual {br.residual_max:.3e} exceeds {BRANCH_TOL}")
    z0 = np.array(br.positions, dtype=complex)
    if np.isinf(z0).any():
        z0 = antipode(z0, br.R)
    v0 = np.array([killing_field(br.kind, z) for z in z0])
    cfg = br.config
    traj = integrate(SystemState(z0, v0), cfg, horizon, opts or Tolerances())
    res = max(residual(br.kind, s.positions, cfg).max_abs for s in traj.samples)
    radius = 0.0
    if br.kind is KillingKind.ELLIPTIC_B:
        radius = float(np.max(np.abs(np.abs(traj.positions) - np.abs(z0))))
    A = exp_subgroup(br.kind, horizon) if br.kind is not KillingKind.ELLIPTIC_B else None
    if br.kind is KillingKind.ELLIPTIC_B:
        exact = z0 * np.exp(2j * horizon)
    else:
        exact = np.array([apply_mobius(A, z) for z in z0])
    dev = float(np.max(np.abs(traj.positions[-1] - exact)))
    dE, dJ = conserved_drift(traj, cfg)
    return InvarianceReport(res, radius, dev, dE, dJ, traj.meta["accepted_steps"])
