"""Cotangent potential, equations of motion and trajectory integration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SingularityApproached, SingularPair, StepSizeUnderflow
from .geometry import SpaceForm, check_nonsingular, conformal_factor
from .mobius import apply_mobius, mobius_derivative


@dataclass
class SystemConfig:
    masses: np.ndarray
    R: float = 1.0

    def __post_init__(self):
        self.masses = np.asarray(self.masses, dtype=float)
        SpaceForm(self.R)
        if self.masses.ndim != 1 or len(self.masses) < 2:
            raise ValueError("need at least two masses")
        if np.any(self.masses <= 0):
            raise ValueError("masses must be positive")

    @property
    def n(self):
        return len(self.masses)

    @property
    def form(self):
        return SpaceForm(self.R)


@dataclass
class SystemState:
    positions: np.ndarray
    velocities: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=complex)
        self.velocities = np.asarray(self.velocities, dtype=complex)
        if self.positions.shape != self.velocities.shape:
            raise ValueError("positions and velocities differ in length")

    def to_vector(self):
        """Real state vector (re z, im z, re v, im v) per body."""
        y = np.empty((len(self.positions), 4))
        y[:, 0] = self.positions.real
        y[:, 1] = self.positions.imag
        y[:, 2] = self.velocities.real
        y[:, 3] = self.velocities.imag
        return y.ravel()

    @classmethod
    def from_vector(cls, y, t=0.0):
        y = np.asarray(y).reshape(-1, 4)
        return cls(y[:, 0] + 1j * y[:, 1], y[:, 2] + 1j * y[:, 3], t)


def _check(state, config, tol=1e-12):
    if len(state.positions) != config.n:
        raise ValueError("state and config disagree on the number of bodies")
    check_nonsingular(state.positions, config.R, tol)


def pair_force_terms(z, R=1.0):
    """Matrix T[k, j] of the pairwise terms shared by the gradient and the
    residual systems:

        (|z_j|^2 + R^2)^2 (R^2 + conj(z_j) z_k)(z_j - z_k)
        ---------------------------------------------------
             |z_j - z_k|^3 |R^2 + conj(z_j) z_k|^3

    with zeros on the diagonal.
    """
    z = np.asarray(z, dtype=complex)
    zk = z[:, None]
    zj = z[None, :]
    diff = zj - zk
    anti = R**2 + np.conj(zj) * zk
    n = len(z)
    eye = np.eye(n, dtype=bool)
    den = np.abs(diff) ** 3 * np.abs(anti) ** 3
    den[eye] = 1.0
    T = (np.abs(zj) ** 2 + R**2) ** 2 * anti * diff / den
    T[eye] = 0.0
    return T


def potential(state, config):
    """U_R = (1/R) sum_{k<j} m_k m_j cot(d_kj / R)."""
    _check(state, config)
    R = config.R
    z = state.positions
    m = config.masses
    k, j = np.triu_indices(len(z), 1)
    zk, zj = z[k], z[j]
    num = 4 * R**2 * (zk * np.conj(zj)).real + (np.abs(zk) ** 2 - R**2) * (np.abs(zj) ** 2 - R**2)
    cot = num / (2 * R * np.abs(zj - zk) * np.abs(R**2 + np.conj(zj) * zk))
    return float(np.sum(m[k] * m[j] * cot) / R)


def grad_potential(state, config, k=None):
    """Wirtinger derivative dU/d(conj z_k); all bodies when ``k`` is None."""
    _check(state, config)
    R = config.R
    z = state.positions
    m = config.masses
    g = m * (R**2 + np.abs(z) ** 2) / (4 * R**2) * (pair_force_terms(z, R) @ m)
    return g if k is None else complex(g[k])


def _accel(z, v, m, R):
    r2 = R**2 + np.abs(z) ** 2
    geo = 2 * np.conj(z) * v * v / r2
    return geo + r2**3 / (8 * R**6) * (pair_force_terms(z, R) @ m)


def acceleration(state, config):
    """Second derivatives of all positions from the equations of motion."""
    _check(state, config)
    return _accel(state.positions, state.velocities, config.masses, config.R)


def geodesic_acceleration(state, config):
    """Acceleration with the potential switched off (free geodesic motion)."""
    z, v = state.positions, state.velocities
    return 2 * np.conj(z) * v * v / (config.R**2 + np.abs(z) ** 2)


def kinetic_energy(state, config):
    lam = conformal_factor(state.positions, config.R)
    return float(0.5 * np.sum(config.masses * lam * np.abs(state.velocities) ** 2))


def energy(state, config):
    return kinetic_energy(state, config) - potential(state, config)


def angular_momentum(state, config):
    """Noether charge of the rotations z -> e^{i theta} z."""
    _check(state, config)
    z, v = state.positions, state.velocities
    lam = conformal_factor(z, config.R)
    return float(np.sum(config.masses * lam * (np.conj(z) * v).imag))


def validate_gradient(state, config, step=1e-6):
    """Compare :func:`grad_potential` with central differences of the potential.

    Returns max_k |fd_k - grad_k| / max_k |grad_k| (norm-wise relative error).
    """
    g = grad_potential(state, config)
    fd = np.empty_like(g)
    z0 = state.positions
    for k in range(len(z0)):
        def u(dz):
            z = z0.copy()
            z[k] += dz
            return potential(SystemState(z, state.velocities, state.t), config)

        dx = (u(step) - u(-step)) / (2 * step)
        dy = (u(1j * step) - u(-1j * step)) / (2 * step)
        fd[k] = 0.5 * (dx + 1j * dy)
    scale = np.max(np.abs(g))
    return float(np.max(np.abs(fd - g)) / scale) if scale > 0 else float(np.max(np.abs(fd)))


def transform_state(A, state):
    """Image of a state under the Moebius map f_A (velocities pushed forward)."""
    z = np.array([apply_mobius(A, w) for w in state.positions])
    v = np.array([mobius_derivative(A, w) * u for w, u in zip(state.positions, state.velocities)])
    return SystemState(z, v, state.t)


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass
class Tolerances:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    singular_tol: float = 1e-8
    max_steps: int = 1_000_000
    safety: float = 0.9
    min_factor: float = 0.2
    max_factor: float = 10.0


@dataclass
class Trajectory:
    t: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def state(self, i):
        return SystemState(self.positions[i], self.velocities[i], float(self.t[i]))

    @property
    def samples(self):
        return [self.state(i) for i in range(len(self))]

    @property
    def final(self):
        return self.state(-1)


def _rhs_factory(config):
    m, R = config.masses, config.R

    def rhs(y):
        Y = y.reshape(-1, 4)
        z = Y[:, 0] + 1j * Y[:, 1]
        v = Y[:, 2] + 1j * Y[:, 3]
        a = _accel(z, v, m, R)
        out = np.empty_like(Y)
        out[:, 0] = Y[:, 2]
        out[:, 1] = Y[:, 3]
        out[:, 2] = a.real
        out[:, 3] = a.imag
        return out.ravel()

    return rhs


def _guard(y, R, tol, t):
    Y = y.reshape(-1, 4)
    z = Y[:, 0] + 1j * Y[:, 1]
    k, j = np.triu_indices(len(z), 1)
    sep = np.abs(z[j] - z[k])
    anti = np.abs(R**2 + np.conj(z[j]) * z[k])
    i = int(np.argmin(sep))
    if sep[i] < tol * R:
        raise SingularityApproached((int(k[i]), int(j[i])), "collision", t, float(sep[i]))
    i = int(np.argmin(anti))
    if anti[i] < tol * R**2:
        raise SingularityApproached((int(k[i]), int(j[i])), "antipodal", t, float(anti[i]))


def _initial_step(rhs, y0, f0, rtol, atol):
    sc = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / sc) ** 2))
    d1 = np.sqrt(np.mean((f0 / sc) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = rhs(y0 + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / sc) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def integrate(initial, config, t_end, opts=None):
    """Integrate the equations of motion from ``initial`` to ``t_end``.

    Adaptive Dormand-Prince 5(4) with PI step-size control.  Every accepted
    step is stored.  Raises :class:`SingularityApproached` when a pair comes
    within ``opts.singular_tol`` of a collision or an antipodal configuration.
    """
    opts = opts or Tolerances()
    try:
        _check(initial, config)
    except SingularPair as exc:
        raise SingularityApproached(exc.pair, exc.kind, initial.t, exc.gap) from exc
    t = float(initial.t)
    if not t_end > t:
        raise ValueError("t_end must exceed the initial time")
    R = config.R
    rhs = _rhs_factory(config)
    y = initial.to_vector()
    _guard(y, R, opts.singular_tol, t)
    f = rhs(y)
    h = min(_initial_step(rhs, y, f, opts.rel_tol, opts.abs_tol), t_end - t)

    ts, ys = [t], [y.copy()]
    beta = 0.04
    alpha = 0.2 - 0.75 * beta
    err_old = 1e-4
    n_accept = n_reject = n_eval = 0
    K = np.empty((7, y.size))
    while t < t_end:
        if n_accept + n_reject >= opts.max_steps:
            raise StepSizeUnderflow(t, h)
        if h <= 1e-14 * max(1.0, abs(t)):
            raise StepSizeUnderflow(t, h)
        last = t + h >= t_end
        if last:
            h = t_end - t
        K[0] = f
        for s in range(1, 7):
            K[s] = rhs(y + h * (np.dot(_A[s], K[:s])))
        n_eval += 6
        y_new = y + h * (_B5 @ K)
        err_vec = h * (_E @ K)
        sc = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(np.mean((err_vec / sc) ** 2))
        if not math.isfinite(err):
            n_reject += 1
            h *= 0.25
            continue
        if err <= 1.0:
            t = t_end if last else t + h
            y = y_new
            f = K[6].copy()
            _guard(y, R, opts.singular_tol, t)
            ts.append(t)
            ys.append(y.copy())
            n_accept += 1
            fac = opts.safety * err ** (-alpha) * err_old**beta if err > 0 else opts.max_factor
            fac = min(opts.max_factor, max(opts.min_factor, fac))
            err_old = max(err, 1e-4)
            h *= fac
        else:
            n_reject += 1
            h *= max(opts.min_factor, opts.safety * err ** (-0.2))

    Y = np.array(ys).reshape(len(ys), -1, 4)
    meta = {
        "integrator": "dopri5",
        "accepted_steps": n_accept,
        "rejected_steps": n_reject,
        "rhs_evaluations": n_eval + 1,
        "rel_tol": opts.rel_tol,
        "abs_tol": opts.abs_tol,
        "singular_tol": opts.singular_tol,
    }
    return Trajectory(
        np.array(ts), Y[:, :, 0] + 1j * Y[:, :, 1], Y[:, :, 2] + 1j * Y[:, :, 3], meta
    )


def conserved_drift(traj, config):
    """Max relative drift of energy and angular momentum along a trajectory,
    each measured against max(1, |initial value|)."""
    E = np.array([energy(s, config) for s in traj.samples])
    J = np.array([angular_momentum(s, config) for s in traj.samples])
    dE = np.max(np.abs(E - E[0])) / max(1.0, abs(E[0]))
    dJ = np.max(np.abs(J - J[0])) / max(1.0, abs(J[0]))
    return float(dE), float(dJ)
