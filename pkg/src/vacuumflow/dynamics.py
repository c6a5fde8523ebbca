"""Model dynamics: Lagrangians, Legendre momenta, Hamiltonians, canonical flows.

Conventions used throughout (c = 1):

  M0  H = sqrt(m0^2 + p^2) + q*phi, evolved in lab time by the Lorentz force
      dp/dt = qE + q u x B with u = p / sqrt(m0^2 + p^2).
  M1  L = -W sqrt(1 + rdot^2),            H = -sqrt(W^2 - p^2).
  M2  L = -W sqrt(1 + |rdot - xidot|^2),  H = -G - q<A,P>/G, G = sqrt(W^2 - P^2),
      with the mover velocity recovered from the field, u_eff = qA/W, so that
      xidot = u_eff * dt/dtau = -qA/G.  The evolution is the exact canonical
      flow of H (its gradients include the <A,P>/G substitution terms).
  M3  L = -W sqrt(1 + rdot^2) + q<A,rdot>, H = -sqrt(W^2 - (P - qA)^2).

The momdot expressions are exact partial derivatives of the Hamiltonians, so
finite differences of hamiltonian() reproduce vector_field() to discretization
error.  M0 is the exception: its stored momentum is kinetic, and its momdot is
the Lorentz force, not -dH/dr.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .core import SUBLUMINAL_EPS, ModelKind, PhasePoint, checked_w, guarded_root
from .errors import SubluminalViolation, SuperluminalInit, TooShort
from .fields import VacuumField, as_vec3


class ForceKind(Enum):
    ClassicalLorentz = "classical"
    ModifiedLorentz = "modified"


def _require_rest_mass(rest_mass: float | None) -> float:
    if rest_mass is None:
        raise ValueError("M0 operations need the emergent rest mass (see emergent_rest_mass)")
    return float(rest_mass)


def _soft_root(arg: float) -> float:
    return math.sqrt(arg if arg > SUBLUMINAL_EPS else SUBLUMINAL_EPS)


def _soft_w(w: float) -> float:
    return w if w < -SUBLUMINAL_EPS else -SUBLUMINAL_EPS


def _hard_w(w: float) -> float:
    if w >= 0.0:
        raise SubluminalViolation(f"W = {w:g} >= 0 reached by trajectory")
    return w


def _mover_velocity(q: float, a: np.ndarray, w: float) -> np.ndarray:
    """Effective external-mover velocity u_eff = qA/W recovered from the field."""
    u = q * a / w
    if float(u @ u) >= 1.0:
        raise SubluminalViolation(f"effective mover speed |qA/W| = {np.linalg.norm(u)} >= 1")
    return u


def _relative_rate(rdot: np.ndarray, u_eff: np.ndarray) -> float:
    """Solve s = sqrt(1 + |rdot - u_eff*s|^2) for the M2 clock factor s = dt/dtau."""
    b = float(rdot @ u_eff)
    uf2 = float(u_eff @ u_eff)
    disc = b * b + (1.0 - uf2) * (1.0 + float(rdot @ rdot))
    return (-b + math.sqrt(disc)) / (1.0 - uf2)


def m2_xidot(r, rdot, fld: VacuumField, tau_time: float = 0.0) -> np.ndarray:
    """Self-consistent mover velocity xidot at an M2 state (r, rdot).

    In the variational treatment xidot is external data: variations of rdot
    hold it fixed.  Freeze this value when probing the M2 Lagrangian by finite
    differences.
    """
    r = as_vec3(r)
    rdot = as_vec3(rdot)
    w = checked_w(fld, r, tau_time)
    u_eff = _mover_velocity(fld.q_test, fld.a(r, tau_time), w)
    return u_eff * _relative_rate(rdot, u_eff)


# -- Lagrangian side ----------------------------------------------------------


def lagrangian(
    model: ModelKind,
    r,
    rdot,
    fld: VacuumField,
    tau_time: float = 0.0,
    *,
    rest_mass: float | None = None,
    xidot=None,
) -> float:
    """Model Lagrangian at (r, rdot).

    rdot is the proper-time velocity for M1/M2/M3 (unbounded) and the lab
    velocity u (|u| < 1) for M0.  tau_time is the field evaluation time (the
    lab clock for moving sources).  For M2, xidot optionally supplies the
    external mover velocity; by default it is resolved self-consistently at
    (r, rdot) (see m2_xidot).
    """
    r = as_vec3(r)
    rdot = as_vec3(rdot)
    if model is ModelKind.M0:
        m0 = _require_rest_mass(rest_mass)
        u2 = float(rdot @ rdot)
        if u2 >= 1.0:
            raise SuperluminalInit(f"M0 lagrangian needs |u| < 1, got |u|^2 = {u2}")
        return -m0 * math.sqrt(1.0 - u2)
    w = checked_w(fld, r, tau_time)
    if model is ModelKind.M1:
        return -w * math.sqrt(1.0 + float(rdot @ rdot))
    if model is ModelKind.M3:
        a = fld.a(r, tau_time)
        return -w * math.sqrt(1.0 + float(rdot @ rdot)) + fld.q_test * float(a @ rdot)
    # M2
    if xidot is not None:
        eta = rdot - as_vec3(xidot)
        return -w * math.sqrt(1.0 + float(eta @ eta))
    a = fld.a(r, tau_time)
    u_eff = _mover_velocity(fld.q_test, a, w)
    return -w * _relative_rate(rdot, u_eff)


def legendre_momentum(
    model: ModelKind,
    r,
    rdot,
    fld: VacuumField,
    tau_time: float = 0.0,
    *,
    rest_mass: float | None = None,
    xidot=None,
) -> np.ndarray:
    """Closed-form dL/drdot; matches central finite differences of lagrangian.

    For M2 the derivative holds the mover velocity fixed (xidot is external
    data in the variational treatment); probe the finite differences with the
    same frozen xidot.
    """
    r = as_vec3(r)
    rdot = as_vec3(rdot)
    if model is ModelKind.M0:
        m0 = _require_rest_mass(rest_mass)
        u2 = float(rdot @ rdot)
        if u2 >= 1.0:
            raise SuperluminalInit(f"M0 momentum needs |u| < 1, got |u|^2 = {u2}")
        return m0 * rdot / math.sqrt(1.0 - u2)
    w = checked_w(fld, r, tau_time)
    if model is ModelKind.M1:
        return -w * rdot / math.sqrt(1.0 + float(rdot @ rdot))
    if model is ModelKind.M3:
        s = math.sqrt(1.0 + float(rdot @ rdot))
        return -w * rdot / s + fld.q_test * fld.a(r, tau_time)
    # M2: P = -W (rdot - xidot) / s with xidot = u_eff * s
    if xidot is not None:
        eta = rdot - as_vec3(xidot)
        return -w * eta / math.sqrt(1.0 + float(eta @ eta))
    a = fld.a(r, tau_time)
    u_eff = _mover_velocity(fld.q_test, a, w)
    s = _relative_rate(rdot, u_eff)
    return -w * (rdot - u_eff * s) / s


# -- Hamiltonian side ---------------------------------------------------------


def hamiltonian(
    model: ModelKind,
    phase: PhasePoint,
    fld: VacuumField,
    *,
    rest_mass: float | None = None,
) -> float:
    """Model Hamiltonian at the phase point (M0 returns +energy)."""
    w = checked_w(fld, phase.r, phase.t)
    mom = phase.mom
    if model is ModelKind.M0:
        m0 = _require_rest_mass(rest_mass)
        return math.sqrt(m0 * m0 + float(mom @ mom)) + fld.coulomb(phase.r, phase.t)
    if model is ModelKind.M1:
        return -guarded_root(w * w - float(mom @ mom))
    if model is ModelKind.M3:
        pk = mom - fld.q_test * fld.a(phase.r, phase.t)
        return -guarded_root(w * w - float(pk @ pk))
    # M2
    g = guarded_root(w * w - float(mom @ mom))
    a = fld.a(phase.r, phase.t)
    return -g - fld.q_test * float(a @ mom) / g


def invariant_energy(
    model: ModelKind,
    phase: PhasePoint,
    fld: VacuumField,
    *,
    rest_mass: float | None = None,
) -> float:
    """The conserved energy of the model (positive for the vacuum models)."""
    h = hamiltonian(model, phase, fld, rest_mass=rest_mass)
    return h if model is ModelKind.M0 else -h


def model_rhs(
    model: ModelKind,
    r: np.ndarray,
    mom: np.ndarray,
    t: float,
    fld: VacuumField,
    rest_mass: float | None = None,
    soft: bool = False,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Fused canonical right-hand side: (rdot, momdot, dt/dtau).

    For M0 the derivatives are with respect to lab time and the rate is 1.
    This shares one field evaluation across all pieces (integrator hot path).
    soft=True clamps the square-root guards instead of raising; the adaptive
    driver uses it for trial stages only, with a terminal guard event deciding
    where the reported trajectory actually stops.
    """
    root = _soft_root if soft else guarded_root
    w_ok = _soft_w if soft else _hard_w

    q = fld.q_test
    if model is ModelKind.M0:
        m0 = _require_rest_mass(rest_mass)
        w, gw, _a, adot, jac = fld.local_state(r, t)
        w_ok(w)
        ekin = math.sqrt(m0 * m0 + float(mom @ mom))
        u = mom / ekin
        qe = -gw - q * adot
        b = np.array([jac[2, 1] - jac[1, 2], jac[0, 2] - jac[2, 0], jac[1, 0] - jac[0, 1]])
        return u, qe + q * np.cross(u, b), 1.0

    if model is ModelKind.M1:
        w, gw, _a, _adot, _jac = fld.local_state(r, t)
        w = w_ok(w)
        g = root(w * w - float(mom @ mom))
        return mom / g, (w / g) * gw, -w / g

    w, gw, a, _adot, jac = fld.local_state(r, t)
    w = w_ok(w)
    if model is ModelKind.M3:
        pk = mom - q * a
        g = root(w * w - float(pk @ pk))
        rdot = pk / g
        momdot = (w * gw + q * (jac.T @ pk)) / g
        return rdot, momdot, -w / g

    # M2: exact gradients of H = -G - q<A,P>/G
    p2 = float(mom @ mom)
    g = root(w * w - p2)
    kappa = 1.0 - q * float(a @ mom) / (g * g)
    rdot = (kappa * mom - q * a) / g
    momdot = (kappa * w * gw + q * (jac.T @ mom)) / g
    rate = math.sqrt(1.0 + p2 * kappa * kappa / (g * g))
    return rdot, momdot, rate


def vector_field(
    model: ModelKind,
    phase: PhasePoint,
    fld: VacuumField,
    *,
    rest_mass: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Canonical right-hand side (rdot, momdot) in tau (in t for M0)."""
    rdot, momdot, _rate = model_rhs(model, phase.r, phase.mom, phase.t, fld, rest_mass)
    return rdot, momdot


# -- Force laws ---------------------------------------------------------------


def force(kind: ForceKind, fld: VacuumField, r, u, q: float, t: float = 0.0) -> np.ndarray:
    """Pointwise force law: classical qE + q u x B, or the modified variant
    carrying the extra -q grad<A,u> term (u held fixed in the gradient)."""
    r = as_vec3(r)
    u = as_vec3(u)
    if float(u @ u) >= 1.0:
        raise SuperluminalInit(f"force needs |u| < 1, got {np.linalg.norm(u)}")
    e, b = fld.e_b(r, t)
    lorentz = q * (e + np.cross(u, b))
    if kind is ForceKind.ClassicalLorentz:
        return lorentz
    grad_au = fld.a_jac(r, t).T @ u
    return lorentz - q * grad_au


# -- Variational diagnostics --------------------------------------------------


def _sample_rdots(taus: np.ndarray, rs: np.ndarray) -> np.ndarray:
    """Velocities from the samples: centered in the interior, one-sided at the ends."""
    rd = np.empty_like(rs)
    rd[1:-1] = (rs[2:] - rs[:-2]) / (taus[2:] - taus[:-2])[:, None]
    rd[0] = (rs[1] - rs[0]) / (taus[1] - taus[0])
    rd[-1] = (rs[-1] - rs[-2]) / (taus[-1] - taus[-2])
    return rd


def _lagrangian_samples(
    model: ModelKind,
    taus: np.ndarray,
    ts: np.ndarray,
    rs: np.ndarray,
    rdots: np.ndarray,
    fld: VacuumField,
    rest_mass: float | None,
) -> np.ndarray:
    rd2 = np.einsum("ij,ij->i", rdots, rdots)
    if model is ModelKind.M0:
        m0 = _require_rest_mass(rest_mass)
        if np.any(rd2 >= 1.0):
            raise SuperluminalInit("M0 sample velocity reached |u| >= 1")
        return -m0 * np.sqrt(1.0 - rd2)
    ws = np.array([fld.w(rs[i], ts[i]) for i in range(len(ts))])
    if model is ModelKind.M1:
        return -ws * np.sqrt(1.0 + rd2)
    avs = np.array([fld.a(rs[i], ts[i]) for i in range(len(ts))])
    if model is ModelKind.M3:
        return -ws * np.sqrt(1.0 + rd2) + fld.q_test * np.einsum("ij,ij->i", avs, rdots)
    # M2
    u_eff = fld.q_test * avs / ws[:, None]
    uf2 = np.einsum("ij,ij->i", u_eff, u_eff)
    bb = np.einsum("ij,ij->i", rdots, u_eff)
    s = (-bb + np.sqrt(bb * bb + (1.0 - uf2) * (1.0 + rd2))) / (1.0 - uf2)
    return -ws * s


def action(model: ModelKind, traj, fld: VacuumField, *, rest_mass: float | None = None) -> float:
    """Trapezoidal quadrature of the Lagrangian along the trajectory in tau.

    Velocities are reconstructed from the samples, so the functional is defined
    for perturbed (non-solution) sample paths as well.
    """
    taus = np.asarray(traj.tau)
    if taus.size < 2:
        raise TooShort(f"action needs at least 2 samples, got {taus.size}")
    ts = np.asarray(traj.t)
    rs = np.asarray(traj.r)
    rdots = _sample_rdots(taus, rs)
    lvals = _lagrangian_samples(model, taus, ts, rs, rdots, fld, rest_mass)
    return float(np.trapezoid(lvals, taus))


def euler_lagrange_residual(
    model: ModelKind, traj, fld: VacuumField, *, rest_mass: float | None = None
) -> float:
    """Max-norm discrete Euler-Lagrange defect |d/dtau(dL/drdot) - dL/dr|.

    Centered differences on the recorded samples; second-order in the step.
    For M2 the mover term xidot is held as external data along the samples.
    """
    taus = np.asarray(traj.tau)
    n = taus.size
    if n < 5:
        raise TooShort(f"euler_lagrange_residual needs at least 5 samples, got {n}")
    ts = np.asarray(traj.t)
    rs = np.asarray(traj.r)
    rdots = _sample_rdots(taus, rs)

    # momenta at samples 1..n-2 (centered velocities available there)
    pis = np.empty((n, 3))
    for i in range(1, n - 1):
        pis[i] = legendre_momentum(model, rs[i], rdots[i], fld, ts[i], rest_mass=rest_mass)

    worst = 0.0
    for i in range(2, n - 2):
        dpi = (pis[i + 1] - pis[i - 1]) / (taus[i + 1] - taus[i - 1])
        dldr = _grad_l_r(model, rs[i], rdots[i], fld, ts[i])
        worst = max(worst, float(np.max(np.abs(dpi - dldr))))
    return worst


def _grad_l_r(
    model: ModelKind, r: np.ndarray, rdot: np.ndarray, fld: VacuumField, t: float
) -> np.ndarray:
    if model is ModelKind.M0:
        return np.zeros(3)
    w = fld.w(r, t)
    gw = fld.grad_w(r, t)
    if model is ModelKind.M1:
        return -gw * math.sqrt(1.0 + float(rdot @ rdot))
    if model is ModelKind.M3:
        s = math.sqrt(1.0 + float(rdot @ rdot))
        return -gw * s + fld.q_test * (fld.a_jac(r, t).T @ rdot)
    # M2 with xidot held fixed
    a = fld.a(r, t)
    u_eff = _mover_velocity(fld.q_test, a, w)
    s = _relative_rate(rdot, u_eff)
    return -gw * s
