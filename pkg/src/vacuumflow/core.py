"""Shared domain types, unit conventions and clocks.

Natural units with light speed c = 1 throughout; hbar is configurable where it
enters (quantum module).  A particle's dynamical mass is m = -W(r,t), so the
rest mass is never stored: it emerges as the conserved energy of the initial
state (see emergent_rest_mass).

Model dictionary:
  M0  classical relativistic particle, evolved in lab time t, state momentum is
      the kinetic p = m u;
  M1  free vacuum-field model, canonical (r, p) in proper time tau;
  M2  interacting vacuum-field model, canonical (r, P) with P = p + qA and the
      mover velocity folded in through A;
  M3  dual model, canonical (r, P), reproduces the classical Lorentz force.

All types here are immutable values; every operation is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, NonNegativeField, SubluminalViolation, SuperluminalInit
from .fields import VacuumField, as_vec3

#: strict positivity threshold for every square-root guard W^2 - |mom|^2
SUBLUMINAL_EPS = 1e-12


class ModelKind(Enum):
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"


@dataclass(frozen=True)
class Particle:
    """Test particle: signed charge and initial lab velocity, |u0| < 1 strictly."""

    q: float
    u0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u0", as_vec3(self.u0))
        if float(np.linalg.norm(self.u0)) >= 1.0:
            raise SuperluminalInit(f"|u0| = {np.linalg.norm(self.u0)} >= 1")


@dataclass(frozen=True)
class PhasePoint:
    """Canonical state (r, mom) plus the two clocks (tau, t).

    mom is p for M0/M1 and the common particle-field momentum P for M2/M3.
    """

    r: np.ndarray
    mom: np.ndarray
    tau: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "r", as_vec3(self.r))
        object.__setattr__(self, "mom", as_vec3(self.mom))


def guarded_root(arg: float) -> float:
    """sqrt of a square-root-guard argument, aborting on loss of positivity."""
    if arg <= SUBLUMINAL_EPS:
        raise SubluminalViolation(f"W^2 - |mom|^2 = {arg:g} <= {SUBLUMINAL_EPS:g}")
    return math.sqrt(arg)


def checked_w(fld: VacuumField, r: np.ndarray, t: float) -> float:
    """Evaluate W and enforce the trajectory invariant W < 0."""
    w = fld.w(r, t)
    if w >= 0.0:
        raise NonNegativeField(f"W(r,t) = {w:g} >= 0 at r = {r.tolist()}, t = {t:g}")
    return w


def emergent_rest_mass(particle: Particle, fld: VacuumField, r0) -> float:
    """Rest mass of the initial state, m0 = -W(r0,0) sqrt(1 - |u0|^2).

    This is the invariant energy of the initial data; the configuration never
    stores m0 directly.
    """
    r0 = as_vec3(r0)
    w0 = checked_w(fld, r0, 0.0)
    return -w0 * math.sqrt(1.0 - float(particle.u0 @ particle.u0))


def init_phase(model: ModelKind, particle: Particle, fld: VacuumField, r0) -> PhasePoint:
    """Initial canonical state at tau = t = 0 for the given model.

    M0/M1 store the kinetic momentum -W u0; M2/M3 add the field momentum qA.
    """
    r0 = as_vec3(r0)
    if float(np.linalg.norm(particle.u0)) >= 1.0:
        raise SuperluminalInit(f"|u0| = {np.linalg.norm(particle.u0)} >= 1")
    if particle.q != fld.q_test:
        raise ConfigError(
            f"particle charge q = {particle.q} differs from field coupling q_test = {fld.q_test}"
        )
    w0 = checked_w(fld, r0, 0.0)
    mom = -w0 * particle.u0
    if model in (ModelKind.M2, ModelKind.M3):
        mom = mom + particle.q * fld.a(r0, 0.0)
    phase = PhasePoint(r=r0, mom=mom, tau=0.0, t=0.0)
    _check_subluminal(model, phase, fld)
    return phase


def _check_subluminal(model: ModelKind, phase: PhasePoint, fld: VacuumField) -> None:
    if model is ModelKind.M0:
        return
    w = checked_w(fld, phase.r, phase.t)
    mom = phase.mom
    if model is ModelKind.M3:
        mom = mom - fld.q_test * fld.a(phase.r, phase.t)
    guarded_root(w * w - float(mom @ mom))


def clock_rate(model: ModelKind, phase: PhasePoint, fld: VacuumField) -> float:
    """dt/dtau at the given state: (1 + |rdot|^2)^(1/2) with rdot from the model flow.

    M2 uses the relative velocity rdot - xidot with xidot = -qA (W^2-P^2)^(-1/2);
    M0 is evolved directly in t, so its rate is 1.
    """
    if model is ModelKind.M0:
        return 1.0
    w = checked_w(fld, phase.r, phase.t)
    if model is ModelKind.M1:
        g = guarded_root(w * w - float(phase.mom @ phase.mom))
        return -w / g
    if model is ModelKind.M3:
        pk = phase.mom - fld.q_test * fld.a(phase.r, phase.t)
        g = guarded_root(w * w - float(pk @ pk))
        return -w / g
    # M2
    q = fld.q_test
    a = fld.a(phase.r, phase.t)
    p2 = float(phase.mom @ phase.mom)
    g = guarded_root(w * w - p2)
    kappa = 1.0 - q * float(a @ phase.mom) / (g * g)
    return math.sqrt(1.0 + p2 * kappa * kappa / (g * g))
