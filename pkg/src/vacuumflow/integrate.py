"""Time stepping over tau (t for M0), trajectory records and comparisons.

The integrated state is y = [r, mom, t]: the lab clock rides along as a seventh
component with dt/dtau = clock_rate, which makes the system autonomous even for
moving sources (the field time is y[6]).  For the implicit midpoint rule this
is algebraically identical to accumulating t by midpoint quadrature of the
clock rate within each step; for RK4/RK45 the clock inherits the integrator's
own order.

Implicit midpoint (fixed-point iteration) is the symplectic default; RK4 is
the fixed-step explicit alternative; RK45 wraps scipy's adaptive solver.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .core import (
    SUBLUMINAL_EPS,
    ModelKind,
    Particle,
    PhasePoint,
    emergent_rest_mass,
    init_phase,
)
from .dynamics import model_rhs
from .errors import NoConvergence, NonNegativeField, NoOverlap, SubluminalViolation
from .fields import VacuumField, as_vec3

#: event margin for the adaptive integrator; generous so the solver localizes
#: the crossing before trial stages hit the hard 1e-12 guard
_EVENT_MARGIN = 1e-9


@dataclass(frozen=True)
class RK4:
    pass


@dataclass(frozen=True)
class ImplicitMidpoint:
    tol: float = 1e-12
    max_iter: int = 50

    def __post_init__(self):
        if self.tol <= 0.0 or self.max_iter < 1:
            raise ValueError("ImplicitMidpoint needs tol > 0 and max_iter >= 1")


@dataclass(frozen=True)
class RK45:
    atol: float = 1e-10
    rtol: float = 1e-10

    def __post_init__(self):
        if self.atol <= 0.0 or self.rtol <= 0.0:
            raise ValueError("RK45 needs atol, rtol > 0")


IntegratorKind = RK4 | ImplicitMidpoint | RK45


def integrator_name(integ: IntegratorKind) -> str:
    if isinstance(integ, RK4):
        return "rk4"
    if isinstance(integ, ImplicitMidpoint):
        return f"implicit_midpoint(tol={integ.tol:g},max_iter={integ.max_iter})"
    return f"rk45(atol={integ.atol:g},rtol={integ.rtol:g})"


@dataclass
class TrajectoryRecord:
    """Sampled trajectory: clocks, state, per-sample energy/potential/lab velocity."""

    tau: np.ndarray
    t: np.ndarray
    r: np.ndarray
    mom: np.ndarray
    energy: np.ndarray
    w: np.ndarray
    u_lab: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    def __len__(self) -> int:
        return self.tau.size

    CSV_COLUMNS = ("tau", "t", "rx", "ry", "rz", "px", "py", "pz", "energy", "w", "ux", "uy", "uz")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.CSV_COLUMNS)
            for i in range(len(self)):
                row = [
                    self.tau[i], self.t[i],
                    self.r[i, 0], self.r[i, 1], self.r[i, 2],
                    self.mom[i, 0], self.mom[i, 1], self.mom[i, 2],
                    self.energy[i], self.w[i],
                    self.u_lab[i, 0], self.u_lab[i, 1], self.u_lab[i, 2],
                ]
                writer.writerow([f"{v:.17g}" for v in row])

    def max_relative_energy_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / abs(e0))


# -- single steps --------------------------------------------------------------


def _pack(phase: PhasePoint) -> np.ndarray:
    y = np.empty(7)
    y[0:3] = phase.r
    y[3:6] = phase.mom
    y[6] = phase.t
    return y


def _rhs(model: ModelKind, y: np.ndarray, fld: VacuumField, rest_mass: float | None,
         soft: bool = False) -> np.ndarray:
    rdot, momdot, rate = model_rhs(model, y[0:3], y[3:6], y[6], fld, rest_mass, soft=soft)
    out = np.empty(7)
    out[0:3] = rdot
    out[3:6] = momdot
    out[6] = rate
    return out


def _step_rk4(model, y, fld, h, rest_mass):
    k1 = _rhs(model, y, fld, rest_mass)
    k2 = _rhs(model, y + (0.5 * h) * k1, fld, rest_mass)
    k3 = _rhs(model, y + (0.5 * h) * k2, fld, rest_mass)
    k4 = _rhs(model, y + h * k3, fld, rest_mass)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _step_midpoint(model, y, fld, h, rest_mass, tol, max_iter):
    ym = y + (0.5 * h) * _rhs(model, y, fld, rest_mass)
    for _ in range(max_iter):
        ym_next = y + (0.5 * h) * _rhs(model, ym, fld, rest_mass)
        delta = float(np.max(np.abs(ym_next - ym)))
        ym = ym_next
        if delta <= tol:
            return 2.0 * ym - y
    raise NoConvergence(
        f"implicit midpoint failed to reach tol={tol:g} in {max_iter} iterations (h={h:g})"
    )


def _step_rk45(model, y, fld, h, rest_mass, atol, rtol):
    sol = solve_ivp(
        lambda _s, yy: _rhs(model, yy, fld, rest_mass),
        (0.0, h),
        y,
        method="RK45",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise NoConvergence(f"adaptive step failed: {sol.message}")
    return sol.y[:, -1]


def step(
    integrator: IntegratorKind,
    model: ModelKind,
    phase: PhasePoint,
    fld: VacuumField,
    h: float,
    *,
    rest_mass: float | None = None,
) -> PhasePoint:
    """Advance one step of size h in tau (in t for M0)."""
    if h == 0.0:
        raise ValueError("step size must be nonzero")
    y = _pack(phase)
    if isinstance(integrator, RK4):
        y1 = _step_rk4(model, y, fld, h, rest_mass)
    elif isinstance(integrator, ImplicitMidpoint):
        y1 = _step_midpoint(model, y, fld, h, rest_mass, integrator.tol, integrator.max_iter)
    else:
        y1 = _step_rk45(model, y, fld, h, rest_mass, integrator.atol, integrator.rtol)
    if model is ModelKind.M0:
        return PhasePoint(r=y1[0:3], mom=y1[3:6], tau=phase.tau + h, t=phase.t + h)
    return PhasePoint(r=y1[0:3], mom=y1[3:6], tau=phase.tau + h, t=y1[6])


# -- full runs -----------------------------------------------------------------


def _sample_row(model, r, mom, t, fld, rest_mass):
    """(energy, w, u_lab) at one sample, sharing a single field evaluation."""
    q = fld.q_test
    if model is ModelKind.M0:
        w = fld.w(r, t)
        ekin = math.sqrt(rest_mass * rest_mass + float(mom @ mom))
        return ekin + (w - fld.w_inf), w, mom / ekin
    w, _gw, a, _adot, _jac = fld.local_state(r, t)
    if model is ModelKind.M1:
        g = math.sqrt(w * w - float(mom @ mom))
        return g, w, mom / (-w)
    if model is ModelKind.M3:
        pk = mom - q * a
        g = math.sqrt(w * w - float(pk @ pk))
        return g, w, pk / (-w)
    # M2
    p2 = float(mom @ mom)
    g = math.sqrt(w * w - p2)
    ap = float(a @ mom)
    kappa = 1.0 - q * ap / (g * g)
    rate = math.sqrt(1.0 + p2 * kappa * kappa / (g * g))
    u = (kappa * mom - q * a) / (g * rate)
    return g + q * ap / g, w, u


def _build_record(model, integ, h, fld, taus, ys, rest_mass, termination=None):
    n = len(taus)
    t = np.empty(n)
    r = np.empty((n, 3))
    mom = np.empty((n, 3))
    energy = np.empty(n)
    wvals = np.empty(n)
    u_lab = np.empty((n, 3))
    for i in range(n):
        r[i] = ys[i][0:3]
        mom[i] = ys[i][3:6]
        t[i] = ys[i][6]
        energy[i], wvals[i], u_lab[i] = _sample_row(model, r[i], mom[i], t[i], fld, rest_mass)
    meta = {
        "model": model.value,
        "integrator": integrator_name(integ),
        "h": h,
        "field": fld.stable_hash(),
    }
    if termination is not None:
        meta["termination"] = termination
    return TrajectoryRecord(
        tau=np.asarray(taus, dtype=float), t=t, r=r, mom=mom,
        energy=energy, w=wvals, u_lab=u_lab, meta=meta,
    )


def simulate(
    model: ModelKind,
    particle: Particle,
    fld: VacuumField,
    r0,
    tau_end: float,
    integrator: IntegratorKind,
    h: float,
) -> TrajectoryRecord:
    """Integrate from init_phase to tau_end, recording every h.

    Terminates early with a diagnostic in meta["termination"] if a model
    invariant trips (fixed-step integrators only; the adaptive path stops via
    a terminal guard event).
    """
    if tau_end <= 0.0 or h <= 0.0:
        raise ValueError("simulate needs tau_end > 0 and h > 0")
    r0 = as_vec3(r0)
    phase0 = init_phase(model, particle, fld, r0)
    rest_mass = emergent_rest_mass(particle, fld, r0) if model is ModelKind.M0 else None
    n_steps = max(1, int(round(tau_end / h)))

    if isinstance(integrator, RK45):
        return _simulate_adaptive(model, fld, phase0, rest_mass, integrator, h, n_steps)

    taus = [0.0]
    ys = [_pack(phase0)]
    termination = None
    y = ys[0]
    for k in range(1, n_steps + 1):
        try:
            if isinstance(integrator, RK4):
                y = _step_rk4(model, y, fld, h, rest_mass)
            else:
                y = _step_midpoint(
                    model, y, fld, h, rest_mass, integrator.tol, integrator.max_iter
                )
        except (SubluminalViolation, NonNegativeField) as exc:
            termination = f"step {k}: {exc}"
            break
        taus.append(k * h)
        ys.append(y)
    if model is ModelKind.M0:
        for i, y in enumerate(ys):
            y[6] = taus[i]  # lab clock is the independent variable
    return _build_record(model, integrator, h, fld, taus, ys, rest_mass, termination)


def _guard_margin(model, fld, rest_mass):
    q = fld.q_test

    def margin(_s, y):
        w = fld.w(y[0:3], y[6])
        if model is ModelKind.M0:
            return -w - _EVENT_MARGIN
        mom = y[3:6]
        if model is ModelKind.M3:
            mom = mom - q * fld.a(y[0:3], y[6])
        return w * w - float(mom @ mom) - max(_EVENT_MARGIN, 10.0 * SUBLUMINAL_EPS)

    margin.terminal = True
    margin.direction = -1
    return margin


def _simulate_adaptive(model, fld, phase0, rest_mass, integ, h, n_steps):
    tau_grid = h * np.arange(n_steps + 1)
    event = _guard_margin(model, fld, rest_mass)
    # trial stages are soft-guarded; the terminal event decides where the
    # reported trajectory stops
    sol = solve_ivp(
        lambda _s, y: _rhs(model, y, fld, rest_mass, soft=True),
        (0.0, tau_grid[-1]),
        _pack(phase0),
        method="RK45",
        t_eval=tau_grid,
        rtol=integ.rtol,
        atol=integ.atol,
        events=event,
    )
    if sol.status < 0:
        raise NoConvergence(f"adaptive integration failed: {sol.message}")
    termination = None
    if sol.status == 1:
        termination = f"guard event at tau = {sol.t_events[0][0]:.6g}"
    taus = sol.t
    ys = [sol.y[:, i].copy() for i in range(sol.y.shape[1])]
    if model is ModelKind.M0:
        for i, y in enumerate(ys):
            y[6] = taus[i]
    return _build_record(model, integ, h, fld, list(taus), ys, rest_mass, termination)


def compare_trajectories(
    a: TrajectoryRecord, b: TrajectoryRecord, n_samples: int = 2001
) -> tuple[float, float]:
    """Resample both records onto a common lab-time grid (cubic) and report
    (max position deviation, max energy deviation)."""
    lo = max(a.t[0], b.t[0])
    hi = min(a.t[-1], b.t[-1])
    if hi <= lo:
        raise NoOverlap(f"no common lab-time range: [{a.t[0]}, {a.t[-1]}] vs [{b.t[0]}, {b.t[-1]}]")
    grid = np.linspace(lo, hi, n_samples)
    ra = CubicSpline(a.t, a.r, axis=0)(grid)
    rb = CubicSpline(b.t, b.r, axis=0)(grid)
    ea = CubicSpline(a.t, a.energy)(grid)
    eb = CubicSpline(b.t, b.energy)(grid)
    pos_dev = float(np.max(np.linalg.norm(ra - rb, axis=1)))
    energy_dev = float(np.max(np.abs(ea - eb)))
    return pos_dev, energy_dev
