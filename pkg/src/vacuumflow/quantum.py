"""1-D quantized Hamiltonians and Crank-Nicolson evolution in proper time.

Three operators on a uniform grid (spacing dx, periodic or fixed ends):

  free vacuum       H = p (1/2m) p + W
  minimal coupling  H = (p - qA) (1/2m) (p - qA) + W, expanded and symmetrized
  modified          minimal coupling  - q^2 A^2/(2m)  - (q^2/2) (A p) m^-3 (p A)

with m(x) = -W(x) > 0.  The quadratic-in-p pieces use the compact
forward/backward divergence form (coefficients averaged onto bonds), the cross
term uses the centered first difference symmetrized as p M + M p; everything is
tridiagonal (plus cyclic corners) and Hermitian by construction, so the Cayley
step (1 + i dtau H / 2 hbar) psi' = (1 - i dtau H / 2 hbar) psi is unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.linalg import solve_banded

from .errors import NonPositiveMass, SolveFailure, SuperluminalMode


class QuantumKind(Enum):
    FreeVacuum = "free_vacuum"
    MinimalCoupling = "minimal_coupling"
    Modified = "modified"


@dataclass(frozen=True)
class WaveState:
    """Complex samples on a uniform 1-D grid with hbar and grid metadata."""

    psi: np.ndarray
    dx: float
    hbar: float
    domain: str = "periodic"  # "periodic" | "fixed"
    x0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "psi", np.asarray(self.psi, dtype=complex))
        if self.dx <= 0.0 or self.hbar <= 0.0:
            raise ValueError("WaveState needs dx > 0 and hbar > 0")
        if self.domain not in ("periodic", "fixed"):
            raise ValueError(f"unknown domain {self.domain!r}")

    @property
    def n(self) -> int:
        return self.psi.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.psi) ** 2)) * self.dx)

    def normalized(self) -> "WaveState":
        return replace(self, psi=self.psi / self.norm())


@dataclass(frozen=True)
class QuantumModel:
    """Operator choice plus the sampled W(x), A(x) profiles and the charge."""

    kind: QuantumKind
    w_profile: np.ndarray
    a_profile: np.ndarray
    q: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "w_profile", np.asarray(self.w_profile, dtype=float))
        object.__setattr__(self, "a_profile", np.asarray(self.a_profile, dtype=float))
        if self.w_profile.shape != self.a_profile.shape:
            raise ValueError("w_profile and a_profile must have the same length")
        m = -self.w_profile
        if np.any(m <= 0.0):
            raise NonPositiveMass(f"mass profile min(-W) = {m.min():g} <= 0")


@dataclass(frozen=True)
class TridiagonalOperator:
    """Hermitian tridiagonal operator, with cyclic corners on a periodic domain."""

    diag: np.ndarray        # (n,)
    upper: np.ndarray       # (n-1,), element [j, j+1]
    lower: np.ndarray       # (n-1,), element [j+1, j]
    corner_ul: complex      # [0, n-1]
    corner_lr: complex      # [n-1, 0]
    dx: float
    hbar: float
    domain: str

    @property
    def n(self) -> int:
        return self.diag.size

    def apply(self, psi: np.ndarray) -> np.ndarray:
        out = self.diag * psi
        out[:-1] += self.upper * psi[1:]
        out[1:] += self.lower * psi[:-1]
        if self.domain == "periodic":
            out[0] += self.corner_ul * psi[-1]
            out[-1] += self.corner_lr * psi[0]
        return out

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)
        if self.domain == "periodic":
            m[0, -1] += self.corner_ul
            m[-1, 0] += self.corner_lr
        return m


def _bond_average(c: np.ndarray, periodic: bool) -> tuple[np.ndarray, float]:
    """Coefficients on bonds j <-> j+1; also the wrap bond for periodic grids."""
    bonds = 0.5 * (c[:-1] + c[1:])
    wrap = 0.5 * (c[-1] + c[0]) if periodic else 0.0
    return bonds, wrap


def build_hamiltonian(model: QuantumModel, dx: float, hbar: float, domain: str = "periodic") -> TridiagonalOperator:
    """Discrete Hamiltonian for the given model on an n-point grid."""
    w = model.w_profile
    a = model.a_profile
    q = model.q
    n = w.size
    m = -w
    if np.any(m <= 0.0):
        raise NonPositiveMass(f"mass profile min(-W) = {m.min():g} <= 0")
    periodic = domain == "periodic"
    c = 0.5 / m  # 1/(2m)
    k2 = hbar * hbar / (dx * dx)

    diag = np.zeros(n, dtype=complex)
    upper = np.zeros(n - 1, dtype=complex)
    lower = np.zeros(n - 1, dtype=complex)
    c_ul = 0.0 + 0.0j
    c_lr = 0.0 + 0.0j

    # kinetic divergence form p c p
    bonds, wrap = _bond_average(c, periodic)
    diag[:-1] += k2 * bonds
    diag[1:] += k2 * bonds
    if periodic:
        diag[0] += k2 * wrap
        diag[-1] += k2 * wrap
        c_ul += -k2 * wrap
        c_lr += -k2 * wrap
    else:
        # one-sided wall bonds against the Dirichlet ghosts
        diag[0] += k2 * c[0]
        diag[-1] += k2 * c[-1]
    upper += -k2 * bonds
    lower += -k2 * bonds

    # potential
    diag += w

    if model.kind is not QuantumKind.FreeVacuum:
        # minimal coupling: -q (p cA + cA p) + q^2 A^2 c
        mprof = c * a
        coeff = q * hbar / (2.0 * dx)
        upper += 1j * coeff * (mprof[:-1] + mprof[1:])
        lower += -1j * coeff * (mprof[:-1] + mprof[1:])
        if periodic:
            c_lr += 1j * coeff * (mprof[-1] + mprof[0])
            c_ul += -1j * coeff * (mprof[0] + mprof[-1])
        diag += q * q * a * a * c

    if model.kind is QuantumKind.Modified:
        # -q^2 <A,A>/(2m): cancels the diagonal from the expanded square
        diag += -(q * q) * a * a * c
        # -(q^2/2) (A p) m^-3 (p A), forward/backward sandwich: the bond terms of
        # C^dag g C come with the opposite sign from its diagonal
        g = 1.0 / (m * m * m)
        f = -(q * q) * 0.5 * k2
        diag[:] += f * a * a * g
        diag[1:] += f * a[1:] * a[1:] * g[:-1]
        upper -= f * a[:-1] * a[1:] * g[:-1]
        lower -= f * a[:-1] * a[1:] * g[:-1]
        if periodic:
            diag[0] += f * a[0] * a[0] * g[-1]
            c_lr -= f * a[-1] * a[0] * g[-1]
            c_ul -= f * a[-1] * a[0] * g[-1]

    return TridiagonalOperator(
        diag=diag, upper=upper, lower=lower, corner_ul=complex(c_ul), corner_lr=complex(c_lr),
        dx=dx, hbar=hbar, domain=domain,
    )


def build_hamiltonian_for(model: QuantumModel, state: WaveState) -> TridiagonalOperator:
    return build_hamiltonian(model, state.dx, state.hbar, state.domain)


# -- Crank-Nicolson ------------------------------------------------------------


def _solve_tridiag(lower, diag, upper, rhs):
    n = diag.size
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    try:
        x = solve_banded((1, 1), ab, rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolveFailure(f"banded solve failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SolveFailure("banded solve produced non-finite values (singular system)")
    return x


def _solve_cyclic_tridiag(lower, diag, upper, c_ul, c_lr, rhs):
    """Sherman-Morrison corner correction over two banded solves."""
    gamma = -diag[0] if diag[0] != 0.0 else 1.0
    d = diag.copy()
    d[0] -= gamma
    d[-1] -= c_ul * c_lr / gamma
    y = _solve_tridiag(lower, d, upper, rhs)
    u = np.zeros(diag.size, dtype=complex)
    u[0] = gamma
    u[-1] = c_lr
    z = _solve_tridiag(lower, d, upper, u)
    vy = y[0] + (c_ul / gamma) * y[-1]
    vz = z[0] + (c_ul / gamma) * z[-1]
    denom = 1.0 + vz
    if denom == 0.0 or not np.isfinite(denom):
        raise SolveFailure("cyclic correction singular (dtau too large for the spectrum?)")
    return y - z * (vy / denom)


def cn_step(op: TridiagonalOperator, state: WaveState, dtau: float) -> WaveState:
    """One Cayley step: (1 + i dtau H/2hbar) psi' = (1 - i dtau H/2hbar) psi."""
    z = 1j * dtau / (2.0 * op.hbar)
    rhs = state.psi - z * op.apply(state.psi)
    diag = 1.0 + z * op.diag
    upper = z * op.upper
    lower = z * op.lower
    if op.domain == "periodic":
        psi1 = _solve_cyclic_tridiag(lower, diag, upper, z * op.corner_ul, z * op.corner_lr, rhs)
    else:
        psi1 = _solve_tridiag(lower, diag, upper, rhs)
    return replace(state, psi=psi1)


def evolve(op: TridiagonalOperator, state: WaveState, dtau: float, steps: int) -> WaveState:
    for _ in range(steps):
        state = cn_step(op, state, dtau)
    return state


# -- diagnostics ----------------------------------------------------------------


def dispersion_check(k: float, w_const: float, hbar: float) -> tuple[float, float, float]:
    """Plane-wave symbols of the square-root operator vs its quadratic truncation.

    Returns (exact, truncated, |difference|); the difference is the quartic
    factorization remainder, ~ (hbar k)^4 / (8 |w|^3) for small hbar k.
    """
    if w_const >= 0.0:
        raise ValueError(f"w_const must be negative, got {w_const}")
    hk = hbar * k
    if abs(hk) >= abs(w_const):
        raise SuperluminalMode(f"hbar|k| = {abs(hk):g} >= |w| = {abs(w_const):g}")
    exact = w_const * math.sqrt(1.0 - (hk / w_const) ** 2)
    truncated = hk * hk / (2.0 * (-w_const)) + w_const
    return exact, truncated, abs(exact - truncated)


def model_gap(state: WaveState, w_profile, a_profile, q: float) -> float:
    """||(H_modified - H_minimal) psi|| / ||psi|| on identical profiles."""
    w_profile = np.asarray(w_profile, dtype=float)
    a_profile = np.asarray(a_profile, dtype=float)
    h_min = build_hamiltonian(
        QuantumModel(QuantumKind.MinimalCoupling, w_profile, a_profile, q),
        state.dx, state.hbar, state.domain,
    )
    h_mod = build_hamiltonian(
        QuantumModel(QuantumKind.Modified, w_profile, a_profile, q),
        state.dx, state.hbar, state.domain,
    )
    diff = h_mod.apply(state.psi) - h_min.apply(state.psi)
    denom = float(np.linalg.norm(state.psi))
    return float(np.linalg.norm(diff)) / denom


# -- common states ---------------------------------------------------------------


def gaussian_packet(
    n: int, dx: float, x0: float, sigma0: float, k0: float, hbar: float,
    domain: str = "periodic", origin: float = 0.0,
) -> WaveState:
    x = origin + dx * np.arange(n)
    psi = np.exp(-((x - x0) ** 2) / (4.0 * sigma0 * sigma0)) * np.exp(1j * k0 * x)
    return WaveState(psi=psi, dx=dx, hbar=hbar, domain=domain, x0=origin).normalized()


def plane_wave(n: int, dx: float, mode: int, hbar: float) -> WaveState:
    """exp(i k x) with k = 2 pi mode / (n dx): an exact periodic grid eigenmode."""
    k = 2.0 * math.pi * mode / (n * dx)
    x = dx * np.arange(n)
    return WaveState(psi=np.exp(1j * k * x), dx=dx, hbar=hbar, domain="periodic").normalized()


def packet_sigma(state: WaveState) -> float:
    """Width of |psi|^2 via its second central moment."""
    x = state.x
    rho = np.abs(state.psi) ** 2
    total = float(np.sum(rho)) * state.dx
    mean = float(np.sum(x * rho)) * state.dx / total
    var = float(np.sum((x - mean) ** 2 * rho)) * state.dx / total
    return math.sqrt(var)


def free_packet_sigma(tau: float, sigma0: float, mass: float, hbar: float) -> float:
    """Analytic free-packet dispersion sigma(tau) for constant mass."""
    return sigma0 * math.sqrt(1.0 + (hbar * tau / (2.0 * mass * sigma0 * sigma0)) ** 2)


def snapshot_csv(state: WaveState, path) -> None:
    """x, Re psi, Im psi, |psi|^2 with round-trip float formatting."""
    import csv as _csv

    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(("x", "re_psi", "im_psi", "density"))
        x = state.x
        for i in range(state.n):
            p = state.psi[i]
            writer.writerow(
                [f"{x[i]:.17g}", f"{p.real:.17g}", f"{p.imag:.17g}", f"{abs(p) ** 2:.17g}"]
            )
