"""Vacuum potential field: softened moving Coulomb sources over a negative baseline.

The scalar potential is W(r,t) = w_inf + q_test * sum_i qs_i / (4 pi s_i) with
s_i = sqrt(|r - R_i(t)|^2 + eps_i^2) and R_i(t) = R0_i + uf_i * t.  Each moving
source contributes W_i * uf_i / q_test to the vector potential (the baseline is
not attributable to any mover); optional static uniform terms a_uniform and
0.5 * b_uniform x r can be added for scenarios that need a constant A or a
uniform magnetic field.  E and B are assembled from the analytic gradient,
time derivative and Jacobian of the potentials.

All evaluators broadcast over leading axes of r (shape (..., 3)) and are pure;
VacuumField instances are immutable after construction.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ZeroTestCharge

FOUR_PI = 4.0 * np.pi


def as_vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ConfigError(f"expected a 3-vector, got shape {v.shape}")
    return v


def _skew_half(b: np.ndarray) -> np.ndarray:
    # Jacobian of 0.5 * b x r
    bx, by, bz = b
    return 0.5 * np.array([[0.0, -bz, by], [bz, 0.0, -bx], [-by, bx, 0.0]])


@dataclass(frozen=True)
class FieldSource:
    """One softened Coulomb source on a straight-line orbit R(t) = r0 + uf*t."""

    qs: float
    r0: np.ndarray
    uf: np.ndarray
    eps: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "r0", as_vec3(self.r0))
        object.__setattr__(self, "uf", as_vec3(self.uf))
        if self.eps <= 0.0:
            raise ConfigError(f"source softening eps must be > 0, got {self.eps}")
        if float(np.linalg.norm(self.uf)) >= 1.0:
            raise ConfigError(f"source speed |uf| must be < 1, got {np.linalg.norm(self.uf)}")
        object.__setattr__(self, "_static", bool(np.all(self.uf == 0.0)))
        object.__setattr__(self, "_k", self.qs / FOUR_PI)
        object.__setattr__(self, "_eps2", self.eps * self.eps)

    def position(self, t: float) -> np.ndarray:
        return self.r0 + self.uf * t


@dataclass(frozen=True)
class VacuumField:
    """Baseline scalar potential plus softened moving Coulomb sources.

    q_test is the test-particle charge entering the coupling W = w_inf + q*phi.
    """

    w_inf: float
    sources: tuple[FieldSource, ...] = ()
    q_test: float = 1.0
    a_uniform: np.ndarray = field(default_factory=lambda: np.zeros(3))
    b_uniform: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.w_inf >= 0.0:
            raise ConfigError(f"baseline w_inf must be negative, got {self.w_inf}")
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "a_uniform", as_vec3(self.a_uniform))
        object.__setattr__(self, "b_uniform", as_vec3(self.b_uniform))
        object.__setattr__(self, "_b_jac", _skew_half(self.b_uniform))
        object.__setattr__(self, "_has_b", bool(np.any(self.b_uniform != 0.0)))
        object.__setattr__(self, "_half_b", 0.5 * self.b_uniform)

    # -- scalar potential -------------------------------------------------

    def w(self, r, t: float):
        """W(r,t); broadcasts over leading axes of r."""
        r = np.asarray(r, dtype=float)
        out = np.full(r.shape[:-1], self.w_inf)
        for s in self.sources:
            d = r - s.position(t)
            s2 = np.einsum("...i,...i->...", d, d) + s.eps * s.eps
            out = out + (self.q_test * s.qs / FOUR_PI) / np.sqrt(s2)
        return out if out.shape else float(out)

    def grad_w(self, r, t: float):
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        for s in self.sources:
            d = r - s.position(t)
            s2 = np.einsum("...i,...i->...", d, d) + s.eps * s.eps
            out = out + (-self.q_test * s.qs / FOUR_PI) * d / (s2 * np.sqrt(s2))[..., None]
        return out

    def coulomb(self, r, t: float):
        """Interaction part q*phi = W - w_inf (the additive potential energy)."""
        return self.w(r, t) - self.w_inf

    # -- vector potential --------------------------------------------------

    def _require_charge(self):
        if self.q_test == 0.0:
            raise ZeroTestCharge("vector potential requested with q_test = 0")

    def a(self, r, t: float):
        """A(r,t) = sum_i (W_i/q_test) uf_i + a_uniform + 0.5 b_uniform x r."""
        self._require_charge()
        r = np.asarray(r, dtype=float)
        out = np.broadcast_to(self.a_uniform, r.shape).copy()
        out += 0.5 * np.cross(self.b_uniform, r)
        for s in self.sources:
            d = r - s.position(t)
            s2 = np.einsum("...i,...i->...", d, d) + s.eps * s.eps
            out += ((s.qs / FOUR_PI) / np.sqrt(s2))[..., None] * s.uf
        return out

    def a_dot(self, r, t: float):
        """Partial time derivative of A (rigid source motion, static uniform terms)."""
        self._require_charge()
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        for s in self.sources:
            d = r - s.position(t)
            s2 = np.einsum("...i,...i->...", d, d) + s.eps * s.eps
            proj = np.einsum("...i,i->...", d, s.uf)
            out += ((s.qs / FOUR_PI) * proj / (s2 * np.sqrt(s2)))[..., None] * s.uf
        return out

    def a_jac(self, r, t: float) -> np.ndarray:
        """Jacobian J[i, j] = dA_i/dr_j at a single probe point."""
        self._require_charge()
        r = as_vec3(r)
        out = self._b_jac.copy()
        for s in self.sources:
            d = r - s.position(t)
            s2 = float(d @ d) + s.eps * s.eps
            out += np.outer(s.uf, (-s.qs / FOUR_PI) * d / (s2 * np.sqrt(s2)))
        return out

    def e_b(self, r, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Assembled fields E = -grad(W)/q_test - dA/dt, B = curl A (single probe)."""
        self._require_charge()
        r = as_vec3(r)
        e = -self.grad_w(r, t) / self.q_test - self.a_dot(r, t)
        j = self.a_jac(r, t)
        b = np.array([j[2, 1] - j[1, 2], j[0, 2] - j[2, 0], j[1, 0] - j[0, 1]])
        return e, b

    def local_state(self, r: np.ndarray, t: float):
        """Fused single-probe evaluation: (w, grad_w, a, a_dot, a_jac).

        One pass over the sources; this is the integrator hot path, so static
        sources skip the vector-potential work entirely.
        """
        w = self.w_inf
        gw = np.zeros(3)
        if self._has_b:
            a = self.a_uniform + np.cross(self._half_b, r)
        else:
            a = self.a_uniform.copy()
        adot = np.zeros(3)
        jac = self._b_jac.copy()
        for s in self.sources:
            if s._static:
                d = r - s.r0
            else:
                d = r - s.r0 - s.uf * t
            s2 = float(d @ d) + s._eps2
            root = math.sqrt(s2)
            inv3 = s._k / (s2 * root)
            w += self.q_test * s._k / root
            gw -= (self.q_test * inv3) * d
            if not s._static:
                a += (s._k / root) * s.uf
                adot += (inv3 * float(d @ s.uf)) * s.uf
                jac -= np.outer(s.uf, inv3 * d)
        return w, gw, a, adot, jac

    # -- identity ----------------------------------------------------------

    def describe(self) -> dict:
        return {
            "w_inf": self.w_inf,
            "q_test": self.q_test,
            "a_uniform": self.a_uniform.tolist(),
            "b_uniform": self.b_uniform.tolist(),
            "sources": [
                {"qs": s.qs, "r0": s.r0.tolist(), "uf": s.uf.tolist(), "eps": s.eps}
                for s in self.sources
            ],
        }

    def stable_hash(self) -> str:
        return hashlib.sha1(repr(self.describe()).encode()).hexdigest()[:12]


# Free-function operation names ----------------------------------------------


def eval_w(fld: VacuumField, r, t: float):
    return fld.w(r, t)


def grad_w(fld: VacuumField, r, t: float):
    return fld.grad_w(r, t)


def eval_a(fld: VacuumField, r, t: float):
    return fld.a(r, t)


def eval_eb(fld: VacuumField, r, t: float):
    return fld.e_b(r, t)
