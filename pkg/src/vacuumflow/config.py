"""Scenario configuration: JSON schema, validation, and tolerance defaults.

Every numeric tolerance used in a pass/fail decision lives in
DEFAULT_TOLERANCES and may be overridden per scenario under "tolerances";
nothing else in the package hard-codes them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .core import ModelKind, Particle
from .errors import ConfigError
from .fields import FieldSource, VacuumField
from .integrate import RK4, RK45, ImplicitMidpoint, IntegratorKind

DEFAULT_TOLERANCES: dict = {
    # particle dynamics
    "energy_drift": 1e-8,
    "mass_law": 1e-7,
    "gyration_pos_dev": 1e-6,
    "compare_pos_dev": 1e-6,
    "uniform_a_pos_dev": 1e-8,
    "force_gap": 1e-12,
    "legendre_rel": 1e-9,
    "momentum_fd_rel": 1e-6,
    "gradient_fd_rel": 1e-6,
    "el_ratio_band": [3.5, 4.5],
    "rk45_vs_midpoint": 1e-7,
    # wave verification
    "maxwell_ratio_band": [3.2, 4.8],
    "gauge_violated_ratio_max": 2.0,
    "advected_comoving_rel": 1e-4,
    "advected_fixed_min": 1e-2,
    # quantum
    "dispersion_exponent_band": [3.9, 4.1],
    "dispersion_error_center": 2.04e-4,
    "dispersion_error_width": 1e-6,
    "norm_drift": 1e-11,
    "packet_sigma_rel": 1e-2,
    "model_gap": 1e-10,
}

_INTEGRATOR_KINDS = ("rk4", "implicit_midpoint", "rk45")
_MODEL_NAMES = tuple(m.value for m in ModelKind)


@dataclass
class ScenarioConfig:
    name: str
    models: list[ModelKind]
    particle: Particle
    field: VacuumField
    r0: np.ndarray
    tau_end: float
    integrator: IntegratorKind
    h: float
    seed: int = 0
    out_dir: str = "out"
    tolerances: dict = dc_field(default_factory=dict)
    maxwell: dict = dc_field(default_factory=dict)
    quantum: dict = dc_field(default_factory=dict)
    raw: dict = dc_field(default_factory=dict)

    def tolerance(self, key: str):
        if key in self.tolerances:
            return self.tolerances[key]
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance key {key!r}")
        return DEFAULT_TOLERANCES[key]


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _vec3(raw, where: str) -> np.ndarray:
    _require(
        isinstance(raw, (list, tuple)) and len(raw) == 3,
        f"{where}: expected a 3-element list",
    )
    try:
        return np.array([float(v) for v in raw])
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: entries must be numbers") from None


def _build_field(raw: dict) -> VacuumField:
    _require(isinstance(raw, dict), "field: expected an object")
    _require("w_inf" in raw, "field.w_inf: required")
    w_inf = float(raw["w_inf"])
    _require(w_inf < 0.0, f"field.w_inf: baseline must be negative, got {w_inf}")
    sources = []
    for i, s in enumerate(raw.get("sources", [])):
        where = f"field.sources[{i}]"
        _require(isinstance(s, dict), f"{where}: expected an object")
        eps = float(s.get("eps", 0.01))
        _require(eps > 0.0, f"{where}.eps: softening must be > 0, got {eps}")
        uf = _vec3(s.get("uf", [0, 0, 0]), f"{where}.uf")
        _require(
            float(np.linalg.norm(uf)) < 1.0,
            f"{where}.uf: source speed |uf| must be < 1, got {np.linalg.norm(uf)}",
        )
        sources.append(FieldSource(qs=float(s["qs"]), r0=_vec3(s["r0"], f"{where}.r0"), uf=uf, eps=eps))
    return VacuumField(
        w_inf=w_inf,
        sources=tuple(sources),
        q_test=float(raw.get("q_test", 1.0)),
        a_uniform=_vec3(raw.get("a_uniform", [0, 0, 0]), "field.a_uniform"),
        b_uniform=_vec3(raw.get("b_uniform", [0, 0, 0]), "field.b_uniform"),
    )


def _build_integrator(raw: dict) -> tuple[IntegratorKind, float]:
    _require(isinstance(raw, dict), "integrator: expected an object")
    kind = raw.get("kind", "implicit_midpoint")
    _require(kind in _INTEGRATOR_KINDS, f"integrator.kind: must be one of {_INTEGRATOR_KINDS}, got {kind!r}")
    h = float(raw.get("h", 1e-3))
    _require(h > 0.0, f"integrator.h: step must be > 0, got {h}")
    if kind == "rk4":
        return RK4(), h
    if kind == "rk45":
        atol = float(raw.get("atol", 1e-10))
        rtol = float(raw.get("rtol", 1e-10))
        _require(atol > 0.0 and rtol > 0.0, "integrator.atol/rtol: must be > 0")
        return RK45(atol=atol, rtol=rtol), h
    tol = float(raw.get("tol", 1e-12))
    max_iter = int(raw.get("max_iter", 50))
    _require(tol > 0.0, f"integrator.tol: must be > 0, got {tol}")
    _require(max_iter >= 1, f"integrator.max_iter: must be >= 1, got {max_iter}")
    return ImplicitMidpoint(tol=tol, max_iter=max_iter), h


def validate_config(raw: dict) -> ScenarioConfig:
    """Build a typed scenario from a raw JSON object, re-checking all invariants."""
    _require(isinstance(raw, dict), "config root: expected a JSON object")
    models_raw = raw.get("models", ["M1"])
    _require(isinstance(models_raw, list) and models_raw, "models: expected a non-empty list")
    models = []
    for m in models_raw:
        _require(m in _MODEL_NAMES, f"models: unknown model {m!r} (expected one of {_MODEL_NAMES})")
        models.append(ModelKind(m))

    praw = raw.get("particle", {})
    _require(isinstance(praw, dict), "particle: expected an object")
    u0 = _vec3(praw.get("u0", [0, 0, 0]), "particle.u0")
    _require(
        float(np.linalg.norm(u0)) < 1.0,
        f"particle.u0: |u0| must be < 1, got {np.linalg.norm(u0)}",
    )
    q = float(praw.get("q", 1.0))
    particle = Particle(q=q, u0=u0)

    fld = _build_field(raw.get("field", {"w_inf": -1.0}))
    _require(
        particle.q == fld.q_test,
        f"particle.q: must equal field.q_test ({particle.q} != {fld.q_test})",
    )

    r0 = _vec3(raw.get("r0", [0, 0, 0]), "r0")
    w0 = fld.w(r0, 0.0)
    _require(w0 < 0.0, f"r0: W(r0, 0) = {w0} must be negative")

    tau_end = float(raw.get("tau_end", 1.0))
    _require(tau_end > 0.0, f"tau_end: must be > 0, got {tau_end}")

    integrator, h = _build_integrator(raw.get("integrator", {}))

    tolerances = raw.get("tolerances", {})
    _require(isinstance(tolerances, dict), "tolerances: expected an object")
    for key in tolerances:
        _require(key in DEFAULT_TOLERANCES, f"tolerances: unknown key {key!r}")

    return ScenarioConfig(
        name=str(raw.get("name", "scenario")),
        models=models,
        particle=particle,
        field=fld,
        r0=r0,
        tau_end=tau_end,
        integrator=integrator,
        h=h,
        seed=int(raw.get("seed", 0)),
        out_dir=str(raw.get("out_dir", "out")),
        tolerances=tolerances,
        maxwell=raw.get("maxwell", {}),
        quantum=raw.get("quantum", {}),
        raw=raw,
    )


def load_config(path) -> ScenarioConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return validate_config(raw)
