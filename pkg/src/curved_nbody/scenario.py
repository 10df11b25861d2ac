"""JSON scenario files, deterministic CSV/JSON writers and atomic output.

A scenario fixes the curvature, the initial bodies (raw, or through a named
family), the end time, optional integrator overrides and the output
selection::

    {"name": "lagrange", "kappa": 1.0, "t_end": 10.0,
     "family": {"type": "lagrangian", "z": 0.3},
     "integrator": {"rel_tol": 1e-10},
     "output": {"samples": 200}}

Raw bodies are given as ``{"mass": m, "position": [x, y, z], "velocity":
[vx, vy, vz]}``. They are projected onto the constraints, but rejected when
the projection would move them by more than 1e-9.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from curved_nbody import equilibria
from curved_nbody.dynamics import STATE_TOL, SystemState
from curved_nbody.errors import CurvedNBodyError, DomainError
from curved_nbody.geometry import as_curvature, surface_residual, tangent_residual
from curved_nbody.integrate import IntegratorConfig
from curved_nbody.singularities import isosceles_scenario

FAMILIES = ("ngon_fixed", "tetrahedron", "lagrangian", "ngon", "eulerian", "hyperbolic_re",
            "isosceles_singularity")

_INTEGRATOR_KEYS = {
    "rel_tol": "rel_tol",
    "abs_tol": "abs_tol",
    "dt0": "initial_dt",
    "initial_dt": "initial_dt",
    "max_dt": "max_dt",
    "event_threshold": "singularity_event_threshold",
    "singularity_event_threshold": "singularity_event_threshold",
    "max_steps": "max_steps",
}


class ScenarioError(DomainError):
    """The scenario file is malformed or describes an invalid state."""


# --------------------------------------------------------------------------
# deterministic formatting


def fmt(x) -> str:
    """Format a float with 17 significant digits (locale independent)."""
    return format(float(x), ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits.

    Non-finite floats are written as ``null``.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in seq):
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    return json.dumps(str(obj))


def atomic_write(path, text: str) -> None:
    """Write ``text`` with LF line endings to ``path`` via a rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trajectory_csv(samples) -> str:
    """``t`` then ``x,y,z,vx,vy,vz`` per body, one row per sample."""
    n = samples[0].state.n
    head = ["t"] + [f"{c}{i}" for i in range(n) for c in ("x", "y", "z", "vx", "vy", "vz")]
    rows = [",".join(head)]
    for s in samples:
        st = s.state
        vals = [s.time]
        for q, v in zip(st.q, st.velocities):
            vals.extend(q)
            vals.extend(v)
        rows.append(",".join(fmt(v) for v in vals))
    return "\n".join(rows) + "\n"


def diagnostics_csv(samples) -> str:
    """``t, energy, cx, cy, cz, I, J, min_pair_gap, constraint_residual`` per sample."""
    rows = ["t,energy,cx,cy,cz,I,J,min_pair_gap,constraint_residual"]
    for s in samples:
        d = s.diagnostics
        J = d.moment_J if d.moment_J is not None else float("nan")
        vals = [s.time, d.energy, *d.angular_momentum, d.moment_I, J, d.min_pair_gap,
                d.constraint_residual]
        rows.append(",".join(fmt(v) for v in vals))
    return "\n".join(rows) + "\n"


# --------------------------------------------------------------------------
# scenarios


@dataclass
class Scenario:
    """A parsed scenario. Exactly one of ``bodies`` and ``family`` is set."""

    name: str
    kappa: float
    t_end: float
    bodies: Optional[list] = None
    family: Optional[dict] = None
    integrator: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    # ---- construction -------------------------------------------------

    @classmethod
    def from_dict(cls, data) -> "Scenario":
        if not isinstance(data, dict):
            raise ScenarioError("a scenario must be a JSON object")
        unknown = set(data) - {"name", "kappa", "t_end", "bodies", "family", "integrator",
                               "output"}
        if unknown:
            raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
        try:
            kappa = float(data["kappa"])
            t_end = float(data["t_end"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"kappa and t_end are required numbers ({exc})") from None
        if kappa == 0 or not math.isfinite(kappa):
            raise ScenarioError("kappa must be finite and nonzero")
        if not (t_end > 0 and math.isfinite(t_end)):
            raise ScenarioError("t_end must be positive")
        has_bodies = data.get("bodies") is not None
        has_family = data.get("family") is not None
        if has_bodies == has_family:
            raise ScenarioError("give exactly one of 'bodies' and 'family'")
        integ = dict(data.get("integrator") or {})
        bad = set(integ) - set(_INTEGRATOR_KEYS)
        if bad:
            raise ScenarioError(f"unknown integrator keys: {sorted(bad)}")
        sc = cls(name=str(data.get("name", "scenario")), kappa=kappa, t_end=t_end,
                 bodies=data.get("bodies"), family=data.get("family"), integrator=integ,
                 output=dict(data.get("output") or {}))
        sc.state()  # validate eagerly
        sc.config()
        return sc

    @classmethod
    def load(cls, path) -> "Scenario":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def from_state(cls, state, name="state", t_end=1.0, integrator=None, output=None):
        """Raw-bodies scenario reproducing ``state`` exactly."""
        bodies = [{"mass": float(m), "position": [float(x) for x in q],
                   "velocity": [float(x) for x in v]}
                  for m, q, v in zip(state.masses, state.q, state.velocities)]
        return cls(name, state.kappa, float(t_end), bodies=bodies,
                   integrator=dict(integrator or {}), output=dict(output or {}))

    def to_dict(self) -> dict:
        out = {"name": self.name, "kappa": self.kappa, "t_end": self.t_end}
        if self.bodies is not None:
            out["bodies"] = self.bodies
        else:
            out["family"] = self.family
        if self.integrator:
            out["integrator"] = self.integrator
        if self.output:
            out["output"] = self.output
        return out

    def dumps(self) -> str:
        return dumps(self.to_dict()) + "\n"

    # ---- interpretation -----------------------------------------------

    def config(self, **overrides) -> IntegratorConfig:
        kw = {}
        for key, value in self.integrator.items():
            kw[_INTEGRATOR_KEYS[key]] = value
        for key, value in overrides.items():
            if value is not None:
                kw[_INTEGRATOR_KEYS.get(key, key)] = value
        if "max_steps" in kw:
            kw["max_steps"] = int(kw["max_steps"])
        try:
            return IntegratorConfig(**{k: float(v) if k != "max_steps" else v
                                       for k, v in kw.items()})
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"invalid integrator settings: {exc}") from None

    def state(self) -> SystemState:
        try:
            if self.bodies is not None:
                return _state_from_bodies(self.kappa, self.bodies)
            return _state_from_family(self.kappa, self.family)
        except ScenarioError:
            raise
        except (CurvedNBodyError, KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"invalid scenario {self.name!r}: {exc}") from None


def _vec3(value, what):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{what} must be three finite numbers")
    return arr


def _state_from_bodies(kappa, bodies):
    if not isinstance(bodies, list) or not bodies:
        raise ScenarioError("'bodies' must be a nonempty list")
    masses, q, v = [], [], []
    for k, b in enumerate(bodies):
        if not isinstance(b, dict) or "mass" not in b or "position" not in b:
            raise ScenarioError(f"body {k} needs 'mass' and 'position'")
        masses.append(float(b["mass"]))
        q.append(_vec3(b["position"], f"body {k} position"))
        v.append(_vec3(b.get("velocity", [0.0, 0.0, 0.0]), f"body {k} velocity"))
    q = np.array(q)
    v = np.array(v)
    k = as_curvature(kappa).kappa
    res_q = surface_residual(k, q)
    report = []
    for i, r in enumerate(res_q):
        if not r <= STATE_TOL:
            report.append(f"body {i}: surface residual {r:.3e}")
    if not report:
        res_v = tangent_residual(k, q, v)
        for i, r in enumerate(res_v):
            if not r <= STATE_TOL:
                report.append(f"body {i}: tangency residual {r:.3e}")
    if report:
        raise ScenarioError("constraint violation (tolerance 1e-9): " + "; ".join(report))
    return SystemState.from_arrays(kappa, masses, q, v)


def _get(spec, key, default=None, required=False):
    if key in spec:
        return spec[key]
    if required:
        raise ScenarioError(f"family {spec.get('type')!r} needs {key!r}")
    return default


def _state_from_family(kappa, spec):
    if not isinstance(spec, dict) or "type" not in spec:
        raise ScenarioError("'family' must be an object with a 'type'")
    kind = spec["type"]
    m = float(_get(spec, "m", 1.0))
    sign = float(_get(spec, "sign", 1.0))
    if kind == "ngon_fixed":
        return equilibria.fixed_point_ngon(int(_get(spec, "n", required=True)), m, kappa)
    if kind == "tetrahedron":
        if kappa != 1.0:
            raise ScenarioError("the tetrahedron family is defined for kappa = 1")
        return equilibria.fixed_point_tetrahedron(m)
    if kind == "lagrangian":
        return equilibria.lagrangian_re(kappa, float(_get(spec, "z", required=True)), m,
                                        sign).state
    if kind == "ngon":
        return equilibria.ngon_re(kappa, int(_get(spec, "n", required=True)),
                                  float(_get(spec, "z", required=True)), m, sign).state
    if kind == "eulerian":
        M = _get(spec, "M")
        return equilibria.eulerian_re(kappa, float(_get(spec, "z", required=True)), m,
                                      None if M is None else float(M), sign).state
    if kind == "hyperbolic_re":
        M = _get(spec, "M")
        return equilibria.hyperbolic_re(float(_get(spec, "x", required=True)), m,
                                        None if M is None else float(M), sign, kappa).state
    if kind == "isosceles_singularity":
        if kappa != 1.0:
            raise ScenarioError("the isosceles scenarios are defined for kappa = 1")
        M = _get(spec, "M")
        return isosceles_scenario(str(_get(spec, "case", required=True)),
                                  float(_get(spec, "x0", required=True)), m,
                                  None if M is None else float(M)).state()
    raise ScenarioError(f"unknown family {kind!r}; expected one of {', '.join(FAMILIES)}")
