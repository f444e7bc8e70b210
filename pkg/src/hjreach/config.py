"""
JSON problem configuration.

A minimal document::

    {
      "system": {"kind": "dubins_car", "speed": 1.0, "control_range": [-1, 1],
                 "disturbance_min": [-0.1, -0.1, -0.1],
                 "disturbance_max": [0.1, 0.1, 0.1]},
      "grid": {"mins": [-5, -5, -3.141592653589793], "maxs": [5, 5, 3.141592653589793],
               "counts": [51, 51, 51], "periodic": [false, false, true]},
      "target": {"shape": "cylinder", "ignore_dims": [2], "center": [0, 0], "radius": 1},
      "horizon": 1.0,
      "problem": "goal"
    }

Defaults: ``cfl_factor`` 0.5, ``min_with`` "tube", ``direction`` "backward",
``output_interval`` horizon / 20, ``d_mode`` opposite of ``u_mode``.
``problem`` ("goal" or "avoid") expands to ``u_mode`` through
:func:`mode_for`. ``min_with: "zero"`` is accepted as an alias of "tube".
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .contours import SliceSpec
from .dynamics import Advection, DubinsCar, InputMode, Integrator1D, System
from .errors import ConfigError, HJReachError
from .grid import Grid, ValueField, create_grid
from .shapes import (field_complement, field_intersection, field_union, shape_cylinder,
                     shape_rectangle, shape_sphere)
from .solver import Direction, MinWith, SolveConfig

DEFAULT_INTERVALS = 20
EMIT_CHOICES = ("field", "csv", "contours")


class Problem(enum.Enum):
    GOAL = "goal"
    AVOID = "avoid"


_MODE_TABLE = {
    (Problem.GOAL, Direction.FORWARD): InputMode.MAX,
    (Problem.AVOID, Direction.FORWARD): InputMode.MIN,
    (Problem.GOAL, Direction.BACKWARD): InputMode.MIN,
    (Problem.AVOID, Direction.BACKWARD): InputMode.MAX,
}


def mode_for(problem: Problem, direction: Direction) -> InputMode:
    """Control mode for a goal/avoid problem; the disturbance takes the opposite."""
    return _MODE_TABLE[(Problem(problem), Direction(direction))]


_num = {"type": "number"}
_vec = {"type": "array", "items": _num, "minItems": 1}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["system", "grid", "target"],
    "properties": {
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["dubins_car", "integrator_1d", "advection"]},
                "speed": _num,
                "control_range": _pair,
                "disturbance_min": _vec,
                "disturbance_max": _vec,
                "velocity": _vec,
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["mins", "maxs", "counts"],
            "properties": {
                "mins": _vec,
                "maxs": _vec,
                "counts": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                "periodic": {"type": "array", "items": {"type": "boolean"}},
            },
        },
        "target": {"$ref": "#/$defs/shape"},
        "obstacles": {"type": "array", "items": {"$ref": "#/$defs/shape"}},
        "horizon": _num,
        "output_interval": _num,
        "tau": {"type": "array", "items": _num, "minItems": 1},
        "problem": {"enum": ["goal", "avoid"]},
        "u_mode": {"enum": ["min", "max"]},
        "d_mode": {"enum": ["min", "max"]},
        "min_with": {"enum": ["none", "tube", "zero"]},
        "direction": {"enum": ["backward", "forward"]},
        "cfl_factor": _num,
        "trajectory": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "initial_states": {"type": "array", "items": _vec},
                "disturbance": {"enum": ["worst", "zero"]},
                "substeps": {"type": "integer"},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "emit": {"type": "array", "items": {"enum": list(EMIT_CHOICES)}},
                "level": _num,
                "slices": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["free_dims"],
                        "properties": {
                            "free_dims": {"type": "array", "items": {"type": "integer"}},
                            "fixed": {
                                "type": "object",
                                "patternProperties": {"^[0-9]+$": _num},
                                "additionalProperties": False,
                            },
                        },
                    },
                },
            },
        },
    },
    "$defs": {
        "shape": {
            "type": "object",
            "additionalProperties": False,
            "required": ["shape"],
            "properties": {
                "shape": {"enum": ["sphere", "cylinder", "rectangle", "union",
                                   "intersection", "complement"]},
                "center": _vec,
                "radius": _num,
                "ignore_dims": {"type": "array", "items": {"type": "integer"}},
                "lower": _vec,
                "upper": _vec,
                "parts": {"type": "array", "items": {"$ref": "#/$defs/shape"}, "minItems": 1},
                "of": {"$ref": "#/$defs/shape"},
            },
            "allOf": [
                {"if": {"properties": {"shape": {"const": "sphere"}}},
                 "then": {"required": ["center", "radius"]}},
                {"if": {"properties": {"shape": {"const": "cylinder"}}},
                 "then": {"required": ["ignore_dims", "center", "radius"]}},
                {"if": {"properties": {"shape": {"const": "rectangle"}}},
                 "then": {"required": ["lower", "upper"]}},
                {"if": {"properties": {"shape": {"enum": ["union", "intersection"]}}},
                 "then": {"required": ["parts"]}},
                {"if": {"properties": {"shape": {"const": "complement"}}},
                 "then": {"required": ["of"]}},
            ],
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


@dataclass
class ProblemConfig:
    system: dict
    grid: dict
    target: dict
    tau: tuple
    u_mode: InputMode
    d_mode: InputMode
    min_with: MinWith = MinWith.TUBE
    direction: Direction = Direction.BACKWARD
    cfl_factor: float = 0.5
    obstacles: list = field(default_factory=list)
    trajectory: dict | None = None
    outputs: dict = field(default_factory=dict)

    def build_grid(self) -> Grid:
        g = self.grid
        return create_grid(g["mins"], g["maxs"], g["counts"], g["periodic"])

    def build_system(self) -> System:
        return build_system(self.system)

    def slices(self) -> list[SliceSpec]:
        return [
            SliceSpec(tuple(s["free_dims"]), {int(k): v for k, v in s.get("fixed", {}).items()})
            for s in self.outputs["slices"]
        ]

    def to_solve_config(self) -> SolveConfig:
        grid = self.build_grid()
        target = build_shape(grid, self.target)
        obstacles = None
        for spec in self.obstacles:
            g = build_shape(grid, spec)
            obstacles = g if obstacles is None else field_union(obstacles, g)
        return SolveConfig(
            system=self.build_system(), grid=grid, target=target, tau=self.tau,
            u_mode=self.u_mode, d_mode=self.d_mode, min_with=self.min_with,
            direction=self.direction, obstacles=obstacles, cfl_factor=self.cfl_factor,
        )


def build_system(spec: dict) -> System:
    kind = spec["kind"]
    if kind == "dubins_car":
        return DubinsCar(spec["speed"], tuple(spec["control_range"]),
                         tuple(spec["disturbance_min"]), tuple(spec["disturbance_max"]))
    if kind == "integrator_1d":
        return Integrator1D(tuple(spec["control_range"]))
    return Advection(tuple(spec["velocity"]))


def build_shape(grid: Grid, spec: dict) -> ValueField:
    kind = spec["shape"]
    if kind == "sphere":
        return shape_sphere(grid, spec["center"], spec["radius"])
    if kind == "cylinder":
        return shape_cylinder(grid, spec["ignore_dims"], spec["center"], spec["radius"])
    if kind == "rectangle":
        return shape_rectangle(grid, spec["lower"], spec["upper"])
    if kind == "complement":
        return field_complement(build_shape(grid, spec["of"]))
    parts = [build_shape(grid, p) for p in spec["parts"]]
    combine = field_union if kind == "union" else field_intersection
    out = parts[0]
    for p in parts[1:]:
        out = combine(out, p)
    return out


def _where(path) -> str:
    return ".".join(str(p) for p in path) or "<root>"


def _floats(v):
    return [float(x) for x in v]


def _normalize_shape(spec: dict) -> dict:
    out = {"shape": spec["shape"]}
    for key in ("center", "lower", "upper"):
        if key in spec:
            out[key] = _floats(spec[key])
    if "radius" in spec:
        out["radius"] = float(spec["radius"])
    if "ignore_dims" in spec:
        out["ignore_dims"] = [int(i) for i in spec["ignore_dims"]]
    if "parts" in spec:
        out["parts"] = [_normalize_shape(p) for p in spec["parts"]]
    if "of" in spec:
        out["of"] = _normalize_shape(spec["of"])
    return out


def _normalize_system(spec: dict) -> dict:
    kind = spec["kind"]
    allowed = {
        "dubins_car": {"kind", "speed", "control_range", "disturbance_min", "disturbance_max"},
        "integrator_1d": {"kind", "control_range"},
        "advection": {"kind", "velocity"},
    }[kind]
    extra = sorted(set(spec) - allowed)
    if extra:
        raise ConfigError(f"key {extra[0]!r} does not apply to kind {kind!r}", "system")
    if kind == "dubins_car":
        return {
            "kind": kind,
            "speed": float(spec.get("speed", 1.0)),
            "control_range": _floats(spec.get("control_range", [-1.0, 1.0])),
            "disturbance_min": _floats(spec.get("disturbance_min", [0.0, 0.0, 0.0])),
            "disturbance_max": _floats(spec.get("disturbance_max", [0.0, 0.0, 0.0])),
        }
    if kind == "integrator_1d":
        return {"kind": kind, "control_range": _floats(spec.get("control_range", [-1.0, 1.0]))}
    if "velocity" not in spec:
        raise ConfigError("advection needs 'velocity'", "system")
    return {"kind": kind, "velocity": _floats(spec["velocity"])}


def _resolve_tau(doc: dict) -> tuple:
    if "tau" in doc:
        if "horizon" in doc or "output_interval" in doc:
            raise ConfigError("give either tau or horizon/output_interval, not both", "tau")
        tau = _floats(doc["tau"])
        if tau[0] != 0.0:
            raise ConfigError("tau must start at 0", "tau")
        if any(b <= a for a, b in zip(tau, tau[1:])):
            raise ConfigError("tau not strictly increasing", "tau")
        return tuple(tau)
    if "horizon" not in doc:
        raise ConfigError("need 'horizon' or an explicit 'tau' list", "horizon")
    horizon = float(doc["horizon"])
    if not horizon >= 0:
        raise ConfigError("horizon must be non-negative", "horizon")
    if horizon == 0:
        return (0.0,)
    interval = float(doc.get("output_interval", horizon / DEFAULT_INTERVALS))
    if not interval > 0:
        raise ConfigError("output_interval must be positive", "output_interval")
    n = int(np.floor(horizon / interval + 1e-9))
    tau = [k * interval for k in range(n + 1)]
    if horizon - tau[-1] > 1e-9 * horizon:
        tau.append(horizon)
    else:
        tau[-1] = horizon
    return tuple(tau)


def validate(doc) -> ProblemConfig:
    """Validate a decoded JSON document into a :class:`ProblemConfig`."""
    err = jsonschema.exceptions.best_match(_VALIDATOR.iter_errors(doc))
    if err is not None:
        raise ConfigError(err.message, _where(err.absolute_path))

    system = _normalize_system(doc["system"])
    g = doc["grid"]
    n = len(g["counts"])
    periodic = [bool(p) for p in g.get("periodic", [False] * n)]
    if not (len(g["mins"]) == len(g["maxs"]) == len(periodic) == n):
        raise ConfigError("mins, maxs, counts and periodic must have the same length", "grid")
    grid = {"mins": _floats(g["mins"]), "maxs": _floats(g["maxs"]),
            "counts": [int(c) for c in g["counts"]], "periodic": periodic}

    tau = _resolve_tau(doc)

    direction = Direction(doc.get("direction", "backward"))
    if "problem" in doc:
        if "u_mode" in doc:
            raise ConfigError("give either problem or u_mode, not both", "problem")
        u_mode = mode_for(Problem(doc["problem"]), direction)
    elif "u_mode" in doc:
        u_mode = InputMode(doc["u_mode"])
    else:
        raise ConfigError("need 'u_mode' or 'problem'", "u_mode")
    d_mode = InputMode(doc["d_mode"]) if "d_mode" in doc else u_mode.opposite

    mw = doc.get("min_with", "tube")
    min_with = MinWith.NONE if mw == "none" else MinWith.TUBE

    cfl = float(doc.get("cfl_factor", 0.5))
    if not 0.0 < cfl <= 1.0:
        raise ConfigError("cfl_factor must be in (0,1]", "cfl_factor")

    trajectory = None
    if "trajectory" in doc:
        t = doc["trajectory"]
        trajectory = {
            "initial_states": [_floats(s) for s in t.get("initial_states", [])],
            "disturbance": t.get("disturbance", "worst"),
            "substeps": int(t.get("substeps", 4)),
        }
        if trajectory["substeps"] < 1:
            raise ConfigError("substeps must be >= 1", "trajectory.substeps")
        for i, s in enumerate(trajectory["initial_states"]):
            if len(s) != n:
                raise ConfigError(f"state has {len(s)} entries, grid has {n} dims",
                                  f"trajectory.initial_states.{i}")

    o = doc.get("outputs", {})
    default_slices = [{"free_dims": [0, 1], "fixed": {}}] if n >= 2 else []
    outputs = {
        "emit": list(o.get("emit", ["field", "contours"])),
        "level": float(o.get("level", 0.0)),
        "slices": [
            {"free_dims": [int(d) for d in s["free_dims"]],
             "fixed": {str(int(k)): float(v) for k, v in sorted(s.get("fixed", {}).items(),
                                                               key=lambda kv: int(kv[0]))}}
            for s in o.get("slices", default_slices)
        ],
    }

    cfg = ProblemConfig(
        system=system, grid=grid, target=_normalize_shape(doc["target"]), tau=tau,
        u_mode=u_mode, d_mode=d_mode, min_with=min_with, direction=direction,
        cfl_factor=cfl, obstacles=[_normalize_shape(s) for s in doc.get("obstacles", [])],
        trajectory=trajectory, outputs=outputs,
    )
    # Semantic checks that need the built objects.
    try:
        grid_obj = cfg.build_grid()
        sys = cfg.build_system()
        if sys.state_dim != n:
            raise ConfigError(f"system has {sys.state_dim} states, grid has {n} dims", "system")
        try:
            build_shape(grid_obj, cfg.target)
        except HJReachError as exc:
            raise ConfigError(str(exc), "target") from exc
        for i, s in enumerate(cfg.obstacles):
            try:
                build_shape(grid_obj, s)
            except HJReachError as exc:
                raise ConfigError(str(exc), f"obstacles.{i}") from exc
        for i, s in enumerate(cfg.slices()):
            try:
                s.resolve(grid_obj)
            except HJReachError as exc:
                raise ConfigError(str(exc), f"outputs.slices.{i}") from exc
        if trajectory:
            for i, s in enumerate(trajectory["initial_states"]):
                if not grid_obj.contains(np.array(s)):
                    raise ConfigError("initial state outside the grid",
                                      f"trajectory.initial_states.{i}")
    except ConfigError:
        raise
    except HJReachError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def parse_config(text: str) -> ProblemConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc
    return validate(doc)


def config_to_dict(cfg: ProblemConfig) -> dict:
    out = {
        "system": cfg.system,
        "grid": cfg.grid,
        "target": cfg.target,
        "tau": list(cfg.tau),
        "u_mode": cfg.u_mode.value,
        "d_mode": cfg.d_mode.value,
        "min_with": cfg.min_with.value,
        "direction": cfg.direction.value,
        "cfl_factor": cfg.cfl_factor,
    }
    if cfg.obstacles:
        out["obstacles"] = cfg.obstacles
    if cfg.trajectory is not None:
        out["trajectory"] = cfg.trajectory
    out["outputs"] = cfg.outputs
    return out


def render_config(cfg: ProblemConfig) -> str:
    """Canonical JSON text that :func:`parse_config` maps back to ``cfg``."""
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True)
