"""JSON scenario documents: schema, loading and hashing."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .geometry import Scenario
from .particles import SimConfig

__all__ = ["SCHEMA", "ScenarioError", "ScenarioFile", "load_scenario", "parse_scenario"]


class ScenarioError(ValueError):
    """The scenario document is malformed or violates the schema."""


_number = {"type": "number"}
_vector = {"type": "array", "items": _number, "minItems": 3, "maxItems": 3}
_grid = {"type": "array", "items": _number}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["diffusion_coeff", "far_radius", "pos1", "pos2"],
    "properties": {
        "diffusion_coeff": {"type": "number", "minimum": 0},
        "far_radius": {"type": "number", "exclusiveMinimum": 0},
        "pos1": _vector,
        "pos2": _vector,
        "slot_duration": {"type": "number", "exclusiveMinimum": 0},
        "molecules_per_bit": {"type": "integer", "minimum": 0},
        "bit_prior": {"type": "number", "minimum": 0, "maximum": 1},
        "noise_mean": _number,
        "noise_var": {"type": "number", "minimum": 0},
        "slots": {"type": "integer", "minimum": 1},
        "sim": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_particles": {"type": "integer", "minimum": 1},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "t_max": {"type": "number", "exclusiveMinimum": 0},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_grid": _grid,
                "phi_grid_deg": _grid,
                "N_grid": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "R_grid": _grid,
            },
        },
    },
}

_SIM_DEFAULTS = {"n_particles": 10_000, "dt": 1e-4, "t_max": 20.0, "seed": 0}


@dataclass(frozen=True)
class ScenarioFile:
    scenario: Scenario
    sim: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    sha256: str = ""

    def sim_config(self, **overrides) -> SimConfig:
        values = {**_SIM_DEFAULTS, **self.sim}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return SimConfig(n_particles=int(values["n_particles"]), t_max=float(values["t_max"]),
                         dt=float(values["dt"]), seed=int(values["seed"]))


def parse_scenario(doc: dict, sha256: str = "") -> ScenarioFile:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ScenarioError(f"scenario schema error at {list(exc.absolute_path)}: {exc.message}") from exc
    body = {k: v for k, v in doc.items() if k not in ("sim", "sweep")}
    try:
        scenario = Scenario(**body)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    return ScenarioFile(scenario=scenario, sim=dict(doc.get("sim", {})),
                        sweep=dict(doc.get("sweep", {})), sha256=sha256)


def load_scenario(path) -> ScenarioFile:
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    return parse_scenario(doc, hashlib.sha256(raw).hexdigest())
