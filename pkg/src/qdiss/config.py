"""Scenario configuration schemas for the command-line runner."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

_NUM = {"type": "number"}
_MATRIX = {
    "type": "object",
    "properties": {"re": {"type": "array"}, "im": {"type": "array"}},
    "required": ["re"],
    "additionalProperties": False,
}
_PAULI = {
    "type": "object",
    "properties": {"pauli": {"type": "string"}, "coeff": _NUM},
    "required": ["pauli"],
    "additionalProperties": False,
}
_OPERATOR = {
    "anyOf": [
        {"type": "string"},
        _MATRIX,
        _PAULI,
        {"type": "array", "items": {"anyOf": [{"type": "string"}, _MATRIX, _PAULI]}},
    ]
}
MODEL_SCHEMA = {
    "type": "object",
    "properties": {
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "hamiltonian": _OPERATOR,
        "form": {"enum": ["gks", "diagonal"]},
        "ops": {"type": "array", "items": _OPERATOR},
        "coeff": {"anyOf": [_MATRIX, {"type": "array"}]},
        "rates": {"type": "array", "items": _NUM},
    },
    "required": ["dims", "form"],
    "additionalProperties": False,
}
_MODEL_REF = {
    "anyOf": [
        MODEL_SCHEMA,
        {"type": "object", "properties": {"file": {"type": "string"}},
         "required": ["file"], "additionalProperties": False},
    ]
}
_VECTOR = {"anyOf": [{"type": "string"}, _MATRIX, {"type": "array", "items": _NUM}]}
_STATE = {
    "anyOf": [
        {"type": "string"},
        {"type": "object",
         "properties": {"dims": {"type": "array"}, "re": {"type": "array"}, "im": {"type": "array"}},
         "required": ["dims", "re"], "additionalProperties": False},
        {"type": "object",
         "properties": {"vector": _VECTOR, "dims": {"type": "array"}},
         "required": ["vector"], "additionalProperties": False},
        {"type": "object",
         "properties": {"random": {"type": "object",
                                   "properties": {"rank": {"type": "integer", "minimum": 1}},
                                   "additionalProperties": False}},
         "required": ["random"], "additionalProperties": False},
    ]
}
_TIMES = {
    "anyOf": [
        {"type": "array", "items": _NUM, "minItems": 1},
        {"type": "object",
         "properties": {"t_max": {"type": "number", "exclusiveMinimum": 0},
                        "steps": {"type": "integer", "minimum": 1}},
         "required": ["t_max", "steps"], "additionalProperties": False},
    ]
}
_Q_GRID = {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1}
_PARTIES = {"anyOf": [{"type": "string"}, {"type": "array"}]}
_OBSERVABLE = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "element": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "part": {"enum": ["re", "im", "abs"]},
        "operator": _OPERATOR,
    },
    "required": ["name"],
    "additionalProperties": False,
}


def _command(props: dict, required=()) -> dict:
    return {"type": "object", "properties": {"description": {"type": "string"}, **props},
            "required": list(required), "additionalProperties": False}


SCHEMAS = {
    "evolve": _command({
        "model": _MODEL_REF,
        "initial_state": _STATE,
        "times": _TIMES,
        "method": {"enum": ["rk4", "exact"]},
        "h_max": {"type": "number", "exclusiveMinimum": 0},
        "observables": {"type": "array", "items": _OBSERVABLE},
    }, ["model", "initial_state", "times"]),
    "probe": _command({
        "model": _MODEL_REF,
        "psi0": _VECTOR,
        "psi1": _VECTOR,
        "dt": {"type": "number", "minimum": 0},
    }, ["model", "psi0", "psi1", "dt"]),
    "scan": _command({
        "levels": {"type": "integer", "minimum": 2},
        "parties": {"type": "integer", "minimum": 2},
        "condition_on": _PARTIES,
        "q_grid": _Q_GRID,
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "x_steps": {"type": "integer", "minimum": 1},
    }),
    "classify": _command({
        "labels": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "robust_threshold": {"type": "number", "exclusiveMinimum": 0},
    }),
    "track": _command({
        "model": _MODEL_REF,
        "initial_state": _STATE,
        "times": _TIMES,
        "condition_on": _PARTIES,
        "q_grid": _Q_GRID,
        "method": {"enum": ["rk4", "exact"]},
        "h_max": {"type": "number", "exclusiveMinimum": 0},
    }, ["model", "initial_state", "times", "condition_on"]),
}


class ConfigError(ValueError):
    """Malformed or schema-violating scenario configuration."""


def shipped_configs() -> list[str]:
    root = resources.files("qdiss") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_path(ref: str) -> Path:
    p = Path(ref)
    if p.exists():
        return p
    shipped = resources.files("qdiss") / "configs" / (ref if ref.endswith(".json") else ref + ".json")
    if shipped.is_file():
        return Path(str(shipped))
    raise ConfigError(f"config file {ref!r} not found")


def load_config(command: str, ref: str) -> tuple[dict, Path]:
    path = resolve_path(ref)
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        jsonschema.validate(cfg, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {loc}: {exc.message}") from None
    model = cfg.get("model")
    if isinstance(model, dict) and "file" in model:
        mpath = Path(model["file"])
        if not mpath.is_absolute():
            mpath = path.parent / mpath
        try:
            cfg["model"] = json.loads(mpath.read_text())
            jsonschema.validate(cfg["model"], MODEL_SCHEMA)
        except (OSError, json.JSONDecodeError, jsonschema.ValidationError) as exc:
            raise ConfigError(f"bad model file {mpath}: {exc}") from None
    return cfg, path


def time_grid(spec) -> np.ndarray:
    if isinstance(spec, dict):
        return np.linspace(0.0, float(spec["t_max"]), int(spec["steps"]) + 1)
    return np.asarray(spec, dtype=float)
