"""Experiment configuration: JSON schema, validation, defaults.

Configs are single JSON documents validated against the published schema
below before any compute runs; unknown keys are rejected everywhere.  A sweep
config carries a base config plus a list of (partial) override entries merged
on top of the base.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .errors import ConfigError

__all__ = ["CONFIG_SCHEMA", "load_config", "validate_config", "merge_config", "resolved"]

_XI_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["center", "width"],
    "properties": {
        "center": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
        "width": {"type": "number", "exclusiveMinimum": 0},
        "amplitude": {"type": "number"},
    },
}

_PERTURBATION_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["xi", "t"],
    "properties": {"xi": _XI_SCHEMA, "t": {"type": "number"}},
}

_PIECE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["lo", "hi", "poly"],
    "properties": {
        "lo": {"type": ["number", "string"]},
        "hi": {"type": ["number", "string"]},
        "poly": {"type": "array", "items": {"type": ["number", "string"]}},
        "power": {
            "type": "array",
            "items": {"type": ["number", "string"]},
            "minItems": 4,
            "maxItems": 4,
        },
    },
}

_ENTRY_PROPERTIES = {
    "name": {"type": "string"},
    "seed": {"type": "integer", "minimum": 0},
    "grid": {
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", "n"],
        "properties": {
            "kind": {"enum": ["rectangle", "disk"]},
            "n": {"type": "integer", "minimum": 8},
            "lx": {"type": "number", "exclusiveMinimum": 0},
            "ly": {"type": "number", "exclusiveMinimum": 0},
            "radius": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "profile": {
        "type": "object",
        "additionalProperties": False,
        "required": ["kind"],
        "properties": {
            "kind": {"enum": ["affine", "lane_emden", "piecewise"]},
            "alpha": {"type": "number"},
            "beta": {"type": "number"},
            "alpha_scale": {"enum": ["absolute", "lambda1"]},
            "p": {"type": "number"},
            "pieces": {"type": "array", "items": _PIECE_SCHEMA},
            "m": {"type": ["number", "string"]},
            "M": {"type": ["number", "string"]},
            "monotone": {"enum": ["nondecreasing", "decreasing"]},
        },
    },
    "steady": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "method": {"enum": ["linear", "damped-fixed-point", "newton", "lane-emden"]},
        },
    },
    "perturbations": {"type": "array", "items": _PERTURBATION_SCHEMA},
    "sampling": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "count": {"type": "integer", "minimum": 1},
            "t": {"type": "number"},
            "amplitude": {"type": "number"},
        },
    },
    "simulation": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "T": {"type": "number", "exclusiveMinimum": 0},
            "units": {"enum": ["time", "turnovers"]},
            "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
            "p_norms": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
            "record_every": {"type": "integer", "minimum": 1},
        },
    },
    "experiment": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "amplitudes": {"type": "array", "items": {"type": "number", "minimum": 0}},
            "p": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "output": {
        "type": "object",
        "additionalProperties": False,
        "properties": {"dir": {"type": "string"}},
    },
}

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "eulerstab experiment config",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        **_ENTRY_PROPERTIES,
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["entries"],
            "properties": {
                "base": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": _ENTRY_PROPERTIES,
                },
                "entries": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": _ENTRY_PROPERTIES,
                    },
                },
            },
        },
    },
}

DEFAULTS = {
    "seed": 0,
    "grid": {"kind": "rectangle", "n": 64, "lx": 1.0, "ly": 1.0, "radius": 0.5},
    "profile": {"kind": "affine", "alpha": 0.5, "beta": 1.0, "alpha_scale": "lambda1"},
    "steady": {"method": "linear"},
    "sampling": {"count": 20, "t": 1e-2, "amplitude": 1.0},
    "simulation": {"T": 2.0, "units": "turnovers", "cfl": 0.5,
                   "p_norms": [1.0, 2.0, 4.0], "record_every": 4},
    "experiment": {"amplitudes": [1e-3, 1e-2, 1e-1], "p": 2.0},
}


def validate_config(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config schema violation: {exc.message}") from exc
    return cfg


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return validate_config(cfg)


def merge_config(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge_config(out[key], value)
        else:
            out[key] = value
    return out


def resolved(cfg: dict) -> dict:
    """Config with defaults filled in (sweep keys left untouched)."""
    return merge_config(DEFAULTS, {k: v for k, v in cfg.items() if k != "sweep"})
