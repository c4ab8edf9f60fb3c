"""Pipeline configuration: defaults, JSON schema validation, and hashing.

A configuration document mirrors the module parameters section by
section. User files may specify any subset; they are deep-merged onto the
defaults and the merged document is validated against the published JSON
schema (unknown keys are rejected).
"""

from __future__ import annotations

import copy
import hashlib
import json

import jsonschema

from aeroshm.errors import ConfigError

DEFAULT_CONFIG: dict = {
    "wing": {
        "span": 7.5,
        "chord": 2.0,
        "thickness": 0.05,
        "density": 2000.0,
        "air_density": 1.225,
        "flex_axis": 0.96,
        "hinge_axis": 1.5,
        "airspeed": 20.0,
        "freq_bend": 31.41592653589793,
        "freq_twist": 62.83185307179586,
        "freq_surface": 94.24777960769379,
        "lift_slope": 6.283185307179586,
        "flap_lift": 2.5,
        "flap_moment": -0.4,
        "ecc": 0.23,
        "pitch_damping": -1.2,
        "hinge_incidence": -0.2,
        "hinge_flap": -0.6,
        "flap_damping": -0.05,
        "surface_edges": [2.0, 4.0, 4.5, 7.0],
        "rayleigh_mass": 0.0,
        "rayleigh_stiffness": 0.0,
    },
    "actuator": {
        "valve_gain": 4.5e-05,
        "supply_pressure": 2.0e7,
        "return_pressure": 1.0e5,
        "piston_area": 1.0e-3,
        "feedback_area": 1.0e-4,
        "feedback_stiffness": 1.0e5,
        "internal_stiffness": 5.0e5,
        "oil_volume": 1.0e-3,
        "bulk_modulus": 7.0e8,
        "lever_ratio": 1.5,
        "arm_offset": 0.1,
    },
    "simulation": {"dt": 0.001},
    "schedule": {
        "bound_deg": 8.0,
        "hold_s": 2.0,
        "grid_steps": 9,
        "grid_repeats": 2,
        "lhs_events": 160,
        "min_angle_deg": 5.0,
    },
    "noise": {"fraction": 0.01},
    "damage": {"severity": 0.3},
    "features": {"n_bins": 16, "taper": "hann"},
    "cp": {"tol": 1e-8, "max_iter": 500, "n_restarts": 5, "ridge": 1e-12},
    "svm": {
        "nu_grid": [0.02, 0.03, 0.05, 0.07, 0.1],
        "gamma_grid": [0.4, 0.8, 1.2, 2.0, 4.0, 8.0],
        "tol": 1e-6,
    },
    "kde": {
        "bandwidth": None,
        "density_quantile": 0.1,
        "box_margin": 0.25,
        "n_negatives": 200,
    },
    "cluster": {"k": None, "routing": "nearest", "retry_cap": 5},
    "experiment": {
        "train_fraction": 0.5,
        "rank": 2,
        "rank_low": 2,
        "rank_high": 3,
    },
    "seed": 0,
    "out_dir": "out",
}


def _number(minimum=None, exclusive_min=None, maximum=None):
    out: dict = {"type": "number"}
    if minimum is not None:
        out["minimum"] = minimum
    if exclusive_min is not None:
        out["exclusiveMinimum"] = exclusive_min
    if maximum is not None:
        out["maximum"] = maximum
    return out


def _integer(minimum=None):
    out: dict = {"type": "integer"}
    if minimum is not None:
        out["minimum"] = minimum
    return out


def _section(properties: dict) -> dict:
    return {"type": "object", "properties": properties, "additionalProperties": False}


CONFIG_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "aeroshm pipeline configuration",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "wing": _section(
            {
                "span": _number(exclusive_min=0),
                "chord": _number(exclusive_min=0),
                "thickness": _number(exclusive_min=0),
                "density": _number(exclusive_min=0),
                "air_density": _number(minimum=0),
                "flex_axis": _number(minimum=0),
                "hinge_axis": _number(exclusive_min=0),
                "airspeed": _number(minimum=0),
                "freq_bend": _number(minimum=0),
                "freq_twist": _number(minimum=0),
                "freq_surface": _number(minimum=0),
                "lift_slope": _number(),
                "flap_lift": _number(),
                "flap_moment": _number(),
                "ecc": _number(),
                "pitch_damping": _number(),
                "hinge_incidence": _number(),
                "hinge_flap": _number(),
                "flap_damping": _number(),
                "surface_edges": {"type": "array", "items": _number(minimum=0)},
                "rayleigh_mass": _number(minimum=0),
                "rayleigh_stiffness": _number(minimum=0),
            }
        ),
        "actuator": _section(
            {
                "valve_gain": _number(exclusive_min=0),
                "supply_pressure": _number(exclusive_min=0),
                "return_pressure": _number(minimum=0),
                "piston_area": _number(exclusive_min=0),
                "feedback_area": _number(exclusive_min=0),
                "feedback_stiffness": _number(exclusive_min=0),
                "internal_stiffness": _number(exclusive_min=0),
                "oil_volume": _number(exclusive_min=0),
                "bulk_modulus": _number(exclusive_min=0),
                "lever_ratio": _number(exclusive_min=0),
                "arm_offset": _number(exclusive_min=0),
            }
        ),
        "simulation": _section({"dt": _number(exclusive_min=0)}),
        "schedule": _section(
            {
                "bound_deg": _number(exclusive_min=0),
                "hold_s": _number(exclusive_min=0),
                "grid_steps": _integer(minimum=1),
                "grid_repeats": _integer(minimum=1),
                "lhs_events": _integer(minimum=1),
                "min_angle_deg": _number(minimum=0),
            }
        ),
        "noise": _section({"fraction": _number(minimum=0)}),
        "damage": _section({"severity": _number(minimum=0, maximum=0.999)}),
        "features": _section(
            {
                "n_bins": _integer(minimum=1),
                "taper": {"type": "string", "enum": ["hann", "rectangular"]},
            }
        ),
        "cp": _section(
            {
                "tol": _number(minimum=0),
                "max_iter": _integer(minimum=1),
                "n_restarts": _integer(minimum=1),
                "ridge": _number(minimum=0),
            }
        ),
        "svm": _section(
            {
                "nu_grid": {"type": "array", "items": _number(exclusive_min=0, maximum=1), "minItems": 1},
                "gamma_grid": {"type": "array", "items": _number(exclusive_min=0), "minItems": 1},
                "tol": _number(exclusive_min=0),
            }
        ),
        "kde": _section(
            {
                "bandwidth": {"type": ["number", "null"]},
                "density_quantile": _number(minimum=0, maximum=1),
                "box_margin": _number(minimum=0),
                "n_negatives": _integer(minimum=1),
            }
        ),
        "cluster": _section(
            {
                "k": {"type": ["integer", "null"]},
                "routing": {"type": "string", "enum": ["nearest", "vote", "weighted"]},
                "retry_cap": _integer(minimum=1),
            }
        ),
        "experiment": _section(
            {
                "train_fraction": _number(exclusive_min=0, maximum=1),
                "rank": _integer(minimum=1),
                "rank_low": _integer(minimum=1),
                "rank_high": _integer(minimum=1),
            }
        ),
        "seed": _integer(minimum=0),
        "out_dir": {"type": "string"},
    },
}


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def validate_config(doc: dict) -> dict:
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from None
    return doc


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Merge a user JSON config (optional) and overrides onto the defaults."""
    doc = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(user, dict):
            raise ConfigError("config document must be a JSON object")
        doc = _deep_merge(doc, user)
    if overrides:
        doc = _deep_merge(doc, overrides)
    return validate_config(doc)


def config_hash(doc: dict) -> str:
    """Stable short digest of a configuration document."""
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def schema_json() -> str:
    return json.dumps(CONFIG_SCHEMA, indent=2, sort_keys=True)
