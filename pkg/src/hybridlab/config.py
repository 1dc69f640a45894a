"""
Scenario configuration: JSON schema, defaults and dispatch.

A config names one scenario and may override any section of that
scenario's entry in ``data/defaults.json``. Unknown keys are rejected at
every level.
"""

from __future__ import annotations

import copy
import json
from importlib import resources

import jsonschema

from .errors import ConfigError
from .lattice import RingLatticeModel
from .rng import SEED_MAX
from . import scenarios

SCENARIOS = ("momentum_quantum", "momentum_hybrid", "cow", "energy")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["scenario"],
    "properties": {
        "scenario": {"enum": list(SCENARIOS)},
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_sites": {"type": "integer", "minimum": 1, "maximum": 16},
                "hop_S": _NUM,
                "hop_E": _NUM,
                "hop_M": _NUM,
                "g_SE": _NUM,
                "g_EM": _NUM,
                "g_SM": _NUM,
                "offset": {"type": "integer"},
                "centers": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
                "width": _POS,
            },
        },
        "hybrid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mediator": {"enum": ["quantum", "classical"]},
                "classical_labels": {"type": "integer", "minimum": 1, "maximum": 16},
                "coupling": {"enum": ["gradient", "commuting", "none"]},
                "gamma": {"anyOf": [{"type": "null"}, {"type": "array", "items": _NUM, "minItems": 1}]},
            },
        },
        "cow": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"gamma": _PAIR, "beam_momentum": _PAIR},
        },
        "schedule": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_max": {"type": "number", "minimum": 0},
                "n_steps": {"type": "integer", "minimum": 1},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"tol_global": _POS, "tol_local": _POS},
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": SEED_MAX},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": ["string", "null"]},
                "format": {"enum": ["csv", "json"]},
            },
        },
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["config", "records", "report", "verdict"],
    "properties": {
        "config": CONFIG_SCHEMA,
        "records": {"type": "array", "minItems": 1, "items": {"type": "object"}},
        "report": {
            "type": "object",
            "required": ["slices", "global_drift", "local_c_drift", "local_q_drift", "verdict", "tol_global", "tol_local", "extras"],
        },
        "verdict": {"enum": ["GlobalConservedLocalsFrozen", "GlobalConservedLocalsMoved", "GlobalViolated"]},
    },
}


def load_defaults() -> dict:
    text = resources.files("hybridlab").joinpath("data/defaults.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from exc


def resolve(cfg: dict) -> dict:
    """Validate ``cfg`` and fill missing sections from the scenario defaults."""
    validate(cfg)
    full = copy.deepcopy(load_defaults()["scenarios"][cfg["scenario"]])
    for key, val in cfg.items():
        if isinstance(val, dict) and isinstance(full.get(key), dict):
            full[key].update(val)
        else:
            full[key] = val
    validate(full)
    return full


def read_config_file(path) -> dict:
    """Parse a config file without validating or filling defaults."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


def load_config(path) -> dict:
    return resolve(read_config_file(path))


def model_from(cfg: dict) -> RingLatticeModel:
    return RingLatticeModel(**cfg.get("model", {}))


def run_config(cfg: dict) -> scenarios.ScenarioResult:
    """Run the scenario named by an already resolved config."""
    name = cfg["scenario"]
    sched = cfg["schedule"]
    tol = cfg["tolerances"]
    tg, tl = tol["tol_global"], tol["tol_local"]
    if name == "cow":
        c = cfg["cow"]
        return scenarios.cow_phase(c["gamma"], sched["t_max"], sched["n_steps"] + 1, c["beam_momentum"])
    model = model_from(cfg)
    hyb = cfg.get("hybrid", {})
    if name == "momentum_quantum":
        return scenarios.momentum_exchange_quantum(model, sched["t_max"], sched["n_steps"], tg, tl)
    if name == "momentum_hybrid":
        return scenarios.momentum_exchange_hybrid(
            model, hyb["classical_labels"], sched["t_max"], sched["n_steps"],
            hyb["coupling"], hyb.get("gamma"), tg, tl,
        )
    if hyb.get("mediator", "quantum") == "classical":
        return scenarios.energy_free_fall_hybrid(
            model, hyb["classical_labels"], sched["t_max"], sched["n_steps"],
            hyb["coupling"], hyb.get("gamma"), tg, tl,
        )
    return scenarios.energy_free_fall(model, sched["t_max"], sched["n_steps"], tg, tl)
