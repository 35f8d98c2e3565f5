"""Experiment configuration: JSON schema and descriptor builders."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .dynamics import Doubling, FiniteMap, Identity, Rotation, cycles
from .errors import DomainError
from .norms import GridSpec
from .space import (
    Constant,
    Cosine,
    Exponent,
    FiniteSpace,
    Indicator,
    IntervalSpace,
    Power,
    Sampled,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

_num = {"type": "number"}
_nums = {"type": "array", "items": _num, "minItems": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "grandlp experiment",
    "type": "object",
    "required": ["space", "exponent", "function"],
    "additionalProperties": False,
    "properties": {
        "space": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["type", "atom_count"],
                    "additionalProperties": False,
                    "properties": {
                        "type": {"const": "finite"},
                        "atom_count": {"type": "integer", "minimum": 1},
                        "weights": {"oneOf": [_nums, {"enum": ["uniform", "random"]}]},
                    },
                },
                {
                    "type": "object",
                    "required": ["type"],
                    "additionalProperties": False,
                    "properties": {
                        "type": {"const": "interval"},
                        "panels": {"type": "integer", "minimum": 1},
                        "nodes_per_panel": {"type": "integer", "minimum": 2},
                        "grading": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                        "singular_points": {"type": "array", "items": _num},
                    },
                },
            ]
        },
        "exponent": {
            "oneOf": [
                {"type": "object", "required": ["type", "p"], "additionalProperties": False,
                 "properties": {"type": {"const": "constant"}, "p": _num}},
                {"type": "object", "required": ["type", "pieces"], "additionalProperties": False,
                 "properties": {"type": {"const": "piecewise"},
                                "pieces": {"type": "array", "minItems": 1,
                                           "items": {"type": "array", "items": _num,
                                                     "minItems": 3, "maxItems": 3}}}},
                {"type": "object", "required": ["type", "values"], "additionalProperties": False,
                 "properties": {"type": {"const": "sampled"}, "values": _nums}},
                {"type": "object", "required": ["type", "low", "high"], "additionalProperties": False,
                 "properties": {"type": {"const": "random_invariant"}, "low": _num, "high": _num}},
            ]
        },
        "function": {
            "oneOf": [
                {"type": "object", "required": ["type", "values"], "additionalProperties": False,
                 "properties": {"type": {"const": "sampled"}, "values": _nums}},
                {"type": "object", "required": ["type"], "additionalProperties": False,
                 "properties": {"type": {"const": "random"}, "low": _num, "high": _num}},
                {"type": "object", "required": ["type", "a"], "additionalProperties": False,
                 "properties": {"type": {"const": "power"}, "a": _num}},
                {"type": "object", "required": ["type", "k"], "additionalProperties": False,
                 "properties": {"type": {"const": "cosine"}, "k": {"type": "integer", "minimum": 1}}},
                {"type": "object", "required": ["type", "lo", "hi"], "additionalProperties": False,
                 "properties": {"type": {"const": "indicator"}, "lo": _num, "hi": _num}},
                {"type": "object", "required": ["type", "c"], "additionalProperties": False,
                 "properties": {"type": {"const": "constant"}, "c": _num}},
            ]
        },
        "transformation": {
            "oneOf": [
                {"type": "object", "required": ["type"], "additionalProperties": False,
                 "properties": {"type": {"enum": ["identity", "doubling", "random_permutation"]}}},
                {"type": "object", "required": ["type", "map"], "additionalProperties": False,
                 "properties": {"type": {"const": "finite_map"},
                                "map": {"type": "array", "items": {"type": "integer"}, "minItems": 1}}},
                {"type": "object", "required": ["type", "alpha"], "additionalProperties": False,
                 "properties": {"type": {"const": "rotation"},
                                "alpha": {"oneOf": [_num, {"const": "golden"}]},
                                "rational": {"oneOf": [{"type": "null"},
                                                       {"type": "array", "items": {"type": "integer"},
                                                        "minItems": 2, "maxItems": 2}]}}},
            ]
        },
        "theta": {"type": "number", "exclusiveMinimum": 0},
        "n_schedule": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "eps_grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "contraction": {"oneOf": [{"type": "integer", "minimum": 1}, _nums]},
                "grand_geometric": {"type": "integer", "minimum": 2},
                "grand_uniform": {"type": "integer", "minimum": 2},
                "vanishing_terms": {"type": "integer", "minimum": 3},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string"},
                "report": {"type": "string"},
                "csv": {"type": "string"},
                "svg": {"type": ["string", "null"]},
            },
        },
        "seed": {"type": "integer"},
    },
}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


@dataclass
class ExperimentConfig:
    """Validated experiment with every descriptor already constructed."""

    space: object
    exponent: Exponent
    function: object
    transformation: object | None
    theta: float | None
    n_schedule: list | None
    contraction_eps: object
    grid: GridSpec
    vanishing_terms: int
    out_dir: Path
    report_name: str = "report.json"
    csv_name: str = "convergence.csv"
    svg_name: str | None = "convergence.svg"
    seed: int = 0
    raw: dict = field(default_factory=dict)


def validate(doc: dict) -> None:
    """Raise :class:`ConfigError` naming the first invalid field."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.path), list(map(str, e.path))))
    if errors:
        err = errors[0]
        path = ".".join(str(p) for p in err.path) or "config"
        if not err.path and err.validator == "required":
            path = err.message.split("'")[1]
        raise ConfigError(path, err.message)
    sched = doc.get("n_schedule")
    if sched is not None and any(b <= a for a, b in zip(sched, sched[1:])):
        raise ConfigError("n_schedule", "must be strictly increasing")


def _build(name, fn, *args):
    try:
        return fn(*args)
    except (DomainError, ValueError) as exc:
        raise ConfigError(name, str(exc)) from exc


def _transformation(desc, n_atoms, rng):
    kind = desc["type"]
    if kind == "identity":
        return Identity()
    if kind == "doubling":
        return Doubling()
    if kind == "random_permutation":
        if n_atoms is None:
            raise ConfigError("transformation", "random_permutation needs a finite space")
        return FiniteMap(rng.permutation(n_atoms))
    if kind == "finite_map":
        return FiniteMap(desc["map"])
    alpha = GOLDEN if desc["alpha"] == "golden" else float(desc["alpha"])
    return Rotation(alpha, desc.get("rational"))


def _cycle_blocks(T, n):
    if isinstance(T, FiniteMap) and T.is_bijection:
        return cycles(T)
    return [list(range(n))]


def _space(desc, T, rng):
    if desc["type"] == "interval":
        return IntervalSpace(
            desc.get("panels", 64),
            desc.get("nodes_per_panel", 8),
            desc.get("grading", 0.5),
            tuple(desc.get("singular_points", ())),
        )
    n = desc["atom_count"]
    w = desc.get("weights", "uniform")
    if w == "uniform":
        return FiniteSpace.uniform(n)
    if w == "random":
        raw = rng.uniform(0.5, 1.5, size=n)
        # constant on cycles of T so that a bijective T preserves the measure
        for cyc in _cycle_blocks(T, n):
            raw[cyc] = raw[cyc].mean()
        return FiniteSpace(raw / raw.sum())
    if len(w) != n:
        raise ConfigError("space.weights", f"expected {n} weights, got {len(w)}")
    return FiniteSpace(w)


def _exponent(desc, T, n_atoms, rng):
    kind = desc["type"]
    if kind == "constant":
        return Exponent.constant(desc["p"])
    if kind == "piecewise":
        return Exponent.piecewise([tuple(pc) for pc in desc["pieces"]])
    if kind == "sampled":
        return Exponent.sampled(desc["values"])
    if n_atoms is None:
        raise ConfigError("exponent", "random_invariant exponents need a finite space")
    vals = np.empty(n_atoms)
    for cyc in _cycle_blocks(T, n_atoms):
        vals[cyc] = rng.uniform(desc["low"], desc["high"])
    return Exponent.sampled(vals)


def _function(desc, n_atoms, rng):
    kind = desc["type"]
    if kind == "sampled":
        return Sampled(desc["values"])
    if kind == "random":
        if n_atoms is None:
            raise ConfigError("function", "random functions need a finite space")
        return Sampled(rng.uniform(desc.get("low", -1.0), desc.get("high", 1.0), size=n_atoms))
    if kind == "power":
        return Power(desc["a"])
    if kind == "cosine":
        return Cosine(desc["k"])
    if kind == "indicator":
        return Indicator(desc["lo"], desc["hi"])
    return Constant(desc["c"])


def build(doc: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Validate ``doc`` and construct the experiment objects.

    Random generators draw, in order, the permutation, the weights, the
    exponent and the function from ``numpy.random.default_rng(seed)``.
    """
    validate(doc)
    rng = np.random.default_rng(doc.get("seed", 0))
    sdesc = doc["space"]
    n_atoms = sdesc["atom_count"] if sdesc["type"] == "finite" else None
    T = None
    if "transformation" in doc:
        T = _build("transformation", _transformation, doc["transformation"], n_atoms, rng)
    space = _build("space", _space, sdesc, T, rng)
    p = _build("exponent", _exponent, doc["exponent"], T, n_atoms, rng)
    f = _build("function", _function, doc["function"], n_atoms, rng)
    grid_doc = doc.get("eps_grid", {})
    contraction = grid_doc.get("contraction")
    grid = GridSpec(grid_doc.get("grand_geometric", 64), grid_doc.get("grand_uniform", 64))
    out = doc.get("output", {})
    out_dir = Path(out.get("dir", "out"))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir
    return ExperimentConfig(
        space=space,
        exponent=p,
        function=f,
        transformation=T,
        theta=doc.get("theta"),
        n_schedule=doc.get("n_schedule"),
        contraction_eps=contraction,
        grid=grid,
        vanishing_terms=grid_doc.get("vanishing_terms", 40),
        out_dir=out_dir,
        report_name=out.get("report", "report.json"),
        csv_name=out.get("csv", "convergence.csv"),
        svg_name=out.get("svg", "convergence.svg"),
        seed=doc.get("seed", 0),
        raw=doc,
    )


def load(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError("config", f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"not valid JSON: {exc}") from exc
