"""Run configuration: JSON schema with defaults, validation, and object assembly."""

from __future__ import annotations

import copy
import json

import numpy as np

from . import constraints as cons
from .data import Dataset, GroundTruth, gen_additive, gen_blocked, gen_nonadditive, load_csv
from .elementary import SELECTOR_KINDS, EnsembleConfig, SelectorConfig
from .evaluation import EvalConfig
from .optimizer import GaConfig, _infer_n_select
from .prior import MhSettings


class ConfigError(ValueError):
    """Raised when a run configuration is missing, malformed, or inconsistent."""


DEFAULTS = {
    "selector": {"kind": "fisher", "mi_bins": 5, "max_depth": None, "min_leaf": 1},
    "ensemble": {"n_models": 100, "n_select": None, "subsample_fraction": 0.75},
    "prior": {"default": 0.01, "features": {}, "blocks": {}},
    "constraints": {
        "max_size": {"b": None, "rho": 1.0},
        "block_max_size": None,
        "max_per_block": None,
        "decorrelation": None,
        "custom": [],
    },
    "lambda": 1.0,
    "ga": {"population_size": 100, "generations": 100,
           "mutation_rate": 0.10, "elite_fraction": 0.05},
    "evaluation": {"runs": 10, "train_fraction": 0.75},
    "mh": {"burn_in": 2000, "samples": 10000, "concentration": 20.0},
    "seed": 0,
}

SYNTH_KINDS = ("additive", "nonadditive", "blocked")
BLOCKED_DEFAULTS = {
    "n_rows": 512, "n_blocks": 8, "block_size": 32,
    "relevant_blocks": 4, "informative_per_block": 4,
    "redundant_blocks": 2, "redundant_per_block": 3,
}


def _merge(defaults, value, path):
    if value is None:
        return copy.deepcopy(defaults)
    if isinstance(defaults, dict) and defaults:
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected an object, got {type(value).__name__}")
        unknown = set(value) - set(defaults)
        if unknown:
            raise ConfigError(f"{path}: unknown field(s) {sorted(unknown)}")
        out = {}
        for k, dflt in defaults.items():
            if isinstance(dflt, dict) and dflt:
                out[k] = _merge(dflt, value.get(k), f"{path}.{k}")
            elif k in value:
                out[k] = copy.deepcopy(value[k])
            else:
                out[k] = copy.deepcopy(dflt)
        return out
    return copy.deepcopy(value)


def resolve_config(raw: dict) -> dict:
    """Fill in all defaults and validate field-level shapes.

    The result is self-describing: serializing and re-parsing it yields the
    same resolved configuration.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    known = {"input", "selector", "ensemble", "prior", "constraints",
             "lambda", "ga", "evaluation", "mh", "seed"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown top-level field(s) {sorted(unknown)}")
    if "input" not in raw:
        raise ConfigError("input: required section is missing")
    cfg = {"input": _resolve_input(raw["input"])}
    for key in ("selector", "ensemble", "prior", "constraints", "ga", "evaluation", "mh"):
        cfg[key] = _merge(DEFAULTS[key], raw.get(key), key)
    cfg["lambda"] = float(raw.get("lambda", DEFAULTS["lambda"]))
    cfg["seed"] = int(raw.get("seed", DEFAULTS["seed"]))
    if cfg["selector"]["kind"] not in SELECTOR_KINDS:
        raise ConfigError(f"selector.kind: must be one of {SELECTOR_KINDS}")
    if cfg["lambda"] <= 0:
        raise ConfigError("lambda: must be positive")
    cs = cfg["constraints"]
    for section in ("block_max_size", "max_per_block"):
        if cs[section] is not None:
            entry = dict(cs[section])
            if "b" not in entry:
                raise ConfigError(f"constraints.{section}.b: required")
            entry.setdefault("rho", 1.0)
            cs[section] = entry
    if cs["decorrelation"] is not None:
        entry = dict(cs["decorrelation"])
        entry.setdefault("tau", 0.4)
        if not 0 < entry["tau"] < 1:
            raise ConfigError("constraints.decorrelation.tau: must be in (0, 1)")
        cs["decorrelation"] = entry
    for i, row in enumerate(cs["custom"]):
        if not isinstance(row, dict) or "a" not in row or "b" not in row:
            raise ConfigError(f"constraints.custom[{i}]: needs fields 'a' and 'b'")
        row.setdefault("rho", 1.0)
        row.setdefault("scope", "feature")
    return cfg


def _resolve_input(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("input: expected an object")
    has_csv = "csv" in section
    has_synth = "synthetic" in section
    if has_csv == has_synth:
        raise ConfigError("input: exactly one of 'csv' or 'synthetic' is required")
    if has_csv:
        out = {"csv": section["csv"],
               "label_column": section.get("label_column", "y"),
               "blocks": section.get("blocks")}
        extra = set(section) - {"csv", "label_column", "blocks", "truth"}
        if extra:
            raise ConfigError(f"input: unknown field(s) {sorted(extra)}")
        if "truth" in section:
            out["truth"] = section["truth"]
        return out
    spec = dict(section["synthetic"])
    kind = spec.pop("kind", None)
    if kind not in SYNTH_KINDS:
        raise ConfigError(f"input.synthetic.kind: must be one of {SYNTH_KINDS}")
    if kind in ("additive", "nonadditive"):
        out = {"kind": kind,
               "n_rows": int(spec.pop("n_rows", 1000)),
               "n_features": int(spec.pop("n_features", 1000))}
    else:
        out = {"kind": kind}
        for key, default in BLOCKED_DEFAULTS.items():
            out[key] = int(spec.pop(key, default))
    if spec:
        raise ConfigError(f"input.synthetic: unknown field(s) {sorted(spec)}")
    return {"synthetic": out}


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return resolve_config(raw)


def materialize_dataset(cfg: dict, seed: int) -> tuple[Dataset, GroundTruth | None]:
    """Load or generate the dataset named by the resolved config."""
    inp = cfg["input"]
    if "csv" in inp:
        d = load_csv(inp["csv"], inp["label_column"], inp.get("blocks"))
        truth = None
        if inp.get("truth"):
            with open(inp["truth"], encoding="utf-8") as fh:
                doc = json.load(fh)
            names = {n: i for i, n in enumerate(d.feature_names)}
            try:
                idx = {names[n] for n in doc["relevant_features"]}
            except KeyError as exc:
                raise ConfigError(f"input.truth: unknown feature name {exc}") from None
            truth = GroundTruth(idx)
        return d, truth
    spec = inp["synthetic"]
    if spec["kind"] == "additive":
        return gen_additive(spec["n_rows"], spec["n_features"], seed)
    if spec["kind"] == "nonadditive":
        return gen_nonadditive(spec["n_rows"], spec["n_features"], seed)
    return gen_blocked(
        spec["n_rows"], spec["n_blocks"], spec["block_size"],
        spec["relevant_blocks"], spec["informative_per_block"],
        spec["redundant_blocks"], spec["redundant_per_block"], seed,
    )


def default_max_size(n_features: int) -> int:
    """Size-scaled default for the max-size bound."""
    if n_features < 100:
        return 5
    if n_features <= 1000:
        return 10
    return 20


def build_prior(cfg: dict, d: Dataset) -> np.ndarray:
    """Per-feature pseudo-count vector from default, per-feature, and per-block weights."""
    section = cfg["prior"]
    alpha = np.full(d.n_features, float(section["default"]))
    if section["blocks"]:
        if d.block_matrix is None:
            raise ConfigError("prior.blocks: dataset has no block structure")
        block_names = _block_names(cfg, d)
        for name, weight in section["blocks"].items():
            if name not in block_names:
                raise ConfigError(f"prior.blocks: unknown block {name!r}")
            alpha[d.block_matrix[block_names[name]] == 1] = float(weight)
    names = {n: i for i, n in enumerate(d.feature_names)}
    for name, weight in section["features"].items():
        if name not in names:
            raise ConfigError(f"prior.features: unknown feature {name!r}")
        alpha[names[name]] = float(weight)
    if (alpha <= 0).any():
        raise ConfigError("prior: all weights must be strictly positive")
    return alpha


def _block_names(cfg: dict, d: Dataset) -> dict[str, int]:
    blocks = cfg["input"].get("blocks")
    if "csv" in cfg["input"] and blocks:
        return {name: w for w, name in enumerate(blocks)}
    return {f"block{w + 1}": w for w in range(d.n_blocks)}


def build_constraints(cfg: dict, d: Dataset) -> cons.ConstraintSystem:
    """Assemble the constraint system described by the resolved config."""
    cs = cfg["constraints"]
    rows: list[cons.Constraint] = []
    ms = cs["max_size"]
    b_ms = ms["b"] if ms["b"] is not None else default_max_size(d.n_features)
    if not 1 <= b_ms <= d.n_features:
        raise ConfigError(f"constraints.max_size.b: {b_ms} outside [1, {d.n_features}]")
    if _rho(ms["rho"]) != 0:  # rho = 0 means the constraint is omitted
        rows.append(cons.max_size(d.n_features, int(b_ms), _rho(ms["rho"])))
    if cs["block_max_size"] is not None and _rho(cs["block_max_size"]["rho"]) != 0:
        if d.block_matrix is None:
            raise ConfigError("constraints.block_max_size: dataset has no block structure")
        entry = cs["block_max_size"]
        rows.append(cons.block_max_size(d.n_blocks, int(entry["b"]), _rho(entry["rho"])))
    if cs["max_per_block"] is not None and _rho(cs["max_per_block"]["rho"]) != 0:
        if d.block_matrix is None:
            raise ConfigError("constraints.max_per_block: dataset has no block structure")
        entry = cs["max_per_block"]
        rows.extend(cons.max_per_block_all(d.block_matrix, int(entry["b"]), _rho(entry["rho"])))
    if cs["decorrelation"] is not None:
        rows.extend(cons.decorrelation(d, float(cs["decorrelation"]["tau"])))
    names = {n: i for i, n in enumerate(d.feature_names)}
    for i, row in enumerate(cs["custom"]):
        a = row["a"]
        if isinstance(a, dict):
            vec = np.zeros(d.n_features)
            for name, coef in a.items():
                if name not in names:
                    raise ConfigError(f"constraints.custom[{i}]: unknown feature {name!r}")
                vec[names[name]] = float(coef)
        else:
            vec = np.asarray(a, dtype=float)
            width = d.n_blocks if row["scope"] == "block" else d.n_features
            if vec.shape != (width,):
                raise ConfigError(f"constraints.custom[{i}]: row length {len(vec)} != {width}")
        rho = _rho(row["rho"])
        if rho == 0:
            continue
        rows.append(cons.Constraint(vec, float(row["b"]), rho,
                                    scope=row["scope"], name=f"custom[{i}]"))
    return cons.ConstraintSystem(tuple(rows), d.block_matrix, cfg["lambda"])


def _rho(value) -> float:
    if value in ("inf", "infinity", None):
        return float("inf")
    return float(value)


def build_objects(cfg: dict, d: Dataset):
    """(selector, ensemble, prior alpha, constraint system, ga, eval, mh) from a resolved config."""
    sel = cfg["selector"]
    selector = SelectorConfig(sel["kind"], sel["mi_bins"], sel["max_depth"], sel["min_leaf"])
    sys = build_constraints(cfg, d)
    ens = cfg["ensemble"]
    n_select = ens["n_select"]
    if n_select is None:
        n_select = _infer_n_select(sys, d.n_features)
    ensemble = EnsembleConfig(int(ens["n_models"]), int(n_select),
                              float(ens["subsample_fraction"]), cfg["seed"])
    alpha = build_prior(cfg, d)
    ga = cfg["ga"]
    ga_cfg = GaConfig(int(ga["population_size"]), int(ga["generations"]),
                      float(ga["mutation_rate"]), float(ga["elite_fraction"]), cfg["seed"])
    ev = cfg["evaluation"]
    eval_cfg = EvalConfig(int(ev["runs"]), float(ev["train_fraction"]))
    mh = MhSettings(int(cfg["mh"]["burn_in"]), int(cfg["mh"]["samples"]),
                    float(cfg["mh"]["concentration"]))
    return selector, ensemble, alpha, sys, ga_cfg, eval_cfg, mh
