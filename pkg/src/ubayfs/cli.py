"""Command-line interface: select, bench, and synth subcommands.

Exit codes: 0 on success, 1 for configuration errors, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys as _sys
import time

import numpy as np

from .config import ConfigError, build_objects, load_config, materialize_dataset
from .constraints import admissibility
from .data import DataError
from .evaluation import benchmark
from .optimizer import select_features


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _write_report(doc: dict, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, default=_jsonable, sort_keys=True)
        fh.write("\n")


def _rho_repr(rho: float):
    return "inf" if math.isinf(rho) else rho


def cmd_select(cfg: dict, out: str, threads: int) -> int:
    d, _ = materialize_dataset(cfg, cfg["seed"])
    selector, ensemble, alpha, sys, ga_cfg, _, mh = build_objects(cfg, d)
    t0 = time.perf_counter()
    delta, importance, diag = select_features(d, selector, ensemble, alpha, sys,
                                              ga_cfg, mh, threads=threads)
    elapsed = time.perf_counter() - t0
    selected = np.flatnonzero(delta)
    doc = {
        "config": cfg,
        "seed": cfg["seed"],
        "selected_indices": selected.tolist(),
        "selected_features": [d.feature_names[i] for i in selected],
        "counts": diag["counts"],
        "alpha_post": diag["alpha_post"],
        "theta_hat": diag["theta_hat"],
        "utility": diag["utility"],
        "risk": diag["risk"],
        "kappa": diag["kappa"],
        "constraints": [
            {"name": c.name, "scope": c.scope, "b": c.b, "rho": _rho_repr(c.rho),
             "admissibility": admissibility(c, delta, sys.block_matrix)}
            for c in sys.constraints
        ],
        "runtime_seconds": elapsed,
    }
    _write_report(doc, out)
    print(f"selected {len(selected)} features -> {out}")
    return 0


def cmd_bench(cfg: dict, out: str, threads: int, timings: bool) -> int:
    d, truth = materialize_dataset(cfg, cfg["seed"])
    selector, ensemble, alpha, sys, ga_cfg, eval_cfg, mh = build_objects(cfg, d)
    report = benchmark(d, truth, selector, ensemble, alpha, sys, ga_cfg,
                       eval_cfg, cfg["seed"], mh, threads=threads)
    per_run = []
    for rec in report.per_run:
        row = {k: v for k, v in rec.items() if timings or k != "runtime_seconds"}
        row["selected_features"] = [d.feature_names[i] for i in rec["selected"]]
        per_run.append(row)
    doc = {
        "config": cfg,
        "seed": cfg["seed"],
        "runs": eval_cfg.runs,
        "per_run": per_run,
        "stability": report.stability,
        "stability_note": report.stability_note,
        "redundancy_mean": report.redundancy_mean,
        "feature_f1_mean": report.f1_mean,
        "feature_f1_std": report.f1_std,
    }
    if timings:
        doc["runtime_mean_seconds"] = report.runtime_mean
    _write_report(doc, out)
    csv_path = out + ".runs.csv" if not out.endswith(".json") else out[:-5] + ".runs.csv"
    fields = ["run", "selected", "feature_f1", "utility", "risk"]
    if timings:
        fields.append("runtime_seconds")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for rec in report.per_run:
            row = {k: rec.get(k) for k in fields}
            row["selected"] = ";".join(map(str, rec["selected"]))
            writer.writerow(row)
    print(f"benchmark over {eval_cfg.runs} runs -> {out} (per-run CSV: {csv_path})")
    print(f"mean runtime per run: {report.runtime_mean:.2f}s")
    return 0


def cmd_synth(cfg: dict, out: str) -> int:
    if "synthetic" not in cfg["input"]:
        raise ConfigError("synth requires input.synthetic in the config")
    d, truth = materialize_dataset(cfg, cfg["seed"])
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(d.feature_names) + ["y"])
        for x, y in zip(d.features, d.labels):
            writer.writerow([repr(float(v)) for v in x] + [int(y)])
    base = out[:-4] if out.endswith(".csv") else out
    truth_path = base + ".truth.json"
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump({
            "relevant_indices": sorted(truth.relevant),
            "relevant_features": [d.feature_names[i] for i in sorted(truth.relevant)],
        }, fh, indent=2)
        fh.write("\n")
    written = [out, truth_path]
    if d.block_matrix is not None:
        blocks = {
            f"block{w + 1}": [d.feature_names[i]
                              for i in np.flatnonzero(d.block_matrix[w])]
            for w in range(d.n_blocks)
        }
        block_path = base + ".blocks.json"
        with open(block_path, "w", encoding="utf-8") as fh:
            json.dump(blocks, fh, indent=2)
            fh.write("\n")
        written.append(block_path)
    print("wrote " + ", ".join(written))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ubayfs",
        description="Ensemble feature selection with user priors and side constraints",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("select", "run feature selection once on the full input"),
        ("bench", "repeated-split benchmark with stability and redundancy metrics"),
        ("synth", "generate a synthetic dataset CSV plus ground-truth sidecar"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="path to a JSON run config")
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if name != "synth":
            p.add_argument("--threads", type=int, default=1,
                           help="worker threads for elementary model fits")
        if name == "bench":
            p.add_argument("--timings", action="store_true",
                           help="include wall-clock runtimes in the report "
                                "(makes reports non-reproducible byte-for-byte)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = int(args.seed)
    except (ConfigError, DataError, ValueError) as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 1
    try:
        if args.command == "select":
            return cmd_select(cfg, args.out, args.threads)
        if args.command == "bench":
            return cmd_bench(cfg, args.out, args.threads, args.timings)
        return cmd_synth(cfg, args.out)
    except (ConfigError, DataError) as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - map anything else to the runtime exit code
        print(f"runtime error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
