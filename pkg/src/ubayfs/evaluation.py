"""Selection quality metrics and the repeated-split benchmark runner."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintSystem
from .data import Dataset, GroundTruth, stratified_split
from .elementary import EnsembleConfig, SelectorConfig
from .optimizer import GaConfig, select_features
from .prior import MhSettings


def feature_f1(selected, truth: GroundTruth | set) -> float:
    """F1 of selected feature indices against the known-relevant set."""
    relevant = truth.relevant if isinstance(truth, GroundTruth) else frozenset(truth)
    if not relevant:
        raise ValueError("ground truth is empty")
    sel = set(np.flatnonzero(np.asarray(selected)).tolist()) \
        if not isinstance(selected, (set, frozenset)) else set(selected)
    if not sel:
        return 0.0
    tp = len(sel & relevant)
    if tp == 0:
        return 0.0
    precision = tp / len(sel)
    recall = tp / len(relevant)
    return 2 * precision * recall / (precision + recall)


def stability(Z: np.ndarray) -> float:
    """Nogueira agreement measure across the rows of a selection matrix.

    1 means every run selected the same set; the null model of independent
    Bernoulli columns scores about 0; small run counts can go negative.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[0] < 2:
        raise ValueError("stability needs at least two selection rows")
    runs, n = Z.shape
    p_hat = Z.mean(axis=0)
    k_bar = Z.sum(axis=1).mean()
    denom = (k_bar / n) * (1 - k_bar / n)
    if denom == 0:
        raise ValueError("stability undefined: every run selected all or no features")
    s2 = runs / (runs - 1) * p_hat * (1 - p_hat)
    return float(1 - s2.mean() / denom)


def redundancy_rate(d: Dataset, selected) -> float:
    """Mean absolute pairwise Pearson correlation within the selected set."""
    idx = np.flatnonzero(np.asarray(selected)) \
        if not isinstance(selected, (set, frozenset)) else np.array(sorted(selected))
    if len(idx) < 2:
        return 0.0
    X = d.features[:, idx]
    sd = X.std(axis=0)
    keep = sd > 0
    corr = np.zeros((len(idx), len(idx)))
    if keep.any():
        sub = np.corrcoef(X[:, keep], rowvar=False)
        corr[np.ix_(keep, keep)] = np.atleast_2d(sub)
    iu = np.triu_indices(len(idx), k=1)
    return float(np.abs(corr[iu]).mean())


@dataclass(frozen=True)
class EvalConfig:
    """Repeated-split protocol settings."""

    runs: int = 10
    train_fraction: float = 0.75

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must be in (0, 1)")


@dataclass
class EvaluationReport:
    """Per-run selections and aggregate quality metrics."""

    per_run: list[dict]
    selection_matrix: np.ndarray
    f1_mean: float | None = None
    f1_std: float | None = None
    stability: float | None = None
    stability_note: str | None = None
    redundancy_mean: float | None = None
    runtime_mean: float | None = None


def benchmark(
    d: Dataset,
    truth: GroundTruth | None,
    selector: SelectorConfig,
    ens_cfg: EnsembleConfig,
    prior_alpha: np.ndarray,
    sys: ConstraintSystem,
    ga_cfg: GaConfig,
    eval_cfg: EvalConfig,
    seed: int,
    mh: MhSettings | None = None,
    threads: int = 1,
) -> EvaluationReport:
    """Run the selector on ``runs`` independent stratified train splits."""
    per_run = []
    Z = np.zeros((eval_cfg.runs, d.n_features), dtype=int)
    run_seeds = [int(s.generate_state(1)[0])
                 for s in np.random.SeedSequence([int(seed)]).spawn(eval_cfg.runs)]
    for i, run_seed in enumerate(run_seeds):
        train, _ = stratified_split(d, eval_cfg.train_fraction, run_seed)
        t0 = time.perf_counter()
        delta, _, diag = select_features(
            train,
            selector,
            EnsembleConfig(ens_cfg.n_models, ens_cfg.n_select,
                           ens_cfg.subsample_fraction, run_seed),
            prior_alpha,
            sys,
            GaConfig(ga_cfg.population_size, ga_cfg.generations,
                     ga_cfg.mutation_rate, ga_cfg.elite_fraction, run_seed),
            mh,
            threads=threads,
        )
        elapsed = time.perf_counter() - t0
        Z[i] = delta
        record = {
            "run": i,
            "selected": np.flatnonzero(delta).tolist(),
            "utility": diag["utility"],
            "risk": diag["risk"],
            "runtime_seconds": elapsed,
        }
        if truth is not None:
            record["feature_f1"] = feature_f1(delta, truth)
        per_run.append(record)

    report = EvaluationReport(per_run=per_run, selection_matrix=Z)
    report.runtime_mean = float(np.mean([r["runtime_seconds"] for r in per_run]))
    report.redundancy_mean = float(np.mean([redundancy_rate(d, Z[i]) for i in range(len(Z))]))
    if truth is not None:
        f1s = [r["feature_f1"] for r in per_run]
        report.f1_mean = float(np.mean(f1s))
        report.f1_std = float(np.std(f1s))
    if eval_cfg.runs >= 2:
        try:
            report.stability = stability(Z)
        except ValueError as exc:
            report.stability_note = str(exc)
    else:
        report.stability_note = "stability undefined for a single run"
    return report
