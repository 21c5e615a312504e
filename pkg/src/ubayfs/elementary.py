"""Elementary feature selectors and the ensemble vote-counting loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.tree import DecisionTreeClassifier

from .data import Dataset, subsample

SELECTOR_KINDS = ("mrmr", "fisher", "tree")


@dataclass(frozen=True)
class SelectorConfig:
    """Which elementary selector to run, plus its hyperparameters."""

    kind: str = "fisher"
    mi_bins: int = 5
    max_depth: int | None = None
    min_leaf: int = 1

    def __post_init__(self):
        if self.kind not in SELECTOR_KINDS:
            raise ValueError(f"unknown selector kind {self.kind!r}; choose from {SELECTOR_KINDS}")
        if self.mi_bins < 2:
            raise ValueError("mi_bins must be >= 2")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble size, votes per model, and subsampling for the count vector."""

    n_models: int = 100
    n_select: int = 10
    subsample_fraction: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.n_models < 1:
            raise ValueError("n_models must be >= 1")
        if self.n_select < 1:
            raise ValueError("n_select must be >= 1")
        if not 0 < self.subsample_fraction <= 1:
            raise ValueError("subsample_fraction must be in (0, 1]")


def _top_l(scores: np.ndarray, l: int) -> np.ndarray:
    """Binary mask of the l highest-scoring features, ties broken by lowest index."""
    order = np.lexsort((np.arange(len(scores)), -scores))
    delta = np.zeros(len(scores), dtype=int)
    delta[order[:l]] = 1
    return delta


def fisher_scores(d: Dataset) -> np.ndarray:
    """Per-feature ratio of between-class to within-class variance."""
    classes = np.unique(d.labels)
    if len(classes) < 2:
        raise ValueError("fisher scores need at least two classes")
    X = d.features
    mu = X.mean(axis=0)
    between = np.zeros(d.n_features)
    within = np.zeros(d.n_features)
    for c in classes:
        Xc = X[d.labels == c]
        between += len(Xc) * (Xc.mean(axis=0) - mu) ** 2
        within += len(Xc) * Xc.var(axis=0)
    return between / (within + 1e-12)


def _discretize(x: np.ndarray, bins: int) -> np.ndarray:
    """Equal-frequency binning; constant features collapse to a single bin."""
    edges = np.unique(np.quantile(x, np.linspace(0, 1, bins + 1)[1:-1]))
    return np.searchsorted(edges, x, side="right")


def _mutual_information(a: np.ndarray, b: np.ndarray) -> float:
    """Plug-in MI (nats) between two discrete label vectors."""
    joint = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(joint, (a, b), 1.0)
    joint /= joint.sum()
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    return float((joint[mask] * np.log(joint[mask] / (pa @ pb)[mask])).sum())


def mrmr_select(d: Dataset, l: int, bins: int = 5) -> np.ndarray:
    """Greedy minimum-redundancy maximum-relevance selection of l features.

    Relevance and redundancy are plug-in mutual informations after
    equal-frequency discretization; ties break toward the lowest index.
    """
    if l > d.n_features:
        raise ValueError(f"cannot select {l} of {d.n_features} features")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    disc = np.stack([_discretize(d.features[:, j], bins) for j in range(d.n_features)], axis=1)
    y = d.labels - d.labels.min()
    relevance = np.array([_mutual_information(disc[:, j], y) for j in range(d.n_features)])
    selected: list[int] = []
    remaining = list(range(d.n_features))
    redundancy = np.zeros(d.n_features)
    while len(selected) < l:
        if selected:
            score = relevance - redundancy / len(selected)
        else:
            score = relevance
        best = min(remaining, key=lambda j: (-score[j], j))
        selected.append(best)
        remaining.remove(best)
        if len(selected) < l:
            for j in remaining:
                redundancy[j] += _mutual_information(disc[:, j], disc[:, best])
    delta = np.zeros(d.n_features, dtype=int)
    delta[selected] = 1
    return delta


def tree_select(d: Dataset, l: int, cfg: SelectorConfig = SelectorConfig("tree"),
                seed: int = 0) -> np.ndarray:
    """Top-l features by Gini impurity decrease of a CART classification tree."""
    if l > d.n_features:
        raise ValueError(f"cannot select {l} of {d.n_features} features")
    tree = DecisionTreeClassifier(
        criterion="gini",
        max_depth=cfg.max_depth,
        min_samples_leaf=cfg.min_leaf,
        random_state=int(seed) % (2**32),
    )
    tree.fit(d.features, d.labels)
    if tree.tree_.node_count <= 1:
        importance = np.zeros(d.n_features)
    else:
        importance = tree.feature_importances_
    return _top_l(importance, l)


def run_selector(d: Dataset, cfg: SelectorConfig, l: int, seed: int = 0) -> np.ndarray:
    if cfg.kind == "fisher":
        return _top_l(fisher_scores(d), l)
    if cfg.kind == "mrmr":
        return mrmr_select(d, l, cfg.mi_bins)
    return tree_select(d, l, cfg, seed)


def run_ensemble(d: Dataset, selector: SelectorConfig, cfg: EnsembleConfig,
                 threads: int = 1) -> np.ndarray:
    """Per-feature selection counts over n_models independently subsampled fits.

    Each model runs on its own subsample with a seed derived from
    (cfg.seed, m), so results are independent of ``threads``.
    """
    if cfg.n_select > d.n_features:
        raise ValueError(f"cannot select {cfg.n_select} of {d.n_features} features")

    def one_model(m: int) -> np.ndarray:
        part = subsample(d, cfg.subsample_fraction, _model_seed(cfg.seed, m))
        return run_selector(part, selector, cfg.n_select, _model_seed(cfg.seed, m))

    if threads > 1 and cfg.n_models > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            votes = list(pool.map(one_model, range(cfg.n_models)))
    else:
        votes = [one_model(m) for m in range(cfg.n_models)]
    return np.sum(votes, axis=0, dtype=int)


def _model_seed(seed: int, m: int) -> int:
    ss = np.random.SeedSequence([int(seed), int(m)])
    return int(ss.generate_state(1)[0])
