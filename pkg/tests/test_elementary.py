import math
from collections import Counter

import numpy as np
import pytest

from ubayfs.data import Dataset, gen_additive
from ubayfs.elementary import (
    EnsembleConfig,
    SelectorConfig,
    fisher_scores,
    mrmr_select,
    run_ensemble,
    run_selector,
    tree_select,
)


def _dataset(X, y, names=None):
    names = names or [f"f{i}" for i in range(X.shape[1])]
    return Dataset(np.asarray(X, dtype=float), y, names)


def mi_oracle(a, b):
    """Plug-in mutual information computed from raw joint counts."""
    n = len(a)
    joint = Counter(zip(a, b))
    pa = Counter(a)
    pb = Counter(b)
    total = 0.0
    for (u, v), c in joint.items():
        p = c / n
        total += p * math.log(p / ((pa[u] / n) * (pb[v] / n)))
    return total


class TestFisherScores:
    def test_constant_feature_scores_zero(self):
        rng = np.random.default_rng(0)
        X = np.column_stack([np.full(40, 3.0), rng.standard_normal(40)])
        y = np.arange(40) % 2
        assert fisher_scores(_dataset(X, y))[0] == 0.0

    def test_label_copy_dominates(self):
        rng = np.random.default_rng(1)
        y = np.arange(100) % 2
        X = np.column_stack([rng.standard_normal((100, 3)), y.astype(float)])
        scores = fisher_scores(_dataset(X, y))
        assert scores.argmax() == 3

    def test_scale_invariant(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((60, 4))
        y = (X[:, 1] > 0).astype(int)
        base = fisher_scores(_dataset(X, y))
        X2 = X.copy()
        X2[:, 1] *= 10
        scaled = fisher_scores(_dataset(X2, y))
        assert scaled[1] == pytest.approx(base[1], rel=1e-9)

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            fisher_scores(_dataset(np.zeros((5, 2)), np.zeros(5, dtype=int)))


class TestMrmrSelect:
    def test_l1_is_max_relevance(self):
        rng = np.random.default_rng(3)
        y = np.arange(200) % 2
        X = np.column_stack([rng.standard_normal(200), y + 0.01 * rng.standard_normal(200),
                             rng.standard_normal(200)])
        delta = mrmr_select(_dataset(X, y), l=1, bins=5)
        assert np.flatnonzero(delta).tolist() == [1]

    def test_duplicate_not_second_pick(self):
        rng = np.random.default_rng(4)
        y = np.arange(200) % 2
        strong = y + 0.05 * rng.standard_normal(200)
        weak = y + 0.8 * rng.standard_normal(200)
        X = np.column_stack([strong, strong.copy(), weak])
        d = _dataset(X, y)
        delta = mrmr_select(d, l=2, bins=5)
        picked = np.flatnonzero(delta).tolist()
        assert picked == [0, 2]
        # cross-check the greedy decision against an independent MI computation
        bins = np.quantile(strong, [0.2, 0.4, 0.6, 0.8])
        ds = np.searchsorted(bins, strong).tolist()
        bins_w = np.quantile(weak, [0.2, 0.4, 0.6, 0.8])
        dw = np.searchsorted(bins_w, weak).tolist()
        score_dup = mi_oracle(ds, y.tolist()) - mi_oracle(ds, ds)
        score_weak = mi_oracle(dw, y.tolist()) - mi_oracle(dw, ds)
        assert score_weak > score_dup

    def test_constant_features_tie_break(self):
        X = np.ones((30, 5))
        y = np.arange(30) % 2
        delta = mrmr_select(_dataset(X, y), l=3)
        assert np.flatnonzero(delta).tolist() == [0, 1, 2]

    def test_l_equals_n_selects_all(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((40, 6))
        y = np.arange(40) % 2
        assert mrmr_select(_dataset(X, y), l=6).sum() == 6


class TestTreeSelect:
    def test_threshold_feature_dominates(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((200, 5))
        y = (X[:, 0] > 0).astype(int)
        delta = tree_select(_dataset(X, y), l=1)
        assert np.flatnonzero(delta).tolist() == [0]

    def test_pure_labels_tie_break(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((30, 6))
        y = np.ones(30, dtype=int)
        delta = tree_select(_dataset(X, y), l=3)
        assert np.flatnonzero(delta).tolist() == [0, 1, 2]

    def test_deterministic(self):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((100, 8))
        y = (X[:, 2] + X[:, 5] > 0).astype(int)
        d = _dataset(X, y)
        a = tree_select(d, l=3, seed=42)
        b = tree_select(d, l=3, seed=42)
        assert np.array_equal(a, b)


class TestRunEnsemble:
    def test_single_model_matches_direct_run(self):
        d, _ = gen_additive(100, 12, seed=9)
        cfg = EnsembleConfig(n_models=1, n_select=4, subsample_fraction=1.0, seed=3)
        counts = run_ensemble(d, SelectorConfig("fisher"), cfg)
        assert counts.sum() == 4
        assert set(counts.tolist()) <= {0, 1}

    def test_counts_sum_and_bounds(self):
        d, _ = gen_additive(120, 10, seed=10)
        cfg = EnsembleConfig(n_models=25, n_select=3, subsample_fraction=0.75, seed=5)
        counts = run_ensemble(d, SelectorConfig("fisher"), cfg)
        assert counts.sum() == 25 * 3
        assert counts.min() >= 0 and counts.max() <= 25

    def test_relevant_features_accumulate_votes(self):
        d, truth = gen_additive(400, 30, seed=11)
        cfg = EnsembleConfig(n_models=100, n_select=4, subsample_fraction=0.75, seed=6)
        counts = run_ensemble(d, SelectorConfig("fisher"), cfg)
        relevant = sorted(truth.relevant)
        noise = [i for i in range(30) if i not in truth.relevant]
        top_noise = sum(sorted((counts[i] for i in noise), reverse=True)[:4])
        assert counts[relevant].sum() > top_noise

    def test_deterministic_and_thread_invariant(self):
        d, _ = gen_additive(100, 10, seed=12)
        cfg = EnsembleConfig(n_models=10, n_select=3, subsample_fraction=0.75, seed=7)
        a = run_ensemble(d, SelectorConfig("fisher"), cfg)
        b = run_ensemble(d, SelectorConfig("fisher"), cfg, threads=4)
        assert np.array_equal(a, b)

    def test_every_kind_selects_exactly_l(self):
        d, _ = gen_additive(80, 9, seed=13)
        for kind in ("fisher", "mrmr", "tree"):
            delta = run_selector(d, SelectorConfig(kind), l=4, seed=1)
            assert delta.sum() == 4
            assert set(delta.tolist()) <= {0, 1}
