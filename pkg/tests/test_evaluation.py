import math

import numpy as np
import pytest

from ubayfs.constraints import ConstraintSystem, max_size
from ubayfs.data import Dataset, gen_additive
from ubayfs.elementary import EnsembleConfig, SelectorConfig
from ubayfs.evaluation import (
    EvalConfig,
    benchmark,
    feature_f1,
    redundancy_rate,
    stability,
)
from ubayfs.optimizer import GaConfig


class TestFeatureF1:
    def test_perfect_recovery(self):
        assert feature_f1({0, 1, 2, 3}, {0, 1, 2, 3}) == 1.0

    def test_partial_recovery(self):
        assert feature_f1({0, 1}, {0, 1, 2, 3}) == pytest.approx(2 / 3)

    def test_disjoint(self):
        assert feature_f1({5, 6}, {0, 1}) == 0.0

    def test_empty_selection(self):
        assert feature_f1(np.zeros(4, dtype=int), {0, 1}) == 0.0

    def test_relabeling_symmetry(self):
        rng = np.random.default_rng(0)
        perm = rng.permutation(10)
        sel = {1, 4, 7}
        truth = {1, 2, 7}
        mapped_sel = {int(perm[i]) for i in sel}
        mapped_truth = {int(perm[i]) for i in truth}
        assert feature_f1(sel, truth) == feature_f1(mapped_sel, mapped_truth)


class TestStability:
    def test_identical_rows(self):
        Z = np.tile([1, 0, 1, 0], (5, 1))
        assert stability(Z) == 1.0

    def test_anticorrelated_pair(self):
        assert stability(np.array([[1, 0], [0, 1]])) == -1.0

    def test_null_model_near_zero(self):
        rng = np.random.default_rng(1)
        Z = (rng.uniform(size=(50, 100)) < 0.2).astype(int)
        assert abs(stability(Z)) < 0.15

    def test_column_permutation_invariant(self):
        rng = np.random.default_rng(2)
        Z = rng.integers(0, 2, size=(8, 12))
        perm = rng.permutation(12)
        assert stability(Z) == pytest.approx(stability(Z[:, perm]))

    def test_duplicated_identical_row_keeps_perfect_score(self):
        Z = np.tile([1, 1, 0], (4, 1))
        base = stability(Z)
        more = stability(np.vstack([Z, Z[0]]))
        assert more >= base

    def test_degenerate_rows_error(self):
        with pytest.raises(ValueError, match="undefined"):
            stability(np.ones((3, 4), dtype=int))

    def test_needs_two_runs(self):
        with pytest.raises(ValueError):
            stability(np.array([[1, 0]]))


class TestRedundancyRate:
    def _dataset(self, X):
        return Dataset(X, np.arange(len(X)) % 2, [f"f{i}" for i in range(X.shape[1])])

    def test_single_feature_is_zero(self):
        X = np.random.default_rng(3).standard_normal((50, 3))
        assert redundancy_rate(self._dataset(X), {1}) == 0.0

    def test_identical_columns(self):
        x = np.random.default_rng(4).standard_normal(50)
        d = self._dataset(np.column_stack([x, x]))
        assert redundancy_rate(d, {0, 1}) == pytest.approx(1.0)

    def test_independent_columns_low(self):
        X = np.random.default_rng(5).standard_normal((1000, 2))
        assert redundancy_rate(self._dataset(X), {0, 1}) < 0.1

    def test_affine_invariance(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((100, 3))
        d1 = self._dataset(X)
        X2 = X.copy()
        X2[:, 0] = -3.5 * X2[:, 0] + 7
        d2 = self._dataset(X2)
        assert redundancy_rate(d1, {0, 1, 2}) == pytest.approx(
            redundancy_rate(d2, {0, 1, 2}))

    def test_constant_feature_contributes_zero(self):
        rng = np.random.default_rng(7)
        X = np.column_stack([np.full(50, 1.0), rng.standard_normal(50)])
        assert redundancy_rate(self._dataset(X), {0, 1}) == 0.0


class TestBenchmark:
    def _run(self, seed=5, runs=3, with_truth=True):
        d, truth = gen_additive(120, 12, seed=1)
        sys = ConstraintSystem((max_size(12, 4, math.inf),), lam=1.0)
        return benchmark(
            d, truth if with_truth else None,
            SelectorConfig("fisher"), EnsembleConfig(5, 4, 0.75, 0),
            np.full(12, 0.01), sys, GaConfig(30, 30), EvalConfig(runs, 0.75), seed)

    def test_report_shape(self):
        report = self._run()
        assert len(report.per_run) == 3
        assert report.selection_matrix.shape == (3, 12)
        assert report.stability is not None
        assert report.f1_mean is not None
        assert report.redundancy_mean is not None

    def test_deterministic_selections(self):
        a, b = self._run(seed=9), self._run(seed=9)
        assert np.array_equal(a.selection_matrix, b.selection_matrix)
        assert a.f1_mean == b.f1_mean

    def test_truth_optional(self):
        report = self._run(with_truth=False)
        assert report.f1_mean is None
        assert all("feature_f1" not in rec for rec in report.per_run)
        assert report.stability is not None

    def test_single_run_stability_note(self):
        report = self._run(runs=1)
        assert report.stability is None
        assert "undefined" in report.stability_note
