import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ubayfs.constraints import (
    Constraint,
    ConstraintSystem,
    admissibility,
    block_max_size,
    block_selection,
    decorrelation,
    joint_admissibility,
    max_per_block,
    max_per_block_all,
    max_size,
)
from ubayfs.data import Dataset

SOFT_AT_MARGIN_ONE = 2 * math.exp(-1) / (1 + math.exp(-1))  # 0.537883...


class TestAdmissibility:
    def test_satisfied_at_boundary(self):
        c = Constraint(np.ones(3), 2, rho=1.0)
        assert admissibility(c, [1, 1, 0]) == 1.0
        assert admissibility(Constraint(np.ones(3), 2, math.inf), [1, 1, 0]) == 1.0

    def test_hard_violation(self):
        c = Constraint(np.ones(3), 2, math.inf)
        assert admissibility(c, [1, 1, 1]) == 0.0

    def test_soft_violation_value(self):
        c = Constraint(np.ones(3), 2, rho=1.0)
        assert admissibility(c, [1, 1, 1]) == pytest.approx(0.537883, abs=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            admissibility(Constraint(np.ones(3), 1, 1.0), [1, 0])

    @given(st.integers(2, 10), st.integers(0, 10), st.floats(0.1, 20))
    @settings(max_examples=100)
    def test_nonincreasing_in_margin(self, n, b, rho):
        c = Constraint(np.ones(n), b, rho)
        values = [admissibility(c, [1] * k + [0] * (n - k)) for k in range(n + 1)]
        assert all(x >= y for x, y in zip(values, values[1:]))

    def test_pointwise_convergence_bound(self):
        # integer margin >= 1: gap to the hard constraint is at most 2 exp(-rho)
        for rho in (5.0, 10.0, 50.0):
            for margin in (1, 2, 5):
                c = Constraint(np.ones(6), 6 - margin, rho)
                gap = abs(admissibility(c, [1] * 6) - 0.0)
                assert gap <= 2 * math.exp(-rho * margin) + 1e-15
        c = Constraint(np.ones(6), 5, 50.0)
        assert abs(admissibility(c, [1] * 6)) < 1e-6


class TestBlockSelection:
    def test_identity_blocks(self):
        assert block_selection(np.eye(3), [1, 0, 1]).tolist() == [1, 0, 1]

    def test_any_member_selects_block(self):
        B = np.array([[1, 1]])
        assert block_selection(B, [0, 1]).tolist() == [1]

    def test_empty_selection(self):
        assert block_selection(np.ones((2, 3)), [0, 0, 0]).tolist() == [0, 0]


class TestJointAdmissibility:
    def test_empty_system(self):
        sys = ConstraintSystem()
        assert joint_admissibility(sys, np.array([1, 0, 1])) == 1.0

    def test_hard_violation_zeroes_product(self):
        sys = ConstraintSystem((max_size(3, 1, math.inf), max_size(3, 2, 1.0)))
        assert joint_admissibility(sys, np.ones(3, dtype=int)) == 0.0

    def test_product_of_soft_factors(self):
        c1 = Constraint(np.array([1.0, 0, 0]), 0, rho=math.log(3))  # xi=1/3 -> 0.5
        c2 = Constraint(np.array([0, 1.0, 0]), 0, rho=math.log(3))
        sys = ConstraintSystem((c1, c2))
        assert joint_admissibility(sys, np.array([1, 1, 0])) == pytest.approx(0.25)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(5)
        n = 8
        rows = tuple(Constraint(rng.uniform(size=n), rng.uniform(0, 3), rng.uniform(0.5, 4))
                     for _ in range(4))
        sys = ConstraintSystem(rows)
        delta = rng.integers(0, 2, size=n)
        perm = rng.permutation(n)
        sys_p = ConstraintSystem(tuple(Constraint(c.a[perm], c.b, c.rho) for c in rows))
        assert joint_admissibility(sys, delta) == pytest.approx(
            joint_admissibility(sys_p, delta[perm]), abs=1e-12)


class TestConstraintBuilders:
    def test_max_size(self):
        c = max_size(5, 2, rho=1.0)
        assert admissibility(c, [1, 1, 0, 0, 0]) == 1.0
        assert admissibility(c, [1, 1, 1, 0, 0]) == pytest.approx(0.537883, abs=1e-6)

    def test_max_size_bounds(self):
        with pytest.raises(ValueError):
            max_size(5, 6)

    def test_block_max_size(self):
        B = np.array([[1, 1, 0, 0], [0, 0, 1, 1]])
        sys = ConstraintSystem((block_max_size(2, 1, math.inf),), block_matrix=B)
        assert joint_admissibility(sys, np.array([1, 1, 0, 0])) == 1.0
        assert joint_admissibility(sys, np.array([1, 0, 1, 0])) == 0.0

    def test_max_per_block_hard_violation(self):
        B = np.array([[1, 1, 1, 0], [0, 0, 0, 1]])
        sys = ConstraintSystem(tuple(max_per_block_all(B, 2, math.inf)), block_matrix=B)
        assert joint_admissibility(sys, np.array([1, 1, 1, 0])) == 0.0
        assert joint_admissibility(sys, np.array([1, 1, 0, 1])) == 1.0

    def test_max_per_block_row_is_block_row(self):
        B = np.array([[1, 0, 1], [0, 1, 0]])
        c = max_per_block(B, 0, 1)
        assert c.a.tolist() == [1.0, 0.0, 1.0]
        assert c.scope == "feature"


class TestDecorrelation:
    def _dataset(self, X):
        return Dataset(X, np.arange(len(X)) % 2, [f"f{i}" for i in range(X.shape[1])])

    def test_odds_ratio_shapes(self):
        rng = np.random.default_rng(1)
        base = rng.standard_normal(500)
        X = np.column_stack([base, base + 0.1 * rng.standard_normal(500),
                             rng.standard_normal(500)])
        cons = decorrelation(self._dataset(X), tau=0.4)
        assert len(cons) == 1
        c = cons[0]
        assert c.a.tolist() == [1.0, 1.0, 0.0]
        assert c.b == 1.0
        rho_expected = abs_corr = None
        from scipy.stats import spearmanr
        abs_corr = abs(spearmanr(X[:, 0], X[:, 1]).statistic)
        assert c.rho == pytest.approx(abs_corr / (1 - abs_corr))

    def test_below_threshold_emits_nothing(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((500, 4))
        assert decorrelation(self._dataset(X), tau=0.4) == []

    def test_known_odds_ratios(self):
        assert 0.5 / (1 - 0.5) == pytest.approx(1.0)
        assert 0.8 / (1 - 0.8) == pytest.approx(4.0)

    def test_constant_feature_ignored(self):
        rng = np.random.default_rng(3)
        X = np.column_stack([np.full(100, 2.0), rng.standard_normal(100)])
        assert decorrelation(self._dataset(X), tau=0.1) == []

    def test_identical_columns_get_hard_constraint(self):
        x = np.random.default_rng(4).standard_normal(100)
        cons = decorrelation(self._dataset(np.column_stack([x, x])), tau=0.4)
        assert len(cons) == 1
        assert math.isinf(cons[0].rho)


class TestConstraintSystem:
    def test_lambda_below_one_warns(self):
        with pytest.warns(UserWarning, match="not recommended"):
            ConstraintSystem(lam=0.5)

    def test_lambda_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            ConstraintSystem(lam=0.0)

    def test_rho_zero_filtered_as_omitted(self):
        c = Constraint.__new__(Constraint)
        object.__setattr__(c, "a", np.ones(2))
        object.__setattr__(c, "b", 1.0)
        object.__setattr__(c, "rho", 0.0)
        object.__setattr__(c, "scope", "feature")
        object.__setattr__(c, "name", "")
        sys = ConstraintSystem((c,))
        assert sys.constraints == ()

    def test_block_scope_requires_matrix(self):
        with pytest.raises(ValueError):
            ConstraintSystem((block_max_size(2, 1),))
