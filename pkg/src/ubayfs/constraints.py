"""Linear side constraints with logistic relaxation and joint admissibility."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class Constraint:
    """One inequality a . delta <= b with relaxation shape rho.

    ``scope`` decides whether ``a`` acts on the feature vector (length N) or
    on the block selection vector (length W). rho = inf makes the constraint
    hard; finite rho > 0 yields the logistic penalty.
    """

    a: np.ndarray
    b: float
    rho: float = math.inf
    scope: str = "feature"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "rho", float(self.rho))
        if self.a.ndim != 1:
            raise ValueError("constraint row a must be 1-D")
        if self.scope not in ("feature", "block"):
            raise ValueError(f"unknown scope {self.scope!r}")
        if not (self.rho > 0 or math.isinf(self.rho)):
            raise ValueError(f"rho must be positive or inf, got {self.rho}")
        self.a.setflags(write=False)


def admissibility(c: Constraint, delta: np.ndarray, block_matrix: np.ndarray | None = None) -> float:
    """Degree in [0, 1] to which ``delta`` satisfies the constraint.

    Satisfied rows score exactly 1; hard violations score 0; soft violations
    score 2*xi / (1 + xi) with xi = exp(-rho * margin).
    """
    delta = np.asarray(delta)
    if c.scope == "block":
        if block_matrix is None:
            raise ValueError("block-scoped constraint needs a block matrix")
        delta = block_selection(block_matrix, delta)
    if c.a.shape != delta.shape:
        raise ValueError(f"constraint dimension {c.a.shape} vs delta {delta.shape}")
    margin = float(c.a @ delta) - c.b
    if margin <= 0:
        return 1.0
    if math.isinf(c.rho):
        return 0.0
    xi = math.exp(-c.rho * margin)
    return 2.0 * xi / (1.0 + xi)


def block_selection(B: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Binary block vector: block w is selected iff any member feature is."""
    B = np.asarray(B)
    if B.shape[1] != len(delta):
        raise ValueError("block matrix column count must equal feature count")
    return (B @ np.asarray(delta) >= 1).astype(int)


@dataclass(frozen=True)
class ConstraintSystem:
    """All active constraints plus the global strength lambda.

    Constraints with rho == 0 are treated as omitted and dropped on
    construction.
    """

    constraints: tuple[Constraint, ...] = ()
    block_matrix: np.ndarray | None = None
    lam: float = 1.0

    def __post_init__(self):
        kept = tuple(c for c in self.constraints if c.rho != 0)
        object.__setattr__(self, "constraints", kept)
        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.lam < 1:
            warnings.warn(f"lambda={self.lam} < 1 weakens all constraints and is not recommended")
        if self.block_matrix is not None:
            B = np.asarray(self.block_matrix, dtype=int)
            object.__setattr__(self, "block_matrix", B)
            B.setflags(write=False)
        for c in kept:
            if c.scope == "block" and self.block_matrix is None:
                raise ValueError("block-scoped constraint requires a block matrix")


def joint_admissibility(sys: ConstraintSystem, delta: np.ndarray) -> float:
    """Product of all per-constraint admissibilities; 1 for an empty system."""
    kappa = 1.0
    for c in sys.constraints:
        kappa *= admissibility(c, delta, sys.block_matrix)
        if kappa == 0.0:
            break
    return kappa


def max_size(n_features: int, b: int, rho: float = 1.0) -> Constraint:
    """At most ``b`` selected features overall."""
    if not 1 <= b <= n_features:
        raise ValueError(f"max-size bound {b} outside [1, {n_features}]")
    return Constraint(np.ones(n_features), b, rho, name=f"max-size<={b}")


def block_max_size(n_blocks: int, b: int, rho: float = 1.0) -> Constraint:
    """At most ``b`` selected blocks."""
    if not 1 <= b <= n_blocks:
        raise ValueError(f"block-max-size bound {b} outside [1, {n_blocks}]")
    return Constraint(np.ones(n_blocks), b, rho, scope="block", name=f"block-max-size<={b}")


def max_per_block(B: np.ndarray, w: int, b: int, rho: float = 1.0) -> Constraint:
    """At most ``b`` selected features inside block ``w``."""
    B = np.asarray(B)
    if not 0 <= w < B.shape[0]:
        raise ValueError(f"block index {w} out of range")
    return Constraint(B[w].astype(float), b, rho, name=f"max-per-block[{w}]<={b}")


def max_per_block_all(B: np.ndarray, b: int, rho: float = 1.0) -> list[Constraint]:
    """One max-per-block constraint for every block."""
    return [max_per_block(B, w, b, rho) for w in range(np.asarray(B).shape[0])]


def decorrelation(d, tau: float) -> list[Constraint]:
    """Cannot-link constraints between feature pairs with |Spearman rho| > tau.

    The shape parameter is the odds ratio |corr| / (1 - |corr|); pairs at or
    below tau emit nothing. Constant features count as uncorrelated.
    """
    if not 0 < tau < 1:
        raise ValueError(f"tau must be in (0, 1), got {tau}")
    X = d.features
    if X.shape[0] < 2:
        raise ValueError("decorrelation needs at least 2 samples")
    n = X.shape[1]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # constant columns produce NaN, mapped to 0 below
        corr = stats.spearmanr(X).statistic if n > 1 else np.ones((1, 1))
    if np.ndim(corr) == 0:  # scipy collapses the 2-column case to a scalar
        r = float(np.nan_to_num(corr, nan=0.0))
        corr = np.array([[1.0, r], [r, 1.0]])
    corr = np.nan_to_num(np.atleast_2d(corr), nan=0.0)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            t = abs(corr[i, j])
            if t > tau:
                a = np.zeros(n)
                a[[i, j]] = 1.0
                rho = math.inf if t >= 1.0 - 1e-12 else t / (1.0 - t)
                out.append(Constraint(a, 1.0, rho, name=f"decorrelate({i},{j})"))
    return out
