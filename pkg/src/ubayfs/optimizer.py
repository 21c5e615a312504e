"""Posterior utility, probabilistic GA initialization, the GA itself, and an
exhaustive oracle for small problems."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintSystem, joint_admissibility
from .data import Dataset
from .elementary import EnsembleConfig, SelectorConfig, run_ensemble
from .prior import ImportanceEstimate, MhSettings, expected_importance, posterior_dirichlet


@dataclass(frozen=True)
class GaConfig:
    """Genetic algorithm settings for the binary subset search."""

    population_size: int = 100
    generations: int = 100
    mutation_rate: float = 0.10
    elite_fraction: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0 <= self.mutation_rate <= 1:
            raise ValueError("mutation_rate must be in [0, 1]")
        if not 0 <= self.elite_fraction <= 1:
            raise ValueError("elite_fraction must be in [0, 1]")


def utility(delta: np.ndarray, theta_hat: np.ndarray, sys: ConstraintSystem) -> float:
    """Selected importance mass plus weighted joint admissibility (to maximize)."""
    delta = np.asarray(delta)
    theta_hat = np.asarray(theta_hat)
    if delta.shape != theta_hat.shape:
        raise ValueError("delta and theta_hat dimensions differ")
    return float(delta @ theta_hat) + sys.lam * joint_admissibility(sys, delta)


def risk(delta: np.ndarray, theta_hat: np.ndarray, sys: ConstraintSystem) -> float:
    """Residual importance mass plus weighted constraint violation (to minimize)."""
    delta = np.asarray(delta)
    theta_hat = np.asarray(theta_hat)
    return float((1 - delta) @ theta_hat) + sys.lam * (1.0 - joint_admissibility(sys, delta))


def alg1_sample(alpha_post: np.ndarray, sys: ConstraintSystem, n_samples: int,
                seed: int) -> np.ndarray:
    """Constraint-aware random feature sets to seed the GA.

    Each sample walks a weighted random permutation of the features (weights
    proportional to the posterior pseudo-counts) and flips each visited bit on
    with probability equal to the admissibility ratio of the flip.
    """
    alpha_post = np.asarray(alpha_post, dtype=float)
    n = len(alpha_post)
    if joint_admissibility(sys, np.zeros(n, dtype=int)) <= 0:
        raise RuntimeError("initial state inadmissible: empty feature set has zero admissibility")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    p = alpha_post / alpha_post.sum()
    out = np.zeros((n_samples, n), dtype=int)
    for q in range(n_samples):
        delta = np.zeros(n, dtype=int)
        kappa = joint_admissibility(sys, delta)
        perm = rng.choice(n, size=n, replace=False, p=p)
        for i in perm:
            candidate = delta.copy()
            candidate[i] = 1
            kappa_new = joint_admissibility(sys, candidate)
            ratio = kappa_new / kappa if kappa > 0 else 0.0
            if rng.uniform() <= ratio:
                delta, kappa = candidate, kappa_new
        out[q] = delta
    return out


def _better(u: float, delta: np.ndarray, best_u: float, best: np.ndarray | None) -> bool:
    """Strictly higher utility wins; ties prefer lower-indexed features."""
    if best is None or u > best_u:
        return True
    return u == best_u and tuple(-delta) < tuple(-best)


def ga_optimize(theta_hat: np.ndarray, sys: ConstraintSystem, cfg: GaConfig,
                init: np.ndarray, record_trace: list | None = None):
    """Genetic search over binary feature sets, returning the best set and utility.

    Rank-proportional parent selection, uniform crossover, per-bit mutation,
    and elitism on the top elite_fraction of each generation. If
    ``record_trace`` is a list, the best utility seen so far is appended once
    per generation.
    """
    init = np.asarray(init, dtype=int)
    if init.ndim != 2 or init.shape[0] == 0:
        raise ValueError("init must be a nonempty matrix of feature sets")
    theta_hat = np.asarray(theta_hat)
    n = theta_hat.shape[0]
    if init.shape[1] != n:
        raise ValueError("init width must match theta_hat length")
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed)]))
    q = cfg.population_size
    pop = init[rng.integers(0, init.shape[0], size=q)] if init.shape[0] != q else init.copy()
    n_elite = max(1, int(math.ceil(cfg.elite_fraction * q))) if cfg.elite_fraction > 0 else 0
    best, best_u = None, -math.inf
    for _ in range(cfg.generations):
        fitness = np.array([utility(ind, theta_hat, sys) for ind in pop])
        order = np.argsort(fitness, kind="stable")  # ascending: rank 1 = worst
        gen_best_i = order[-1]
        if _better(fitness[gen_best_i], pop[gen_best_i], best_u, best):
            best, best_u = pop[gen_best_i].copy(), float(fitness[gen_best_i])
        if record_trace is not None:
            record_trace.append(best_u)
        ranks = np.empty(q)
        ranks[order] = np.arange(1, q + 1)
        parent_p = ranks / ranks.sum()
        children = [pop[i].copy() for i in order[::-1][:n_elite]]
        while len(children) < q:
            pa, pb = rng.choice(q, size=2, p=parent_p)
            mask = rng.integers(0, 2, size=n).astype(bool)
            child = np.where(mask, pop[pa], pop[pb])
            flip = rng.uniform(size=n) < cfg.mutation_rate
            child = np.where(flip, 1 - child, child)
            children.append(child)
        pop = np.array(children)
    fitness = np.array([utility(ind, theta_hat, sys) for ind in pop])
    for i in np.argsort(fitness, kind="stable")[::-1][:1]:
        if _better(fitness[i], pop[i], best_u, best):
            best, best_u = pop[i].copy(), float(fitness[i])
    return best, best_u


def brute_force(theta_hat: np.ndarray, sys: ConstraintSystem, n_features: int):
    """Exhaustive utility maximization; only for small feature counts."""
    if n_features > 20:
        raise ValueError(f"brute force limited to 20 features, got {n_features}")
    best, best_u = None, -math.inf
    for bits in itertools.product((1, 0), repeat=n_features):
        delta = np.array(bits, dtype=int)
        u = utility(delta, theta_hat, sys)
        if u > best_u:  # enumeration order: ties keep the lowest-index selection
            best, best_u = delta, u
    return best, best_u


def _infer_n_select(sys: ConstraintSystem, n_features: int) -> int:
    """Votes per elementary model default to the tightest max-size bound."""
    bounds = [
        int(c.b)
        for c in sys.constraints
        if c.scope == "feature" and len(c.a) == n_features and (c.a == 1).all()
    ]
    if bounds:
        return max(1, min(bounds))
    return min(10, n_features)


def select_features(
    d: Dataset,
    selector: SelectorConfig,
    ens_cfg: EnsembleConfig,
    prior_alpha: np.ndarray,
    sys: ConstraintSystem,
    ga_cfg: GaConfig,
    mh: MhSettings | None = None,
    threads: int = 1,
):
    """Full pipeline: ensemble counts -> posterior mean -> seeded GA search.

    Returns (delta, importance_estimate, diagnostics).
    """
    counts = run_ensemble(d, selector, ens_cfg, threads=threads)
    post = posterior_dirichlet(prior_alpha, counts)
    importance = expected_importance(post, mh, seed=ens_cfg.seed)
    init = alg1_sample(post.alpha_post, sys, ga_cfg.population_size, ga_cfg.seed)
    delta, best_u = ga_optimize(importance.theta_hat, sys, ga_cfg, init)
    diagnostics = {
        "counts": counts,
        "alpha_post": post.alpha_post,
        "theta_hat": importance.theta_hat,
        "utility": best_u,
        "risk": risk(delta, importance.theta_hat, sys),
        "kappa": joint_admissibility(sys, delta),
    }
    return delta, importance, diagnostics
