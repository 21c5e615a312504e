"""Prior and posterior models over feature importances and their expected values.

Three conjugate families are supported: the standard Dirichlet (closed-form
mean), Wong's generalized Dirichlet (closed-form mean via the product
formula), and the hyperdirichlet over subset sums (mean estimated by
Metropolis-Hastings on the simplex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats


class InferenceError(RuntimeError):
    """Raised when posterior inference cannot proceed (e.g. a stuck MH chain)."""


HYPER_MAX_FEATURES = 20  # hyperdirichlet terms live on subsets of [N]; keep N tractable


def uninformative_prior(n_features: int) -> np.ndarray:
    """Near-flat prior pseudo-counts of 0.01 per feature."""
    if n_features < 1:
        raise ValueError("need at least one feature")
    return np.full(n_features, 0.01)


def _check_positive(name: str, v: np.ndarray):
    if (np.asarray(v) <= 0).any():
        raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class PosteriorModel:
    """Posterior parameters for one of the three supported families."""

    family: str
    alpha_post: np.ndarray | None = None
    beta_post: np.ndarray | None = None
    hyper_terms: tuple[tuple[frozenset[int], float], ...] | None = None
    n_features: int = 0

    def __post_init__(self):
        if self.family not in ("dirichlet", "generalized_dirichlet", "hyperdirichlet"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.alpha_post is not None:
            a = np.asarray(self.alpha_post, dtype=float)
            _check_positive("alpha_post", a)
            object.__setattr__(self, "alpha_post", a)
            object.__setattr__(self, "n_features", len(a))
        if self.beta_post is not None:
            b = np.asarray(self.beta_post, dtype=float)
            _check_positive("beta_post", b)
            object.__setattr__(self, "beta_post", b)


@dataclass(frozen=True)
class MhSettings:
    """Metropolis-Hastings tuning knobs for the hyperdirichlet mean."""

    burn_in: int = 2000
    samples: int = 10000
    concentration: float = 20.0
    min_acceptance: float = 0.01


@dataclass(frozen=True)
class ImportanceEstimate:
    """Posterior expected feature importances (a probability vector)."""

    theta_hat: np.ndarray
    method: str
    mh_diagnostics: dict | None = None

    def __post_init__(self):
        t = np.asarray(self.theta_hat, dtype=float)
        if (t < 0).any() or abs(t.sum() - 1.0) > 1e-9:
            raise ValueError("theta_hat must be a probability vector")
        object.__setattr__(self, "theta_hat", t)
        t.setflags(write=False)


def posterior_dirichlet(alpha: np.ndarray, counts: np.ndarray) -> PosteriorModel:
    """Conjugate update: posterior pseudo-counts are prior plus observed counts."""
    alpha = np.asarray(alpha, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if alpha.shape != counts.shape:
        raise ValueError(f"dimension mismatch: alpha {alpha.shape} vs counts {counts.shape}")
    _check_positive("alpha", alpha)
    return PosteriorModel("dirichlet", alpha_post=alpha + counts)


def default_beta(alpha: np.ndarray) -> np.ndarray:
    """Tail-sum beta that collapses the generalized family onto the Dirichlet."""
    alpha = np.asarray(alpha, dtype=float)
    return np.cumsum(alpha[::-1])[::-1][1:]


def posterior_generalized(alpha: np.ndarray, beta: np.ndarray | None,
                          counts: np.ndarray) -> PosteriorModel:
    """Generalized-Dirichlet conjugate update.

    With tail sums nu_n = sum_{i >= n} counts_i the update reads
    alpha_n -> alpha_n + counts_n and beta_n -> beta_n + nu_{n+1}.
    """
    alpha = np.asarray(alpha, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if alpha.shape != counts.shape:
        raise ValueError(f"dimension mismatch: alpha {alpha.shape} vs counts {counts.shape}")
    if beta is None:
        beta = default_beta(alpha)
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (len(alpha) - 1,):
        raise ValueError(f"beta must have length N-1 = {len(alpha) - 1}")
    _check_positive("alpha", alpha)
    _check_positive("beta", beta)
    nu = np.cumsum(counts[::-1])[::-1]  # nu[n] = sum_{i >= n} counts_i
    return PosteriorModel(
        "generalized_dirichlet",
        alpha_post=alpha + counts,
        beta_post=beta + nu[1:],
    )


def dirichlet_terms(alpha: np.ndarray) -> list[tuple[frozenset[int], float]]:
    """Hyperdirichlet term list equivalent to a Dirichlet(alpha) density."""
    return [(frozenset({n}), float(a)) for n, a in enumerate(np.asarray(alpha, dtype=float))]


def posterior_hyperdirichlet(prior_terms, counts: np.ndarray) -> PosteriorModel:
    """Merge observed singleton counts into the subset-exponent term list."""
    counts = np.asarray(counts, dtype=float)
    n = len(counts)
    if n > HYPER_MAX_FEATURES:
        raise ValueError(
            f"hyperdirichlet model limited to {HYPER_MAX_FEATURES} features (got {n}); "
            "use the dirichlet or generalized_dirichlet family instead"
        )
    merged: dict[frozenset[int], float] = {}
    for subset, exponent in prior_terms:
        subset = frozenset(int(i) for i in subset)
        if not subset or max(subset) >= n:
            raise ValueError(f"term subset {sorted(subset)} invalid for {n} features")
        merged[subset] = merged.get(subset, 0.0) + float(exponent)
    for i, c in enumerate(counts):
        if c > 0:
            key = frozenset({i})
            merged[key] = merged.get(key, 0.0) + float(c)
    terms = tuple(sorted(merged.items(), key=lambda kv: sorted(kv[0])))
    return PosteriorModel("hyperdirichlet", hyper_terms=terms, n_features=n)


def _hyper_log_density(theta: np.ndarray, terms) -> float:
    """Unnormalized log density: -sum log theta + sum_G F(G) log(sum_{i in G} theta_i)."""
    log_theta = np.log(theta)
    out = -log_theta.sum()
    for subset, exponent in terms:
        idx = list(subset)
        out += exponent * (log_theta[idx[0]] if len(idx) == 1 else math.log(theta[idx].sum()))
    return out


def _mh_mean(post: PosteriorModel, settings: MhSettings, seed: int):
    """Simplex random walk with a Dirichlet proposal centered at the current state."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    n = post.n_features
    theta = np.full(n, 1.0 / n)
    log_f = _hyper_log_density(theta, post.hyper_terms)
    accepted = 0
    total = settings.burn_in + settings.samples
    running = np.zeros(n)
    tiny = 1e-12
    for step in range(total):
        conc = settings.concentration * theta + 0.1
        proposal = np.clip(rng.dirichlet(conc), tiny, None)
        proposal /= proposal.sum()
        log_f_new = _hyper_log_density(proposal, post.hyper_terms)
        conc_back = settings.concentration * proposal + 0.1
        log_q_fwd = stats.dirichlet.logpdf(proposal, conc)
        log_q_back = stats.dirichlet.logpdf(theta, conc_back)
        if math.log(rng.uniform()) <= log_f_new - log_f + log_q_back - log_q_fwd:
            theta, log_f = proposal, log_f_new
            accepted += 1
        if step >= settings.burn_in:
            running += theta
    rate = accepted / total
    if rate < settings.min_acceptance:
        raise InferenceError(f"MH chain stuck: acceptance rate {rate:.4f}")
    mean = running / settings.samples
    return mean, {"acceptance_rate": rate, "samples": settings.samples}


def expected_importance(post: PosteriorModel, mh: MhSettings | None = None,
                        seed: int = 0) -> ImportanceEstimate:
    """Posterior mean of the importance vector, normalized to sum 1."""
    if post.family == "dirichlet":
        theta = post.alpha_post / post.alpha_post.sum()
        method = "closed_form"
        diagnostics = None
    elif post.family == "generalized_dirichlet":
        a, b = post.alpha_post, post.beta_post
        n = len(a)
        theta = np.empty(n)
        # E[theta_n] = a_n/(a_n+b_n) * prod_{i<n} b_i/(a_i+b_i), last component the full tail
        frac = b / (a[:-1] + b)
        lead = np.concatenate([[1.0], np.cumprod(frac)])
        theta[:-1] = a[:-1] / (a[:-1] + b) * lead[:-1]
        theta[-1] = lead[-1]
        method = "closed_form"
        diagnostics = None
    else:
        settings = mh or MhSettings()
        theta, diagnostics = _mh_mean(post, settings, seed)
        method = "mh_sample"
    theta = np.clip(theta, 0.0, None)
    theta = theta / theta.sum()
    return ImportanceEstimate(theta, method, diagnostics)
