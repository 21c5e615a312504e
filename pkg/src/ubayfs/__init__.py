"""UBayFS: ensemble feature selection with user priors and relaxed side constraints."""

from .constraints import (
    Constraint,
    ConstraintSystem,
    admissibility,
    block_max_size,
    block_selection,
    decorrelation,
    joint_admissibility,
    max_per_block,
    max_size,
)
from .data import (
    DataError,
    Dataset,
    GroundTruth,
    gen_additive,
    gen_blocked,
    gen_nonadditive,
    load_csv,
    stratified_split,
    subsample,
)
from .elementary import (
    EnsembleConfig,
    SelectorConfig,
    fisher_scores,
    mrmr_select,
    run_ensemble,
    tree_select,
)
from .evaluation import EvalConfig, benchmark, feature_f1, redundancy_rate, stability
from .optimizer import GaConfig, alg1_sample, brute_force, ga_optimize, risk, select_features, utility
from .prior import (
    ImportanceEstimate,
    MhSettings,
    PosteriorModel,
    expected_importance,
    posterior_dirichlet,
    posterior_generalized,
    posterior_hyperdirichlet,
    uninformative_prior,
)

__version__ = "0.1.0"
