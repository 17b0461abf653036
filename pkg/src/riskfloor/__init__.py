"""Distribution-free lower bounds on model class risk.

The package computes certified lower bounds on the best achievable test
error of piecewise-constant and linear model classes, exposes the
hardness quantities that cap what any such bound can do, and ships a
seeded Monte-Carlo lab that verifies the coverage guarantees and
hardness ceilings empirically.
"""

from .bounds import (
    AlphaBudget,
    BoundResult,
    LossSpec,
    bound_erm_chernoff,
    bound_erm_markov,
    bound_erm_trunc,
    solve_delta,
    solve_delta_complement,
    trivial_randomized_bound,
)
from .estimators import LinearRiskLowerBound, PwcRiskLowerBound
from .exceptions import (
    ConditionRefusedError,
    DataInconsistencyError,
    DomainError,
    RiskFloorError,
    UnknownTrueRiskError,
)
from .experiments import (
    CoverageReport,
    ExceedanceReport,
    InterpolationCapacity,
    OccupancyReport,
    capacity_profile,
    chernoff_lemma_experiment,
    coverage_experiment,
    evaluate_bound,
    occupancy_experiment,
    sample_resample_experiment,
)
from .generators import (
    HeavyTailLinear,
    LinearGaussian,
    MultinomialUniform,
    PwcSignal,
    make_generator,
)
from .hardness import (
    TvEstimate,
    positivity_ceiling,
    transfer_base_size,
    tv_concentration_mc,
    tv_gaussian_bound,
    tv_kl_chain_bound,
    tv_transfer_bound,
    wishart_logdet_moments,
)
from .kmeans1d import (
    KmeansSolution,
    WeightedInstance,
    group_by_x,
    kmeans1d_exact,
    kmeans1d_exact_trunc,
)
from .linear import (
    LinearClass,
    MomentDiagnostics,
    linear_empirical_risk,
    moment_diagnostics,
    truncated_linear_risk_irls,
)
from .pwc import (
    PwcClass,
    basic_admissible_m,
    bound_pwc_basic,
    bound_pwc_refined,
    bound_pwc_trunc,
    occupancy_shortfall,
    pwc_empirical_risk,
    pwc_truncated_empirical_risk,
)
from .specfun import SpecFunResult, digamma, lgamma
from .validation import spawn_rng

__version__ = "0.1.0"

__all__ = [
    "AlphaBudget",
    "BoundResult",
    "ConditionRefusedError",
    "CoverageReport",
    "DataInconsistencyError",
    "DomainError",
    "ExceedanceReport",
    "HeavyTailLinear",
    "InterpolationCapacity",
    "KmeansSolution",
    "LinearClass",
    "LinearGaussian",
    "LinearRiskLowerBound",
    "LossSpec",
    "MomentDiagnostics",
    "MultinomialUniform",
    "OccupancyReport",
    "PwcClass",
    "PwcRiskLowerBound",
    "PwcSignal",
    "RiskFloorError",
    "SpecFunResult",
    "TvEstimate",
    "UnknownTrueRiskError",
    "WeightedInstance",
    "basic_admissible_m",
    "bound_erm_chernoff",
    "bound_erm_markov",
    "bound_erm_trunc",
    "bound_pwc_basic",
    "bound_pwc_refined",
    "bound_pwc_trunc",
    "capacity_profile",
    "chernoff_lemma_experiment",
    "coverage_experiment",
    "digamma",
    "evaluate_bound",
    "group_by_x",
    "kmeans1d_exact",
    "kmeans1d_exact_trunc",
    "lgamma",
    "linear_empirical_risk",
    "make_generator",
    "moment_diagnostics",
    "occupancy_experiment",
    "occupancy_shortfall",
    "positivity_ceiling",
    "pwc_empirical_risk",
    "pwc_truncated_empirical_risk",
    "sample_resample_experiment",
    "solve_delta",
    "solve_delta_complement",
    "spawn_rng",
    "transfer_base_size",
    "trivial_randomized_bound",
    "truncated_linear_risk_irls",
    "tv_concentration_mc",
    "tv_gaussian_bound",
    "tv_kl_chain_bound",
    "tv_transfer_bound",
    "wishart_logdet_moments",
]
