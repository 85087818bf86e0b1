"""Weighted order-statistic risk estimators: axioms, weights, benchmarks."""

from .core import (
    GeneralWeightScheme,
    Sample,
    SortedSample,
    SupremumCre,
    WeightVector,
    apply_l_estimator,
    apply_supremum,
    permutation_closure_oracle,
    sort_sample,
)
from .estimators import (
    EstimatorId,
    ExpectileSolution,
    LEstimatorSpec,
    SpectrumSpec,
    build_estimator,
    build_spectral_weights,
    build_spectral_weights_alt,
    es_spectrum,
    expectile_estimate,
    gaussian_plugin_es,
    uniform_spectrum,
)
from .coherence import (
    AXIOMS,
    AxiomCheck,
    CoherenceReport,
    NotComonotonicError,
    Witness,
    check_all,
    check_axiom,
    check_cash_additivity_slope,
    extract_comonotonic_weights,
    verify_representation,
)
from .distributions import (
    HorizonSum,
    Nig,
    Normal,
    StudentT,
    TrueRisk,
    dist_label,
    horizon_target,
    nig_moments,
    parse_dist,
    true_risk,
    true_risk_levels,
)
from .sampling import (
    Iid,
    Overlapping,
    RandomnessContract,
    draw_sample,
    draw_secured_companion,
    parse_scheme,
    scheme_label,
    stream_key,
)
from .metrics import BenchCell, MetricReport, run_cell, run_group
from .consistency import (
    SpectrumApproximation,
    alternative_approximation,
    check_partial_integrals,
    check_uniform_bound,
    empirical_consistency,
    integral_approximation,
)
from .bench import (
    BenchConfig,
    ResultRow,
    ResultTable,
    format_metric_table,
    parse_metric_table,
    run_study,
)

__version__ = "0.1.0"

__all__ = [
    "AXIOMS",
    "AxiomCheck",
    "BenchCell",
    "BenchConfig",
    "CoherenceReport",
    "EstimatorId",
    "ExpectileSolution",
    "GeneralWeightScheme",
    "HorizonSum",
    "Iid",
    "LEstimatorSpec",
    "MetricReport",
    "Nig",
    "Normal",
    "NotComonotonicError",
    "Overlapping",
    "RandomnessContract",
    "ResultRow",
    "ResultTable",
    "Sample",
    "SortedSample",
    "SpectrumApproximation",
    "SpectrumSpec",
    "StudentT",
    "SupremumCre",
    "TrueRisk",
    "WeightVector",
    "Witness",
    "alternative_approximation",
    "apply_l_estimator",
    "apply_supremum",
    "build_estimator",
    "build_spectral_weights",
    "build_spectral_weights_alt",
    "check_all",
    "check_axiom",
    "check_cash_additivity_slope",
    "check_partial_integrals",
    "check_uniform_bound",
    "dist_label",
    "draw_sample",
    "draw_secured_companion",
    "empirical_consistency",
    "es_spectrum",
    "expectile_estimate",
    "extract_comonotonic_weights",
    "format_metric_table",
    "gaussian_plugin_es",
    "horizon_target",
    "integral_approximation",
    "nig_moments",
    "parse_dist",
    "parse_metric_table",
    "parse_scheme",
    "permutation_closure_oracle",
    "run_cell",
    "run_group",
    "run_study",
    "scheme_label",
    "sort_sample",
    "stream_key",
    "true_risk",
    "true_risk_levels",
    "uniform_spectrum",
    "verify_representation",
]
