"""Exact Fourier analysis of boolean functions on the signed hypercube.

Truth tables are packed integers, spectra are exact int64 coefficient
arrays, influences are exact rationals, and every inequality the package
verifies is swept numerically with explicit tolerances.
"""
from .boolfn import (
    MAX_N,
    BooleanFunction,
    FamilySpec,
    Restriction,
    and_function,
    dictator,
    first_even_group,
    from_sign_bits,
    from_values,
    majority,
    make_family,
    minblock,
    parity,
    tribes,
)
from .entropy import (
    AnalysisReport,
    analyze,
    concentration_count,
    fourier_entropy,
    influence_entropy_bound,
    influence_entropy_bound_drop_one,
    jensen_cap_bits,
    min_entropy,
    term_sum_bits,
)
from .inequality import (
    LogRatioReport,
    Q31Report,
    ScalarGridSpec,
    SweepResult,
    eq27_gap,
    lemma24_gap,
    log_ratio_functional,
    q31_report,
    sweep_gap,
    sweep_gap_random,
)
from .moments import (
    ChainReport,
    MomentCurve,
    chain,
    entropy_from_moment_derivative,
    lemma22_check,
    moment,
    moment_curve,
    step_floor,
)
from .search import (
    METRICS,
    ExtremalRecord,
    SearchJob,
    batch_stats,
    metric_value,
)
from .search import resume as resume_search
from .search import run as run_search
from .spectrum import (
    InfluenceProfile,
    Spectrum,
    influences_combinatorial,
    influences_spectral,
    weighted_degree_sum,
    wht,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_N",
    "BooleanFunction",
    "FamilySpec",
    "Restriction",
    "and_function",
    "dictator",
    "first_even_group",
    "from_sign_bits",
    "from_values",
    "majority",
    "make_family",
    "minblock",
    "parity",
    "tribes",
    "AnalysisReport",
    "analyze",
    "concentration_count",
    "fourier_entropy",
    "influence_entropy_bound",
    "influence_entropy_bound_drop_one",
    "jensen_cap_bits",
    "min_entropy",
    "term_sum_bits",
    "LogRatioReport",
    "Q31Report",
    "ScalarGridSpec",
    "SweepResult",
    "eq27_gap",
    "lemma24_gap",
    "log_ratio_functional",
    "q31_report",
    "sweep_gap",
    "sweep_gap_random",
    "ChainReport",
    "MomentCurve",
    "chain",
    "entropy_from_moment_derivative",
    "lemma22_check",
    "moment",
    "moment_curve",
    "step_floor",
    "METRICS",
    "ExtremalRecord",
    "SearchJob",
    "batch_stats",
    "metric_value",
    "resume_search",
    "run_search",
    "InfluenceProfile",
    "Spectrum",
    "influences_combinatorial",
    "influences_spectral",
    "weighted_degree_sum",
    "wht",
]
