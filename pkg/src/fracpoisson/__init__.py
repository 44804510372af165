"""Fractional Poisson process tools.

Exact simulation through stable subordination, Mittag-Leffler and stable
special functions, count distributions, the scaling limit, and
method-of-moments estimation of (nu, mu) with Monte Carlo studies.
"""

__version__ = "0.1.0"

from .errors import AccuracyError, DataError, EstimationError, FppError, SampleSizeError
from .specfun import (
    DEFAULT_CONTROL,
    EULER_GAMMA,
    ZETA2,
    ZETA3,
    EvalControl,
    erfc,
    log_gamma_series_coeffs,
    mittag_leffler,
    mittag_leffler_deriv,
    mittag_leffler_two_param,
    zeta,
)
from .stable import (
    StableLaw,
    UniformSource,
    sample_stable,
    stable_laplace,
    stable_log_moment,
    stable_moment,
    stable_pdf,
    stable_pdf_saddlepoint,
    wright_m,
)
from .fpp import (
    EventSeries,
    FppParams,
    LimitLawNu,
    count_mean_var,
    count_pgf,
    count_pmf,
    interarrival_pdf,
    interarrival_pdf_integral,
    limit_moment,
    limit_pdf,
    poisson_skew_normal_cdf,
    relative_fluctuation,
    sample_counts,
    sample_interarrival,
    simulate_alternative_fpp,
    simulate_path,
    survival,
)
from .estimate import (
    Estimate,
    LogMomentSummary,
    asymptotic_se,
    bootstrap_ci,
    confidence_intervals,
    estimate_mu,
    estimate_nu,
    fit,
    log_moment_summary,
    theoretical_log_moments,
)
from .harness import ExperimentSpec, McReport, bundled_spec, report_emit, run_accuracy, run_ci, run_experiment
from .io import read_series, write_series

__all__ = [
    "__version__",
    "AccuracyError",
    "DataError",
    "EstimationError",
    "FppError",
    "SampleSizeError",
    "DEFAULT_CONTROL",
    "EULER_GAMMA",
    "ZETA2",
    "ZETA3",
    "EvalControl",
    "erfc",
    "log_gamma_series_coeffs",
    "mittag_leffler",
    "mittag_leffler_deriv",
    "mittag_leffler_two_param",
    "zeta",
    "StableLaw",
    "UniformSource",
    "sample_stable",
    "stable_laplace",
    "stable_log_moment",
    "stable_moment",
    "stable_pdf",
    "stable_pdf_saddlepoint",
    "wright_m",
    "EventSeries",
    "FppParams",
    "LimitLawNu",
    "count_mean_var",
    "count_pgf",
    "count_pmf",
    "interarrival_pdf",
    "interarrival_pdf_integral",
    "limit_moment",
    "limit_pdf",
    "poisson_skew_normal_cdf",
    "relative_fluctuation",
    "sample_counts",
    "sample_interarrival",
    "simulate_alternative_fpp",
    "simulate_path",
    "survival",
    "Estimate",
    "LogMomentSummary",
    "asymptotic_se",
    "bootstrap_ci",
    "confidence_intervals",
    "estimate_mu",
    "estimate_nu",
    "fit",
    "log_moment_summary",
    "theoretical_log_moments",
    "ExperimentSpec",
    "McReport",
    "bundled_spec",
    "report_emit",
    "run_accuracy",
    "run_ci",
    "run_experiment",
    "read_series",
    "write_series",
]
