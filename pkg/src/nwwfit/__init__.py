"""Composed two-baseline distributions with a Weibull/Weibull preset.

Public surface: baseline families with parameter derivatives, the composed
model and its series representation, maximum likelihood fitting with analytic
score and observed information, acceptance-rejection sampling, bias/MSE
simulation studies, and goodness-of-fit model comparison.
"""

__version__ = "0.1.0"

from .baselines import (
    DerivTable,
    Interval,
    NormalBaseline,
    WeibullBaseline,
    normal_cdf_pdf,
    normal_log_pdf,
    weibull_cdf,
    weibull_param_derivs,
)
from .competitors import (
    MixtureModel,
    compare_models,
    fit_mixture_em,
    fit_normal,
    fit_weibull,
)
from .composed import (
    ComposedModel,
    compose_cdf,
    compose_pdf,
    compose_quantile,
    distinguishability_check,
    nww,
)
from .errors import (
    ConvergenceUnverifiedWarning,
    DataSupportError,
    DivergenceError,
    DomainError,
    EfficiencyError,
    EnvelopeError,
    IngestionError,
    InvalidParameterError,
    NwwError,
    OptimizationError,
    SingularPointError,
)
from .gof import GofReport, ad_cvm_statistics, information_criteria
from .inference import (
    DataSet,
    FitResult,
    ModelFamily,
    NWW_FAMILY,
    fit_mle,
    log_likelihood,
    observed_information,
    score,
)
from .montecarlo import SimulationReport, run_study
from .params import ParamEntry, ParamVector, positive_params
from .sampling import Envelope, SampleResult, build_envelope, sample
from .series import (
    SeriesCoefficients,
    TruncationSpec,
    incomplete_moment,
    mgf,
    raw_moment,
    series_cdf,
    series_coeffs,
)

__all__ = [
    "__version__",
    "ComposedModel",
    "ConvergenceUnverifiedWarning",
    "DataSet",
    "DataSupportError",
    "DerivTable",
    "DivergenceError",
    "DomainError",
    "EfficiencyError",
    "Envelope",
    "EnvelopeError",
    "FitResult",
    "GofReport",
    "IngestionError",
    "Interval",
    "InvalidParameterError",
    "MixtureModel",
    "ModelFamily",
    "NWW_FAMILY",
    "NormalBaseline",
    "NwwError",
    "OptimizationError",
    "ParamEntry",
    "ParamVector",
    "SampleResult",
    "SeriesCoefficients",
    "SimulationReport",
    "SingularPointError",
    "TruncationSpec",
    "WeibullBaseline",
    "ad_cvm_statistics",
    "build_envelope",
    "compare_models",
    "compose_cdf",
    "compose_pdf",
    "compose_quantile",
    "distinguishability_check",
    "fit_mixture_em",
    "fit_mle",
    "fit_normal",
    "fit_weibull",
    "incomplete_moment",
    "information_criteria",
    "log_likelihood",
    "mgf",
    "normal_cdf_pdf",
    "normal_log_pdf",
    "nww",
    "observed_information",
    "positive_params",
    "raw_moment",
    "run_study",
    "sample",
    "score",
    "series_cdf",
    "series_coeffs",
    "weibull_cdf",
    "weibull_param_derivs",
]
