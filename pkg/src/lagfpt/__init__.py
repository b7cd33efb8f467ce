"""Laguerre-Gamma polynomial approximation of first-passage-time densities.

Library layout:
  special     combinatorial / special-function kernels
  gbm         GBM model, inverse-Gaussian FPT law, moment/cumulant pipelines
  expansion   the Laguerre-Gamma approximation engine
  sampling    Milstein simulation, exact IG sampling, k-statistics
  estimation  maximum likelihood and method-of-moments fitting
  cli         batch command-line front end (`lagfpt` entry point)
"""
from .expansion import (
    Admissibility,
    GammaReference,
    LaguerreExpansion,
    build_adaptive,
    build_expansion,
    check_beta_admissible,
    default_reference,
    eval_pn,
    extend_expansion,
    gamma_pdf,
    ghat_eval,
    moment_of_ghat,
    normalization_check,
)
from .estimation import (
    AnnealingConfig,
    FitResult,
    fit_report,
    log_likelihood,
    mle_fit,
    mm_fit,
)
from .gbm import (
    GbmModel,
    IgParams,
    InvalidModelError,
    ig_cumulants,
    ig_from_gbm,
    ig_moments_bell,
    ig_moments_finite_sum,
    ig_moments_recursive,
    ig_pdf,
    moments_from_cumulants,
)
from .presets import CASES, preset
from .sampling import (
    FptSample,
    approximate_from_sample,
    k_statistics,
    load_sample,
    sample_ig_exact,
    save_sample,
    simulate_gbm_fpt,
)

__version__ = "0.1.0"

__all__ = [
    "Admissibility",
    "AnnealingConfig",
    "CASES",
    "FitResult",
    "FptSample",
    "GammaReference",
    "GbmModel",
    "IgParams",
    "InvalidModelError",
    "LaguerreExpansion",
    "approximate_from_sample",
    "build_adaptive",
    "build_expansion",
    "check_beta_admissible",
    "default_reference",
    "eval_pn",
    "extend_expansion",
    "fit_report",
    "gamma_pdf",
    "ghat_eval",
    "ig_cumulants",
    "ig_from_gbm",
    "ig_moments_bell",
    "ig_moments_finite_sum",
    "ig_moments_recursive",
    "ig_pdf",
    "k_statistics",
    "load_sample",
    "log_likelihood",
    "mle_fit",
    "mm_fit",
    "moment_of_ghat",
    "moments_from_cumulants",
    "normalization_check",
    "preset",
    "sample_ig_exact",
    "save_sample",
    "simulate_gbm_fpt",
]
