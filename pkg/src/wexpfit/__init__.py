"""Weighted exponential lifetime estimation under Type-II hybrid censoring."""

from .censoring import CensoredData, HybridScheme, apply_scheme, generate_censored
from .distribution import WEParams, cdf, mean, pdf, quantile, sample
from .em import EMConfig, EMResult, em_fit
from .fisher import (ConfidenceInterval, InfoMatrix, asymptotic_ci,
                     bootstrap_ci_alpha, complete_info, missing_info,
                     observed_info)
from .gibbs import (GibbsConfig, PosteriorChain, gibbs_run, hpd_interval,
                    posterior_mean)
from .lindley import GammaPriors, LindleyEstimate, lindley_estimate
from .likelihood import ScoreVector, log_likelihood, score

__version__ = "0.1.0"

__all__ = [
    "CensoredData", "HybridScheme", "apply_scheme", "generate_censored",
    "WEParams", "cdf", "mean", "pdf", "quantile", "sample",
    "EMConfig", "EMResult", "em_fit",
    "ConfidenceInterval", "InfoMatrix", "asymptotic_ci", "bootstrap_ci_alpha",
    "complete_info", "missing_info", "observed_info",
    "GibbsConfig", "PosteriorChain", "gibbs_run", "hpd_interval", "posterior_mean",
    "GammaPriors", "LindleyEstimate", "lindley_estimate",
    "ScoreVector", "log_likelihood", "score",
    "__version__",
]
