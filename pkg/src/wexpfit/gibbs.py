"""Gibbs sampling on the joint posterior of (alpha, beta), plus HPD intervals.

The two full conditionals are sampled exactly: beta by adaptive rejection
(its conditional is log-concave), alpha by mode-anchored rejection with a
grid-inversion fallback; see the kernel modules.  The derived rate
lam = beta/alpha is tracked draw for draw, and its posterior summaries
come straight from those transformed draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import get_backend
from .censoring import CensoredData
from .fisher import ConfidenceInterval
from .likelihood import log1mexp
from .lindley import GammaPriors

__all__ = [
    "GibbsConfig",
    "PosteriorChain",
    "log_cond_beta",
    "log_cond_alpha",
    "sample_beta",
    "sample_alpha",
    "gibbs_run",
    "posterior_mean",
    "hpd_interval",
]


@dataclass(frozen=True)
class GibbsConfig:
    n_iter: int = 11_000
    burn_in: int = 1_000
    seed: int | None = None
    grid_size: int = 2048
    thinning: int = 1

    def __post_init__(self):
        if not (0 <= self.burn_in < self.n_iter):
            raise ValueError("require 0 <= burn_in < n_iter")
        if self.grid_size < 16:
            raise ValueError("grid_size must be >= 16")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")


@dataclass(frozen=True)
class PosteriorChain:
    alpha_draws: np.ndarray
    beta_draws: np.ndarray
    config: GibbsConfig
    diagnostics: dict
    lambda_draws: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "lambda_draws", self.beta_draws / self.alpha_draws)

    def __len__(self) -> int:
        return len(self.alpha_draws)

    def retained(self, burn_in: int | None = None):
        """Post-burn-in (and thinned) draws as (alpha, beta, lam) arrays."""
        b = self.config.burn_in if burn_in is None else burn_in
        if not (0 <= b < len(self)):
            raise ValueError("burn_in out of range")
        sl = slice(b, None, self.config.thinning)
        return self.alpha_draws[sl], self.beta_draws[sl], self.lambda_draws[sl]

    def to_rows(self):
        """Rows (iter, alpha, beta, lambda) for CSV export."""
        for i in range(len(self)):
            yield i, self.alpha_draws[i], self.beta_draws[i], self.lambda_draws[i]


def _sum_stats(data: CensoredData):
    return float(data.sum_times) + data.c * (data.n - data.r)


def log_cond_beta(beta, alpha: float, data: CensoredData,
                  priors: GammaPriors):
    """Unnormalized log full conditional of beta given alpha (vectorized)."""
    b = np.asarray(beta, dtype=float)
    s_c = _sum_stats(data)
    n, r, c = data.n, data.r, data.c
    with np.errstate(divide="ignore"):
        out = (
            (priors.w2 + r - 1.0) * np.log(b)
            - b * (priors.w1 + s_c / alpha)
            + (n - r) * np.log(alpha + 1.0 - np.exp(-b * c))
            + log1mexp(np.multiply.outer(b, data.times)).sum(axis=-1)
        )
    return out if out.shape else float(out)


def log_cond_alpha(alpha, beta: float, data: CensoredData,
                   priors: GammaPriors):
    """Unnormalized log full conditional of alpha given beta (vectorized)."""
    a = np.asarray(alpha, dtype=float)
    s_c = _sum_stats(data)
    n, r, c = data.n, data.r, data.c
    with np.errstate(divide="ignore"):
        out = (
            (priors.w4 - n - r - 1.0) * np.log(a)
            + r * np.log(a + 1.0)
            - a * priors.w3
            - (beta / a) * s_c
            + (n - r) * np.log(a + 1.0 - np.exp(-beta * c))
        )
    return out if out.shape else float(out)


def _fresh_diag() -> dict:
    return {"alpha_proposals": 0, "alpha_accepts": 0, "alpha_grid_draws": 0,
            "alpha_hull_violations": 0, "beta_proposals": 0, "beta_accepts": 0}


def sample_beta(alpha: float, data: CensoredData, priors: GammaPriors,
                rng: np.random.Generator, *, anchor: float | None = None,
                backend: str | None = None) -> float:
    """One exact draw from pi(beta | alpha, data)."""
    k = get_backend(backend)
    anchor = anchor if anchor is not None else data.r / data.sum_times
    return k.sample_beta(alpha, anchor, data.times, data.n, data.r, data.c,
                         _sum_stats(data), priors.w1, priors.w2, rng,
                         _fresh_diag())


def sample_alpha(beta: float, data: CensoredData, priors: GammaPriors,
                 rng: np.random.Generator, *, anchor: float = 1.0,
                 grid_size: int = 2048, backend: str | None = None) -> float:
    """One draw from pi(alpha | beta, data)."""
    k = get_backend(backend)
    return k.sample_alpha(beta, anchor, data.times, data.n, data.r, data.c,
                          _sum_stats(data), priors.w3, priors.w4, grid_size,
                          rng, _fresh_diag())


def gibbs_run(data: CensoredData, priors: GammaPriors, config: GibbsConfig,
              rng: np.random.Generator | None = None,
              init: tuple[float, float] | None = None,
              backend: str | None = None) -> PosteriorChain:
    """Run the two-block Gibbs sampler.

    Initialization defaults to the EM maximum likelihood estimate.  Each
    sweep draws alpha from its conditional at the current beta, then beta
    at the new alpha.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    if init is None:
        from .em import em_fit  # local import: em does not depend on gibbs

        fit = em_fit(data)
        if not fit.converged:
            raise RuntimeError("EM initialization did not converge; pass init=")
        init = (fit.alpha_hat, fit.beta_hat)
    alpha0, beta0 = init
    if alpha0 <= 0 or beta0 <= 0:
        raise ValueError("initial values must be positive")

    kernel = get_backend(backend)
    alpha_draws, beta_draws, diag = kernel.run_chain(
        data.times, data.n, data.r, data.c,
        priors.w1, priors.w2, priors.w3, priors.w4,
        alpha0, beta0, config.n_iter, config.grid_size, rng,
    )
    diag = dict(diag)
    diag["backend"] = getattr(kernel, "BACKEND", "unknown")
    if diag["alpha_proposals"]:
        diag["alpha_accept_rate"] = diag["alpha_accepts"] / diag["alpha_proposals"]
    if diag["beta_proposals"]:
        diag["beta_accept_rate"] = diag["beta_accepts"] / diag["beta_proposals"]
    return PosteriorChain(alpha_draws=alpha_draws, beta_draws=beta_draws,
                          config=config, diagnostics=diag)


def posterior_mean(chain: PosteriorChain,
                   burn_in: int | None = None) -> tuple[float, float, float]:
    """Squared-error Bayes estimates: post-burn-in means of (alpha, beta, lam)."""
    a, b, lam = chain.retained(burn_in)
    return float(a.mean()), float(b.mean()), float(lam.mean())


def hpd_interval(draws, eta: float) -> ConfidenceInterval:
    """Shortest interval containing a 1 - eta fraction of the draws.

    Among all windows of floor(M * (1 - eta)) consecutive order statistics
    the narrowest wins; ties go to the smallest lower endpoint.
    """
    if not (0.0 < eta < 1.0):
        raise ValueError(f"eta must be in (0, 1), got {eta!r}")
    d = np.sort(np.asarray(draws, dtype=float))
    m = len(d)
    w = int(math.floor(m * (1.0 - eta)))
    if w < 2 or w > m:
        raise ValueError(f"too few draws ({m}) for a {1 - eta:.0%} interval")
    widths = d[w - 1:] - d[: m - w + 1]
    j = int(np.argmin(widths))  # argmin takes the first minimum: lowest endpoint
    return ConfidenceInterval(float(d[j]), float(d[j + w - 1]), 1.0 - eta)
