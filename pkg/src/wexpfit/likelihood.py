"""Observed-data log-likelihood and score for the censored WE model.

Everything works in the (alpha, beta) parametrization, beta = alpha * lam.
The combinatorial constant n!/(n-r)! is omitted throughout; it does not
depend on the parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .censoring import CensoredData

__all__ = ["ScoreVector", "log1mexp", "log_likelihood", "score"]


@dataclass(frozen=True)
class ScoreVector:
    d_alpha: float
    d_beta: float


def log1mexp(t):
    """ln(1 - exp(-t)) for t > 0, stable for both small and large t."""
    t = np.asarray(t, dtype=float)
    small = t < np.log(2.0)
    out = np.empty_like(t)
    out[small] = np.log(-np.expm1(-t[small]))
    out[~small] = np.log1p(-np.exp(-t[~small]))
    return out


def _validate(alpha: float, beta: float, data: CensoredData):
    if not (alpha > 0 and beta > 0 and np.isfinite(alpha) and np.isfinite(beta)):
        raise ValueError(f"alpha and beta must be positive and finite, got {alpha!r}, {beta!r}")
    if np.any(data.times <= 0):
        raise ValueError("all observed times must be positive")


def log_likelihood(alpha: float, beta: float, data: CensoredData) -> float:
    """Unified case I/II/III log-likelihood (up to an additive constant)."""
    _validate(alpha, beta, data)
    x = data.times
    n, r, c = data.n, data.r, data.c
    val = (
        r * np.log(alpha + 1.0)
        - (n + r) * np.log(alpha)
        + r * np.log(beta)
        - (beta / alpha) * data.sum_times
        + log1mexp(beta * x).sum()
        - (n - r) * (beta / alpha) * c
        + (n - r) * np.log(alpha + 1.0 - np.exp(-beta * c))
    )
    return float(val)


def score(alpha: float, beta: float, data: CensoredData) -> ScoreVector:
    """Gradient of :func:`log_likelihood` in (alpha, beta)."""
    _validate(alpha, beta, data)
    x = data.times
    n, r, c = data.n, data.r, data.c
    t_sum = data.sum_times + (n - r) * c
    ec = np.exp(-beta * c)
    g = alpha + 1.0 - ec

    d_alpha = (
        r / (alpha + 1.0)
        - (n + r) / alpha
        + beta / alpha**2 * t_sum
        + (n - r) / g
    )
    ex = np.exp(-beta * x)
    d_beta = (
        r / beta
        - t_sum / alpha
        + float(np.sum(x * ex / (1.0 - ex)))
        + (n - r) * c * ec / g
    )
    return ScoreVector(d_alpha=float(d_alpha), d_beta=float(d_beta))
