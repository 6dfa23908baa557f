"""Observed Fisher information via the missing-information principle.

This module works in the (lam, beta) parametrization throughout: the
complete-data information for the WE model is classical in that pair, and
the missing part of the information is the expected curvature of the
truncated log-density of a censored unit, scaled by (n - r).

The observed information is I_X = I_W - I_{W|X}; inverting it gives the
asymptotic covariance used for the lam and beta confidence intervals.
The interval for alpha comes from a nonparametric bootstrap instead.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.stats import norm

from .censoring import CensoredData, apply_scheme, generate_censored
from .distribution import WEParams
from .em import EMConfig, QuadratureError, em_fit

__all__ = [
    "InfoMatrix",
    "ConfidenceInterval",
    "curvature_integral",
    "complete_info",
    "missing_info",
    "observed_info",
    "asymptotic_ci",
    "bootstrap_ci_alpha",
]


@dataclass(frozen=True)
class InfoMatrix:
    """Symmetric 2x2 information matrix, parameter order (lam, beta)."""

    m11: float
    m12: float
    m22: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m12, self.m22]])

    def is_positive_definite(self) -> bool:
        return bool(np.all(np.linalg.eigvalsh(self.as_array()) > 0))

    def __sub__(self, other: "InfoMatrix") -> "InfoMatrix":
        return InfoMatrix(self.m11 - other.m11, self.m12 - other.m12, self.m22 - other.m22)

    def __add__(self, other: "InfoMatrix") -> "InfoMatrix":
        return InfoMatrix(self.m11 + other.m11, self.m12 + other.m12, self.m22 + other.m22)


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not (0.0 < self.level < 1.0):
            raise ValueError(f"level must be in (0, 1), got {self.level!r}")
        if self.lower > self.upper:
            raise ValueError("lower endpoint exceeds upper endpoint")

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def to_record(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "level": self.level}


# The y -> 0 end of the curvature integral is regular ((ln(1-y))^2/y ~ y)
# but is evaluated by series below this cut to keep full precision.
_SERIES_CUT = 1e-3


def curvature_integral(lo: float, s: float, *, tol: float = 1e-10) -> float:
    """int_lo^1 (ln(1-y))^2 (1-y)^s / y dy for s > 0, 0 <= lo < 1.

    ``lo = 0`` gives the complete-data integral; ``lo = 1 - exp(-beta c)``
    the censored-tail one.  For s = 1 the value is 2*(zeta(3) - 1).
    """
    if not (0.0 <= lo < 1.0):
        raise ValueError(f"lower limit must be in [0, 1), got {lo!r}")
    if s <= 0:
        raise ValueError(f"exponent must be positive, got {s!r}")

    u = 1.0 - lo
    if u < 1e-20:
        # Tail regime: with t = 1 - y, int_0^u (ln t)^2 t^s dt to O(u) relative.
        L = np.log(u)
        return float(u ** (s + 1.0) * (L * L / (s + 1.0) - 2.0 * L / (s + 1.0) ** 2 + 2.0 / (s + 1.0) ** 3))

    def integrand(y):
        yy = 1.0 - y
        if yy <= 0.0:
            return 0.0  # limit value for s > 0
        l1 = np.log1p(-y)
        return l1 * l1 * yy**s / y

    head = 0.0
    lo_eff = lo
    if lo < _SERIES_CUT and s * _SERIES_CUT <= 0.1:
        # (ln(1-y))^2/y * (1-y)^s = y + (1-s) y^2 + (11/12 - s + s(s-1)/2) y^3 + ...
        e1, e0 = _SERIES_CUT, lo
        c2, c3, c4 = 1.0 / 2.0, (1.0 - s) / 3.0, (11.0 / 12.0 - s + s * (s - 1.0) / 2.0) / 4.0
        head = c2 * (e1**2 - e0**2) + c3 * (e1**3 - e0**3) + c4 * (e1**4 - e0**4)
        lo_eff = _SERIES_CUT

    val, err = quad(integrand, lo_eff, 1.0, epsabs=tol * 1e-2, epsrel=1e-11, limit=300)
    if err > tol:
        raise QuadratureError(f"curvature integral error {err:.3e} exceeds {tol:.1e}")
    return float(head + val)


def complete_info(lam: float, beta: float, n: int) -> InfoMatrix:
    """Complete-data information for n units, entries linear in n."""
    if lam <= 0 or beta <= 0:
        raise ValueError("lam and beta must be positive")
    A = curvature_integral(0.0, lam / beta)
    a11 = n / (beta + lam) ** 2 + n / lam**2
    a12 = n / (beta + lam) ** 2
    a22 = n / (beta + lam) ** 2 - n / beta**2 + n * lam * (beta + lam) * A / beta**4
    return InfoMatrix(a11, a12, a22)


def missing_info(lam: float, beta: float, c: float, n: int, r: int,
                 variant: str = "derived") -> InfoMatrix:
    """Information lost to censoring: (n - r) times the truncated curvature.

    ``variant="derived"`` uses the square term (1/lam + c*exp(-beta c))^2 in
    the (beta, beta) entry, which matches the definitional expectation of
    the truncated log-density curvature (see tests).  ``variant="display"``
    keeps (1/lam + c - exp(-beta c))^2 instead, kept only for reference;
    it fails the definitional check and is dimensionally inconsistent.
    """
    if lam <= 0 or beta <= 0 or c <= 0:
        raise ValueError("lam, beta and c must be positive")
    if not (0 <= r <= n):
        raise ValueError("require 0 <= r <= n")
    if variant not in ("derived", "display"):
        raise ValueError(f"unknown variant {variant!r}")
    if n == r:
        return InfoMatrix(0.0, 0.0, 0.0)

    ec = np.exp(-beta * c)
    g = beta / lam + 1.0 - ec
    b11 = 1.0 / (beta + lam) ** 2 + 2.0 * beta / (lam**3 * g) - beta**2 / (lam**4 * g**2)
    b12 = 1.0 / (beta + lam) ** 2 - 1.0 / (lam**2 * g) + beta * (1.0 / lam + c * ec) / (lam**2 * g**2)

    sq = (1.0 / lam + c * ec) if variant == "derived" else (1.0 / lam + c - ec)
    B = curvature_integral(1.0 - ec, lam / beta)
    if ec < 1e-250:
        # exp(-lam c) underflows with exp(-beta c); B carries (1-y)^(s+1)
        # ~ exp(-beta c (s+1)), so fold the exponentials analytically.
        L = -beta * c
        t4 = (beta + lam) * np.exp(-beta * c + lam * c) * (
            L * L / (lam / beta + 1.0)
            - 2.0 * L / (lam / beta + 1.0) ** 2
            + 2.0 / (lam / beta + 1.0) ** 3
        ) / (beta**3 * g)
        # np.exp(-beta*c + lam*c) is safe: beta > lam is not guaranteed, but
        # beta*c - lam*c = c*lam*(alpha-1)/1 may be negative; either way the
        # combined exponent is far from overflow when ec < 1e-250 and alpha>0.
    else:
        t4 = (beta + lam) * B / (beta**3 * np.exp(-lam * c) * g)
    b22 = 1.0 / (beta + lam) ** 2 - c**2 * ec / g - sq**2 / g**2 + t4
    w = float(n - r)
    return InfoMatrix(w * b11, w * b12, w * b22)


def observed_info(lam: float, beta: float, data: CensoredData,
                  variant: str = "derived") -> InfoMatrix:
    """I_X = I_W - I_{W|X}, with c and (n, r) taken from the data record."""
    return complete_info(lam, beta, data.n) - missing_info(
        lam, beta, data.c, data.n, data.r, variant=variant
    )


def asymptotic_ci(lambda_hat: float, beta_hat: float, info: InfoMatrix,
                  level: float = 0.95) -> tuple[ConfidenceInterval, ConfidenceInterval]:
    """Normal-theory intervals for (lam, beta); lower endpoints clamped at 0."""
    M = info.as_array()
    det = M[0, 0] * M[1, 1] - M[0, 1] ** 2
    if not np.isfinite(det) or abs(det) < 1e-300:
        raise np.linalg.LinAlgError("information matrix is singular")
    V = np.linalg.inv(M)
    if V[0, 0] <= 0 or V[1, 1] <= 0:
        raise np.linalg.LinAlgError("information matrix is not positive definite")
    z = float(norm.ppf(0.5 + level / 2.0))
    ci_lam = ConfidenceInterval(max(0.0, lambda_hat - z * np.sqrt(V[0, 0])),
                                lambda_hat + z * np.sqrt(V[0, 0]), level)
    ci_beta = ConfidenceInterval(max(0.0, beta_hat - z * np.sqrt(V[1, 1])),
                                 beta_hat + z * np.sqrt(V[1, 1]), level)
    return ci_lam, ci_beta


def _bootstrap_one(args):
    rec, seed, parametric, alpha_hat, lam_hat = args
    data = CensoredData.from_record(rec)
    rng = np.random.default_rng(seed)
    try:
        if parametric:
            boot = generate_censored(WEParams(alpha_hat, lam_hat), data.scheme, rng)
        else:
            resampled = np.sort(rng.choice(data.times, size=data.n, replace=True))
            boot = apply_scheme(resampled, data.scheme, allow_ties=True)
        res = em_fit(boot, EMConfig(max_outer_iter=300))
        if not res.converged:
            return None
        return res.alpha_hat
    except (RuntimeError, ValueError, QuadratureError):
        return None


def bootstrap_ci_alpha(data: CensoredData, n_boot: int, level: float,
                       rng: np.random.Generator, *, parametric: bool = False,
                       n_jobs: int = 1) -> ConfidenceInterval:
    """Percentile bootstrap interval for alpha.

    Default is case resampling: draw n lifetimes with replacement from the
    observed times, sort, re-censor under the same scheme, refit by EM.
    ``parametric=True`` draws the replicates from the fitted WE law
    instead.  Replicates whose EM fails are dropped; more than 20% failed
    replicates is an error.
    """
    if n_boot < 100:
        raise ValueError(f"n_boot must be >= 100, got {n_boot!r}")
    fit = em_fit(data)
    seeds = rng.bit_generator.seed_seq.spawn(n_boot)
    rec = data.to_record()
    jobs = [(rec, s, parametric, fit.alpha_hat, fit.lambda_hat) for s in seeds]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_bootstrap_one, jobs, chunksize=32))
    else:
        results = [_bootstrap_one(j) for j in jobs]
    estimates = np.array([v for v in results if v is not None])
    if len(estimates) < 0.8 * n_boot:
        raise RuntimeError(
            f"bootstrap failed on {n_boot - len(estimates)}/{n_boot} replicates"
        )
    eta = (1.0 - level) / 2.0
    lo, hi = np.quantile(estimates, [eta, 1.0 - eta])
    return ConfidenceInterval(float(lo), float(hi), level)
