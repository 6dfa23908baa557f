"""Lindley approximation to the squared-error Bayes estimators.

The posterior mean of a smooth function u(alpha, beta) is expanded to
second order around the MLE.  All six distinct log-likelihood derivatives
have closed forms; the prior enters only through the gradient of its log.
One expansion routine serves alpha, beta and lam = beta/alpha, so the
specialized forms cannot drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .censoring import CensoredData

__all__ = ["GammaPriors", "LindleyTerms", "LindleyEstimate", "lindley_terms", "lindley_estimate"]


@dataclass(frozen=True)
class GammaPriors:
    """Independent gamma priors: beta ~ Gamma(w2, rate w1), alpha ~ Gamma(w4, rate w3).

    All-zero hyperparameters give the flat improper ("non-informative") prior.
    """

    w1: float = 0.0
    w2: float = 0.0
    w3: float = 0.0
    w4: float = 0.0

    def __post_init__(self):
        for name in ("w1", "w2", "w3", "w4"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")

    @classmethod
    def noninformative(cls) -> "GammaPriors":
        return cls(0.0, 0.0, 0.0, 0.0)

    @classmethod
    def informative_preset(cls) -> "GammaPriors":
        """Hyperparameters of the informative analysis on the guinea-pig data.

        alpha ~ Gamma(shape 3, rate 1.5) (mean 2) and beta ~ Gamma(shape
        0.01, rate 1).  This assignment reproduces the published estimates;
        note the source lists the same four numbers in the reverse order,
        which would put a mean-100 prior on alpha and cannot match them.
        """
        return cls(w1=1.0, w2=0.01, w3=1.5, w4=3.0)

    def to_record(self) -> dict:
        return {"w1": self.w1, "w2": self.w2, "w3": self.w3, "w4": self.w4}


@dataclass(frozen=True)
class LindleyTerms:
    """Log-likelihood derivatives at the MLE plus prior/covariance pieces.

    ``l_aab`` is the common value of the third derivatives with two alphas,
    ``l_abb`` with two betas (all mixed orders coincide for smooth l).
    """

    l_aa: float
    l_ab: float
    l_bb: float
    l_aaa: float
    l_aab: float
    l_abb: float
    l_bbb: float
    rho_a: float
    rho_b: float
    s_aa: float
    s_ab: float
    s_bb: float


@dataclass(frozen=True)
class LindleyEstimate:
    alpha: float
    beta: float
    lam: float
    positive: bool  # False flags a negative component (reported, not repaired)

    def to_record(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "lambda": self.lam,
                "positive": self.positive}


def lindley_terms(alpha_hat: float, beta_hat: float, data: CensoredData,
                  priors: GammaPriors) -> LindleyTerms:
    """Evaluate every derivative of the expansion at the MLE."""
    if alpha_hat <= 0 or beta_hat <= 0:
        raise ValueError("MLE inputs must be positive")
    a, b = alpha_hat, beta_hat
    n, r, c = data.n, data.r, data.c
    x = data.times
    t_sum = data.sum_times + (n - r) * c
    ec = np.exp(-b * c)
    g = a + 1.0 - ec
    ex = np.exp(-b * x)

    l_aa = -r / (a + 1.0) ** 2 + (n + r) / a**2 - 2.0 * b * t_sum / a**3 - (n - r) / g**2
    l_ab = t_sum / a**2 - c * (n - r) * ec / g**2
    l_bb = (-r / b**2 - c**2 * (n - r) * (a + 1.0) * ec / g**2
            - float(np.sum(x**2 * ex / (1.0 - ex) ** 2)))
    l_aaa = (2.0 * r / (a + 1.0) ** 3 - 2.0 * (n + r) / a**3
             + 6.0 * b * t_sum / a**4 + 2.0 * (n - r) / g**3)
    l_aab = -2.0 * t_sum / a**3 + 2.0 * c * (n - r) * ec / g**3
    l_abb = c**2 * (n - r) * ec * (a + 1.0 + ec) / g**3
    l_bbb = (2.0 * r / b**3 + c**3 * (n - r) * (a + 1.0) * ec * (a + 1.0 + ec) / g**3
             + float(np.sum(x**3 * ex * (1.0 + ex) / (1.0 - ex) ** 3)))

    rho_b = (priors.w2 - 1.0) / b - priors.w1
    rho_a = (priors.w4 - 1.0) / a - priors.w3

    H = np.array([[-l_aa, -l_ab], [-l_ab, -l_bb]])
    det = H[0, 0] * H[1, 1] - H[0, 1] ** 2
    if not np.isfinite(det) or det <= 0:
        raise np.linalg.LinAlgError("negative Hessian is singular or indefinite at the MLE")
    S = np.linalg.inv(H)
    return LindleyTerms(
        l_aa=float(l_aa), l_ab=float(l_ab), l_bb=float(l_bb),
        l_aaa=float(l_aaa), l_aab=float(l_aab), l_abb=float(l_abb), l_bbb=float(l_bbb),
        rho_a=float(rho_a), rho_b=float(rho_b),
        s_aa=float(S[0, 0]), s_ab=float(S[0, 1]), s_bb=float(S[1, 1]),
    )


def expand(u: float, u_a: float, u_b: float, u_aa: float, u_ab: float,
           u_bb: float, t: LindleyTerms) -> float:
    """The two-parameter Lindley expansion for an arbitrary smooth u."""
    first = 0.5 * (
        (u_aa + 2.0 * u_a * t.rho_a) * t.s_aa
        + (u_ab + 2.0 * u_b * t.rho_a) * t.s_ab
        + (u_ab + 2.0 * u_a * t.rho_b) * t.s_ab
        + (u_bb + 2.0 * u_b * t.rho_b) * t.s_bb
    )
    p = u_a * t.s_aa + u_b * t.s_ab
    q = u_a * t.s_ab + u_b * t.s_bb
    second = 0.5 * (
        p * (t.l_aaa * t.s_aa + 2.0 * t.l_aab * t.s_ab + t.l_abb * t.s_bb)
        + q * (t.l_aab * t.s_aa + 2.0 * t.l_abb * t.s_ab + t.l_bbb * t.s_bb)
    )
    return u + first + second


def lindley_estimate(alpha_hat: float, beta_hat: float, data: CensoredData,
                     priors: GammaPriors) -> LindleyEstimate:
    """Approximate posterior means of (alpha, beta, lam) under squared error.

    Must be called with a converged MLE; a negative component is possible
    for extreme data and is flagged rather than truncated.
    """
    t = lindley_terms(alpha_hat, beta_hat, data, priors)
    a, b = alpha_hat, beta_hat
    alpha_t = expand(a, 1.0, 0.0, 0.0, 0.0, 0.0, t)
    beta_t = expand(b, 0.0, 1.0, 0.0, 0.0, 0.0, t)
    lam_t = expand(b / a, -b / a**2, 1.0 / a, 2.0 * b / a**3, -1.0 / a**2, 0.0, t)
    return LindleyEstimate(
        alpha=float(alpha_t), beta=float(beta_t), lam=float(lam_t),
        positive=bool(alpha_t > 0 and beta_t > 0 and lam_t > 0),
    )
