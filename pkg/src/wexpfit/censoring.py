"""Type-II hybrid censoring: scheme definition and case resolution.

An experiment with ``n`` units stops at ``max(x_{R:n}, T)``, so the sample
takes one of three shapes:

* case I   - fewer than R failures by T: observe the first R, censor at x_{R:n};
* case II  - d failures by T with R <= d < n: observe the first d, censor at T;
* case III - all n fail before T: complete sample, nominal censor point T.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distribution import WEParams, sample

__all__ = ["HybridScheme", "CensoredData", "apply_scheme", "generate_censored"]


@dataclass(frozen=True)
class HybridScheme:
    """Scheme (n, R, T): sample size, failure quota, clock limit."""

    n: int
    R: int
    T: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n!r}")
        if not (1 <= self.R <= self.n):
            raise ValueError(f"R must satisfy 1 <= R <= n, got R={self.R!r}, n={self.n!r}")
        if not (self.T > 0 and np.isfinite(self.T)):
            raise ValueError(f"T must be positive and finite, got {self.T!r}")


@dataclass(frozen=True)
class CensoredData:
    """An observed hybrid-censored sample with its resolved case.

    ``times`` holds the r observed order statistics, ``c`` the effective
    censor point (last observed time in case I, T otherwise).
    """

    scheme: HybridScheme
    times: np.ndarray
    r: int
    c: float
    case: str
    # derived, cached for the estimators
    sum_times: float = field(init=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if len(times) != self.r:
            raise ValueError("times length must equal r")
        if self.case not in ("I", "II", "III"):
            raise ValueError(f"unknown case {self.case!r}")
        object.__setattr__(self, "sum_times", float(times.sum()))

    @property
    def n(self) -> int:
        return self.scheme.n

    def to_record(self) -> dict:
        """JSON-ready record: {n, R, T, case, r, c, times[]}."""
        return {
            "n": self.scheme.n,
            "R": self.scheme.R,
            "T": self.scheme.T,
            "case": self.case,
            "r": self.r,
            "c": self.c,
            "times": [float(t) for t in self.times],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "CensoredData":
        scheme = HybridScheme(n=int(rec["n"]), R=int(rec["R"]), T=float(rec["T"]))
        return cls(scheme=scheme, times=np.asarray(rec["times"], dtype=float),
                   r=int(rec["r"]), c=float(rec["c"]), case=str(rec["case"]))


def apply_scheme(full_sorted_sample, scheme: HybridScheme,
                 allow_ties: bool = False) -> CensoredData:
    """Resolve the observation case for a complete sorted sample.

    A unit failing exactly at T counts as failed before T (closed test
    interval keeps the case-II failure count well defined).  Ties are
    rejected by default: the continuous model assumes distinct order
    statistics.  Recorded data is often rounded, so ``allow_ties=True``
    relaxes the check to nondecreasing (used for file input and bootstrap
    resamples).
    """
    x = np.asarray(full_sorted_sample, dtype=float)
    if len(x) != scheme.n:
        raise ValueError(f"sample length {len(x)} != scheme n {scheme.n}")
    if allow_ties:
        if np.any(np.diff(x) < 0):
            raise ValueError("sample must be sorted")
    elif np.any(np.diff(x) <= 0):
        raise ValueError("sample must be strictly increasing (no ties)")
    if x[0] <= 0 or not np.all(np.isfinite(x)):
        raise ValueError("lifetimes must be positive and finite")

    n, R, T = scheme.n, scheme.R, scheme.T
    d = int(np.sum(x <= T))
    if d < R:
        r, c, case = R, float(x[R - 1]), "I"
    elif d < n:
        r, c, case = d, float(T), "II"
    else:
        r, c, case = n, float(T), "III"
    return CensoredData(scheme=scheme, times=x[:r].copy(), r=r, c=c, case=case)


def generate_censored(params: WEParams, scheme: HybridScheme,
                      rng: np.random.Generator) -> CensoredData:
    """Simulate a censored dataset: draw n lifetimes, sort, apply the scheme.

    Ties have probability zero under the continuous model; in the
    (floating-point) event of one, the sample is redrawn.
    """
    for _ in range(100):
        x = np.sort(sample(params, rng, scheme.n))
        if np.all(np.diff(x) > 0):
            return apply_scheme(x, scheme)
    raise RuntimeError("could not draw a tie-free sample")  # pragma: no cover
