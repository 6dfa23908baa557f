"""Monte Carlo experiment engine for the censored-WE estimator study.

A cell fixes (n, R, T) and the true parameters, generates ``n_reps``
censored samples, fits the requested estimators on each, and reports the
average estimate, MSE against the truth and average interval length for
both lam and alpha (asymptotic intervals for the MLE, HPD for Gibbs,
none for Lindley).  The study grid covers n in {40, 50}, T in {1, 2} and
three failure quotas per combination, at true (alpha, lam) = (2.5, 3).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .censoring import HybridScheme, generate_censored
from .distribution import WEParams
from .em import EMConfig, QuadratureError, em_fit
from .fisher import observed_info
from .gibbs import GibbsConfig, gibbs_run, hpd_interval, posterior_mean
from .lindley import GammaPriors, lindley_estimate

__all__ = ["ExperimentCell", "CellSummary", "MethodStats", "run_cell",
           "reproduce_tables", "STUDY_GRID", "format_tables"]

ALL_METHODS = ("MLE", "Lindley", "Gibbs")

# (n, T) -> quota columns, as in the four-table study layout
STUDY_GRID = [
    (40, 1.0, (25, 30, 35)),
    (40, 2.0, (25, 30, 35)),
    (50, 1.0, (35, 40, 45)),
    (50, 2.0, (35, 40, 45)),
]

# shortened per-replicate chain; full-length chains are for single datasets
HARNESS_GIBBS = GibbsConfig(n_iter=3000, burn_in=500, grid_size=1024)


@dataclass(frozen=True)
class ExperimentCell:
    n: int
    R: int
    T: float
    true_params: WEParams
    n_reps: int
    methods: tuple[str, ...] = ALL_METHODS
    seed: int = 0
    level: float = 0.95

    def __post_init__(self):
        if self.n_reps < 1:
            raise ValueError("n_reps must be >= 1")
        unknown = set(self.methods) - set(ALL_METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")


@dataclass(frozen=True)
class MethodStats:
    """Average estimate, MSE and mean interval length for one parameter."""

    avg: float
    mse: float
    avg_length: float | None

    def cell_text(self) -> str:
        body = f"{self.avg:.3f}({self.mse:.3f})"
        return body + (f"{self.avg_length:.3f}" if self.avg_length is not None else "")


@dataclass(frozen=True)
class CellSummary:
    cell: ExperimentCell
    stats: dict  # (method, "lam"|"alpha") -> MethodStats
    n_used: int
    n_failed: int
    flagged: bool
    replicate_log: np.ndarray = field(repr=False)  # structured per-replicate record
    log_columns: tuple[str, ...] = field(repr=False, default=())


# per-replicate record columns (np.nan where a method was not requested)
_COLUMNS = ("mle_lam", "mle_alpha", "len_lam_asym", "len_alpha_asym",
            "lin_lam", "lin_alpha", "gib_lam", "gib_alpha",
            "len_lam_hpd", "len_alpha_hpd")


def _replicate(args):
    """Worker: one simulated dataset, all requested fits. None on failure."""
    (n, R, T, alpha, lam, methods, seed_seq, level) = args
    rng = np.random.default_rng(seed_seq)
    params = WEParams(alpha=alpha, lam=lam)
    scheme = HybridScheme(n=n, R=R, T=T)
    try:
        data = generate_censored(params, scheme, rng)
        fit = em_fit(data, EMConfig(max_outer_iter=300))
        if not fit.converged:
            return None
        out = dict.fromkeys(_COLUMNS, np.nan)
        z = float(norm.ppf(0.5 + level / 2.0))
        if "MLE" in methods:
            out["mle_lam"] = fit.lambda_hat
            out["mle_alpha"] = fit.alpha_hat
            info = observed_info(fit.lambda_hat, fit.beta_hat, data)
            V = np.linalg.inv(info.as_array())
            if V[0, 0] <= 0 or V[1, 1] <= 0:
                return None
            out["len_lam_asym"] = 2.0 * z * np.sqrt(V[0, 0])
            # delta method for alpha = beta/lam on the (lam, beta) covariance
            grad = np.array([-fit.beta_hat / fit.lambda_hat**2, 1.0 / fit.lambda_hat])
            var_alpha = float(grad @ V @ grad)
            if var_alpha <= 0:
                return None
            out["len_alpha_asym"] = 2.0 * z * np.sqrt(var_alpha)
        if "Lindley" in methods:
            est = lindley_estimate(fit.alpha_hat, fit.beta_hat, data,
                                   GammaPriors.noninformative())
            out["lin_lam"] = est.lam
            out["lin_alpha"] = est.alpha
        if "Gibbs" in methods:
            chain = gibbs_run(data, GammaPriors.noninformative(), HARNESS_GIBBS,
                              rng=rng, init=(fit.alpha_hat, fit.beta_hat))
            a_mean, _, lam_mean = posterior_mean(chain)
            out["gib_lam"] = lam_mean
            out["gib_alpha"] = a_mean
            a_dr, _, lam_dr = chain.retained()
            out["len_lam_hpd"] = hpd_interval(lam_dr, 1.0 - level).length
            out["len_alpha_hpd"] = hpd_interval(a_dr, 1.0 - level).length
        return tuple(out[k] for k in _COLUMNS)
    except (RuntimeError, ValueError, QuadratureError, np.linalg.LinAlgError):
        return None


def run_cell(cell: ExperimentCell, n_jobs: int = 1) -> CellSummary:
    """Run every replicate of one cell and aggregate in replicate order."""
    seeds = np.random.SeedSequence(cell.seed).spawn(cell.n_reps)
    jobs = [(cell.n, cell.R, cell.T, cell.true_params.alpha,
             cell.true_params.lam, cell.methods, s, cell.level)
            for s in seeds]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_replicate, jobs, chunksize=4))
    else:
        results = [_replicate(j) for j in jobs]

    rows = [r for r in results if r is not None]
    n_failed = cell.n_reps - len(rows)
    if not rows:
        raise RuntimeError("all replicates failed")
    log = np.asarray(rows, dtype=float)
    col = {name: log[:, i] for i, name in enumerate(_COLUMNS)}

    true_lam = cell.true_params.lam
    true_alpha = cell.true_params.alpha
    stats: dict = {}

    def put(method, param, est, length):
        truth = true_lam if param == "lam" else true_alpha
        stats[(method, param)] = MethodStats(
            avg=float(np.mean(est)),
            mse=float(np.mean((est - truth) ** 2)),
            avg_length=float(np.mean(length)) if length is not None else None,
        )

    if "MLE" in cell.methods:
        put("MLE", "lam", col["mle_lam"], col["len_lam_asym"])
        put("MLE", "alpha", col["mle_alpha"], col["len_alpha_asym"])
    if "Lindley" in cell.methods:
        put("Lindley", "lam", col["lin_lam"], None)
        put("Lindley", "alpha", col["lin_alpha"], None)
    if "Gibbs" in cell.methods:
        put("Gibbs", "lam", col["gib_lam"], col["len_lam_hpd"])
        put("Gibbs", "alpha", col["gib_alpha"], col["len_alpha_hpd"])

    return CellSummary(cell=cell, stats=stats, n_used=len(rows),
                       n_failed=n_failed, flagged=n_failed > 0.1 * cell.n_reps,
                       replicate_log=log, log_columns=_COLUMNS)


def reproduce_tables(reps: int, seed: int, methods: tuple[str, ...] = ALL_METHODS,
                     n_jobs: int = 1,
                     true_params: WEParams | None = None) -> list[CellSummary]:
    """All 12 study cells (4 tables x 3 quota columns), in grid order."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    true_params = true_params or WEParams(alpha=2.5, lam=3.0)
    cell_seeds = np.random.SeedSequence(seed).generate_state(12)
    summaries = []
    i = 0
    for n, T, quotas in STUDY_GRID:
        for R in quotas:
            cell = ExperimentCell(n=n, R=R, T=T, true_params=true_params,
                                  n_reps=reps, methods=methods,
                                  seed=int(cell_seeds[i]))
            summaries.append(run_cell(cell, n_jobs=n_jobs))
            i += 1
    return summaries


def summaries_to_rows(summaries: list[CellSummary]) -> list[dict]:
    """Flat records (one per cell/method/parameter) for CSV export."""
    rows = []
    for s in summaries:
        for (method, param), ms in s.stats.items():
            rows.append({
                "n": s.cell.n, "R": s.cell.R, "T": s.cell.T,
                "method": method, "parameter": param,
                "avg": ms.avg, "mse": ms.mse,
                "avg_length": "" if ms.avg_length is None else ms.avg_length,
                "n_used": s.n_used, "n_failed": s.n_failed,
                "flagged": s.flagged,
            })
    return rows


def format_tables(summaries: list[CellSummary]) -> str:
    """Text tables in the avg(MSE)length layout, lam row above alpha row."""
    by_key: dict = {}
    for s in summaries:
        by_key.setdefault((s.cell.n, s.cell.T), []).append(s)
    blocks = []
    for (n, T), cells in by_key.items():
        cells.sort(key=lambda s: s.cell.R)
        methods = [m for m in ALL_METHODS if any((m, "lam") in s.stats for s in cells)]
        lines = [f"n={n}, T={T:g}",
                 "{:12s}  {}".format("", "  ".join(f"R={s.cell.R:<18}" for s in cells))]
        for m in methods:
            for param in ("lam", "alpha"):
                label = m if param == "lam" else ""
                vals = "  ".join(f"{s.stats[(m, param)].cell_text():<20}" for s in cells)
                lines.append(f"{label:12s}  {vals}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
