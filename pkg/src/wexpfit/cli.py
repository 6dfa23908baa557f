"""Command-line frontend.

Subcommands:

* ``fit``      EM maximum likelihood plus information-based intervals.
* ``bayes``    Lindley approximation and Gibbs sampling with HPD intervals.
* ``analyze``  Everything on one dataset, including density-curve export.
* ``simulate`` One Monte Carlo cell of the estimator study.
* ``tables``   The full 12-cell study grid.

Reports are schema-stable JSON by default (byte-identical under a fixed
seed); ``--format text`` prints a human summary and ``--format csv`` flat
rows.  Failures exit nonzero with a JSON error object on stderr.
All behaviour is controlled by explicit flags; no environment variables.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass

import click
import numpy as np

from .censoring import CensoredData, HybridScheme, apply_scheme
from .datasets import ingest
from .distribution import WEParams, pdf, quantile
from .em import em_fit
from .fisher import asymptotic_ci, bootstrap_ci_alpha, observed_info
from .gibbs import GibbsConfig, gibbs_run, hpd_interval, posterior_mean
from .harness import (ALL_METHODS, ExperimentCell, format_tables,
                      reproduce_tables, run_cell, summaries_to_rows)
from .lindley import GammaPriors, lindley_estimate

CURVE_POINTS = 400


@dataclass(frozen=True)
class AnalysisConfig:
    source: str
    R: int
    T: float
    priors: GammaPriors
    methods: tuple[str, ...] = ALL_METHODS
    seed: int = 0
    level: float = 0.95
    n_boot: int = 1000
    gibbs: GibbsConfig = GibbsConfig()
    curves: bool = True
    diagnostics: bool = False


def load_censored(source: str, R: int, T: float) -> CensoredData:
    times = ingest(source)
    scheme = HybridScheme(n=len(times), R=R, T=T)
    return apply_scheme(times, scheme, allow_ties=True)


def fit_report(data: CensoredData, config: AnalysisConfig) -> dict:
    fit = em_fit(data)
    info = observed_info(fit.lambda_hat, fit.beta_hat, data)
    ci_lam, ci_beta = asymptotic_ci(fit.lambda_hat, fit.beta_hat, info, config.level)
    rng = np.random.default_rng(config.seed)
    report = {
        "mle": fit.to_record(),
        "observed_info": {"m11": info.m11, "m12": info.m12, "m22": info.m22,
                          "positive_definite": info.is_positive_definite()},
        "ci_lambda": ci_lam.to_record(),
        "ci_beta": ci_beta.to_record(),
    }
    if config.n_boot:
        report["ci_alpha_bootstrap"] = {
            **bootstrap_ci_alpha(data, config.n_boot, config.level, rng).to_record(),
            "n_boot": config.n_boot,
        }
    return report


def bayes_report(data: CensoredData, config: AnalysisConfig) -> dict:
    fit = em_fit(data)
    if not fit.converged:
        raise RuntimeError("EM did not converge; Bayes estimates need a converged MLE")
    lin = lindley_estimate(fit.alpha_hat, fit.beta_hat, data, config.priors)
    gconf = GibbsConfig(n_iter=config.gibbs.n_iter, burn_in=config.gibbs.burn_in,
                        seed=config.seed, grid_size=config.gibbs.grid_size,
                        thinning=config.gibbs.thinning)
    chain = gibbs_run(data, config.priors, gconf,
                      init=(fit.alpha_hat, fit.beta_hat))
    a_mean, b_mean, lam_mean = posterior_mean(chain)
    a_dr, b_dr, lam_dr = chain.retained()
    eta = 1.0 - config.level
    report = {
        "priors": config.priors.to_record(),
        "lindley": lin.to_record(),
        "gibbs": {
            "mean_alpha": a_mean,
            "mean_beta": b_mean,
            "mean_lambda": lam_mean,
            "hpd_alpha": hpd_interval(a_dr, eta).to_record(),
            "hpd_beta": hpd_interval(b_dr, eta).to_record(),
            "hpd_lambda": hpd_interval(lam_dr, eta).to_record(),
            "n_iter": gconf.n_iter,
            "burn_in": gconf.burn_in,
            "acceptance": {k: v for k, v in chain.diagnostics.items()
                           if k.endswith("_rate") or k == "backend"},
        },
    }
    if config.diagnostics:
        report["gibbs"]["diagnostics"] = {
            k: v for k, v in chain.diagnostics.items() if isinstance(v, (int, float))
        }
        from .lindley import lindley_terms

        terms = lindley_terms(fit.alpha_hat, fit.beta_hat, data, config.priors)
        report["lindley_terms"] = {k: getattr(terms, k) for k in (
            "l_aa", "l_ab", "l_bb", "l_aaa", "l_aab", "l_abb", "l_bbb",
            "rho_a", "rho_b", "s_aa", "s_ab", "s_bb")}
    return report, chain


def density_curves(estimates: dict) -> dict:
    """Fitted pdf on a shared grid, one curve per available method."""
    ref = estimates.get("mle") or next(iter(estimates.values()))
    grid_top = quantile(ref, 0.999)
    x = np.linspace(0.0, grid_top, CURVE_POINTS)
    curves = {"x": [float(v) for v in x]}
    for name, params in estimates.items():
        curves[name] = [float(v) for v in pdf(params, x)]
    return curves


def analyze(config: AnalysisConfig) -> dict:
    """Full report: censoring record, MLE block, Bayes block, curves."""
    data = load_censored(config.source, config.R, config.T)
    report = {
        "dataset": {"source": config.source, "n": data.n},
        "censoring": data.to_record(),
        "seed": config.seed,
        "level": config.level,
    }
    chain = None
    if "MLE" in config.methods:
        report.update(fit_report(data, config))
    if {"Lindley", "Gibbs"} & set(config.methods):
        bayes, chain = bayes_report(data, config)
        report.update(bayes)
    if config.curves:
        est = {}
        if "mle" in report:
            m = report["mle"]
            est["mle"] = WEParams(m["alpha"], m["lambda"])
        if "lindley" in report and report["lindley"]["positive"]:
            est["lindley"] = WEParams(report["lindley"]["alpha"],
                                      report["lindley"]["lambda"])
        if "gibbs" in report:
            g = report["gibbs"]
            est["gibbs"] = WEParams(g["mean_alpha"], g["mean_lambda"])
        if est:
            report["density_curves"] = density_curves(est)
    report["_chain"] = chain  # stripped before serialization
    return report


def _emit(report: dict, fmt: str, output) -> None:
    if fmt == "json":
        output.write(json.dumps(report, indent=2, sort_keys=True))
        output.write("\n")
    elif fmt == "csv":
        writer = csv.writer(output)
        writer.writerow(["key", "value"])
        for key, value in sorted(_flatten(report).items()):
            writer.writerow([key, value])
    else:
        for key, value in sorted(_flatten(report).items()):
            output.write(f"{key} = {value}\n")


def _flatten(obj, prefix=""):
    flat = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            flat.update(_flatten(v, f"{prefix}{k}."))
    elif isinstance(obj, (list, tuple)):
        flat[prefix.rstrip(".")] = json.dumps(obj)
    else:
        flat[prefix.rstrip(".")] = obj
    return flat


def _write_chain_csv(chain, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "alpha", "beta", "lambda"])
        for row in chain.to_rows():
            writer.writerow(row)


def _error_exit(exc: BaseException) -> None:
    obj = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    sys.stderr.write(json.dumps(obj, sort_keys=True) + "\n")
    sys.exit(1)


_common = [
    click.option("--data", "source", default="bjerkedal", show_default=True,
                 help="Builtin dataset name or path to a lifetime file."),
    click.option("-R", "--quota", "R", type=int, required=True,
                 help="Failure quota R of the hybrid scheme."),
    click.option("-T", "--clock", "T", type=float, required=True,
                 help="Clock limit T of the hybrid scheme."),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--level", type=float, default=0.95, show_default=True),
    click.option("--output", "-o", type=click.Path(writable=True), default=None,
                 help="Write the report here instead of stdout."),
    click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]),
                 default="json", show_default=True),
]

_prior_opts = [
    click.option("--w1", type=float, default=0.0, show_default=True,
                 help="Rate of the beta prior."),
    click.option("--w2", type=float, default=0.0, show_default=True,
                 help="Shape of the beta prior."),
    click.option("--w3", type=float, default=0.0, show_default=True,
                 help="Rate of the alpha prior."),
    click.option("--w4", type=float, default=0.0, show_default=True,
                 help="Shape of the alpha prior."),
    click.option("--informative", is_flag=True,
                 help="Use the informative preset (overrides --w1..--w4)."),
]


def _apply(options):
    def wrap(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return wrap


def _priors_from(w1, w2, w3, w4, informative) -> GammaPriors:
    if informative:
        return GammaPriors.informative_preset()
    return GammaPriors(w1=w1, w2=w2, w3=w3, w4=w4)


def _finish(report, fmt, output):
    report.pop("_chain", None)
    if output:
        with open(output, "w") as fh:
            _emit(report, fmt, fh)
    else:
        _emit(report, fmt, sys.stdout)


@click.group()
def cli():
    """Weighted exponential lifetime estimation under hybrid censoring."""


@cli.command()
@_apply(_common)
@click.option("--n-boot", type=int, default=1000, show_default=True,
              help="Bootstrap replicates for the alpha interval (0 disables).")
def fit(source, R, T, seed, level, output, fmt, n_boot):
    """Maximum likelihood fit with information-based intervals."""
    config = AnalysisConfig(source=source, R=R, T=T, priors=GammaPriors(),
                            seed=seed, level=level, n_boot=n_boot,
                            methods=("MLE",), curves=False)
    data = load_censored(source, R, T)
    report = {"censoring": data.to_record(), "seed": seed}
    report.update(fit_report(data, config))
    _finish(report, fmt, output)


@cli.command()
@_apply(_common)
@_apply(_prior_opts)
@click.option("--n-iter", type=int, default=11000, show_default=True)
@click.option("--burn-in", type=int, default=1000, show_default=True)
@click.option("--chain-out", type=click.Path(writable=True), default=None,
              help="Also export the chain as CSV (iter, alpha, beta, lambda).")
@click.option("--diagnostics", is_flag=True, help="Include sampler internals.")
def bayes(source, R, T, seed, level, output, fmt, w1, w2, w3, w4,
          informative, n_iter, burn_in, chain_out, diagnostics):
    """Lindley and Gibbs Bayes estimates with HPD intervals."""
    config = AnalysisConfig(
        source=source, R=R, T=T, priors=_priors_from(w1, w2, w3, w4, informative),
        seed=seed, level=level, gibbs=GibbsConfig(n_iter=n_iter, burn_in=burn_in),
        methods=("Lindley", "Gibbs"), curves=False, diagnostics=diagnostics)
    data = load_censored(source, R, T)
    report = {"censoring": data.to_record(), "seed": seed}
    bayes_block, chain = bayes_report(data, config)
    report.update(bayes_block)
    if chain_out:
        _write_chain_csv(chain, chain_out)
    _finish(report, fmt, output)


@cli.command(name="analyze")
@_apply(_common)
@_apply(_prior_opts)
@click.option("--n-boot", type=int, default=1000, show_default=True)
@click.option("--n-iter", type=int, default=11000, show_default=True)
@click.option("--burn-in", type=int, default=1000, show_default=True)
@click.option("--curves/--no-curves", default=True, show_default=True,
              help="Include the fitted-density curve table.")
@click.option("--chain-out", type=click.Path(writable=True), default=None)
@click.option("--diagnostics", is_flag=True)
def analyze_cmd(source, R, T, seed, level, output, fmt, w1, w2, w3, w4,
                informative, n_boot, n_iter, burn_in, curves, chain_out,
                diagnostics):
    """Run every estimator on one dataset and emit the full report."""
    config = AnalysisConfig(
        source=source, R=R, T=T, priors=_priors_from(w1, w2, w3, w4, informative),
        seed=seed, level=level, n_boot=n_boot,
        gibbs=GibbsConfig(n_iter=n_iter, burn_in=burn_in),
        curves=curves, diagnostics=diagnostics)
    report = analyze(config)
    chain = report.get("_chain")
    if chain_out and chain is not None:
        _write_chain_csv(chain, chain_out)
    _finish(report, fmt, output)


@cli.command()
@click.option("-n", "--size", type=int, required=True, help="Sample size n.")
@click.option("-R", "--quota", "R", type=int, required=True)
@click.option("-T", "--clock", "T", type=float, required=True)
@click.option("--alpha", type=float, default=2.5, show_default=True)
@click.option("--lam", type=float, default=3.0, show_default=True)
@click.option("--reps", type=int, default=200, show_default=True)
@click.option("--methods", default="MLE,Lindley,Gibbs", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--output", "-o", type=click.Path(writable=True), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]),
              default="json", show_default=True)
def simulate(size, R, T, alpha, lam, reps, methods, seed, jobs, output, fmt):
    """Monte Carlo study of one (n, R, T) cell at given true parameters."""
    cell = ExperimentCell(n=size, R=R, T=T,
                          true_params=WEParams(alpha=alpha, lam=lam),
                          n_reps=reps, methods=tuple(methods.split(",")),
                          seed=seed)
    summary = run_cell(cell, n_jobs=jobs)
    rows = summaries_to_rows([summary])
    _emit_rows(rows, [summary], fmt, output)


@cli.command()
@click.option("--reps", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--methods", default="MLE,Lindley,Gibbs", show_default=True)
@click.option("--output", "-o", type=click.Path(writable=True), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]),
              default="text", show_default=True)
def tables(reps, seed, jobs, methods, output, fmt):
    """Reproduce the whole 12-cell study grid."""
    summaries = reproduce_tables(reps, seed, methods=tuple(methods.split(",")),
                                 n_jobs=jobs)
    rows = summaries_to_rows(summaries)
    _emit_rows(rows, summaries, fmt, output)


def _emit_rows(rows, summaries, fmt, output) -> None:
    buf = io.StringIO()
    if fmt == "json":
        buf.write(json.dumps(rows, indent=2, sort_keys=True))
        buf.write("\n")
    elif fmt == "csv":
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    else:
        buf.write(format_tables(summaries))
    if output:
        with open(output, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def main():
    try:
        cli(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(130)
    except click.ClickException as exc:
        _error_exit(exc)
    except Exception as exc:  # noqa: BLE001 - boundary: report and exit nonzero
        _error_exit(exc)


if __name__ == "__main__":
    main()
