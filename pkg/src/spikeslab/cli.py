"""Command-line driver: ``spikeslab {fit,simulate,analytic,diagnose}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import curves
from .diagnostics import iact_initial_monotone, summarize
from .exceptions import DimensionMismatchError, SingularDesignError, ZeroVarianceError
from .io import InputError, read_table, standardize, write_report, write_rows
from .model import PRIOR_NAMES, McmcConfig, default_prior, load_dataset
from .samplers import run_mcmc
from .simulation import (correlated_scenario, independent_scenario, run_study,
                         signal_sweep_scenario)

logger = logging.getLogger("spikeslab")

SEED_ENV = "SPIKESLAB_SEED"
SCENARIOS = {"independent": independent_scenario, "correlated": correlated_scenario,
             "signal-sweep": signal_sweep_scenario}


def _add_prior_flags(p, multi=False):
    if multi:
        p.add_argument("--prior", nargs="+", choices=PRIOR_NAMES, default=list(PRIOR_NAMES))
    else:
        p.add_argument("--prior", choices=PRIOR_NAMES, default="dirac-i")
    p.add_argument("--c", type=float, default=1.0, help="slab variance (default 1)")
    p.add_argument("--g", type=float, help="g-slab scale (default N*c)")
    p.add_argument("--b", type=float, help="f-slab likelihood fraction (default 1/g)")
    p.add_argument("--V", type=float, help="SSVS slab variance (default c)")
    p.add_argument("--r", type=float, help="spike/slab variance ratio (default 1e-4)")
    p.add_argument("--nu", type=float, help="NMIG shape (default 5)")
    p.add_argument("--Q", type=float, help="NMIG scale (default 4)")
    p.add_argument("--a-omega", type=float, default=1.0)
    p.add_argument("--b-omega", type=float, default=1.0)


def _add_mcmc_flags(p):
    p.add_argument("--iterations", type=int, default=5000)
    p.add_argument("--burnin", type=int, default=1000)
    p.add_argument("--warmup-full", type=int, default=500)
    p.add_argument("--seed", type=int, default=None,
                   help=f"RNG seed (default: ${SEED_ENV} or 0)")


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(SEED_ENV, f"not an integer: {env!r}") from None


def _mcmc_config(args, store_traces=True):
    try:
        return McmcConfig(M=args.iterations, burn_in=args.burnin,
                          full_model_warmup=args.warmup_full, seed=_seed(args),
                          store_traces=store_traces)
    except ValueError as exc:
        raise InputError("iterations/burnin/warmup-full", str(exc)) from None


def _prior(args, name, N, c=None):
    try:
        return default_prior(name, N, c=args.c if c is None else c, g=args.g, b=args.b,
                             V=args.V, r=args.r, nu=args.nu, Q=args.Q,
                             a_omega=args.a_omega, b_omega=args.b_omega)
    except ValueError as exc:
        raise InputError("prior", str(exc)) from None


def _slab_from_args(args, N):
    if not args.prior.startswith("dirac"):
        raise InputError("prior", "analytic curves need a Dirac slab")
    return _prior(args, args.prior, N)


def _load(args):
    covs = args.covariates.split(",") if args.covariates else None
    frame, dropped = read_table(args.data, args.response, covs)
    if dropped:
        logger.info("excluded %d rows with missing values", dropped)
    covs = covs or [c for c in frame.columns if c != args.response]
    analysis = standardize(frame, args.response, covs,
                           standardize_covariates=not args.no_standardize,
                           standardize_response=args.standardize_response)
    analysis.n_dropped = dropped
    try:
        data = load_dataset(analysis.y, analysis.X)
    except ZeroVarianceError as exc:
        raise InputError(analysis.names[exc.column], "column has zero variance") from None
    except DimensionMismatchError as exc:
        raise InputError("data", str(exc)) from None
    return data, analysis


def cmd_fit(args):
    data, analysis = _load(args)
    cfg = _mcmc_config(args, store_traces=True)
    prior = _prior(args, args.prior, data.N)
    chain = run_mcmc(data, prior, cfg)
    report = summarize(chain, names=analysis.names)
    config = {
        "command": "fit", "data": str(args.data), "response": args.response,
        "covariates": analysis.names, "prior": prior.name,
        "hyperparameters": {k: getattr(prior, k) for k in prior.__dataclass_fields__},
        "iterations": cfg.M, "burnin": cfg.burn_in, "warmup_full": cfg.full_model_warmup,
        "seed": cfg.seed, "N": data.N, "rows_excluded_missing": analysis.n_dropped,
        "standardization": analysis.scaling, "response_scale": analysis.response_scale,
    }
    paths = write_report(report, args.out_dir, args.format, config)
    if args.traces:
        out = Path(args.out_dir)
        pd.DataFrame(chain.incl_prob, columns=analysis.names).to_csv(
            out / "trace_incl_prob.csv", index=False)
        pd.DataFrame(chain.alpha_draws, columns=analysis.names).assign(
            sigma2=chain.sigma2_draws, omega=chain.omega_draws).to_csv(
            out / "trace_params.csv", index=False)
    for p in paths:
        print(p)
    return 0


def cmd_simulate(args):
    scenario = SCENARIOS[args.scenario](replications=args.replications, seed=_seed(args))
    cfg = _mcmc_config(args, store_traces=False)
    priors = [_prior(args, name, scenario.N) for name in args.prior]
    result = run_study(scenario, priors, cfg, n_jobs=args.jobs)
    out = Path(args.out_dir)
    for fname, rows in (("inclusion_counts.csv", result.inclusion_count_table()),
                        ("mean_inclusion.csv", result.mean_inclusion_table()),
                        ("efficiency.csv", result.efficiency_table())):
        print(write_rows(rows, out / fname))
    return 0


def cmd_analytic(args):
    grid = [float(v) for v in args.grid.split(",")] if args.grid else None
    omega = args.omega
    if args.kind == "orthogonal":
        slab = _slab_from_args(args, args.N)
        rows = curves.orthogonal_curve(grid or np.linspace(0, 1.5, 31), slab, N=args.N,
                                       s2=args.s2, sigma2=args.sigma2, omega=omega,
                                       a_omega=args.a_omega, b_omega=args.b_omega)
    elif args.kind == "correlated-pair":
        slab = _slab_from_args(args, args.N)
        default = np.linspace(-1, 1, 41) if args.vary == "alpha" else np.linspace(0, 0.95, 20)
        rows = curves.correlated_pair_curve(
            grid or default, slab, vary=args.vary, alpha_hat2=args.alpha_hat,
            r12=args.r12, r_y1=args.r_y1, s_y=args.s_y, N=args.N, sigma2=args.sigma2,
            omega=omega, a_omega=args.a_omega, b_omega=args.b_omega)
    else:
        if not args.data:
            raise InputError("data", "inclusion-path needs --data and --response")
        data, analysis = _load(args)
        cfg = _mcmc_config(args, store_traces=False)
        rows = curves.inclusion_path(
            data, args.prior, cfg, slab_variances=grid or curves.PATH_SLAB_VARIANCES,
            names=analysis.names, r=args.r, nu=args.nu, Q=args.Q,
            a_omega=args.a_omega, b_omega=args.b_omega)
    print(write_rows(rows, Path(args.out_dir) / f"curve_{args.kind}.csv"))
    return 0


def cmd_diagnose(args):
    path = Path(args.traces)
    if not path.exists():
        raise InputError("traces", f"file not found: {path}")
    frame = pd.read_csv(path)
    rows = []
    for col in frame.columns:
        x = pd.to_numeric(frame[col], errors="coerce").dropna().to_numpy()
        tau = iact_initial_monotone(x)
        rows.append({"series": col, "mean": float(x.mean()), "iact": tau,
                     "ess": None if tau is None else len(x) / tau})
    print(write_rows(rows, Path(args.out_dir) / "diagnostics.csv"))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spikeslab", description="Bayesian variable selection with spike-and-slab priors")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_flags(p, required=True):
        p.add_argument("--data", required=required, help="CSV file with a header row")
        p.add_argument("--response", required=required)
        p.add_argument("--covariates", help="comma-separated column names (default: all others)")
        p.add_argument("--standardize-response", action="store_true",
                       help="divide y by the full-model residual standard deviation")
        p.add_argument("--no-standardize", action="store_true",
                       help="center metric covariates without scaling them")

    p = sub.add_parser("fit", help="run variable selection on a CSV data set")
    data_flags(p)
    _add_prior_flags(p)
    _add_mcmc_flags(p)
    p.add_argument("--out-dir", default="out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--traces", action="store_true", help="also write per-iteration traces")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="replication study on a simulated design")
    p.add_argument("--scenario", choices=tuple(SCENARIOS), default="independent")
    p.add_argument("--replications", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1)
    _add_prior_flags(p, multi=True)
    _add_mcmc_flags(p)
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analytic", help="emit inclusion-probability curves")
    p.add_argument("kind", choices=("orthogonal", "correlated-pair", "inclusion-path"))
    p.add_argument("--grid", help="comma-separated grid values")
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--s2", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--omega", type=float, help="fixed omega (default: integrate over the Beta prior)")
    p.add_argument("--vary", choices=("alpha", "r12"), default="alpha")
    p.add_argument("--alpha-hat", type=float, default=0.5)
    p.add_argument("--r12", type=float, default=0.0)
    p.add_argument("--r-y1", type=float, default=0.9)
    p.add_argument("--s-y", type=float, default=2.0)
    data_flags(p, required=False)
    _add_prior_flags(p)
    _add_mcmc_flags(p)
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("diagnose", help="IACT and ESS of each column of a trace CSV")
    p.add_argument("traces")
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, SingularDesignError, ValueError) as exc:
        lines = str(exc).splitlines() or [type(exc).__name__]
        print(f"error: {lines[0]}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
