"""Command-line front end.

Subcommands:

* ``simulate`` — generate a synthetic GARMA count series to CSV
  (header ``t,y[,x1..xr]``).
* ``fit`` — fit a model to a CSV data file: runs the reversible-jump
  chain, applies burn-in and thinning, prints the top model patterns and
  per-coefficient Geweke scores, and optionally writes the raw chain
  (plus a key = value metadata sidecar) and the summary CSV.
* ``mc`` — run a Monte Carlo scenario file and write report.csv /
  report.txt.

Exit codes: 0 on success, 2 on usage or validation errors, 1 on runtime
failures.  Stdout carries only requested tables; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import burn, summarize, thin
from .harness import load_scenario, run_scenario, write_report_csv, write_report_text
from .model import CountSeries, Family, ParamState, PriorSpec
from .sampler import ChainOutput, SamplerConfig, posterior_model_probs, run_chain
from .simulate import SimSpec, simulate_garma


class UsageError(Exception):
    pass


def _family_from_args(args) -> Family:
    if args.family == "poisson":
        if args.m is not None or args.k is not None:
            raise UsageError("--m/--k are not valid for the poisson family")
        return Family.poisson()
    if args.family == "binomial":
        if args.m is None:
            raise UsageError("binomial family requires --m")
        if args.k is not None:
            raise UsageError("--k is not valid for the binomial family")
        return Family.binomial(args.m)
    if args.k is None:
        raise UsageError("negbinomial family requires --k")
    if args.m is not None:
        raise UsageError("--m is not valid for the negbinomial family")
    return Family.negbinomial(args.k)


def _parse_float_list(text: str) -> tuple[float, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad coefficient list {text!r}") from exc


def _cmd_simulate(args) -> int:
    family = _family_from_args(args)
    phi = _parse_float_list(args.phi)
    theta = _parse_float_list(args.theta)
    if len(phi) != args.p:
        raise UsageError(f"--phi must list exactly {args.p} values")
    if len(theta) != args.q:
        raise UsageError(f"--theta must list exactly {args.q} values")
    try:
        spec = SimSpec(family=family,
                       params=ParamState(alpha=args.alpha, phi=phi, theta=theta),
                       n=args.n, warmup=args.warmup, c=args.c, seed=args.seed)
        series = simulate_garma(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    with open(args.out, "w", newline="") as fh:
        fh.write("t,y\n")
        for t, y in enumerate(series.y, 1):
            fh.write(f"{t},{int(y)}\n")
    return 0


def _load_data(path: str, add_trend: bool, add_logtrend: bool) -> CountSeries:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise UsageError(f"{path}: empty file")
            header = [h.strip() for h in header]
            if "y" not in header:
                raise UsageError(f"{path}: required column 'y' missing")
            rows = list(reader)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    y_idx = header.index("y")
    cov_cols = [(i, nm) for i, nm in enumerate(header) if nm not in ("y", "t")]
    y = []
    X = []
    for lineno, row in enumerate(rows, 2):
        if len(row) != len(header) or any(not f.strip() for f in row):
            raise UsageError(f"{path}:{lineno}: missing values are not allowed")
        try:
            yv = float(row[y_idx])
        except ValueError:
            raise UsageError(f"{path}:{lineno}: y is not a number") from None
        if yv < 0 or yv != int(yv):
            raise UsageError(f"{path}:{lineno}: y must be a nonnegative integer")
        y.append(int(yv))
        try:
            X.append([float(row[i]) for i, _ in cov_cols])
        except ValueError:
            raise UsageError(f"{path}:{lineno}: covariates must be numeric") from None
    n = len(y)
    if n == 0:
        raise UsageError(f"{path}: no observations")
    names = [nm for _, nm in cov_cols]
    Xm = np.asarray(X, dtype=np.float64).reshape(n, len(cov_cols))
    if add_trend:
        t = np.arange(1, n + 1, dtype=np.float64)
        Xm = np.column_stack([Xm, t])
        names.append("trend")
    if add_logtrend:
        t = np.arange(1, n + 1, dtype=np.float64)
        Xm = np.column_stack([Xm, np.log(t)])
        names.append("logtrend")
    return CountSeries(y=np.asarray(y, dtype=np.int64), X=Xm,
                       x_names=tuple(names))


def _write_chain_csv(chain: ChainOutput, path: str) -> None:
    with open(path, "w", newline="") as fh:
        cols = (["iter"] + list(chain.coef_names)
                + [f"ind_{nm}" for nm in chain.toggleable_names])
        fh.write(",".join(cols) + "\n")
        for i in range(chain.n_draws):
            fields = [str(i + 1)]
            fields += [repr(float(v)) for v in chain.draws[i]]
            fields += [str(int(b)) for b in chain.indicators[i]]
            fh.write(",".join(fields) + "\n")


def _write_chain_meta(chain: ChainOutput, family: Family, c: float,
                      path: str) -> None:
    cfg = chain.config
    with open(path, "w") as fh:
        pairs = [
            ("family", family.tag), ("m", family.m), ("k", family.k),
            ("c", c), ("p_max", cfg.p_max), ("q_max", cfg.q_max),
            ("sd_alpha", cfg.priors.sd_alpha), ("sd_phi", cfg.priors.sd_phi),
            ("sd_theta", cfg.priors.sd_theta), ("sd_beta", cfg.priors.sd_beta),
            ("inc_prob", cfg.priors.inc_prob), ("rj_scale", cfg.rj_scale),
            ("rw_scale", cfg.rw_scale), ("iters", cfg.iters),
            ("seed", cfg.seed),
            ("always_included", ",".join(sorted(cfg.always_included))),
        ]
        for key, val in pairs:
            if val is not None:
                fh.write(f"{key} = {val}\n")


def _pattern_label(pattern: tuple, names: tuple) -> str:
    inc = [nm for nm, bit in zip(names, pattern) if bit]
    return "+".join(inc) if inc else "(none)"


def _cmd_fit(args) -> int:
    family = _family_from_args(args)
    if args.burnin >= args.iters:
        raise UsageError("--burnin must be smaller than --iters")
    if args.thin < 1:
        raise UsageError("--thin must be >= 1")
    series = _load_data(args.data, args.trend, args.logtrend)
    series = CountSeries(y=series.y, X=series.X, c=args.c,
                         x_names=series.x_names)
    if family.tag == "binomial" and int(series.y.max()) > family.m:
        raise UsageError("data contains y > m for the binomial family")
    always = frozenset(v.strip() for v in args.always_include.split(",")
                       if v.strip()) | {"alpha"}
    config = SamplerConfig(
        p_max=args.pmax, q_max=args.qmax,
        priors=PriorSpec(sd_alpha=args.sd_alpha, sd_phi=args.sd_arma,
                         sd_theta=args.sd_arma, sd_beta=args.sd_beta,
                         inc_prob=args.inc_prob),
        rj_scale=args.rj_scale, rw_scale=args.rw_scale, iters=args.iters,
        seed=args.seed, always_included=always)
    try:
        chain = run_chain(series, family, config)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    processed = thin(burn(chain, args.burnin), args.thin)
    summary = summarize(processed, args.level)
    probs = posterior_model_probs(processed)

    if args.out_chain:
        _write_chain_csv(chain, args.out_chain)
        _write_chain_meta(chain, family, args.c, args.out_chain + ".meta")
    if args.out_summary:
        with open(args.out_summary, "w", newline="") as fh:
            summary.to_csv(fh)

    print("model,probability")
    for pattern, prob in list(probs.items())[:5]:
        print(f"{_pattern_label(pattern, chain.toggleable_names)},{prob:.4f}")
    print("coef,geweke_z")
    for row in summary.rows:
        print(f"{row.name},{row.geweke_z:.3f}" if math.isfinite(row.geweke_z)
              else f"{row.name},nan")
    return 0


def _cmd_mc(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad scenario file: {exc}") from exc
    if args.reps is not None:
        if args.reps < 1:
            raise UsageError("--reps must be >= 1")
        scenario = replace(scenario, replications=args.reps)
    if args.parallel < 1:
        raise UsageError("--parallel must be >= 1")
    report = run_scenario(scenario, parallelism=args.parallel)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.csv", "w", newline="") as fh:
        write_report_csv(report, fh)
    with open(out / "report.txt", "w") as fh:
        write_report_text(report, fh)
    write_report_text(report, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rjgarma",
        description="Bayesian order selection for GARMA count time series")
    parser.add_argument("--version", action="version",
                        version=f"rjgarma {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic series")
    sim.add_argument("--family", required=True,
                     choices=["poisson", "binomial", "negbinomial"])
    sim.add_argument("--m", type=int)
    sim.add_argument("--k", type=float)
    sim.add_argument("--p", type=int, default=0)
    sim.add_argument("--q", type=int, default=0)
    sim.add_argument("--alpha", type=float, default=0.0)
    sim.add_argument("--phi", default="")
    sim.add_argument("--theta", default="")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--warmup", type=int, default=100)
    sim.add_argument("--c", type=float, default=0.3)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)

    fit = sub.add_parser("fit", help="fit a GARMA model to CSV data")
    fit.add_argument("--data", required=True)
    fit.add_argument("--family", required=True,
                     choices=["poisson", "binomial", "negbinomial"])
    fit.add_argument("--m", type=int)
    fit.add_argument("--k", type=float)
    fit.add_argument("--pmax", type=int, default=3)
    fit.add_argument("--qmax", type=int, default=3)
    fit.add_argument("--iters", type=int, default=30000)
    fit.add_argument("--burnin", type=int, default=5000)
    fit.add_argument("--thin", type=int, default=1)
    fit.add_argument("--rj-scale", type=float, default=5.0)
    fit.add_argument("--rw-scale", type=float, default=0.1)
    fit.add_argument("--inc-prob", type=float, default=0.5)
    fit.add_argument("--sd-alpha", type=float, default=0.3)
    fit.add_argument("--sd-arma", type=float, default=0.2)
    fit.add_argument("--sd-beta", type=float, default=1.0)
    fit.add_argument("--c", type=float, default=0.3)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--always-include", default="alpha")
    fit.add_argument("--trend", action="store_true")
    fit.add_argument("--logtrend", action="store_true")
    fit.add_argument("--level", type=float, default=0.95)
    fit.add_argument("--out-chain")
    fit.add_argument("--out-summary")

    mc = sub.add_parser("mc", help="run a Monte Carlo scenario file")
    mc.add_argument("--scenario", required=True)
    mc.add_argument("--reps", type=int)
    mc.add_argument("--parallel", type=int, default=1)
    mc.add_argument("--out", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "fit":
            return _cmd_fit(args)
        return _cmd_mc(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # unexpected runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
