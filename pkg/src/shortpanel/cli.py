"""Command-line interface: ``shortpanel {test,estimate,simulate,critval}``.

Every command prints a JSON report (or writes it to ``--out``).  Library
errors are reported as ``{"error": {"code": ..., "message": ...}}`` with a
non-zero exit status.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import fields, replace

import numpy as np

from . import __version__
from . import rng as _rng
from .asymptotic import (
    asymptotic_critical_value,
    asymptotic_test,
    build_gamma,
    build_lambda,
    simulate_functional,
)
from .bootstrap import BootstrapConfig, bootstrap_test
from .correlation import KernelSpec, analytic_structure, structure_from_residuals
from .errors import InvalidArgument, PanelTestError
from .io import IngestOptions, input_info, load_panel_csv, report_document, write_report
from .panel import estimate_change_point, power_weights, residuals
from .simlab import ScenarioSpec, reproduce_table, run_scenario

EXIT_ERROR = 1


def _common(p: argparse.ArgumentParser, data: bool = True):
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--h", type=float, default=2.0, help="kernel bandwidth")
    p.add_argument("--kernel", choices=("parzen", "trivial"), default="parzen")
    p.add_argument("--weight-exponent", type=float, default=2.0, help="q in w(t) = t^q")
    p.add_argument("--B", type=int, default=2000, help="bootstrap replications")
    p.add_argument("--M", type=int, default=2000, help="limit-law draws")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--include-sample", action="store_true", help="embed simulated distributions")
    if data:
        p.add_argument("--transform", choices=("none", "log", "premium"), default="none")
        p.add_argument("--premium", default=None, help="premium grid for --transform premium")
        p.add_argument("--transpose", action="store_true", help="input rows are time points")
        p.add_argument("--header", action="store_true", help="skip the first row")
        p.add_argument("--delimiter", default=",")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shortpanel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="test for a common change in panel means")
    p.add_argument("data")
    p.add_argument("--method", choices=("asymptotic", "bootstrap", "both"), default="both")
    _common(p)

    p = sub.add_parser("estimate", help="estimate the common change point")
    p.add_argument("data")
    _common(p)

    p = sub.add_parser("simulate", help="reproduce a reference table or run a scenario file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--table", choices=("T1", "T2", "T3"))
    src.add_argument("--spec", help="JSON file with scenario fields")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--scale", type=float, default=None, help="reps = ceil(5000 * scale)")
    _common(p, data=False)

    p = sub.add_parser("critval", help="simulate the limit law and its critical value")
    p.add_argument("source", help="'iid', 'ar1:PHI' or a data file")
    p.add_argument("--T", type=int, default=None, help="panel length for analytic structures")
    p.add_argument("--gamma-check", action="store_true", help="compare with the residual limit law at --tau")
    p.add_argument("--tau", type=int, default=None, help="change time for --gamma-check (default T)")
    _common(p)
    return parser


def _validate(args):
    if not 0.0 < args.alpha < 1.0:
        raise InvalidArgument(f"--alpha must lie in (0, 1), got {args.alpha}")
    if args.h <= 0:
        raise InvalidArgument("--h must be positive")
    if args.B < 1 or args.M < 1:
        raise InvalidArgument("--B and --M must be positive")


def _flags(args) -> dict:
    skip = {"command", "data", "out", "source", "spec", "table"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _ingest(args, min_time=4):
    opts = IngestOptions(
        has_header=args.header,
        transform=args.transform,
        premium_path=args.premium,
        delimiter=args.delimiter,
        transpose=args.transpose,
    )
    y = load_panel_csv(args.data, opts, min_time=min_time)
    return y, input_info(args.data, y, opts)


def cmd_test(args) -> dict:
    y, info = _ingest(args)
    seed = _rng.resolve_seed(args.seed)
    args.seed = seed
    weights = power_weights(args.weight_exponent)
    kernel = KernelSpec.named(args.kernel, args.h)
    results = {}
    timing = {}
    if args.method in ("asymptotic", "both"):
        t0 = time.perf_counter()
        rep = asymptotic_test(y, args.alpha, weights, kernel, args.M, _rng.derive_seed(seed, _rng.MVN), workers=args.workers)
        timing["asymptotic"] = time.perf_counter() - t0
        results["asymptotic"] = rep.to_dict(args.include_sample)
    if args.method in ("bootstrap", "both"):
        t0 = time.perf_counter()
        cfg = BootstrapConfig(B=args.B, seed=_rng.derive_seed(seed, _rng.BOOT), alpha=args.alpha, workers=args.workers)
        rep = bootstrap_test(y, weights, cfg)
        timing["bootstrap"] = time.perf_counter() - t0
        results["bootstrap"] = rep.to_dict(args.include_sample)
    for r in results.values():
        r["decision"] = "reject" if r["reject"] else "fail to reject"
    return report_document("test", _flags(args), results, info, timing)


def cmd_estimate(args) -> dict:
    y, info = _ingest(args, min_time=2)
    est = estimate_change_point(y, power_weights(args.weight_exponent))
    warnings = []
    if np.all(est.objective == 0):
        warnings.append("all criterion values are zero: data are constant within panels")
    results = {
        "tau_hat": est.tau_hat,
        "no_change": est.no_change,
        "objective": {str(t): float(v) for t, v in zip(est.times, est.objective)},
        "warnings": warnings,
    }
    return report_document("estimate", _flags(args), results, info)


def cmd_simulate(args) -> dict:
    t0 = time.perf_counter()
    seed = 0 if args.seed is None else args.seed
    if args.table:
        base = ScenarioSpec(
            seed=seed, alpha=args.alpha, h=args.h, kernel=args.kernel, weight_exponent=args.weight_exponent
        )
        scale = args.scale if args.scale is not None else (args.reps or 5000) / 5000
        rows = reproduce_table(
            args.table,
            scale=min(scale, 1.0),
            base=base,
            workers=args.workers,
            reps=args.reps,
            B=args.B,
            M=args.M,
        )
        results = {
            "table": args.table,
            "cells": rows,
            "max_abs_diff": {
                m: max((r["abs_diff"] for r in rows if r["method"] == m), default=None)
                for m in ("asymptotic", "bootstrap")
            },
        }
    else:
        with open(args.spec) as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(ScenarioSpec)}
        unknown = set(raw) - known
        if unknown:
            raise InvalidArgument(f"unknown scenario fields: {sorted(unknown)}")
        for key in ("garch", "delta_law", "mu"):
            if raw.get(key) is not None:
                raw[key] = tuple(raw[key])
        spec = ScenarioSpec(**raw)
        if args.reps:
            spec = replace(spec, reps=args.reps)
        results = run_scenario(spec, args.workers).to_dict()
    return report_document("simulate", _flags(args), results, timing={"total": time.perf_counter() - t0})


def cmd_critval(args) -> dict:
    seed = _rng.resolve_seed(args.seed)
    args.seed = seed
    info = None
    src = args.source
    if src == "iid" or src.startswith("ar1"):
        if args.T is None:
            raise InvalidArgument("--T is required for analytic structures")
        if src == "iid":
            structure = analytic_structure("iid", args.T)
        else:
            try:
                phi = float(src.split(":", 1)[1])
            except (IndexError, ValueError):
                raise InvalidArgument("use ar1:PHI, e.g. ar1:0.3") from None
            structure = analytic_structure("ar1", args.T, phi)
    else:
        args.data = src
        y, info = _ingest(args)
        est = estimate_change_point(y, power_weights(args.weight_exponent))
        structure = structure_from_residuals(residuals(y, est.tau_hat), KernelSpec.named(args.kernel, args.h))[0]
    lam = build_lambda(structure)
    cv, dist = asymptotic_critical_value(lam, args.alpha, args.M, _rng.derive_seed(seed, _rng.MVN), workers=args.workers)
    results = {
        "T": structure.T,
        "critical_value": cv,
        "n_degenerate": dist.n_degenerate,
        "lambda": lam.tolist(),
    }
    if args.include_sample:
        results["distribution"] = dist.sample.tolist()
    if args.gamma_check:
        from scipy.stats import ks_2samp

        tau = structure.T if args.tau is None else args.tau
        g = simulate_functional(build_gamma(structure, tau), args.M, _rng.derive_seed(seed, _rng.MVN, 1), workers=args.workers)
        results["gamma_check"] = {
            "tau": tau,
            "critical_value": g.critical_value(args.alpha),
            "ks_distance": float(ks_2samp(dist.sample, g.sample).statistic),
        }
    return report_document("critval", _flags(args), results, info)


COMMANDS = {"test": cmd_test, "estimate": cmd_estimate, "simulate": cmd_simulate, "critval": cmd_critval}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _validate(args)
        doc = COMMANDS[args.command](args)
    except PanelTestError as exc:
        print(json.dumps({"error": exc.to_dict()}, default=str, indent=2))
        return EXIT_ERROR
    except OSError as exc:
        print(json.dumps({"error": {"code": "io_error", "message": str(exc)}}, indent=2))
        return EXIT_ERROR
    text = write_report(doc, args.out)
    if not args.out:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
