"""Command-line entry point: ``onoff-mud <subcommand>``.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys

import numpy as np

from . import bounds, calibration, power
from .config import ConfigError, load_spec
from .montecarlo import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

LOG2E = 1.0 / math.log(2.0)


def _snr(args) -> float:
    return bounds.db_to_linear(args.snr_db)


def cmd_simulate(args, out) -> int:
    spec = load_spec(args.config)
    if args.seed is not None:
        spec = dataclasses.replace(spec, master_seed=args.seed)
    result = run_experiment(spec, workers=args.workers)
    csv_text = result.to_csv()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text)
    else:
        out.write(csv_text)
    if args.json:
        with open(args.json, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(result.to_json() + "\n")
    return EXIT_OK


def cmd_bounds(args, out) -> int:
    out.write("n,lam,snr,law,form,m\n")
    for n in args.n:
        for lam in args.lam:
            for snr_db in args.snr_db:
                snr = bounds.db_to_linear(snr_db)
                rows = bounds.table_rows(n, lam, snr, args.mar, args.delta, args.C)
                for law, full, leading in rows:
                    out.write(f"{n},{lam!r},{snr!r},{law},full,{full!r}\n")
                    out.write(f"{n},{lam!r},{snr!r},{law},leading,{leading!r}\n")
    return EXIT_OK


def cmd_calibrate(args, out) -> int:
    mu = calibration.threshold_from_pfa(args.pfa, args.m, args.mode)
    out.write(f"{mu!r}\n")
    return EXIT_OK


def cmd_profile(args, out) -> int:
    snr = _snr(args)
    if args.kind == "constant":
        prof = power.constant_profile(args.n, args.lam, snr)
    elif args.kind == "exponential":
        prof = power.exponential_profile(args.n, args.lam, snr)
    else:
        prof = power.robust_profile(args.n, args.lam, snr, args.theta)
    out.write(prof.to_csv())
    return EXIT_OK


def _capacity_m(law: str, n: int, lam: float, snr: float, delta: float) -> float:
    if law == "seqomp_shaped":
        return bounds.seqomp_shaped_m(n, lam, snr, delta)
    if law == "ml_necessary":
        return bounds.ml_necessary_m(n, lam, snr, 1.0, delta)
    raise ValueError(f"unknown law {law!r}")


def cmd_capacity(args, out) -> int:
    out.write("n,lam,snr,m,rate_nats,capacity_nats,rate_bits,capacity_bits,ratio\n")
    snr = _snr(args)
    for n in args.n:
        lam = args.k / n if args.k is not None else args.lam
        if lam is None:
            raise ValueError("give --lam or --k")
        m = args.m if args.m is not None else _capacity_m(args.law, n, lam, snr, args.delta)
        rate, cap, ratio = bounds.sum_rate_ratio(n, lam, snr, m)
        out.write(
            f"{n},{lam!r},{snr!r},{m!r},{rate!r},{cap!r},"
            f"{rate * LOG2E!r},{cap * LOG2E!r},{ratio!r}\n"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onoff-mud", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a Monte Carlo experiment from a TOML file")
    s.add_argument("config")
    s.add_argument("--seed", type=int, help="override master_seed")
    s.add_argument("--workers", type=int, help="worker processes (default: $ONOFF_MUD_WORKERS or 1)")
    s.add_argument("-o", "--output", help="CSV path (default: stdout)")
    s.add_argument("--json", help="also write a JSON mirror here")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bounds", help="scaling-law table over a parameter grid")
    b.add_argument("--n", type=int, nargs="+", default=[100])
    b.add_argument("--lam", type=float, nargs="+", default=[0.1])
    b.add_argument("--snr-db", type=float, nargs="+", default=[20.0])
    b.add_argument("--mar", type=float, default=1.0)
    b.add_argument("--delta", type=float, default=0.0)
    b.add_argument("--C", type=float, default=1.0, help="unknown constant of the ML-sufficient and OMP laws")
    b.set_defaults(func=cmd_bounds)

    c = sub.add_parser("calibrate", help="threshold for a target false-alarm probability")
    c.add_argument("--pfa", type=float, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--mode", choices=("approx", "exact"), default="approx")
    c.set_defaults(func=cmd_calibrate)

    pr = sub.add_parser("profile", help="emit a power profile as CSV")
    pr.add_argument("--kind", choices=("constant", "exponential", "robust"), default="robust")
    pr.add_argument("--n", type=int, default=100)
    pr.add_argument("--lam", type=float, default=0.1)
    pr.add_argument("--snr-db", type=float, default=20.0)
    pr.add_argument("--theta", type=float, default=0.1)
    pr.set_defaults(func=cmd_profile)

    cp = sub.add_parser("capacity", help="sum rate over coordinated capacity")
    cp.add_argument("--n", type=int, nargs="+", default=[1000, 10000, 100000])
    cp.add_argument("--lam", type=float)
    cp.add_argument("--k", type=float, help="fix the expected active count; lam = k / n")
    cp.add_argument("--snr-db", type=float, default=20.0)
    cp.add_argument("--m", type=float, help="measurements (default: from --law)")
    cp.add_argument("--law", choices=("seqomp_shaped", "ml_necessary"), default="seqomp_shaped")
    cp.add_argument("--delta", type=float, default=0.0)
    cp.set_defaults(func=cmd_capacity)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args, out)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
