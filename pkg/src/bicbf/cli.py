"""Command-line interface.

Subcommands:

    bf        Bayes factor from a reported statistic (flags or quoted text)
    parse     parse reported-statistic text and show the fields
    simulate  run the simulation study and write a results file
    report    summarize a results file or emit density data

Output formats are plain (human-readable), csv, and json, selected with
``--format`` or the BICBF_FORMAT environment variable; all three carry the
same numbers.  Exit codes: 0 success, 1 domain or runtime error, 2 usage
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from typing import Sequence

from .errors import BicbfError
from .gprior import DEFAULT_PRIOR_SCALE, GPriorSpec
from .parsing import parse_stat, render_stat
from .simulate import (
    SimulationConfig,
    emit_density_data,
    read_config,
    read_records,
    run_simulation,
    summarize,
    write_density_data,
    write_records,
)
from .summary import bf01_from_f, bf01_from_stat, bf01_from_t, classify

FORMATS = ("plain", "csv", "json")

FORMAT_ENV_VAR = "BICBF_FORMAT"


class _UsageError(Exception):
    """Bad flag combination detected after argparse; maps to exit code 2."""


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits itself: 2 on usage, 0 on --help
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (BicbfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bicbf",
        description="Approximate Bayes factors from ANOVA and t-test summaries",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bf = sub.add_parser("bf", help="Bayes factor from a reported statistic")
    p_bf.add_argument("stat", nargs="?", help='statistic text, e.g. "F(1,17)=2.584"')
    p_bf.add_argument("--f", type=float, help="F statistic (needs --df1, --df2, --n)")
    p_bf.add_argument("--t", type=float, help="t statistic (needs --df2, --n)")
    p_bf.add_argument("--df1", type=_positive_int, help="numerator degrees of freedom")
    p_bf.add_argument("--df2", type=_positive_int, help="denominator degrees of freedom")
    p_bf.add_argument("--n", type=_positive_int, help="number of observations")
    p_bf.add_argument("--direction", choices=("01", "10"), default="01",
                      help="report BF01 (default) or BF10")
    _add_format_flag(p_bf)
    p_bf.set_defaults(func=cmd_bf)

    p_parse = sub.add_parser("parse", help="parse reported-statistic text")
    p_parse.add_argument("stat", help='statistic text, e.g. "t(71)=2.0, n=73"')
    p_parse.add_argument("--n", type=_positive_int, help="sample size override")
    _add_format_flag(p_parse)
    p_parse.set_defaults(func=cmd_parse)

    p_sim = sub.add_parser("simulate", help="run the simulation study")
    p_sim.add_argument("--config", help="config file; flags override its values")
    p_sim.add_argument("--cell-n", type=_positive_int, help="observations per cell")
    p_sim.add_argument("--g", type=_nonnegative_float, help="effect variance")
    p_sim.add_argument("--trials", type=_positive_int, help="number of trials")
    p_sim.add_argument("--seed", type=_nonnegative_int, help="data-generating seed")
    p_sim.add_argument("--a-levels", type=_positive_int, help="levels of factor A (default 2)")
    p_sim.add_argument("--b-levels", type=_positive_int, help="levels of factor B (default 3)")
    p_sim.add_argument("--prior-scale", type=_positive_float,
                       help=f"g-prior scale r (default {DEFAULT_PRIOR_SCALE:.6g})")
    p_sim.add_argument("--mc-samples", type=_positive_int,
                       help="Monte Carlo draws per Bayes factor (default 10000)")
    p_sim.add_argument("--oracle-seed", type=_nonnegative_int,
                       help="seed of the Monte Carlo oracle (default 0)")
    p_sim.add_argument("--jobs", type=_positive_int, default=1,
                       help="worker processes (results are identical for any count)")
    p_sim.add_argument("--out", required=True, help="results file to write")
    p_sim.set_defaults(func=cmd_simulate)

    p_rep = sub.add_parser("report", help="summarize a results file")
    p_rep.add_argument("results", help="results file from `bicbf simulate`")
    p_rep.add_argument("--table", action="store_true",
                       help="print five-number summaries and consistency (default)")
    p_rep.add_argument("--density", action="store_true",
                       help="write kernel density series (needs --out)")
    p_rep.add_argument("--out", help="output path for --density")
    p_rep.add_argument("--bandwidth", type=_positive_float,
                       help="kernel bandwidth (default: Silverman's rule)")
    _add_format_flag(p_rep)
    p_rep.set_defaults(func=cmd_report)

    return parser


def _add_format_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=FORMATS, default=None,
                        help=f"output format (default: ${FORMAT_ENV_VAR} or plain)")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text}")
    return value


def _resolve_format(args) -> str:
    fmt = args.format or os.environ.get(FORMAT_ENV_VAR) or "plain"
    if fmt not in FORMATS:
        raise _UsageError(
            f"unknown output format {fmt!r} (from ${FORMAT_ENV_VAR}); choose from {FORMATS}"
        )
    return fmt


def _sig4(value: float) -> str:
    return "%.4g" % value


def cmd_bf(args) -> int:
    fmt = _resolve_format(args)
    warnings: tuple[str, ...] = ()
    if args.stat is not None:
        if args.f is not None or args.t is not None:
            raise _UsageError("give a statistic string or --f/--t flags, not both")
        report = parse_stat(args.stat, n=args.n)
        warnings = report.warnings
        value = bf01_from_stat(report.stat)
    elif args.f is not None:
        if args.t is not None:
            raise _UsageError("--f and --t are mutually exclusive")
        if args.df1 is None or args.df2 is None or args.n is None:
            raise _UsageError("--f needs --df1, --df2, and --n")
        value = bf01_from_f(args.f, args.df1, args.df2, args.n)
    elif args.t is not None:
        if args.df1 is not None and args.df1 != 1:
            raise _UsageError("--t fixes df1 to 1; drop --df1")
        if args.df2 is None or args.n is None:
            raise _UsageError("--t needs --df2 and --n")
        value = bf01_from_t(args.t, args.df2, args.n)
    else:
        raise _UsageError("give a statistic string or --f/--t flags")

    value = value.in_direction(args.direction)
    evidence = classify(value)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    label = f"BF{value.direction}"
    if fmt == "plain":
        print(f"{label} = {_sig4(value.bf)} (log {label} = {_sig4(value.log_bf)})")
        print(f"evidence: {evidence.category}, favoring {evidence.favored}")
    elif fmt == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(["direction", "bf", "log_bf", "favored", "category"])
        writer.writerow([value.direction, "%.17g" % value.bf, "%.17g" % value.log_bf,
                         evidence.favored, evidence.category])
    else:
        print(json.dumps({
            "direction": value.direction,
            "bf": value.bf,
            "log_bf": value.log_bf,
            "favored": evidence.favored,
            "category": evidence.category,
        }))
    return 0


def cmd_parse(args) -> int:
    fmt = _resolve_format(args)
    report = parse_stat(args.stat, n=args.n)
    stat = report.stat
    fields = {
        "kind": stat.kind,
        "statistic": stat.statistic,
        "df1": stat.df1,
        "df2": stat.df2,
        "n": stat.n,
        "p_reported": stat.p_reported,
        "canonical": render_stat(stat),
    }
    if fmt == "plain":
        for key, value in fields.items():
            print(f"{key} = {value}")
        for warning in report.warnings:
            print(f"warning: {warning}")
    elif fmt == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow([*fields.keys(), "warnings"])
        writer.writerow([*("" if v is None else v for v in fields.values()),
                         "; ".join(report.warnings)])
    else:
        print(json.dumps({**fields, "warnings": list(report.warnings)}))
    return 0


def cmd_simulate(args) -> int:
    base = read_config(args.config) if args.config else None

    def pick(flag_value, file_value, flag_name):
        if flag_value is not None:
            return flag_value
        if file_value is not None:
            return file_value
        raise _UsageError(f"missing {flag_name} (give the flag or a --config file)")

    oracle = GPriorSpec(
        scale=pick(args.prior_scale, base.oracle.scale if base else DEFAULT_PRIOR_SCALE,
                   "--prior-scale"),
        mc_samples=pick(args.mc_samples, base.oracle.mc_samples if base else 10_000,
                        "--mc-samples"),
        seed=pick(args.oracle_seed, base.oracle.seed if base else 0, "--oracle-seed"),
    )
    config = SimulationConfig(
        cell_n=pick(args.cell_n, base.cell_n if base else None, "--cell-n"),
        g=pick(args.g, base.g if base else None, "--g"),
        trials=pick(args.trials, base.trials if base else None, "--trials"),
        seed=pick(args.seed, base.seed if base else None, "--seed"),
        a_levels=pick(args.a_levels, base.a_levels if base else 2, "--a-levels"),
        b_levels=pick(args.b_levels, base.b_levels if base else 3, "--b-levels"),
        oracle=oracle,
    )

    start = time.perf_counter()
    step = max(1, config.trials // 20)

    def progress(done: int, total: int) -> None:
        if done == total or done % step == 0:
            print(f"\r{done}/{total} trials", end="", file=sys.stderr, flush=True)

    records = run_simulation(config, n_jobs=args.jobs, progress=progress)
    print(file=sys.stderr)
    write_records(records, args.out)
    elapsed = time.perf_counter() - start
    print(f"wrote {args.out} ({len(records)} rows) in {elapsed:.1f} s", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    fmt = _resolve_format(args)
    records = read_records(args.results)

    wrote_density = False
    if args.density:
        if not args.out:
            raise _UsageError("--density needs --out")
        series = emit_density_data(records, bandwidth=args.bandwidth)
        write_density_data(series, args.out)
        print(f"wrote {args.out} ({len(series)} series)", file=sys.stderr)
        wrote_density = True

    if args.table or not wrote_density:
        summaries = summarize(records)
        rows = []
        for effect, summary in summaries.items():
            for bf_type, five in (("bic", summary.bic), ("default", summary.default)):
                rows.append((effect, bf_type, summary.n_trials, *five.as_tuple(),
                             summary.consistency))
        if fmt == "plain":
            header = ("effect", "route", "trials", "min", "q1", "median", "q3",
                      "max", "consistency")
            print("{:<7} {:<8} {:>6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>12}".format(*header))
            for effect, bf_type, n_trials, *numbers, consistency in rows:
                cells = " ".join(f"{v:9.2f}" for v in numbers)
                print(f"{effect:<7} {bf_type:<8} {n_trials:>6} {cells} {consistency:>12.3f}")
        elif fmt == "csv":
            writer = csv.writer(sys.stdout)
            writer.writerow(["effect", "bf_type", "n_trials", "min", "q1", "median",
                             "q3", "max", "consistency"])
            for effect, bf_type, n_trials, *values in rows:
                writer.writerow([effect, bf_type, n_trials,
                                 *("%.17g" % v for v in values)])
        else:
            print(json.dumps([
                {"effect": effect, "bf_type": bf_type, "n_trials": n_trials,
                 "min": mn, "q1": q1, "median": md, "q3": q3, "max": mx,
                 "consistency": consistency}
                for effect, bf_type, n_trials, mn, q1, md, q3, mx, consistency in rows
            ]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
