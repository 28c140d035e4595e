"""Command-line front end.

Exit codes: 0 success, 1 bad scenario file, 2 operation not applicable to
the scenario's regime, 3 exact computation too large.
"""

from __future__ import annotations

import argparse
import csv
import sys
from typing import Optional, Sequence

from . import central, equilibrium
from .errors import DomainError, InvalidArgument, ResourceError, StateError
from .scenario import (ORACLE_COLUMNS, Scenario, algorithm_columns, format_value, ingest_config,
                       oracle_check, run_algorithm, run_scenario, sweep_columns, to_csv, with_seed)

EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_RESOURCE = 0, 1, 2, 3


def _print_pairs(pairs, out):
    for key, value in pairs:
        if isinstance(value, (tuple, list)):
            value = " ".join(format_value(v) for v in value)
        else:
            value = format_value(value)
        print(f"{key}: {value}", file=out)


def _write(text: str, path: Optional[str], out):
    if path is None or path == "-":
        out.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load(args) -> Scenario:
    scenario = ingest_config(args.file)
    if getattr(args, "seed", None) is not None:
        scenario = with_seed(scenario, args.seed)
    return scenario


def cmd_classify(args, out):
    instance = _load(args).base_instance()
    label = equilibrium.classify(instance)
    report = equilibrium.solve(instance)
    _print_pairs([("case", str(label.variant)),
                  ("sigma1", sorted(label.sigma1)),
                  ("sigma2", sorted(label.sigma2)),
                  ("kinds", [str(k) for k in report.kind_per_type])], out)


def cmd_solve(args, out):
    instance = _load(args).base_instance()
    report = equilibrium.solve(instance)
    pairs = [("case", str(report.case.variant)), ("ne_exists", report.ne_exists),
             ("common_slack", report.common_slack), ("ne_demand", report.ne_demand)]
    if report.ne_exists:
        pairs += [("worst_profile", report.worst_profile.p_res),
                  ("best_profile", report.best_profile.p_res)]
    _print_pairs(pairs, out)


def cmd_optimal(args, out):
    instance = _load(args).base_instance()
    profile, cost = central.optimal_profile(instance)
    _print_pairs([("p_res", profile.p_res), ("res_cost", cost.res_cost),
                  ("day_peak_cost", cost.day_peak_cost), ("night_cost", cost.night_cost),
                  ("total", cost.total)], out)


def cmd_poa(args, out):
    instance = _load(args).base_instance()
    report = central.price_of_anarchy(instance)
    _print_pairs([("worst_ne_cost", report.worst_ne_cost), ("optimal_cost", report.optimal_cost),
                  ("poa", report.ratio)], out)


def cmd_sweep(args, out):
    scenario = _load(args)
    _write(to_csv(run_scenario(scenario), sweep_columns(scenario)), args.output, out)


def cmd_best_response(args, out):
    scenario = _load(args)
    rows = run_algorithm(scenario)
    _write(to_csv(rows, algorithm_columns(len(scenario.types))), args.output, out)


def cmd_oracle_check(args, out):
    scenario = _load(args)
    _write(to_csv(oracle_check(scenario), ORACLE_COLUMNS), args.output, out)


def cmd_plot(args, out):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    try:
        with open(args.file, encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise InvalidArgument(f"{args.file}: {exc.strerror}") from exc
    if not rows:
        raise InvalidArgument(f"{args.file}: no data rows")
    columns = list(rows[0].keys())
    x_col = args.x or columns[0]
    y_cols = args.y or (["poa"] if "poa" in columns else [columns[1]])
    for c in [x_col, *y_cols]:
        if c not in columns:
            raise InvalidArgument(f"column {c!r} not in {args.file}")

    def series(col):
        return [float(r[col]) if r[col] not in ("", "final") else float("nan") for r in rows]

    xs = series(x_col)
    fig, ax = plt.subplots(figsize=(6, 4))
    for c in y_cols:
        ax.plot(xs, series(c), marker="o", markersize=3, label=c)
    ax.set_xlabel(x_col)
    if len(y_cols) > 1:
        ax.legend()
    else:
        ax.set_ylabel(y_cols[0])
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    # fixed metadata keeps the svg byte-stable
    fig.savefig(args.output, format="svg", metadata={"Date": None})
    plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esgame", description="Energy source selection game toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_cmd(name, func, help_text, output=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="scenario YAML file")
        p.add_argument("--seed", type=int, default=None, help="override the scenario's RNG seed")
        if output:
            p.add_argument("-o", "--output", default=None, help="CSV destination (default stdout)")
        p.set_defaults(func=func)
        return p

    scenario_cmd("classify", cmd_classify, "print the equilibrium regime")
    scenario_cmd("solve", cmd_solve, "closed-form equilibrium")
    scenario_cmd("optimal", cmd_optimal, "centralized optimum")
    scenario_cmd("poa", cmd_poa, "price of anarchy")
    scenario_cmd("sweep", cmd_sweep, "evaluate every sweep point", output=True)
    scenario_cmd("best-response", cmd_best_response, "run the distributed algorithm", output=True)
    scenario_cmd("oracle-check", cmd_oracle_check, "exact vs mean-field costs", output=True)

    p = sub.add_parser("plot", help="line chart of CSV columns")
    p.add_argument("file", help="CSV produced by another subcommand")
    p.add_argument("-o", "--output", required=True, help="SVG destination")
    p.add_argument("--x", default=None, help="x column (default: first)")
    p.add_argument("--y", action="append", default=None, help="y column, repeatable (default: poa)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    except (InvalidArgument, DomainError) as exc:
        print(f"config error: {exc}", file=err)
        return EXIT_CONFIG
    except StateError as exc:
        print(f"precondition error: {exc}", file=err)
        return EXIT_PRECONDITION
    except ResourceError as exc:
        print(f"resource error: {exc}", file=err)
        return EXIT_RESOURCE
    return EXIT_OK


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
