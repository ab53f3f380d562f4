"""
Command line front end.

Every subcommand writes CSV (to stdout or --out) preceded by a "# pycaptime"
metadata line. Exit codes: 0 success, 1 bound or check violation, 2 usage
error, 3 state budget exceeded.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Sequence

import pandas as pd

from pycaptime.batch import TrialError, write_csv
from pycaptime.cops import capture_bound
from pycaptime.experiment import COP_STRATEGIES, ROBBER_STRATEGIES, Experiment, ExperimentConfig
from pycaptime.graphs import hypercube, parse_graph_spec
from pycaptime.options import Options
from pycaptime.robbers import PlacementError
from pycaptime.solver import UNBOUNDED, CopNumberExceeded, StateBudgetError, cop_number, solve
from pycaptime.stochastic import check_lemma2, coupon_report, distance_chain, lower_bound_params, survival_experiment

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _write(frame: pd.DataFrame, args, command: str, settings: dict):
    settings = {"seed": args.seed, **settings}
    write_csv(frame, args.out, command, settings)


def _gnuplot(args, x: str, ys: Sequence[str], title: str):
    """Write `<out>.gp`, a gnuplot script plotting the CSV just written."""
    if not args.gnuplot:
        return
    if args.out is None:
        raise ValueError("--gnuplot needs --out")
    frame = pd.read_csv(args.out, comment="#")
    cols = list(frame.columns)
    plots = ", ".join(f"'{Path(args.out).name}' using {cols.index(x) + 1}:{cols.index(y) + 1} with linespoints" for y in ys)
    script = "\n".join(
        [
            "set datafile separator ','",
            "set key autotitle columnhead",
            f"set title '{title}'",
            f"set xlabel '{x}'",
            f"plot {plots}",
            "",
        ]
    )
    Path(str(args.out) + ".gp").write_text(script, encoding="utf8")


def _opts(args) -> dict:
    """Run options; the progress bar shares stdout with the CSV, so it needs --out."""
    opts = {"logging_folder": args.log_dir, "progress_bar": args.out is not None and args.progress}
    if args.cpus:
        opts["cpu_count"] = args.cpus
    for key in ("explicit_cap", "state_budget", "horizon_cap"):
        if getattr(args, key, None) is not None:
            opts[key] = getattr(args, key)
    return opts


def _checked_opts(args) -> Options:
    opts = Options(_opts(args))
    opts.check()
    return opts


def cmd_solve(args) -> int:
    opts = _checked_opts(args)
    graph = parse_graph_spec(args.graph, opts.explicit_cap, opts.factor_cap)
    row = {"graph": graph.name, "k": args.k}
    if args.cop_number:
        k_max = args.k_max or args.k
        try:
            row["cop_number"] = cop_number(graph, k_max, opts)
        except CopNumberExceeded:
            row["cop_number"] = f">{k_max}"

    table = solve(graph, args.k, opts)
    value = table.capture_time()
    row["capture_time"] = str(value)
    _write(pd.DataFrame([row]), args, "solve", {"graph": args.graph, "k": args.k})
    if args.table:
        table.write_csv(args.table, {"seed": args.seed})

    if value is UNBOUNDED:
        print(str(CopNumberExceeded(args.k)), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = ExperimentConfig(
        graph=args.graph,
        cops=args.cops,
        robber=args.robber,
        k=args.k,
        trials=args.trials,
        seed=args.seed,
        max_rounds=args.max_rounds,
        out=args.out,
        robber_start=args.robber_start,
        assert_bound=args.assert_bound,
    )
    experiment = Experiment(config, _opts(args))
    experiment.run()
    _gnuplot(args, "trial", ["length"], f"{args.cops} vs {args.robber} on {args.graph}")

    violations = experiment.violations()
    if violations:
        first = violations[0]
        print(f"{len(violations)} trial(s) exceed the bound {args.assert_bound}, first: trial {first.trial}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_scaling(args) -> int:
    rows = []
    for n in args.n:
        graph = hypercube(n)
        bound = capture_bound(graph.factors)
        simulated = None
        if not args.bounds_only:
            config = ExperimentConfig(
                f"Q{n}", "squad", "maxmin", trials=args.trials, seed=args.seed, max_rounds=args.max_rounds
            )
            experiment = Experiment(config, {**_opts(args), "progress_bar": False})
            simulated = max(s.length for s in experiment.play())
        threshold = lower_bound_params(n, args.d).threshold if n >= 3 else None
        rows.append({"n": n, "bound": bound, "simulated_max": simulated, "threshold": threshold})

    frame = pd.DataFrame(rows, columns=["n", "bound", "simulated_max", "threshold"])
    _write(frame, args, "scaling", {"n": ",".join(map(str, args.n)), "trials": args.trials, "d": args.d})
    _gnuplot(args, "n", ["bound", "simulated_max", "threshold"], "capture time scaling on Q_n")
    return EXIT_OK


def cmd_coupon(args) -> int:
    frame = coupon_report(args.m, args.m0, args.trials, args.seed, args.eps)
    _write(frame, args, "coupon", {"m": args.m, "m0": args.m0, "eps": args.eps, "trials": args.trials})
    if args.eps is not None and frame.loc[0, "tail"] > frame.loc[0, "bound"]:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_chain(args) -> int:
    opts = _checked_opts(args)
    settings = {"n": args.n, "T": args.T}
    if args.check_lemma2:
        violations = check_lemma2(args.n, args.T, opts.slack, opts.horizon_cap)
        frame = pd.DataFrame(
            [(v.k, v.t, v.inequality, v.lhs, v.rhs) for v in violations], columns=["k", "t", "inequality", "lhs", "rhs"]
        )
        _write(frame, args, "chain", {**settings, "check_lemma2": True})
        return EXIT_VIOLATION if violations else EXIT_OK

    frame = distance_chain(args.n, args.T, opts.horizon_cap).to_frame()
    _write(frame, args, "chain", settings)
    _gnuplot(args, "t", ["p"], f"capture probability on Q{args.n}")
    return EXIT_OK


def cmd_survive(args) -> int:
    report = survival_experiment(args.n, args.cops, args.trials, args.seed, args.max_rounds, Options(_opts(args)))
    settings = {
        "n": args.n,
        "cops": args.cops,
        "trials": args.trials,
        "threshold": round(report.params.threshold, 4),
        "survival_fraction": report.survival_fraction,
    }
    _write(report.to_frame(), args, "survive", settings)
    _gnuplot(args, "trial", ["length"], f"random robber vs {args.cops} cops on Q{args.n}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed (default: 0)")
    common.add_argument("--out", type=str, default=None, help="CSV output path (default: stdout)")
    common.add_argument("--trials", type=int, default=1, help="number of games or samples")
    common.add_argument("--max-rounds", type=int, default=None, help="round cap per game")
    common.add_argument("--cpus", type=int, default=None, help="worker processes (default: all CPUs)")
    common.add_argument("--log-dir", type=str, default="logs", help="folder for run logs")
    common.add_argument("--progress", action="store_true", help="show a progress bar when writing to --out")
    common.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script next to --out")

    parser = argparse.ArgumentParser(prog="pycaptime", description="Cops and Robbers capture-time experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="exact capture time on an explicit graph")
    p.add_argument("graph", help="graph spec, e.g. Q3 or P3xP5")
    p.add_argument("-k", type=int, required=True, help="number of cops")
    p.add_argument("--cop-number", action="store_true", help="also report the cop number")
    p.add_argument("--k-max", type=int, default=None, help="largest k tried for --cop-number")
    p.add_argument("--table", type=str, default=None, help="export the solved table as CSV")
    p.add_argument("--explicit-cap", type=int, default=None, help="largest graph solved explicitly (default: 4096)")
    p.add_argument("--state-budget", type=int, default=None, help="largest solver state count (default: 10**7)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", parents=[common], help="play games between named strategies")
    p.add_argument("graph", help="graph spec")
    p.add_argument("--cops", choices=COP_STRATEGIES, default="greedy")
    p.add_argument("--robber", choices=ROBBER_STRATEGIES, default="random")
    p.add_argument("-k", type=int, default=None, help="number of cops (default: what the strategy needs)")
    p.add_argument("--robber-start", type=str, default=None, help="fixed robber start vertex")
    p.add_argument("--assert-bound", type=int, default=None, help="exit 1 if a game runs longer")
    p.add_argument("--explicit-cap", type=int, default=None, help="largest graph solved explicitly (default: 4096)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scaling", parents=[common], help="bound, simulated length and survival threshold per n")
    p.add_argument("--n", type=int, nargs="+", required=True, help="hypercube dimensions")
    p.add_argument("-d", type=float, default=1.0, help="cop-count exponent of the threshold (default: 1)")
    p.add_argument("--bounds-only", action="store_true", help="skip the squad simulations")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("coupon", parents=[common], help="coupon collector simulation and tail bound")
    p.add_argument("-m", type=int, required=True, help="number of coupon types")
    p.add_argument("--m0", type=int, required=True, help="coupons still missing")
    p.add_argument("--eps", type=float, default=None, help="tail threshold parameter")
    p.set_defaults(func=cmd_coupon)

    p = sub.add_parser("chain", parents=[common], help="greedy-versus-random distance chain on Q_n")
    p.add_argument("-n", type=int, required=True, help="hypercube dimension")
    p.add_argument("-T", type=int, required=True, help="horizon in rounds")
    p.add_argument("--check-lemma2", action="store_true", help="report monotonicity violations instead")
    p.add_argument("--horizon-cap", type=int, default=None, help="largest accepted horizon (default: 10**4)")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("survive", parents=[common], help="random robber survival against parity-greedy cops")
    p.add_argument("-n", type=int, required=True, help="hypercube dimension")
    p.add_argument("--cops", type=int, required=True, help="number of cops")
    p.set_defaults(func=cmd_survive)

    return parser


def main(argv: List[str] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StateBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (TrialError, PlacementError, CopNumberExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
