"""Command-line entry point: ``pvmopt {solve,bench,check,paper-tables}``.

Exit codes: 0 on success, 1 on configuration or domain errors, 2 when a
solver contract is violated (failed line search, non-descent direction).
"""
import argparse
import os
import sys

import numpy as np

from . import bench
from .diagnostics import check_stationarity, gap
from .domains import ScaledSimplex
from .errors import ConfigError, DomainError, LineSearchError
from .objectives import (PROBLEMS, Q_MODES, STARTS, make_problem, scaled_weights,
                         start_point)
from .solvers import (PAIR_RULES, SOLVERS, SolverConfig, StopCriteria,
                      ToleranceSchedule, solve, write_trace)
from .stepsize import STEP_RULES, ArmijoParams, step_rule_from_name


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _add_solver_flags(p, defaults):
    p.add_argument("--step", choices=STEP_RULES, default="armijo")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--delta0", type=float, default=defaults.delta0)
    p.add_argument("--eps0", type=float, default=defaults.eps0)
    p.add_argument("--nu", type=float, default=defaults.nu)
    p.add_argument("--pair-rule", choices=PAIR_RULES, default="interleaved")
    p.add_argument("--gap-check-every", type=int, default=1)
    p.add_argument("--target-gap", type=float, default=0.1)
    p.add_argument("--max-iterations", type=int, default=500)


def build_parser():
    parser = _Parser(prog="pvmopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="run one method on one benchmark problem")
    p.add_argument("--problem", choices=PROBLEMS, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--method", choices=sorted(SOLVERS), default="pvm")
    p.add_argument("--start", choices=STARTS, default="uniform")
    p.add_argument("--q-mode", choices=Q_MODES)
    p.add_argument("--tau", type=float, default=10.0)
    p.add_argument("--trace", metavar="CSV", help="write one row per step to this file ('-' for stdout)")
    _add_solver_flags(p, bench.BENCH_SCHEDULE)

    p = sub.add_parser("bench", help="run a benchmark table")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--table", type=int, choices=range(1, 7), help="built-in reference table")
    src.add_argument("--config", metavar="INI", help="experiment config file")
    p.add_argument("--problem", choices=PROBLEMS)
    p.add_argument("--start", choices=STARTS)
    p.add_argument("--dims", help="comma-separated list of m values")
    p.add_argument("--methods", help="comma-separated subset of cgm,mdm,pvm")
    p.add_argument("--q-mode", choices=Q_MODES)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--compare", action="store_true", help="show reference cells next to measured ones")

    p = sub.add_parser("check", help="gap and stationarity of a supplied point")
    p.add_argument("--domain", choices=("simplex", "scaled"), default="simplex")
    p.add_argument("--tau", type=float, default=10.0)
    p.add_argument("--point", required=True, help="comma-separated coordinates or a CSV file")
    p.add_argument("--grad-of", choices=PROBLEMS, required=True, help="objective family")
    p.add_argument("--q-mode", choices=Q_MODES)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("paper-tables", help="run the six built-in reference tables")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    return parser


def _solver_config(args):
    armijo = ArmijoParams(args.beta, args.theta)
    return SolverConfig(
        armijo=armijo,
        step_rule=step_rule_from_name(args.step, armijo),
        schedule=ToleranceSchedule(args.delta0, args.eps0, args.nu),
        stop=StopCriteria(target_gap=args.target_gap, max_inner_iterations=args.max_iterations),
        gap_check_every=args.gap_check_every,
        pair_rule=args.pair_rule,
    )


def cmd_solve(args, out):
    domain, objective = make_problem(args.problem, args.m, args.q_mode, args.tau)
    rep = solve(args.method, domain, objective, _solver_config(args), start_point(domain, args.start))
    print(rep.summary(), file=out)
    if args.trace == "-":
        write_trace(rep, out)
    elif args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            write_trace(rep, fh)
    return 0


def _bench_spec(args):
    if args.table is not None:
        spec = bench.paper_spec(args.table)
    elif args.config:
        spec = bench.load_spec(args.config)
    else:
        if not (args.problem and args.start):
            raise ConfigError("bench needs --table, --config, or both --problem and --start")
        spec = bench.ExperimentSpec(args.problem, args.start)
    over = {}
    if args.problem and (args.table is not None or args.config):
        over["problem"] = args.problem
    if args.start and (args.table is not None or args.config):
        over["start"] = args.start
    if args.dims:
        try:
            over["dims"] = tuple(int(s) for s in args.dims.split(",") if s.strip())
        except ValueError:
            raise ConfigError(f"--dims {args.dims!r} must list integers") from None
    if args.methods:
        over["methods"] = tuple(s for s in args.methods.split(",") if s.strip())
    if args.q_mode:
        over["q_mode"] = args.q_mode
    if args.tau is not None:
        over["tau"] = args.tau
    if not over:
        return spec
    if "problem" in over or "start" in over or "q_mode" in over or "tau" in over:
        over["reference"] = None
    fields = {f: getattr(spec, f) for f in spec.__dataclass_fields__}
    fields.update(over)
    return bench.ExperimentSpec(**fields)


def cmd_bench(args, out):
    spec = _bench_spec(args)
    rows = bench.run_experiment(spec)
    if spec.name and args.format == "text":
        print(spec.name, file=out)
    if args.compare and spec.reference and args.format == "text":
        out.write(bench.emit_comparison(rows, spec.reference))
    else:
        out.write(bench.emit_table(rows, args.format))
    return 0


def cmd_paper_tables(args, out):
    for n, spec in enumerate(bench.paper_specs()):
        rows = bench.run_experiment(spec)
        if args.format == "csv":
            text = bench.emit_table(rows, "csv")
            # a table column keeps the concatenated CSV self-describing
            lines = text.splitlines()
            if n == 0:
                print("table," + lines[0], file=out)
            for line in lines[1:]:
                print(f"{n + 1},{line}", file=out)
        else:
            print(spec.name, file=out)
            out.write(bench.emit_comparison(rows, spec.reference))
            print(file=out)
    return 0


def _read_point(text):
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    tokens = [t for t in text.replace("\n", ",").split(",") if t.strip()]
    try:
        return np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise ConfigError(f"cannot parse point: {exc}") from None


def cmd_check(args, out):
    x = _read_point(args.point)
    m = x.size
    if m == 0:
        raise ConfigError("point is empty")
    if args.domain == "simplex":
        domain = ScaledSimplex.standard(m, args.tau)
    else:
        domain = ScaledSimplex(scaled_weights(m), args.tau)
    _, objective = make_problem(args.grad_of, m, args.q_mode)
    wp = domain.weights_of(x)
    g = objective.gradient(wp.point)
    rep = check_stationarity(domain, wp, g, args.tol)
    print(f"gap             {gap(domain, g, wp.point):.10g}", file=out)
    print(f"stationary      {str(rep.is_stationary).lower()}", file=out)
    print(f"worst_violation {rep.worst_violation:.10g}", file=out)
    print(f"tol             {rep.tol:g}", file=out)
    if rep.witness is not None:
        print(f"witness         {rep.witness[0]} {rep.witness[1]}", file=out)
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "check": cmd_check,
            "paper-tables": cmd_paper_tables}


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (LineSearchError, AssertionError) as exc:
        print(f"solver contract violated: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
