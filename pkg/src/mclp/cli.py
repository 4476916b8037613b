"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 solver size cap exceeded. Data goes to files or stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis
from .generator import Distribution, GeneratorConfig, GeneratorConfigError, generate
from .io import (
    TOOL_VERSION,
    ParseError,
    RunManifest,
    parse_instance,
    parse_solution,
    serialize_instance,
    serialize_solution,
)
from .model import BudgetMode, InstanceError, build_coverage, validate_solution
from .solvers import SOLVERS, SolverCapError, SolverConfig, solve

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    """Comma list with optional ranges, e.g. ``1,2,5-8``."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers or ranges, got {text!r}") from None
    return out


def _add_solver_flags(p):
    p.add_argument("--solver", choices=SOLVERS, default="dp")
    p.add_argument("--no-dominance", action="store_true", help="disable coverage dominance pruning")
    p.add_argument("--no-symmetry", action="store_true", help="disable identical-set merging")
    p.add_argument("--no-greedy-bound", action="store_true", help="disable the greedy incumbent bound")
    p.add_argument("--no-ordering", action="store_true", help="process facilities in id order")
    p.add_argument("--preprocess", action="store_true", help="drop facilities whose set is contained in another's")
    p.add_argument("--state-limit", type=int, default=1_000_000)
    p.add_argument("--time-limit", type=float, default=None, help="seconds")


def _add_generator_flags(p, batch=False):
    if not batch:
        p.add_argument("--n", type=int, required=False)
        p.add_argument("--m", type=int, required=False)
    p.add_argument("--radius", type=float)
    b = p.add_mutually_exclusive_group()
    b.add_argument("--budget", type=int)
    b.add_argument("--budget-fraction", type=float)
    p.add_argument("--budget-mode", choices=[e.value for e in BudgetMode], default="at_most")
    p.add_argument("--distribution", choices=[e.value for e in Distribution], default="uniform")
    p.add_argument("--cluster-count", type=int, default=3)
    p.add_argument("--cluster-spread", type=float, default=5.0)
    p.add_argument("--weight-low", type=float, default=1.0)
    p.add_argument("--weight-high", type=float, default=10.0)
    p.add_argument("--area", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mclp", description="Maximal covering location solver and experiments.")
    parser.add_argument("--version", action="version", version=f"mclp {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("generate", help="write a seeded synthetic instance")
    _add_generator_flags(g)
    g.add_argument("--config", type=Path, help="GeneratorConfig as JSON; flags given explicitly are ignored")
    g.add_argument("-o", "--output", type=Path, help="instance file (stdout if omitted)")

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance", type=Path)
    _add_solver_flags(s)
    s.add_argument("--budget-mode", choices=[e.value for e in BudgetMode], help="override the file's mode")
    s.add_argument("-o", "--output", type=Path, help="solution file (stdout if omitted)")

    for name, helptext in (("sweep-radius", "re-solve over ascending radii"),
                           ("sweep-budget", "re-solve over ascending budgets")):
        w = sub.add_parser(name, help=helptext)
        w.add_argument("instance", type=Path)
        if name == "sweep-radius":
            w.add_argument("--values", type=_float_list, required=True, help="e.g. 10,15,20,25")
            w.add_argument("--budget", type=int, help="override the file's budget")
        else:
            w.add_argument("--values", type=_int_list, required=True, help="e.g. 3-8 or 1,2,4")
        _add_solver_flags(w)
        w.add_argument("--format", choices=["csv", "json"], default="csv")
        w.add_argument("-o", "--output", type=Path)

    c = sub.add_parser(
        "compare", help="DP vs greedy table",
        description="Compare DP and greedy coverage. Size classes by demand count: "
                    "Small n<=15, Medium 16<=n<=40, Large n>=41.")
    c.add_argument("instances", type=Path, nargs="*", help="instance files")
    c.add_argument("--batch", type=int, help="generate this many instances instead of reading files")
    c.add_argument("--n-range", type=_int_list, default=[10, 15], help="lo,hi demand count for --batch")
    c.add_argument("--m-range", type=_int_list, default=[5, 10], help="lo,hi site count for --batch")
    _add_generator_flags(c, batch=True)
    c.add_argument("--state-limit", type=int, default=1_000_000)
    c.add_argument("--format", choices=["csv", "json"], default="csv")
    c.add_argument("-o", "--output", type=Path)

    v = sub.add_parser("validate", help="check a solution against an instance")
    v.add_argument("instance", type=Path)
    v.add_argument("solution", type=Path)
    return parser


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        enable_dominance_pruning=not args.no_dominance,
        enable_symmetry_merge=not args.no_symmetry,
        enable_greedy_bound=not args.no_greedy_bound,
        enable_facility_ordering=not args.no_ordering,
        state_limit=args.state_limit,
        time_limit=args.time_limit,
    )


def _read_instance(path: Path):
    try:
        return parse_instance(path.read_bytes())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(data: bytes, output: Path | None):
    if output is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        output.write_bytes(data)


def _write_manifest(output: Path | None, command: str, config: dict, artifacts: list[Path]):
    if output is None:
        return
    manifest = RunManifest(command, config, [str(p) for p in artifacts])
    Path(str(output) + ".manifest.json").write_bytes(manifest.to_bytes())


def _generator_config(args, n=None, m=None, seed=None) -> GeneratorConfig:
    budget, fraction = args.budget, args.budget_fraction
    if budget is None and fraction is None:
        fraction = 0.4
    return GeneratorConfig(
        n=n if n is not None else args.n,
        m=m if m is not None else args.m,
        radius=args.radius,
        budget=budget,
        budget_fraction=fraction,
        budget_mode=args.budget_mode,
        distribution=args.distribution,
        cluster_count=args.cluster_count,
        cluster_spread=args.cluster_spread,
        weight_range=(args.weight_low, args.weight_high),
        area=args.area,
        seed=args.seed if seed is None else seed,
    )


def cmd_generate(args) -> int:
    if args.config is not None:
        try:
            config = GeneratorConfig.from_dict(json.loads(args.config.read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot load {args.config}: {exc}") from None
    else:
        if args.n is None or args.m is None or args.radius is None:
            raise UsageError("generate needs --n, --m and --radius (or --config)")
        config = _generator_config(args)
    data = serialize_instance(generate(config))
    _emit(data, args.output)
    _write_manifest(args.output, "generate", config.to_dict(), [args.output])
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = _read_instance(args.instance)
    if args.budget_mode:
        instance = instance.with_budget(instance.budget, BudgetMode(args.budget_mode))
    coverage = build_coverage(instance)
    config = _solver_config(args)
    solution, stats = solve(instance, coverage, args.solver, config, use_preprocess=args.preprocess)
    _emit(serialize_solution(solution, stats, coverage), args.output)
    pct = solution.coverage_percent(coverage.total_weight)
    print(f"{args.solver}: Z={solution.objective:.6g} coverage={pct:.1f}% "
          f"facilities={list(solution.selected)} exact={str(stats.exact).lower()} "
          f"time={stats.wall_time:.3f}s", file=sys.stderr)
    echo = {"instance": str(args.instance), "solver": args.solver, "preprocess": args.preprocess,
            "budget_mode": instance.budget_mode.value, **vars(config)}
    _write_manifest(args.output, "solve", echo, [args.output])
    return EXIT_OK


def cmd_sweep(args) -> int:
    instance = _read_instance(args.instance)
    config = _solver_config(args)
    if args.command == "sweep-radius":
        report = analysis.radius_sweep(instance, args.values, budget=args.budget,
                                       solver=args.solver, config=config)
    else:
        report = analysis.budget_sweep(instance, args.values, solver=args.solver, config=config)
    text = report.to_csv() if args.format == "csv" else report.to_json()
    _emit(text.encode("utf-8"), args.output)
    for row in report.rows:
        if row.failed:
            print(f"row {row.parameter_value}: {row.error}", file=sys.stderr)
    echo = {"instance": str(args.instance), "solver": args.solver, "values": args.values, **vars(config)}
    _write_manifest(args.output, args.command, echo, [args.output])
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.batch is not None and args.instances:
        raise UsageError("give instance files or --batch, not both")
    if args.batch is not None:
        if args.radius is None:
            raise UsageError("--batch needs --radius")
        if len(args.n_range) != 2 or len(args.m_range) != 2:
            raise UsageError("--n-range and --m-range take lo,hi")
        instances, labels, configs = [], [], []
        for k in range(args.batch):
            seed = args.seed + k
            n = args.n_range[0] + k % (args.n_range[1] - args.n_range[0] + 1)
            m = args.m_range[0] + k % (args.m_range[1] - args.m_range[0] + 1)
            cfg = _generator_config(args, n=n, m=m, seed=seed)
            instances.append(generate(cfg))
            labels.append(f"seed{seed}_n{n}_m{m}")
            configs.append(cfg.to_dict())
        echo = {"batch": configs}
    elif args.instances:
        instances = [_read_instance(p) for p in args.instances]
        labels = [p.stem for p in args.instances]
        echo = {"instances": [str(p) for p in args.instances]}
    else:
        raise UsageError("compare needs instance files or --batch")
    config = SolverConfig(state_limit=args.state_limit)
    report = analysis.compare_solvers(instances, labels, config=config)
    text = report.to_csv() if args.format == "csv" else report.to_json()
    _emit(text.encode("utf-8"), args.output)
    for name, dp, gr, imp, count in report.summary():
        print(f"{name:<6} n={count:<3} DP {dp:.1f}%  greedy {gr:.1f}%  improvement {imp:.1f}", file=sys.stderr)
    echo["state_limit"] = args.state_limit
    _write_manifest(args.output, "compare", echo, [args.output])
    return EXIT_OK


def cmd_validate(args) -> int:
    instance = _read_instance(args.instance)
    try:
        parsed = parse_solution(args.solution.read_bytes())
    except OSError as exc:
        raise UsageError(f"cannot read {args.solution}: {exc.strerror}") from None
    report = validate_solution(parsed.solution, instance, build_coverage(instance))
    if not report:
        print("ok")
        return EXIT_OK
    for violation in report:
        print(violation)
    return EXIT_DATA


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "sweep-radius": cmd_sweep,
    "sweep-budget": cmd_sweep,
    "compare": cmd_compare,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mclp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverCapError as exc:
        print(f"mclp: solver cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ParseError, InstanceError, GeneratorConfigError, ValueError) as exc:
        print(f"mclp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
