"""Radius/budget sensitivity sweeps and DP-vs-greedy comparison tables."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from statistics import mean

from .model import BudgetMode, CoverageStructure, Instance, Solution, build_coverage, coverage_value
from .solvers import SolverCapError, SolverConfig, solve

# Size classes by demand count, for the comparison summary rows.
SIZE_CLASSES = (("Small", 1, 15), ("Medium", 16, 40), ("Large", 41, None))


def size_class(n: int) -> str:
    for name, lo, hi in SIZE_CLASSES:
        if n >= lo and (hi is None or n <= hi):
            return name
    raise ValueError(n)


def efficiency(coverage_percent: float, facilities_used: int) -> float:
    """Coverage percentage per facility used."""
    if facilities_used < 1:
        raise ValueError("facilities_used must be >= 1")
    return coverage_percent / facilities_used


def marginal_column(coverages: list[float]) -> list[float | None]:
    """Successive differences; the first entry has no predecessor and is ``None``."""
    if not coverages:
        raise ValueError("need at least one coverage value")
    return [None] + [b - a for a, b in zip(coverages, coverages[1:])]


def facilities_used(solution: Solution, instance: Instance, coverage: CoverageStructure) -> int:
    """Facilities doing real work.

    In AtMost mode a selected facility counts only if dropping it would lose
    positive weight; in Exactly mode every selected facility counts.
    """
    if instance.budget_mode is BudgetMode.EXACTLY:
        return len(solution.selected)
    used = 0
    for j in solution.selected:
        others = coverage.union_mask(k for k in solution.selected if k != j)
        if coverage_value(coverage.facility_sets[j] & ~others, coverage.weights) > 0:
            used += 1
    return used


@dataclass
class SweepRow:
    parameter_value: float
    coverage_percent: float | None
    facilities_used: int | None
    derived_metric: float | None
    objective: float | None = None
    selected: tuple[int, ...] = ()
    exact: bool | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class SweepReport:
    parameter_name: str
    solver_name: str
    rows: list[SweepRow] = field(default_factory=list)

    def coverage_column(self) -> list[float | None]:
        return [r.coverage_percent for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.parameter_name, "coverage_percent", "facilities_used",
                    "efficiency" if self.parameter_name == "radius" else "marginal_percent",
                    "objective", "exact", "error"])
        for r in self.rows:
            w.writerow([_num(r.parameter_value), _pct(r.coverage_percent),
                        "" if r.facilities_used is None else r.facilities_used,
                        _pct(r.derived_metric), _num(r.objective),
                        "" if r.exact is None else str(r.exact).lower(), r.error or ""])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {"parameter_name": self.parameter_name, "solver_name": self.solver_name,
                   "rows": [asdict(r) | {"selected": list(r.selected)} for r in self.rows]}
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _pct(v) -> str:
    return "" if v is None else f"{v:.2f}"


def _num(v) -> str:
    return "" if v is None else format(v, ".12g")


def _run_row(instance: Instance, coverage: CoverageStructure, value, solver, config):
    try:
        solution, stats = solve(instance, coverage, solver, config)
    except (SolverCapError, ValueError) as exc:
        return SweepRow(value, None, None, None, error=str(exc)), None
    pct = solution.coverage_percent(coverage.total_weight)
    used = facilities_used(solution, instance, coverage)
    row = SweepRow(value, pct, used, None, solution.objective, solution.selected, stats.exact)
    return row, solution


def radius_sweep(instance: Instance, radii, budget: int | None = None, solver: str = "dp",
                 config: SolverConfig | None = None) -> SweepReport:
    """Re-solve the same points and sites at each radius; derived metric is efficiency."""
    radii = list(radii)
    if any(r <= 0 for r in radii) or radii != sorted(radii):
        raise ValueError("radii must be positive and ascending")
    base = instance if budget is None else instance.with_budget(budget)
    report = SweepReport("radius", solver)
    for r in radii:
        inst = base.with_radius(float(r))
        row, _ = _run_row(inst, build_coverage(inst), r, solver, config)
        if not row.failed and row.facilities_used:
            row.derived_metric = efficiency(row.coverage_percent, row.facilities_used)
        report.rows.append(row)
    return report


def budget_sweep(instance: Instance, budgets, solver: str = "dp",
                 config: SolverConfig | None = None) -> SweepReport:
    """Re-solve at each budget; derived metric is the coverage gain over the previous row."""
    budgets = list(budgets)
    if budgets != sorted(budgets) or any(not 1 <= p <= instance.m for p in budgets):
        raise ValueError(f"budgets must be ascending and within [1, {instance.m}]")
    coverage = build_coverage(instance)
    report = SweepReport("budget", solver)
    for p in budgets:
        row, _ = _run_row(instance.with_budget(p), coverage, p, solver, config)
        report.rows.append(row)
    prev = None
    for row in report.rows:
        if row.failed:
            prev = None
            continue
        row.derived_metric = None if prev is None else row.coverage_percent - prev
        prev = row.coverage_percent
    return report


@dataclass
class ComparisonRow:
    instance_label: str
    n: int
    dp_coverage_percent: float
    greedy_coverage_percent: float
    improvement_percent: float
    dp_exact: bool


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow] = field(default_factory=list)

    def summary(self) -> list[tuple[str, float, float, float, int]]:
        """Per size class: (class, mean dp %, mean greedy %, mean improvement, count)."""
        out = []
        for name, _, _ in SIZE_CLASSES:
            rows = [r for r in self.rows if size_class(r.n) == name]
            if rows:
                out.append((name, mean(r.dp_coverage_percent for r in rows),
                            mean(r.greedy_coverage_percent for r in rows),
                            mean(r.improvement_percent for r in rows), len(rows)))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "n", "dp_percent", "greedy_percent", "improvement_percent", "dp_exact"])
        for r in self.rows:
            w.writerow([r.instance_label, r.n, _pct(r.dp_coverage_percent), _pct(r.greedy_coverage_percent),
                        _pct(r.improvement_percent), str(r.dp_exact).lower()])
        for name, dp, gr, imp, count in self.summary():
            w.writerow([f"mean:{name}", count, _pct(dp), _pct(gr), _pct(imp), ""])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {"rows": [asdict(r) for r in self.rows],
                   "summary": [dict(zip(("size_class", "dp_percent", "greedy_percent",
                                         "improvement_percent", "count"), s)) for s in self.summary()]}
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def compare_solvers(instances, labels=None, budget: int | float | None = None,
                    config: SolverConfig | None = None) -> ComparisonReport:
    """Run DP and greedy on each instance.

    ``budget`` overrides each instance's budget: an int is used as is, a float
    in (0, 1] is a fraction of the site count (rounded up).
    """
    instances = list(instances)
    labels = list(labels) if labels is not None else [f"instance_{k}" for k in range(len(instances))]
    report = ComparisonReport()
    for label, inst in zip(labels, instances):
        if isinstance(budget, float):
            inst = inst.with_budget(max(1, math.ceil(budget * inst.m - 1e-9)))
        elif isinstance(budget, int):
            inst = inst.with_budget(budget)
        cov = build_coverage(inst)
        dp, stats = solve(inst, cov, "dp", config)
        gr, _ = solve(inst, cov, "greedy")
        dp_pct = dp.coverage_percent(cov.total_weight)
        gr_pct = gr.coverage_percent(cov.total_weight)
        report.rows.append(ComparisonRow(label, inst.n, dp_pct, gr_pct, dp_pct - gr_pct, stats.exact))
    return report
