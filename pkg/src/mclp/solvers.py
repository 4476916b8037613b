"""Greedy, exact frontier DP, and brute-force solvers.

The DP follows the skip/take knapsack recurrence over facilities, one layer
per facility. A count-indexed scalar table is not enough to evaluate the
gain of taking a facility (the gain depends on *which* demand is already
covered), so each DP cell is a set of frontier states ``(mask, count)``;
the scalar optimum is the best value over the final frontier.

Reductions, each switchable through :class:`SolverConfig`:

* dominance pruning: drop ``(mask, f)`` when some other state has
  ``mask' >= mask`` (superset) and ``f' <= f``;
* symmetry merge: facilities with identical coverage sets are processed once;
* greedy bound: the greedy objective is an incumbent, and a state is dropped
  when its value plus the ``budget - f`` largest remaining standalone set
  weights cannot reach it;
* facility ordering: process facilities by descending standalone weight.

Only the current layer is kept in memory; each state carries a cons-list
trace ``(facility, parent_trace)`` from which the selection is recovered.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .model import BudgetMode, CoverageStructure, Instance, Solution, coverage_value

# Largest demand count accepted by dp_solve. Masks are unbounded ints, the cap
# only guards memory on pathological inputs.
DP_MAX_DEMAND = 4096
# Largest number of subsets brute_force_solve will enumerate.
BRUTE_FORCE_MAX_SUBSETS = 10_000_000
# Dense superset tables are used for dominance when n is at most this.
DENSE_DOMINANCE_MAX_N = 22
DENSE_DOMINANCE_MIN_STATES = 4096

_INF_COUNT = 127


class SolverCapError(RuntimeError):
    """The instance is beyond a documented solver size cap."""


@dataclass(frozen=True)
class SolverConfig:
    enable_dominance_pruning: bool = True
    enable_symmetry_merge: bool = True
    enable_greedy_bound: bool = True
    enable_facility_ordering: bool = True
    state_limit: int = 1_000_000
    time_limit: float | None = None

    def __post_init__(self):
        if self.state_limit < 1:
            raise ValueError("state_limit must be >= 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


@dataclass
class SolveStats:
    states_expanded: int = 0
    states_pruned_dominance: int = 0
    facilities_removed_preprocess: int = 0
    bound_prunes: int = 0
    wall_time: float = 0.0
    exact: bool = False

    def as_dict(self, include_time: bool = True) -> dict:
        d = {
            "states_expanded": self.states_expanded,
            "states_pruned_dominance": self.states_pruned_dominance,
            "facilities_removed_preprocess": self.facilities_removed_preprocess,
            "bound_prunes": self.bound_prunes,
            "exact": self.exact,
        }
        if include_time:
            d["wall_time"] = self.wall_time
        return d


class FrontierState(NamedTuple):
    mask: int
    count: int
    value: float
    choice_trace: tuple | None  # (facility, parent_trace) cons list

    def selected(self) -> list[int]:
        return _unwind(self.choice_trace)


def _unwind(trace) -> list[int]:
    out = []
    while trace is not None:
        j, trace = trace
        out.append(j)
    return sorted(out)


def marginal_benefit(j: int, current_mask: int, coverage: CoverageStructure,
                     instance: Instance | None = None) -> float:
    """Weight newly covered by adding facility ``j`` to ``current_mask``."""
    return coverage_value(coverage.facility_sets[j] & ~current_mask, coverage.weights)


def _effective_budget(instance: Instance, coverage: CoverageStructure) -> int:
    return min(instance.budget, coverage.m)


def _finish(selected, instance: Instance, coverage: CoverageStructure, name: str) -> Solution:
    """Pad Exactly-mode selections with the lowest unused ids, then recompute mask and value."""
    selected = sorted(set(selected))
    budget = _effective_budget(instance, coverage)
    if instance.budget_mode is BudgetMode.EXACTLY and len(selected) < budget:
        chosen = set(selected)
        for j in range(coverage.m):
            if len(selected) == budget:
                break
            if j not in chosen:
                selected.append(j)
        selected.sort()
    mask = coverage.union_mask(selected)
    return Solution(tuple(selected), mask, coverage_value(mask, coverage.weights), name)


def greedy_sequence(instance: Instance, coverage: CoverageStructure) -> list[tuple[int, float]]:
    """Greedy picks as ``(facility, gain)`` pairs, stopping at the budget or at zero gain.

    Ties go to the lowest facility index.
    """
    budget = _effective_budget(instance, coverage)
    mask = 0
    picks: list[tuple[int, float]] = []
    chosen: set[int] = set()
    while len(picks) < budget:
        best_j, best_gain = None, 0.0
        for j in range(coverage.m):
            if j in chosen:
                continue
            gain = marginal_benefit(j, mask, coverage)
            if gain > best_gain:
                best_j, best_gain = j, gain
        if best_j is None:
            break
        picks.append((best_j, best_gain))
        chosen.add(best_j)
        mask |= coverage.facility_sets[best_j]
    return picks


def greedy_solve(instance: Instance, coverage: CoverageStructure) -> tuple[Solution, SolveStats]:
    t0 = time.perf_counter()
    picks = greedy_sequence(instance, coverage)
    solution = _finish([j for j, _ in picks], instance, coverage, "greedy")
    stats = SolveStats(states_expanded=len(picks), wall_time=time.perf_counter() - t0, exact=False)
    return solution, stats


def preprocess(coverage: CoverageStructure) -> tuple[CoverageStructure, list[int]]:
    """Drop facilities whose set is contained in another facility's set.

    Among equal sets the lowest index survives. Returns the reduced structure
    and ``remap`` where ``remap[k]`` is the original id of surviving facility ``k``.
    """
    sets = coverage.facility_sets
    remap = []
    for j, s in enumerate(sets):
        dominated = False
        for k, t in enumerate(sets):
            if k == j or s & ~t:
                continue
            if s != t or k < j:
                dominated = True
                break
        if not dominated:
            remap.append(j)
    reduced = CoverageStructure.from_sets([sets[j] for j in remap], coverage.weights)
    return reduced, remap


def brute_force_solve(instance: Instance, coverage: CoverageStructure,
                      max_subsets: int = BRUTE_FORCE_MAX_SUBSETS) -> Solution:
    """Enumerate every admissible subset; ties go to the lexicographically smallest id list."""
    m = coverage.m
    budget = _effective_budget(instance, coverage)
    if instance.budget_mode is BudgetMode.EXACTLY:
        sizes = [budget]
    else:
        sizes = list(range(budget + 1))
    total = sum(math.comb(m, k) for k in sizes)
    if total > max_subsets:
        raise SolverCapError(f"brute force would enumerate {total} subsets (cap {max_subsets})")

    sets, weights = coverage.facility_sets, coverage.weights
    best_combo, best_value = None, -1.0
    for k in sizes:
        for combo in itertools.combinations(range(m), k):
            mask = 0
            for j in combo:
                mask |= sets[j]
            value = coverage_value(mask, weights)
            if value > best_value or (value == best_value and combo < best_combo):
                best_combo, best_value = combo, value
    return _finish(best_combo, instance, coverage, "brute")


def _suffix_bounds(order: list[int], standalone: list[float], budget: int) -> list[list[float]]:
    """``bounds[k][r]``: sum of the ``r`` largest standalone weights among ``order[k:]``."""
    bounds = []
    for k in range(len(order) + 1):
        top = sorted((standalone[j] for j in order[k:]), reverse=True)[:budget]
        sums = [0.0]
        for w in top:
            sums.append(sums[-1] + w)
        while len(sums) <= budget:
            sums.append(sums[-1])
        bounds.append(sums)
    return bounds


def _nondominated_pairwise(states: dict[int, int]) -> set[int]:
    """Masks not strictly dominated by another (mask' superset, count' <= count)."""
    ordered = sorted(states.items(), key=lambda kv: -kv[0].bit_count())
    kept: list[tuple[int, int]] = []
    for mask, f in ordered:
        for other, g in kept:
            if g <= f and mask & other == mask:
                break
        else:
            kept.append((mask, f))
    return {mask for mask, _ in kept}


def _nondominated_dense(states: dict[int, int], n: int) -> set[int]:
    size = 1 << n
    masks = np.fromiter(states.keys(), dtype=np.int64, count=len(states))
    counts = np.fromiter(states.values(), dtype=np.int8, count=len(states))
    table = np.full(size, _INF_COUNT, dtype=np.int8)
    table[masks] = counts
    # table[x] -> min count over supersets of x
    for b in range(n):
        view = table.reshape(-1, 2, 1 << b)
        np.minimum(view[:, 0, :], view[:, 1, :], out=view[:, 0, :])
    strict = np.full(size, _INF_COUNT, dtype=np.int8)
    for b in range(n):
        sv = strict.reshape(-1, 2, 1 << b)
        tv = table.reshape(-1, 2, 1 << b)
        np.minimum(sv[:, 0, :], tv[:, 1, :], out=sv[:, 0, :])
    keep = strict[masks] > counts
    return set(masks[keep].tolist())


def dp_solve(instance: Instance, coverage: CoverageStructure,
             config: SolverConfig | None = None,
             observer: Callable[[int, list[FrontierState]], None] | None = None,
             ) -> tuple[Solution, SolveStats]:
    """Exact DP over coverage-mask frontier states.

    ``stats.exact`` is true unless ``state_limit`` or ``time_limit`` cut the
    search short; only then may the objective fall below the optimum.
    ``observer(layer, states)`` is called after every facility layer.
    """
    config = config or SolverConfig()
    t0 = time.perf_counter()
    n, m = coverage.n, coverage.m
    if n > DP_MAX_DEMAND:
        raise SolverCapError(f"dp_solve supports at most {DP_MAX_DEMAND} demand points, got {n}")
    stats = SolveStats(exact=True)
    sets, weights = coverage.facility_sets, coverage.weights
    budget = _effective_budget(instance, coverage)

    values: dict[int, float] = {}

    def value_of(mask: int) -> float:
        v = values.get(mask)
        if v is None:
            v = values[mask] = coverage_value(mask, weights)
        return v

    order = [j for j in range(m) if sets[j]]
    if config.enable_symmetry_merge:
        seen: set[int] = set()
        unique = []
        for j in order:
            if sets[j] in seen:
                stats.facilities_removed_preprocess += 1
                continue
            seen.add(sets[j])
            unique.append(j)
        order = unique
    standalone = [value_of(s) for s in sets]
    if config.enable_facility_ordering:
        order.sort(key=lambda j: (-standalone[j], j))

    incumbent = None
    slack = 0.0
    bounds = None
    if config.enable_greedy_bound:
        incumbent, _ = greedy_solve(instance, coverage)
        # float sums in different orders may disagree in the last bits
        slack = 1e-9 * max(coverage.total_weight, 1.0)
        bounds = _suffix_bounds(order, standalone, budget)

    # key (mask, count) -> trace; dict order keeps everything deterministic
    frontier: dict[tuple[int, int], tuple | None] = {(0, 0): None}
    for k, j in enumerate(order):
        if config.time_limit is not None and time.perf_counter() - t0 > config.time_limit:
            stats.exact = False
            break
        s = sets[j]
        nxt: dict[tuple[int, int], tuple | None] = {}
        for (mask, f), trace in frontier.items():
            if bounds is not None and value_of(mask) + bounds[k][budget - f] < incumbent.objective - slack:
                stats.bound_prunes += 1
                continue
            stats.states_expanded += 1
            if (mask, f) not in nxt:
                nxt[(mask, f)] = trace
            if f < budget and s & ~mask:
                key = (mask | s, f + 1)
                if key not in nxt:
                    nxt[key] = (j, trace)

        if config.enable_dominance_pruning:
            nxt = _prune_dominated(nxt, n, stats)
        if len(nxt) > config.state_limit:
            ranked = sorted(nxt.items(), key=lambda kv: -value_of(kv[0][0]))
            nxt = dict(ranked[: config.state_limit])
            stats.exact = False
        frontier = nxt
        if observer is not None:
            observer(k, [FrontierState(mask, f, value_of(mask), tr) for (mask, f), tr in frontier.items()])

    best_key, best_trace = None, None
    best_rank = None
    for (mask, f), trace in frontier.items():
        rank = (-value_of(mask), f)
        if best_rank is None or rank < best_rank or (rank == best_rank and _unwind(trace) < _unwind(best_trace)):
            best_key, best_trace, best_rank = (mask, f), trace, rank

    selected = _unwind(best_trace)
    if incumbent is not None and (best_key is None or incumbent.objective > value_of(best_key[0])):
        selected = list(incumbent.selected)
    solution = _finish(selected, instance, coverage, "dp")
    stats.wall_time = time.perf_counter() - t0
    return solution, stats


def _prune_dominated(states: dict, n: int, stats: SolveStats) -> dict:
    min_count: dict[int, int] = {}
    for mask, f in states:
        g = min_count.get(mask)
        if g is None or f < g:
            min_count[mask] = f
    if len(min_count) >= DENSE_DOMINANCE_MIN_STATES and n <= DENSE_DOMINANCE_MAX_N:
        alive = _nondominated_dense(min_count, n)
    else:
        alive = _nondominated_pairwise(min_count)
    out = {key: tr for key, tr in states.items() if key[0] in alive and min_count[key[0]] == key[1]}
    stats.states_pruned_dominance += len(states) - len(out)
    return out


SOLVERS = ("dp", "greedy", "brute")


def solve(instance: Instance, coverage: CoverageStructure, solver: str = "dp",
          config: SolverConfig | None = None, use_preprocess: bool = False,
          ) -> tuple[Solution, SolveStats]:
    """Run a solver by name, optionally on preprocessed coverage (ids mapped back)."""
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; choose from {SOLVERS}")
    work, remap = coverage, None
    if use_preprocess:
        work, remap = preprocess(coverage)

    if solver == "dp":
        solution, stats = dp_solve(instance, work, config)
    elif solver == "greedy":
        solution, stats = greedy_solve(instance, work)
    else:
        t0 = time.perf_counter()
        solution = brute_force_solve(instance, work)
        stats = SolveStats(states_expanded=0, wall_time=time.perf_counter() - t0, exact=True)

    if remap is not None:
        stats.facilities_removed_preprocess += coverage.m - work.m
        picked = [remap[j] for j in solution.selected]
        solution = _finish(picked, instance, coverage, solution.solver_name)
    return solution, stats
