"""Problem data model, coverage computation and solution validation.

Demand sets are stored as Python ``int`` bitsets: bit ``i`` is set when
demand point ``i`` is in the set. Python integers are unbounded, so the
same representation works for any number of demand points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

# Absolute slack on the coverage test d <= r.
DISTANCE_EPS = 1e-9
# Serialized objectives carry 12 significant digits.
OBJECTIVE_RTOL = 1e-9


class BudgetMode(str, enum.Enum):
    AT_MOST = "at_most"
    EXACTLY = "exactly"


class InstanceError(ValueError):
    """An instance (or solution) violates the data model.

    ``path`` names the offending key, e.g. ``demand_points[3].weight``.
    """

    def __init__(self, message: str, path: str | None = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(frozen=True)
class DemandPoint:
    id: int
    x: float
    y: float
    weight: float


@dataclass(frozen=True)
class FacilitySite:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class Instance:
    demand_points: tuple[DemandPoint, ...]
    sites: tuple[FacilitySite, ...]
    radius: float
    budget: int
    budget_mode: BudgetMode = BudgetMode.AT_MOST

    def __post_init__(self):
        object.__setattr__(self, "demand_points", tuple(self.demand_points))
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "budget_mode", BudgetMode(self.budget_mode))
        n, m = len(self.demand_points), len(self.sites)
        if n < 1:
            raise InstanceError("at least one demand point is required", "demand_points")
        if m < 1:
            raise InstanceError("at least one site is required", "sites")
        for k, d in enumerate(self.demand_points):
            if d.id != k:
                raise InstanceError(f"id {d.id} out of sequence", f"demand_points[{k}].id")
            if not (math.isfinite(d.x) and math.isfinite(d.y)):
                raise InstanceError("coordinates must be finite", f"demand_points[{k}]")
            if not math.isfinite(d.weight) or d.weight < 0:
                raise InstanceError(
                    f"weight must be finite and >= 0, got {d.weight}",
                    f"demand_points[{k}].weight",
                )
        for k, s in enumerate(self.sites):
            if s.id != k:
                raise InstanceError(f"id {s.id} out of sequence", f"sites[{k}].id")
            if not (math.isfinite(s.x) and math.isfinite(s.y)):
                raise InstanceError("coordinates must be finite", f"sites[{k}]")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InstanceError(f"radius must be positive, got {self.radius}", "radius")
        if isinstance(self.budget, bool) or not isinstance(self.budget, int):
            raise InstanceError("budget must be an integer", "budget")
        if not 1 <= self.budget <= m:
            raise InstanceError(f"budget must lie in [1, {m}], got {self.budget}", "budget")

    @property
    def n(self) -> int:
        return len(self.demand_points)

    @property
    def m(self) -> int:
        return len(self.sites)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(d.weight for d in self.demand_points)

    @classmethod
    def from_arrays(cls, demand_xy, weights, site_xy, radius, budget,
                    budget_mode=BudgetMode.AT_MOST) -> "Instance":
        demand = [DemandPoint(i, float(x), float(y), float(w))
                  for i, ((x, y), w) in enumerate(zip(demand_xy, weights))]
        sites = [FacilitySite(j, float(x), float(y)) for j, (x, y) in enumerate(site_xy)]
        return cls(tuple(demand), tuple(sites), float(radius), int(budget), BudgetMode(budget_mode))

    def with_radius(self, radius: float) -> "Instance":
        return Instance(self.demand_points, self.sites, radius, self.budget, self.budget_mode)

    def with_budget(self, budget: int, budget_mode: BudgetMode | None = None) -> "Instance":
        return Instance(self.demand_points, self.sites, self.radius, budget,
                        self.budget_mode if budget_mode is None else budget_mode)


@dataclass(frozen=True)
class CoverageStructure:
    """Coverage sets ``S_j`` as bitsets and their transpose ``N(i)``."""

    facility_sets: tuple[int, ...]
    demand_neighbors: tuple[frozenset[int], ...]
    weights: tuple[float, ...]
    total_weight: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_weight", coverage_value(all_mask(len(self.weights)), self.weights))

    @classmethod
    def from_sets(cls, facility_sets: Sequence[int], weights: Sequence[float]) -> "CoverageStructure":
        """Build from raw bitsets, deriving the neighbor sets."""
        n = len(weights)
        neighbors: list[set[int]] = [set() for _ in range(n)]
        for j, s in enumerate(facility_sets):
            if s >> n:
                raise ValueError(f"facility set {j} references demand points beyond n={n}")
            for i in iter_bits(s):
                neighbors[i].add(j)
        return cls(tuple(facility_sets), tuple(frozenset(x) for x in neighbors), tuple(weights))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def m(self) -> int:
        return len(self.facility_sets)

    def union_mask(self, selected: Iterable[int]) -> int:
        mask = 0
        for j in selected:
            mask |= self.facility_sets[j]
        return mask

    def value(self, mask: int) -> float:
        return coverage_value(mask, self.weights)


@dataclass(frozen=True)
class Solution:
    selected: tuple[int, ...]
    covered_mask: int
    objective: float
    solver_name: str

    def __post_init__(self):
        object.__setattr__(self, "selected", tuple(sorted(self.selected)))

    @property
    def covered(self) -> list[int]:
        return list(iter_bits(self.covered_mask))

    def coverage_percent(self, total_weight: float) -> float:
        return 100.0 * self.objective / total_weight if total_weight > 0 else 0.0


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of set bits in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def all_mask(n: int) -> int:
    return (1 << n) - 1


def distance(a, b) -> float:
    """Euclidean distance between two points given as ``(x, y)`` or objects with ``.x``/``.y``."""
    ax, ay = (a.x, a.y) if hasattr(a, "x") else a
    bx, by = (b.x, b.y) if hasattr(b, "x") else b
    return math.hypot(ax - bx, ay - by)


def build_coverage(instance: Instance) -> CoverageStructure:
    limit = instance.radius + DISTANCE_EPS
    sets = []
    for site in instance.sites:
        mask = 0
        for d in instance.demand_points:
            if distance(d, site) <= limit:
                mask |= 1 << d.id
        sets.append(mask)
    return CoverageStructure.from_sets(sets, instance.weights)


def coverage_value(mask: int, weights) -> float:
    """Total weight of the demand points in ``mask``.

    ``weights`` may be an :class:`Instance`, a :class:`CoverageStructure` or a
    plain sequence. Terms are always added in ascending index order, so equal
    masks give bit-identical sums regardless of which solver asks.
    """
    if isinstance(weights, (Instance, CoverageStructure)):
        weights = weights.weights
    total = 0.0
    for i in iter_bits(mask):
        total += weights[i]
    return total


@dataclass(frozen=True)
class Violation:
    constraint: str  # "budget" | "coverage" | "objective" | "index"
    detail: str

    def __str__(self):
        return f"{self.constraint}: {self.detail}"


def validate_solution(solution: Solution, instance: Instance,
                      coverage: CoverageStructure) -> list[Violation]:
    """Return every constraint the solution violates; empty means feasible and consistent."""
    report = []
    selected = list(solution.selected)
    bad = [j for j in selected if not 0 <= j < coverage.m]
    if bad:
        report.append(Violation("index", f"unknown facility ids {bad}"))
        selected = [j for j in selected if 0 <= j < coverage.m]
    if len(set(selected)) != len(selected):
        report.append(Violation("index", "duplicate facility ids"))
    if solution.covered_mask < 0 or solution.covered_mask >> coverage.n:
        report.append(Violation("index", "covered mask references unknown demand points"))

    count = len(set(selected))
    if count > instance.budget:
        report.append(Violation("budget", f"{count} facilities selected, budget is {instance.budget}"))
    elif instance.budget_mode is BudgetMode.EXACTLY and count != instance.budget:
        report.append(Violation("budget", f"{count} facilities selected, exactly {instance.budget} required"))

    union = coverage.union_mask(selected)
    over = solution.covered_mask & ~union
    under = union & ~solution.covered_mask
    if over:
        report.append(Violation("coverage", f"demand points {list(iter_bits(over))} claimed but not covered"))
    if under:
        report.append(Violation("coverage", f"demand points {list(iter_bits(under))} covered but not claimed"))

    if solution.covered_mask >= 0:
        expected = coverage_value(solution.covered_mask & all_mask(coverage.n), coverage.weights)
        if not math.isclose(solution.objective, expected, rel_tol=OBJECTIVE_RTOL, abs_tol=OBJECTIVE_RTOL):
            report.append(Violation("objective", f"objective {solution.objective!r} != mask weight {expected!r}"))
    return report
