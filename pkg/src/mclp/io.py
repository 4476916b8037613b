"""Instance/solution JSON files and run manifests.

Output is canonical: sorted keys, two-space indent, floats rounded to 12
significant digits and integral floats written as integers. Parsing a
canonical file and serializing it again reproduces the same bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .model import (
    BudgetMode,
    CoverageStructure,
    DemandPoint,
    FacilitySite,
    Instance,
    InstanceError,
    Solution,
    iter_bits,
    mask_of,
)
from .solvers import SolveStats

TOOL_VERSION = "0.1.0"


class ParseError(InstanceError):
    """Base class for file parsing failures; ``path`` names the offending key."""


class MalformedInputError(ParseError):
    """The bytes are not valid UTF-8 JSON."""


class SchemaError(ParseError):
    """A key is missing or has the wrong type."""


class InvariantViolation(ParseError):
    """Well-formed data that breaks a model invariant (negative weight, budget range, ...)."""


def _canon(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite number in output")
        rounded = float(format(value, ".12g"))
        if rounded.is_integer() and abs(rounded) < 1e15:
            return int(rounded)
        return rounded
    if isinstance(value, dict):
        return {str(k): _canon(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canon(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_canonical(payload) -> bytes:
    return (json.dumps(_canon(payload), sort_keys=True, indent=2, allow_nan=False) + "\n").encode("utf-8")


def _load(data: bytes | str):
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInputError(f"not UTF-8: {exc}") from None

    def reject_constant(name):
        raise MalformedInputError(f"non-finite number {name}")

    try:
        return json.loads(data, parse_constant=reject_constant)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _field(obj, key, path, kinds):
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path or "$")
    if key not in obj:
        raise SchemaError("missing key", f"{path}.{key}" if path else key)
    value = obj[key]
    where = f"{path}.{key}" if path else key
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise SchemaError(f"expected {'/'.join(k.__name__ for k in kinds)}, got {type(value).__name__}", where)
    if isinstance(value, float) and not math.isfinite(value):
        raise InvariantViolation("number must be finite", where)
    return value


_NUM = (int, float)


def parse_instance(data: bytes | str) -> Instance:
    raw = _load(data)
    if not isinstance(raw, dict):
        raise SchemaError("top level must be an object", "$")
    radius = float(_field(raw, "radius", "", _NUM))
    budget = _field(raw, "budget", "", (int, float))
    if isinstance(budget, float):
        if not budget.is_integer():
            raise SchemaError("budget must be an integer", "budget")
        budget = int(budget)
    mode_raw = _field(raw, "budget_mode", "", (str,))
    try:
        mode = BudgetMode(mode_raw)
    except ValueError:
        raise SchemaError(f"expected 'at_most' or 'exactly', got {mode_raw!r}", "budget_mode") from None
    demand_raw = _field(raw, "demand_points", "", (list,))
    sites_raw = _field(raw, "sites", "", (list,))

    demand = []
    for k, d in enumerate(demand_raw):
        p = f"demand_points[{k}]"
        x = float(_field(d, "x", p, _NUM))
        y = float(_field(d, "y", p, _NUM))
        w = float(_field(d, "weight", p, _NUM))
        if w < 0:
            raise InvariantViolation(f"weight must be >= 0, got {w}", f"{p}.weight")
        demand.append(DemandPoint(k, x, y, w))
    sites = []
    for k, s in enumerate(sites_raw):
        p = f"sites[{k}]"
        sites.append(FacilitySite(k, float(_field(s, "x", p, _NUM)), float(_field(s, "y", p, _NUM))))

    if not math.isfinite(radius) or radius <= 0:
        raise InvariantViolation(f"radius must be positive, got {radius}", "radius")
    if not 1 <= budget <= len(sites):
        raise InvariantViolation(f"budget must lie in [1, {len(sites)}], got {budget}", "budget")
    try:
        return Instance(tuple(demand), tuple(sites), radius, budget, mode)
    except InstanceError as exc:
        raise InvariantViolation(str(exc).split(": ", 1)[-1], exc.path) from None


def instance_to_dict(instance: Instance) -> dict:
    return {
        "radius": instance.radius,
        "budget": instance.budget,
        "budget_mode": instance.budget_mode.value,
        "demand_points": [{"x": d.x, "y": d.y, "weight": d.weight} for d in instance.demand_points],
        "sites": [{"x": s.x, "y": s.y} for s in instance.sites],
    }


def serialize_instance(instance: Instance) -> bytes:
    return dumps_canonical(instance_to_dict(instance))


def solution_to_dict(solution: Solution, stats: SolveStats | None, coverage: CoverageStructure | None = None) -> dict:
    total = coverage.total_weight if coverage is not None else None
    out = {
        "selected": list(solution.selected),
        "covered": list(iter_bits(solution.covered_mask)),
        "objective": solution.objective,
        "solver_name": solution.solver_name,
        "exact": bool(stats.exact) if stats is not None else False,
    }
    if total is not None:
        out["coverage_percent"] = solution.coverage_percent(total)
    if stats is not None:
        # wall time is left out so repeated runs produce identical bytes
        out["stats"] = stats.as_dict(include_time=False)
    return out


def serialize_solution(solution: Solution, stats: SolveStats | None = None,
                       coverage: CoverageStructure | None = None) -> bytes:
    return dumps_canonical(solution_to_dict(solution, stats, coverage))


@dataclass
class ParsedSolution:
    solution: Solution
    exact: bool
    coverage_percent: float | None
    stats: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def parse_solution(data: bytes | str) -> ParsedSolution:
    raw = _load(data)
    if not isinstance(raw, dict):
        raise SchemaError("top level must be an object", "$")
    selected = _field(raw, "selected", "", (list,))
    covered = _field(raw, "covered", "", (list,))
    for name, ids in (("selected", selected), ("covered", covered)):
        for k, v in enumerate(ids):
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise SchemaError("ids must be nonnegative integers", f"{name}[{k}]")
    objective = float(_field(raw, "objective", "", _NUM))
    name = _field(raw, "solver_name", "", (str,))
    exact = raw.get("exact", False)
    pct = raw.get("coverage_percent")
    sol = Solution(tuple(selected), mask_of(covered), objective, name)
    return ParsedSolution(sol, bool(exact), pct, dict(raw.get("stats", {})), raw)


@dataclass
class RunManifest:
    command: str
    config_echo: dict
    artifact_paths: list[str]
    tool_version: str = TOOL_VERSION

    def to_bytes(self) -> bytes:
        return dumps_canonical({
            "command": self.command,
            "config_echo": self.config_echo,
            "artifact_paths": list(self.artifact_paths),
            "tool_version": self.tool_version,
        })
