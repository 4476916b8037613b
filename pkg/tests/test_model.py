import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mclp.model import (
    BudgetMode,
    DemandPoint,
    FacilitySite,
    Instance,
    InstanceError,
    Solution,
    build_coverage,
    coverage_value,
    distance,
    iter_bits,
    mask_of,
    validate_solution,
)
from mclp.solvers import dp_solve

from .conftest import toy


@pytest.mark.parametrize("a, b, expected", [
    ((0, 0), (3, 4), 5.0),
    ((2, 7), (2, 7), 0.0),
    ((1, 1), (4, 5), math.sqrt(9 + 16)),
])
def test_distance_examples(a, b, expected):
    assert distance(a, b) == expected
    assert distance(b, a) == expected


def test_distance_accepts_points():
    assert distance(DemandPoint(0, 0, 0, 1), FacilitySite(0, 3, 4)) == 5.0


def _single(radius):
    return Instance.from_arrays([(0, 0)], [1], [(3, 4)], radius, 1)


def test_boundary_inclusion():
    assert build_coverage(_single(5.0)).facility_sets == (0b1,)
    assert build_coverage(_single(4.9)).facility_sets == (0,)


def test_line_example():
    inst = Instance.from_arrays([(0, 0), (1, 0), (2, 0), (3, 0)], [1] * 4,
                                [(0.5, 0), (2.5, 0)], 0.6, 1)
    cov = build_coverage(inst)
    assert [list(iter_bits(s)) for s in cov.facility_sets] == [[0, 1], [2, 3]]
    assert cov.demand_neighbors == (frozenset({0}), frozenset({0}), frozenset({1}), frozenset({1}))
    assert cov.total_weight == 4.0


@pytest.mark.parametrize("mask, expected", [
    (set(), 0.0),
    ({0, 1, 2, 3}, 14.0),
    ({1, 3}, 6.0),
])
def test_coverage_value_examples(mask, expected):
    assert coverage_value(mask_of(mask), [5.0, 2.0, 3.0, 4.0]) == expected


def test_instance_invariants():
    with pytest.raises(InstanceError, match="budget"):
        Instance.from_arrays([(0, 0)], [1], [(0, 0)], 1.0, 2)
    with pytest.raises(InstanceError, match="radius"):
        Instance.from_arrays([(0, 0)], [1], [(0, 0)], 0.0, 1)
    with pytest.raises(InstanceError) as exc:
        Instance.from_arrays([(0, 0), (1, 1)], [1, -1], [(0, 0)], 1.0, 1)
    assert exc.value.path == "demand_points[1].weight"
    with pytest.raises(InstanceError):
        Instance((DemandPoint(1, 0, 0, 1),), (FacilitySite(0, 0, 0),), 1.0, 1)


def test_validate_clean_for_dp(worked):
    inst, cov = worked
    sol, _ = dp_solve(inst, cov)
    assert validate_solution(sol, inst, cov) == []


def test_validate_overclaim():
    inst, cov = toy([{0}, {1}], [1, 1], 1)
    report = validate_solution(Solution((), 0b1, 1.0, "x"), inst, cov)
    assert [v.constraint for v in report] == ["coverage"]
    assert "claimed but not covered" in report[0].detail


def test_validate_underclaim():
    inst, cov = toy([{0, 1}], [1, 1], 1)
    report = validate_solution(Solution((0,), 0b1, 1.0, "x"), inst, cov)
    assert [v.constraint for v in report] == ["coverage"]


def test_validate_budget():
    inst, cov = toy([{0}, {1}, {2}], [1, 1, 1], 2)
    report = validate_solution(Solution((0, 1, 2), 0b111, 3.0, "x"), inst, cov)
    assert [v.constraint for v in report] == ["budget"]


def test_validate_exactly_mode_count():
    inst, cov = toy([{0}, {1}, {2}], [1, 1, 1], 2, BudgetMode.EXACTLY)
    report = validate_solution(Solution((0,), 0b1, 1.0, "x"), inst, cov)
    assert [v.constraint for v in report] == ["budget"]


def test_validate_objective_mismatch():
    inst, cov = toy([{0}], [1], 1)
    report = validate_solution(Solution((0,), 0b1, 2.0, "x"), inst, cov)
    assert [v.constraint for v in report] == ["objective"]


def test_validate_unknown_ids():
    inst, cov = toy([{0}], [1], 1)
    report = validate_solution(Solution((5,), 0, 0.0, "x"), inst, cov)
    assert "index" in [v.constraint for v in report]


coords = st.floats(-50, 50, allow_nan=False)
points = st.lists(st.tuples(coords, coords), min_size=1, max_size=8)


@settings(max_examples=60, deadline=None)
@given(points, points, st.floats(0.1, 60), st.floats(0, 30))
def test_coverage_matches_distance_and_grows_with_radius(demand, sites, radius, extra):
    inst = Instance.from_arrays(demand, [1.0] * len(demand), sites, radius, 1)
    cov = build_coverage(inst)
    for j, site in enumerate(sites):
        for i, d in enumerate(demand):
            inside = distance(d, site) <= radius + 1e-9
            assert bool(cov.facility_sets[j] >> i & 1) == inside
            assert (j in cov.demand_neighbors[i]) == inside
    wider = build_coverage(inst.with_radius(radius + extra))
    for small, big in zip(cov.facility_sets, wider.facility_sets):
        assert small & ~big == 0


weights = st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=16)


@given(weights, st.data())
def test_coverage_value_additive_and_monotone(ws, data):
    n = len(ws)
    a = data.draw(st.integers(0, (1 << n) - 1))
    b = data.draw(st.integers(0, (1 << n) - 1)) & ~a
    va, vb, vab = coverage_value(a, ws), coverage_value(b, ws), coverage_value(a | b, ws)
    assert vab == pytest.approx(va + vb, rel=1e-12, abs=1e-12)
    assert vab >= va and vab >= vb


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=6), st.data())
def test_solution_round_trip(sites, data):
    demand = data.draw(points)
    ws = data.draw(st.lists(st.floats(0, 10), min_size=len(demand), max_size=len(demand)))
    inst = Instance.from_arrays(demand, ws, sites, 20.0, 1)
    cov = build_coverage(inst)
    selected = data.draw(st.sets(st.integers(0, len(sites) - 1), max_size=len(sites)))
    mask = cov.union_mask(selected)
    sol = Solution(tuple(selected), mask, coverage_value(mask, cov), "manual")
    again = cov.union_mask(sol.selected)
    assert again == sol.covered_mask
    assert coverage_value(again, cov) == sol.objective
