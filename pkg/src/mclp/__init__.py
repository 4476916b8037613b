"""Maximal covering location: exact frontier DP, greedy baseline and experiments."""

from .model import (
    BudgetMode,
    CoverageStructure,
    DemandPoint,
    FacilitySite,
    Instance,
    InstanceError,
    Solution,
    Violation,
    build_coverage,
    coverage_value,
    distance,
    validate_solution,
)
from .solvers import (
    FrontierState,
    SolverCapError,
    SolverConfig,
    SolveStats,
    brute_force_solve,
    dp_solve,
    greedy_solve,
    marginal_benefit,
    preprocess,
    solve,
)

__version__ = "0.1.0"
