import pytest

from mclp.generator import GeneratorConfig, generate
from mclp.model import BudgetMode, CoverageStructure, Instance, mask_of


def toy(sets, weights, budget, mode=BudgetMode.AT_MOST):
    """Instance plus coverage built straight from index sets (coordinates are dummies)."""
    n, m = len(weights), len(sets)
    inst = Instance.from_arrays([(0, 0)] * n, weights, [(0, 0)] * m, 1.0, budget, mode)
    cov = CoverageStructure.from_sets([mask_of(s) for s in sets], list(map(float, weights)))
    return inst, cov


def small_suite(count, start=0, n_max=12, m_max=10, p_max=4):
    """Seeded small instances mixing both distributions and budget modes."""
    for k in range(count):
        seed = start + k
        n = 4 + seed % (n_max - 3)
        m = 2 + (seed // 3) % (m_max - 1)
        p = 1 + (seed // 7) % min(p_max, m)
        cfg = GeneratorConfig(
            n=n, m=m, budget=p, radius=(15, 20, 30, 45)[seed % 4],
            distribution=("uniform", "clustered")[seed % 2],
            budget_mode=("at_most", "exactly")[(seed // 2) % 2],
            cluster_count=1 + seed % 3, cluster_spread=8.0, seed=seed,
        )
        yield generate(cfg)


@pytest.fixture
def worked():
    """Three overlapping facilities, weights [5, 2, 3, 4], p = 2."""
    return toy([{0, 1}, {1, 2}, {2, 3}], [5, 2, 3, 4], 2)


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][1:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
