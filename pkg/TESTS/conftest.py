from __future__ import annotations

import numpy as np
import pytest

from case_study import case_study_config, concrete_plant_problem
from core.models import DecisionProblem, FuzzyConstraint, Objective, Relation


@pytest.fixture(scope="session")
def plant():
    return concrete_plant_problem()


@pytest.fixture(scope="session")
def plant_cfg():
    return case_study_config()


def random_region_problem(rng: np.random.Generator, n: int, k: int) -> DecisionProblem:
    """Bounded full-dimensional region (positive <= rows) with k nonzero linear objectives."""
    m = int(rng.integers(2, 5))
    constraints = tuple(
        FuzzyConstraint(f"r{j}", tuple(float(v) for v in rng.uniform(0.5, 5.0, size=n)), Relation.LE,
                        float(rng.uniform(5.0, 20.0)))
        for j in range(m)
    )
    objectives = []
    while len(objectives) < k:
        c = rng.uniform(-3.0, 5.0, size=n)
        if np.linalg.norm(c) < 0.5 or c.max() <= 0.1:
            continue
        objectives.append(Objective(f"z{len(objectives)}", tuple(float(v) for v in c)))
    names = tuple(f"x{i + 1}" for i in range(n))
    return DecisionProblem(names, tuple(objectives), constraints)


@pytest.fixture
def region_problem():
    return random_region_problem


def _check_comparison(records: list[dict[str, str]]) -> None:
    """Crisp vs fuzzy comparison rows read back from the CSV export."""
    assert len(records) == 3
    crisp_z = [float(r["crisp_z"]) for r in records]
    crisp_phi = [float(r["crisp_phi"]) for r in records]
    fuzzy_alpha = {float(r["fuzzy_alpha"]) for r in records}
    np.testing.assert_allclose(crisp_z, (26199.0, 21130.0, 19259.0), rtol=0.01)
    np.testing.assert_allclose(crisp_phi, (0.996, 0.996, 0.998), atol=0.002)
    assert len(fuzzy_alpha) == 1
    assert 0.80 <= fuzzy_alpha.pop() <= 1.0
    for r in records:
        assert float(r["fuzzy_z"]) > 0.0
        assert 0.0 <= float(r["crisp_alpha"]) <= 1.0


@pytest.fixture
def check_comparison():
    return _check_comparison
