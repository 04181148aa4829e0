from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from core.errors import AllZeroWeights
from core.models import (
    DecisionProblem,
    FuzzyConstraint,
    Objective,
    Relation,
    SolverConfig,
    WeightPolicy,
    WorstValuePolicy,
)
from core.problem import normalize_weights, validate


def _problem(**changes) -> DecisionProblem:
    base = DecisionProblem(
        ("x1", "x2"),
        (Objective("a", (1.0, 0.0)), Objective("b", (0.0, 1.0))),
        (FuzzyConstraint("cap", (1.0, 1.0), Relation.LE, 2.0),),
    )
    return replace(base, **changes)


def _messages(report) -> dict[str, str]:
    return {i.path: i.message for i in report.issues}


def test_valid_problem_has_no_issue():
    assert validate(_problem()).ok


def test_dimension_mismatch_is_located():
    p = _problem(objectives=(Objective("a", (1.0,)),))
    msgs = _messages(validate(p))
    assert msgs["objectives[0].coefficients"].startswith("dimension mismatch")


def test_tolerance_without_goal():
    p = _problem(objectives=(Objective("a", (1.0, 0.0), tolerance=3.0),))
    assert _messages(validate(p))["objectives[0].tolerance"] == "tolerance without goal"


def test_empty_objectives_and_constraints():
    msgs = _messages(validate(_problem(objectives=(), constraints=())))
    assert "k ≥ 1" in msgs["objectives"]
    assert "m ≥ 1" in msgs["constraints"]


def test_negative_tolerance_and_nan_rhs():
    p = _problem(constraints=(FuzzyConstraint("cap", (1.0, 1.0), Relation.SOFT_LE, float("nan"), -1.0),))
    msgs = _messages(validate(p))
    assert "constraints[0].rhs" in msgs
    assert "constraints[0].tolerance" in msgs


def test_config_issues():
    cfg = SolverConfig(delta=0.0, alpha_lower=0.9, alpha_upper=0.5)
    msgs = _messages(validate(_problem(), cfg))
    assert "config.delta" in msgs
    assert msgs["config.alpha_lower"] == "alpha_lower exceeds alpha_upper"

    cfg = SolverConfig(worst_value_policy=WorstValuePolicy.USER_SUPPLIED, worst_values=(0.0,))
    assert "config.worst_values" in _messages(validate(_problem(), cfg))


def test_validate_never_mutates():
    p = _problem()
    before = repr(p)
    validate(p, SolverConfig(delta=-1.0))
    assert repr(p) == before


def test_equal_weights_objectives_only():
    w, q = normalize_weights(_problem())
    np.testing.assert_allclose(w, [0.5, 0.5])
    np.testing.assert_allclose(q, [0.0])


def test_as_given_weights_missing_counts_as_one():
    p = _problem(objectives=(
        Objective("a", (1.0, 0.0), weight=2.0),
        Objective("b", (0.0, 1.0)),
        Objective("c", (1.0, 1.0), weight=1.0),
    ))
    w, _ = normalize_weights(p, SolverConfig(weight_policy=WeightPolicy.AS_GIVEN))
    np.testing.assert_allclose(w, [0.5, 0.25, 0.25])


def test_as_given_weights_are_scale_invariant():
    cfg = SolverConfig(weight_policy=WeightPolicy.AS_GIVEN)
    p1 = _problem(objectives=(Objective("a", (1.0, 0.0), weight=1.0), Objective("b", (0.0, 1.0), weight=3.0)))
    p2 = _problem(objectives=(Objective("a", (1.0, 0.0), weight=10.0), Objective("b", (0.0, 1.0), weight=30.0)))
    np.testing.assert_allclose(normalize_weights(p1, cfg)[0], normalize_weights(p2, cfg)[0])
    np.testing.assert_allclose(normalize_weights(p1, cfg)[0], [0.25, 0.75])


def test_all_zero_weights():
    p = _problem(objectives=(Objective("a", (1.0, 0.0), weight=0.0), Objective("b", (0.0, 1.0), weight=0.0)))
    with pytest.raises(AllZeroWeights):
        normalize_weights(p, SolverConfig(weight_policy=WeightPolicy.AS_GIVEN))
    assert not validate(p, SolverConfig(weight_policy=WeightPolicy.AS_GIVEN)).ok


def test_joint_weights_with_soft_rows():
    cons = tuple(FuzzyConstraint(f"r{j}", (1.0, 1.0), Relation.SOFT_LE, 10.0, 1.0) for j in range(9))
    w, q = normalize_weights(_problem(constraints=cons))
    np.testing.assert_allclose(w, [1 / 11] * 2)
    np.testing.assert_allclose(q, [1 / 11] * 9)
    assert w.sum() + q.sum() == pytest.approx(1.0)


def test_plant_joint_weights(plant):
    w, q = normalize_weights(plant)
    np.testing.assert_allclose(w, [0.1] * 3)
    # la ligne d'heures d'équipement n'a pas de tolérance : elle ne participe pas
    names = [c.name for c in plant.constraints]
    assert q[names.index("equipment_hours")] == 0.0
    assert q.sum() == pytest.approx(0.7)


def test_plant_is_valid(plant, plant_cfg):
    assert validate(plant, plant_cfg).ok
    assert plant.has_fuzzy_content
