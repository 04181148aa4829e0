from __future__ import annotations

import numpy as np
import pytest

from core.errors import InvalidSpec
from core.membership import (
    GoalMembership,
    RangeMembership,
    SoftMembership,
    affine_form,
    as_lp_rows,
    evaluate,
)
from core.models import Relation, Sense


def test_range_membership_of_plant_profit():
    spec = RangeMembership(0.0, 26301.29)
    assert evaluate(spec, 26199.0) == pytest.approx(0.99611, abs=1e-5)
    assert evaluate(spec, 0.0) == 0.0
    assert evaluate(spec, 26301.29) == 1.0
    assert evaluate(spec, 30000.0) == 1.0
    assert evaluate(spec, -5.0) == 0.0


def test_minimising_range_is_mirrored():
    spec = RangeMembership(z_minus=10.0, z_plus=2.0, sense=Sense.MINIMIZE)
    assert spec.width == -8.0
    assert evaluate(spec, 2.0) == 1.0
    assert evaluate(spec, 10.0) == 0.0
    assert evaluate(spec, 4.0) == pytest.approx(0.75)


def test_goal_membership():
    spec = GoalMembership(27000.0, 2100.0)
    assert evaluate(spec, 27000.0) == 1.0
    assert evaluate(spec, 24900.0) == 0.0
    assert evaluate(spec, 26301.29) == pytest.approx(1 - 698.71 / 2100.0)

    low = GoalMembership(100.0, 20.0, Sense.MINIMIZE)
    assert evaluate(low, 100.0) == 1.0
    assert evaluate(low, 110.0) == pytest.approx(0.5)
    assert evaluate(low, 120.0) == 0.0


def test_soft_memberships():
    le = SoftMembership(2520.0, 200.0)
    assert evaluate(le, 2520.0) == 1.0
    assert evaluate(le, 2620.0) == pytest.approx(0.5)
    assert evaluate(le, 2720.0) == 0.0
    assert evaluate(le, 1000.0) == 1.0

    ge = SoftMembership(588.0, 47.0, Relation.SOFT_GE)
    assert evaluate(ge, 588.0) == 1.0
    assert evaluate(ge, 541.0) == 0.0
    assert evaluate(ge, 564.5) == pytest.approx(0.5)


@pytest.mark.parametrize(
    "spec",
    [
        RangeMembership(5.0, 5.0),
        RangeMembership(6.0, 5.0),
        RangeMembership(2.0, 10.0, Sense.MINIMIZE),
        RangeMembership(0.0, float("inf")),
        GoalMembership(10.0, 0.0),
        GoalMembership(10.0, -1.0),
        SoftMembership(10.0, 0.0),
        SoftMembership(10.0, 1.0, Relation.LE),
    ],
)
def test_invalid_specs_are_rejected(spec):
    with pytest.raises(InvalidSpec):
        affine_form(spec)
    with pytest.raises(InvalidSpec):
        as_lp_rows(spec, (1.0,), 1)


def test_membership_column_cannot_overlap_x():
    with pytest.raises(InvalidSpec):
        as_lp_rows(SoftMembership(1.0, 1.0), (1.0, 1.0), 1)


def test_soft_row_at_full_relaxation():
    (row,) = as_lp_rows(SoftMembership(2520.0, 200.0), (1.0, 1.0, 1.0), 3, 5)
    assert row.coefficients == (1.0, 1.0, 1.0, 200.0, 0.0)
    assert row.relation is Relation.LE
    assert row.rhs == 2720.0


def _holds(row, point) -> bool:
    g = float(np.dot(row.coefficients, point))
    tol = 1e-9 * (1.0 + abs(row.rhs))
    if row.relation is Relation.LE:
        return g <= row.rhs + tol
    if row.relation is Relation.GE:
        return g >= row.rhs - tol
    return abs(g - row.rhs) <= tol


@pytest.mark.parametrize(
    "spec",
    [
        RangeMembership(0.0, 20.0),
        RangeMembership(-4.0, 7.0),
        RangeMembership(12.0, 3.0, Sense.MINIMIZE),
        GoalMembership(15.0, 6.0),
        GoalMembership(5.0, 3.0, Sense.MINIMIZE),
        SoftMembership(9.0, 4.0),
        SoftMembership(9.0, 4.0, Relation.SOFT_GE),
    ],
)
def test_rows_agree_with_evaluation(spec):
    """mu(expr) >= v holds exactly when the emitted row does, for v in (0, 1]."""
    coefficients = (1.0, 2.0)
    rng = np.random.default_rng(3)
    for _ in range(300):
        x = rng.uniform(0.0, 10.0, size=2)
        v = float(rng.uniform(0.05, 1.0))
        mu = evaluate(spec, float(np.dot(coefficients, x)))
        if abs(mu - v) < 1e-6:
            continue
        (row,) = as_lp_rows(spec, coefficients, 2)
        assert _holds(row, (*x, v)) == (mu >= v)
