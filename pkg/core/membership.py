from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import InvalidSpec
from .models import LpRow, Relation, Sense

# Fonctions d'appartenance linéaires : évaluation ponctuelle (bornée à [0,1])
# et émission des lignes LP équivalentes à "mu(expr(x)) >= variable".


@dataclass(frozen=True)
class RangeMembership:
    """Ramp between the individual worst (z_minus) and best (z_plus) values of an objective."""
    z_minus: float
    z_plus: float
    sense: Sense = Sense.MAXIMIZE

    @property
    def width(self) -> float:
        # signée : > 0 en maximisation, < 0 en minimisation
        return self.z_plus - self.z_minus


@dataclass(frozen=True)
class GoalMembership:
    """1 at the goal, 0 at goal - tolerance (goal + tolerance when minimising)."""
    goal: float
    tolerance: float
    sense: Sense = Sense.MAXIMIZE


@dataclass(frozen=True)
class SoftMembership:
    """Soft inequality a·x <=~ b (or >=~ b): 1 inside, 0 once the tolerance d is used up."""
    rhs: float
    tolerance: float
    relation: Relation = Relation.SOFT_LE


MembershipSpec = Union[RangeMembership, GoalMembership, SoftMembership]


def check_spec(spec: MembershipSpec) -> None:
    match spec:
        case RangeMembership(z_minus=lo, z_plus=hi, sense=sense):
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise InvalidSpec("range bounds must be finite")
            if sense is Sense.MAXIMIZE and not hi > lo:
                raise InvalidSpec(f"range needs z_plus > z_minus (got {hi:g} <= {lo:g})")
            if sense is Sense.MINIMIZE and not hi < lo:
                raise InvalidSpec(f"minimising range needs z_plus < z_minus (got {hi:g} >= {lo:g})")
        case GoalMembership(goal=goal, tolerance=t):
            if not np.isfinite(goal) or not (np.isfinite(t) and t > 0):
                raise InvalidSpec("goal membership needs a finite goal and a tolerance > 0")
        case SoftMembership(rhs=b, tolerance=d, relation=rel):
            if rel not in (Relation.SOFT_LE, Relation.SOFT_GE):
                raise InvalidSpec(f"soft membership on relation {rel.value!r}")
            if not np.isfinite(b) or not (np.isfinite(d) and d > 0):
                raise InvalidSpec("soft membership needs a finite rhs and a tolerance > 0")
        case _:
            raise InvalidSpec(f"unknown membership spec {spec!r}")


def affine_form(spec: MembershipSpec) -> tuple[float, float]:
    """
    (slope, offset) such that the unclamped membership is slope * expr + offset,
    where expr is the objective value or the constraint left-hand side.
    """
    check_spec(spec)
    match spec:
        case RangeMembership():
            return 1.0 / spec.width, -spec.z_minus / spec.width
        case GoalMembership(goal=goal, tolerance=t, sense=Sense.MAXIMIZE):
            return 1.0 / t, 1.0 - goal / t
        case GoalMembership(goal=goal, tolerance=t):
            return -1.0 / t, 1.0 + goal / t
        case SoftMembership(rhs=b, tolerance=d, relation=Relation.SOFT_LE):
            return -1.0 / d, 1.0 + b / d
        case SoftMembership(rhs=b, tolerance=d):
            return 1.0 / d, 1.0 - b / d
    raise InvalidSpec(f"unknown membership spec {spec!r}")


def evaluate(spec: MembershipSpec, value: float) -> float:
    """Membership degree of `value`, clamped to [0, 1]."""
    slope, offset = affine_form(spec)
    return float(min(1.0, max(0.0, slope * float(value) + offset)))


def as_lp_rows(
    spec: MembershipSpec,
    coefficients: Sequence[float],
    var_index: int,
    width: int | None = None,
) -> list[LpRow]:
    """
    Rows over (x, extra columns) stating mu(coefficients·x) >= column `var_index`.
    x occupies the first len(coefficients) columns; `width` is the total column count.
    """
    check_spec(spec)
    n = len(coefficients)
    if var_index < n:
        raise InvalidSpec(f"membership column {var_index} overlaps the decision variables")
    width = max(width or 0, n, var_index + 1)
    row = np.zeros(width)
    row[:n] = np.asarray(coefficients, dtype=float)

    match spec:
        case RangeMembership(z_minus=lo):
            # c·x - (z+ - z-)·v >= z-   (relation retournée quand la largeur est négative)
            row[var_index] = -spec.width
            rel = Relation.GE if spec.width > 0 else Relation.LE
            rhs = lo
        case GoalMembership(goal=goal, tolerance=t, sense=Sense.MAXIMIZE):
            row[var_index] = -t
            rel, rhs = Relation.GE, goal - t
        case GoalMembership(goal=goal, tolerance=t):
            row[var_index] = t
            rel, rhs = Relation.LE, goal + t
        case SoftMembership(rhs=b, tolerance=d, relation=Relation.SOFT_LE):
            row[var_index] = d
            rel, rhs = Relation.LE, b + d
        case SoftMembership(rhs=b, tolerance=d):
            row[var_index] = -d
            rel, rhs = Relation.GE, b - d

    return [LpRow(tuple(float(v) for v in row), rel, float(rhs))]
