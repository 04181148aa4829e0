from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

# Structures de données partagées entre solveurs, fichiers problème, rapports et workers.
# Tout est immuable (frozen) : les solveurs ne modifient jamais leurs entrées.

LogFn = Callable[[str], None]


def silent_log(msg: str) -> None:
    pass


class Sense(str, Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


class Relation(str, Enum):
    LE = "<="
    GE = ">="
    EQ = "="
    SOFT_LE = "<=~"
    SOFT_GE = ">=~"

    @property
    def is_soft(self) -> bool:
        return self in (Relation.SOFT_LE, Relation.SOFT_GE)

    def hardened(self) -> "Relation":
        if self is Relation.SOFT_LE:
            return Relation.LE
        if self is Relation.SOFT_GE:
            return Relation.GE
        return self


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class WorstValuePolicy(str, Enum):
    ZERO = "zero"
    COMPUTED_MIN = "computed_min"
    USER_SUPPLIED = "user_supplied"


class WeightPolicy(str, Enum):
    EQUAL_NORMALIZED = "equal"
    AS_GIVEN = "as_given"


class SolveMode(str, Enum):
    MAXMIN = "maxmin"
    TWO_PHASE = "two-phase"
    AUGMENTED = "augmented"
    FUZZY = "fuzzy"
    GOAL = "goal"


# -------------------------
# Programme linéaire mono-objectif
# -------------------------
@dataclass(frozen=True)
class LpRow:
    coefficients: tuple[float, ...]
    relation: Relation  # LE / GE / EQ only
    rhs: float


@dataclass(frozen=True)
class LinearProgram:
    """Single-objective LP over x >= 0 (nonnegativity is implicit)."""
    n_vars: int
    sense: Sense
    objective: tuple[float, ...]
    rows: tuple[LpRow, ...]


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    x: Optional[tuple[float, ...]] = None
    value: Optional[float] = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


# -------------------------
# Problème de décision flou
# -------------------------
@dataclass(frozen=True)
class Objective:
    name: str
    coefficients: tuple[float, ...]
    sense: Sense = Sense.MAXIMIZE
    goal: Optional[float] = None
    tolerance: Optional[float] = None
    weight: Optional[float] = None

    @property
    def has_goal(self) -> bool:
        return self.goal is not None and self.tolerance is not None


@dataclass(frozen=True)
class FuzzyConstraint:
    name: str
    coefficients: tuple[float, ...]
    relation: Relation
    rhs: float
    tolerance: float = 0.0  # 0 => contrainte nette
    weight: Optional[float] = None

    @property
    def participates(self) -> bool:
        """True when the constraint carries a membership (soft relation and d > 0)."""
        return self.relation.is_soft and self.tolerance > 0


@dataclass(frozen=True)
class DecisionProblem:
    variable_names: tuple[str, ...]
    objectives: tuple[Objective, ...]
    constraints: tuple[FuzzyConstraint, ...]

    @property
    def n_vars(self) -> int:
        return len(self.variable_names)

    @property
    def has_fuzzy_content(self) -> bool:
        return any(o.has_goal for o in self.objectives) or any(c.participates for c in self.constraints)


@dataclass(frozen=True)
class SolverConfig:
    delta: float = 1e-4
    alpha_lower: float = 0.0
    alpha_upper: float = 1.0
    worst_value_policy: WorstValuePolicy = WorstValuePolicy.ZERO
    worst_values: Optional[tuple[float, ...]] = None  # payload de USER_SUPPLIED
    weight_policy: WeightPolicy = WeightPolicy.EQUAL_NORMALIZED
    eps_feas: float = 1e-9
    eps_opt: float = 1e-9
    # Région (0 = nette, 1 = totalement relâchée) des optima individuels flous
    best_region_theta: float = 1.0
    worst_region_theta: float = 0.0


@dataclass(frozen=True)
class ValidationIssue:
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues


# -------------------------
# Résultats
# -------------------------
@dataclass(frozen=True)
class ObjectiveRange:
    """Individual best (z_plus) and worst (z_minus) values of one objective."""
    z_plus: float
    z_minus: float
    argmax_x: tuple[float, ...]
    argmin_x: Optional[tuple[float, ...]] = None


@dataclass(frozen=True)
class CompromiseSolution:
    x: tuple[float, ...]
    z: tuple[float, ...]
    mu: tuple[float, ...]
    alpha: float
    phi: tuple[float, ...]
    mode: SolveMode
    iterations: int = 0


@dataclass(frozen=True)
class FuzzySolution:
    x: tuple[float, ...]
    z: tuple[float, ...]
    mu_obj: tuple[float, ...]
    mu_con: tuple[float, ...]
    alpha: float
    phi: tuple[float, ...]
    slack_report: tuple[float, ...]  # fraction de tolérance consommée par contrainte
    mode: SolveMode = SolveMode.FUZZY
    iterations: int = 0


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    feasible: bool
    x: Optional[tuple[float, ...]] = None
    z: Optional[tuple[float, ...]] = None
    phi: Optional[tuple[float, ...]] = None
    z_best: Optional[tuple[float, ...]] = None
    membership_sum: Optional[float] = None


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)

    @property
    def feasible_alphas(self) -> list[float]:
        return [r.alpha for r in self.rows if r.feasible]
