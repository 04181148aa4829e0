from __future__ import annotations

import math

import numpy as np

from .errors import AllZeroWeights
from .models import (
    DecisionProblem,
    Relation,
    SolverConfig,
    ValidationIssue,
    ValidationReport,
    WeightPolicy,
    WorstValuePolicy,
)

# Contrôles d'invariants du modèle de décision et normalisation des poids (objectifs + contraintes).


def _finite(v) -> bool:
    try:
        return math.isfinite(float(v))
    except (TypeError, ValueError):
        return False


def _check_vector(path: str, coefficients, n: int, issues: list[ValidationIssue]) -> None:
    if len(coefficients) != n:
        issues.append(ValidationIssue(path, f"dimension mismatch: {len(coefficients)} coefficients for {n} variables"))
    if not all(_finite(c) for c in coefficients):
        issues.append(ValidationIssue(path, "non-finite coefficient"))


def _check_weight(path: str, weight, issues: list[ValidationIssue]) -> None:
    if weight is None:
        return
    if not _finite(weight) or weight < 0:
        issues.append(ValidationIssue(path, "weight must be a finite number >= 0"))


def _check_config(problem: DecisionProblem, cfg: SolverConfig, issues: list[ValidationIssue]) -> None:
    if not _finite(cfg.delta) or cfg.delta <= 0:
        issues.append(ValidationIssue("config.delta", "delta must be > 0"))
    for key in ("alpha_lower", "alpha_upper", "best_region_theta", "worst_region_theta"):
        v = getattr(cfg, key)
        if not _finite(v) or not 0.0 <= v <= 1.0:
            issues.append(ValidationIssue(f"config.{key}", "must lie in [0, 1]"))
    if _finite(cfg.alpha_lower) and _finite(cfg.alpha_upper) and cfg.alpha_lower > cfg.alpha_upper:
        issues.append(ValidationIssue("config.alpha_lower", "alpha_lower exceeds alpha_upper"))
    for key in ("eps_feas", "eps_opt"):
        v = getattr(cfg, key)
        if not _finite(v) or v <= 0:
            issues.append(ValidationIssue(f"config.{key}", "tolerance must be > 0"))
    if cfg.worst_value_policy is WorstValuePolicy.USER_SUPPLIED:
        k = len(problem.objectives)
        if cfg.worst_values is None or len(cfg.worst_values) != k:
            issues.append(ValidationIssue("config.worst_values", f"user_supplied policy needs {k} worst values"))
        elif not all(_finite(v) for v in cfg.worst_values):
            issues.append(ValidationIssue("config.worst_values", "non-finite worst value"))
    if cfg.weight_policy is WeightPolicy.AS_GIVEN:
        given = [1.0 if o.weight is None else o.weight for o in problem.objectives]
        given += [1.0 if c.weight is None else c.weight for c in problem.constraints if c.participates]
        if given and all(_finite(w) for w in given) and sum(given) <= 0:
            issues.append(ValidationIssue("config.weight_policy", "all weights are zero"))


def validate(problem: DecisionProblem, cfg: SolverConfig | None = None) -> ValidationReport:
    """
    Collect every invariant violation with the path of the offending field.
    Never raises and never mutates the problem: errors are the payload.
    """
    cfg = cfg or SolverConfig()
    issues: list[ValidationIssue] = []
    n = problem.n_vars

    if n < 1:
        issues.append(ValidationIssue("variables", "at least one variable required (n ≥ 1)"))
    if len(set(problem.variable_names)) != n:
        issues.append(ValidationIssue("variables", "duplicate variable name"))
    if not problem.objectives:
        issues.append(ValidationIssue("objectives", "at least one objective required (k ≥ 1)"))
    if not problem.constraints:
        issues.append(ValidationIssue("constraints", "at least one constraint required (m ≥ 1)"))

    for i, obj in enumerate(problem.objectives):
        path = f"objectives[{i}]"
        _check_vector(f"{path}.coefficients", obj.coefficients, n, issues)
        if obj.tolerance is not None and obj.goal is None:
            issues.append(ValidationIssue(f"{path}.tolerance", "tolerance without goal"))
        if obj.tolerance is not None and (not _finite(obj.tolerance) or obj.tolerance <= 0):
            issues.append(ValidationIssue(f"{path}.tolerance", "tolerance must be > 0"))
        if obj.goal is not None and not _finite(obj.goal):
            issues.append(ValidationIssue(f"{path}.goal", "non-finite goal"))
        _check_weight(f"{path}.weight", obj.weight, issues)

    for j, con in enumerate(problem.constraints):
        path = f"constraints[{j}]"
        _check_vector(f"{path}.coefficients", con.coefficients, n, issues)
        if not isinstance(con.relation, Relation):
            issues.append(ValidationIssue(f"{path}.relation", f"unknown relation {con.relation!r}"))
        if not _finite(con.rhs):
            issues.append(ValidationIssue(f"{path}.rhs", "non-finite rhs"))
        if not _finite(con.tolerance) or con.tolerance < 0:
            issues.append(ValidationIssue(f"{path}.tolerance", "tolerance must be >= 0"))
        _check_weight(f"{path}.weight", con.weight, issues)

    _check_config(problem, cfg, issues)
    return ValidationReport(tuple(issues))


def normalize_weights(
    problem: DecisionProblem,
    cfg: SolverConfig | None = None,
    *,
    joint: bool | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Returns (w, q): objective weights and per-constraint weights summing to 1.
    Only soft constraints with d > 0 take part; joint defaults to "any of them present".
    A missing weight counts as 1 under AS_GIVEN.
    """
    cfg = cfg or SolverConfig()
    mask = np.array([c.participates for c in problem.constraints], dtype=bool)
    if joint is None:
        joint = bool(mask.any())
    if not joint:
        mask[:] = False

    k = len(problem.objectives)
    if cfg.weight_policy is WeightPolicy.EQUAL_NORMALIZED:
        w = np.ones(k)
        q = mask.astype(float)
    else:
        w = np.array([1.0 if o.weight is None else float(o.weight) for o in problem.objectives])
        q = np.array([1.0 if c.weight is None else float(c.weight) for c in problem.constraints])
        q = np.where(mask, q, 0.0)
        if (w < 0).any() or (q < 0).any():
            raise AllZeroWeights("negative weight")

    total = float(w.sum() + q.sum())
    if total <= 0:
        raise AllZeroWeights("all participating weights are zero")
    return w / total, q / total
