from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .errors import DegenerateRamp, InfeasibleAtAlphaLower, InfeasibleProblem, UnboundedObjective, ZeroBestValue
from .membership import RangeMembership, as_lp_rows, evaluate
from .models import (
    CompromiseSolution,
    DecisionProblem,
    FuzzyConstraint,
    LinearProgram,
    LogFn,
    LpOutcome,
    LpRow,
    LpStatus,
    Objective,
    ObjectiveRange,
    Relation,
    Sense,
    SolveMode,
    SolverConfig,
    WorstValuePolicy,
    silent_log,
)
from .problem import normalize_weights
from .simplex import solve

# MODM net : optima individuels, max-min, raffinement en deux phases et max-min augmenté.
# Le LP auxiliaire porte les colonnes (x_1..x_n, alpha) ; alpha est la colonne n.


def relaxed_rhs(con: FuzzyConstraint, theta: float) -> float:
    """Right-hand side of a soft row once a fraction theta of its tolerance is granted."""
    if con.relation is Relation.SOFT_LE:
        return con.rhs + theta * con.tolerance
    if con.relation is Relation.SOFT_GE:
        return con.rhs - theta * con.tolerance
    return con.rhs


def constraint_rows(
    constraints: Sequence[FuzzyConstraint],
    theta: float = 0.0,
    width: int | None = None,
) -> list[LpRow]:
    """Crisp rows of the constraint set, soft rows moved by theta·d and hardened."""
    rows: list[LpRow] = []
    for con in constraints:
        coeffs = tuple(float(c) for c in con.coefficients)
        if width is not None and width > len(coeffs):
            coeffs += (0.0,) * (width - len(coeffs))
        rows.append(LpRow(coeffs, con.relation.hardened(), float(relaxed_rhs(con, theta))))
    return rows


def _bound_rows(width: int, col: int, lower: float | None, upper: float) -> list[LpRow]:
    e = [0.0] * width
    e[col] = 1.0
    rows = [] if lower is None else [LpRow(tuple(e), Relation.GE, float(lower))]
    return rows + [LpRow(tuple(e), Relation.LE, float(upper))]


def alpha_floor(alpha_lower: float) -> float | None:
    """Borne basse de la colonne alpha ; None à 0 (alpha libre, mu peut sortir du support)."""
    return float(alpha_lower) if alpha_lower > 0 else None


def _opposite(sense: Sense) -> Sense:
    return Sense.MINIMIZE if sense is Sense.MAXIMIZE else Sense.MAXIMIZE


def _single_range(
    i: int,
    obj: Objective,
    n: int,
    best_rows: list[LpRow],
    worst_rows: list[LpRow],
    cfg: SolverConfig,
) -> ObjectiveRange:
    best = solve(LinearProgram(n, obj.sense, tuple(obj.coefficients), tuple(best_rows)), cfg)
    if best.status is LpStatus.INFEASIBLE:
        raise InfeasibleProblem("the constraint set is empty")
    if best.status is LpStatus.UNBOUNDED:
        raise UnboundedObjective(f"objective {obj.name!r} is unbounded on the feasible set")

    argmin = None
    policy = cfg.worst_value_policy
    if policy is WorstValuePolicy.ZERO:
        worst = 0.0
    elif policy is WorstValuePolicy.USER_SUPPLIED:
        worst = float(cfg.worst_values[i])
    else:
        out = solve(LinearProgram(n, _opposite(obj.sense), tuple(obj.coefficients), tuple(worst_rows)), cfg)
        if out.status is LpStatus.INFEASIBLE:
            raise InfeasibleProblem("the constraint set is empty")
        if out.status is LpStatus.UNBOUNDED:
            raise UnboundedObjective(f"worst value of objective {obj.name!r} is unbounded")
        worst, argmin = float(out.value), out.x

    return ObjectiveRange(float(best.value), worst, best.x, argmin)


def objective_ranges(
    problem: DecisionProblem,
    cfg: SolverConfig,
    best_rows: list[LpRow],
    worst_rows: list[LpRow],
    *,
    log: LogFn | None = None,
    max_workers: int = 1,
) -> list[ObjectiveRange]:
    """Individual best/worst values of every objective, in objective order."""
    log = log or silent_log
    n = problem.n_vars
    jobs = list(enumerate(problem.objectives))
    if max_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            futures = [executor.submit(_single_range, i, o, n, best_rows, worst_rows, cfg) for i, o in jobs]
            ranges = [f.result() for f in futures]
    else:
        ranges = [_single_range(i, o, n, best_rows, worst_rows, cfg) for i, o in jobs]

    for obj, r in zip(problem.objectives, ranges):
        log(f"[MODM] {obj.name}: z+ = {r.z_plus:.4f}, z- = {r.z_minus:.4f}")
    return ranges


def individual_optima(
    problem: DecisionProblem,
    cfg: SolverConfig | None = None,
    *,
    log: LogFn | None = None,
    max_workers: int = 1,
) -> list[ObjectiveRange]:
    """Best and worst value of each objective over the crisp region (soft rows read at b)."""
    cfg = cfg or SolverConfig()
    rows = constraint_rows(problem.constraints, 0.0)
    return objective_ranges(problem, cfg, rows, rows, log=log, max_workers=max_workers)


def range_specs(
    problem: DecisionProblem,
    ranges: Sequence[ObjectiveRange],
    cfg: SolverConfig,
    log: LogFn | None = None,
    *,
    allow_all_flat: bool = False,
) -> list[RangeMembership | None]:
    """
    Ramp membership per objective. A flat ramp (z+ == z-) gives None: the objective is
    held at membership 1 and left out of the min.
    allow_all_flat: other memberships (goals, soft rows) are still there to aggregate.
    """
    log = log or silent_log
    specs: list[RangeMembership | None] = []
    for obj, r in zip(problem.objectives, ranges):
        gap = r.z_plus - r.z_minus
        if obj.sense is Sense.MINIMIZE:
            gap = -gap
        if abs(gap) <= cfg.eps_opt * (1.0 + abs(r.z_plus)):
            log(f"[MODM] WARN {obj.name}: flat ramp (z+ = z- = {r.z_plus:.4f}), membership fixed at 1")
            specs.append(None)
        elif gap < 0:
            raise DegenerateRamp(
                f"objective {obj.name!r}: best value {r.z_plus:g} is on the wrong side of worst value {r.z_minus:g}"
            )
        else:
            specs.append(RangeMembership(r.z_minus, r.z_plus, obj.sense))
    if specs and not allow_all_flat and all(s is None for s in specs):
        raise DegenerateRamp("every objective has a flat ramp, nothing to aggregate")
    return specs


def satisfaction(z: Sequence[float], ranges: Sequence[ObjectiveRange]) -> tuple[float, ...]:
    """phi_i = z_i / z_i+ (coefficient of satisfaction)."""
    out = []
    for zi, r in zip(z, ranges):
        if r.z_plus == 0:
            raise ZeroBestValue("coefficient of satisfaction undefined for z+ = 0")
        out.append(float(zi) / r.z_plus)
    return tuple(out)


def satisfaction_or_nan(z: Sequence[float], ranges: Sequence[ObjectiveRange]) -> tuple[float, ...]:
    """Solver-side variant: NaN where z+ = 0 (null in result documents) instead of ZeroBestValue."""
    return tuple(float(zi) / r.z_plus if r.z_plus != 0 else math.nan for zi, r in zip(z, ranges))


# -------------------------
# LP auxiliaire
# -------------------------
def _aux_rows(
    problem: DecisionProblem,
    specs: Sequence[RangeMembership | None],
    lower: float | None,
    upper: float,
) -> list[LpRow]:
    n = problem.n_vars
    width = n + 1
    rows = constraint_rows(problem.constraints, 0.0, width)
    for obj, spec in zip(problem.objectives, specs):
        if spec is not None:
            rows += as_lp_rows(spec, obj.coefficients, n, width)
    rows += _bound_rows(width, n, lower, upper)
    return rows


def _membership_objective(
    problem: DecisionProblem,
    specs: Sequence[RangeMembership | None],
    weights: Sequence[float],
) -> np.ndarray:
    """Linear part (over x) of sum_i w_i mu_i(x); constant offsets dropped."""
    c = np.zeros(problem.n_vars + 1)
    for obj, spec, w in zip(problem.objectives, specs, weights):
        if spec is not None:
            c[:-1] += w * np.asarray(obj.coefficients, dtype=float) / spec.width
    return c


def _solve_aux(
    problem: DecisionProblem,
    objective: np.ndarray,
    rows: list[LpRow],
    cfg: SolverConfig,
    alpha_lower: float,
) -> LpOutcome:
    lp = LinearProgram(problem.n_vars + 1, Sense.MAXIMIZE, tuple(float(v) for v in objective), tuple(rows))
    out = solve(lp, cfg, free=(problem.n_vars,))
    if out.status is LpStatus.INFEASIBLE:
        raise InfeasibleAtAlphaLower(alpha_lower)
    if out.status is LpStatus.UNBOUNDED:
        raise UnboundedObjective("auxiliary max-min programme is unbounded")
    return out


def _compromise(
    problem: DecisionProblem,
    ranges: Sequence[ObjectiveRange],
    specs: Sequence[RangeMembership | None],
    out: LpOutcome,
    mode: SolveMode,
    iterations: int,
) -> CompromiseSolution:
    n = problem.n_vars
    x = np.asarray(out.x[:n])
    z = tuple(float(np.dot(o.coefficients, x)) for o in problem.objectives)
    mu = tuple(1.0 if s is None else evaluate(s, zi) for s, zi in zip(specs, z))
    alpha = min(m for s, m in zip(specs, mu) if s is not None)
    return CompromiseSolution(
        x=tuple(float(v) for v in x),
        z=z,
        mu=mu,
        alpha=float(alpha),
        phi=satisfaction_or_nan(z, ranges),
        mode=mode,
        iterations=iterations,
    )


def _prepare(problem, cfg, log, max_workers):
    ranges = individual_optima(problem, cfg, log=log, max_workers=max_workers)
    specs = range_specs(problem, ranges, cfg, log)
    return ranges, specs


def solve_maxmin(
    problem: DecisionProblem,
    cfg: SolverConfig | None = None,
    *,
    log: LogFn | None = None,
    max_workers: int = 1,
) -> CompromiseSolution:
    """max alpha subject to mu_i(x) >= alpha, the crisp rows and alpha_lower <= alpha <= alpha_upper."""
    cfg = cfg or SolverConfig()
    log = log or silent_log
    ranges, specs = _prepare(problem, cfg, log, max_workers)
    objective = np.zeros(problem.n_vars + 1)
    objective[-1] = 1.0
    rows = _aux_rows(problem, specs, alpha_floor(cfg.alpha_lower), cfg.alpha_upper)
    out = _solve_aux(problem, objective, rows, cfg, cfg.alpha_lower)
    sol = _compromise(problem, ranges, specs, out, SolveMode.MAXMIN, out.iterations)
    log(f"[MODM] max-min: alpha = {sol.alpha:.6f} ({out.iterations} pivots)")
    return sol


def solve_augmented(
    problem: DecisionProblem,
    cfg: SolverConfig | None = None,
    *,
    log: LogFn | None = None,
    max_workers: int = 1,
) -> CompromiseSolution:
    """max alpha + delta·sum_i w_i mu_i(x) over the max-min feasible set (nondominated compromise)."""
    cfg = cfg or SolverConfig()
    log = log or silent_log
    ranges, specs = _prepare(problem, cfg, log, max_workers)
    w, _ = normalize_weights(problem, cfg, joint=False)
    objective = cfg.delta * _membership_objective(problem, specs, w)
    objective[-1] += 1.0
    rows = _aux_rows(problem, specs, alpha_floor(cfg.alpha_lower), cfg.alpha_upper)
    out = _solve_aux(problem, objective, rows, cfg, cfg.alpha_lower)
    sol = _compromise(problem, ranges, specs, out, SolveMode.AUGMENTED, out.iterations)
    log(f"[MODM] augmented (delta={cfg.delta:g}): alpha = {sol.alpha:.6f}, z = {_fmt(sol.z)}")
    return sol


def two_phase_refine(
    problem: DecisionProblem,
    cfg: SolverConfig | None = None,
    *,
    log: LogFn | None = None,
    max_workers: int = 1,
) -> CompromiseSolution:
    """
    Phase 1: alpha0 = max-min value.
    Phase 2: maximise the mean membership while every mu_i stays >= alpha0.
    """
    cfg = cfg or SolverConfig()
    log = log or silent_log
    ranges, specs = _prepare(problem, cfg, log, max_workers)

    objective = np.zeros(problem.n_vars + 1)
    objective[-1] = 1.0
    rows = _aux_rows(problem, specs, alpha_floor(cfg.alpha_lower), cfg.alpha_upper)
    first = _solve_aux(problem, objective, rows, cfg, cfg.alpha_lower)
    alpha0 = float(first.value)
    log(f"[MODM] two-phase: phase 1 alpha0 = {alpha0:.6f}")

    active = [s for s in specs if s is not None]
    mean = _membership_objective(problem, specs, [1.0 / len(active)] * len(specs))
    floor = min(alpha0, cfg.alpha_upper) - cfg.eps_feas
    if cfg.alpha_lower > 0:
        floor = max(cfg.alpha_lower, floor)
    rows = _aux_rows(problem, specs, floor, cfg.alpha_upper)
    lp = LinearProgram(problem.n_vars + 1, Sense.MAXIMIZE, tuple(mean), tuple(rows))
    second = solve(lp, cfg, free=(problem.n_vars,))
    if not second.optimal:
        log(f"[MODM] WARN two-phase: phase 2 returned {second.status.value}, keeping the phase 1 point")
        second = first

    sol = _compromise(problem, ranges, specs, second, SolveMode.TWO_PHASE, first.iterations + second.iterations)
    log(f"[MODM] two-phase: mean membership = {np.mean([m for s, m in zip(specs, sol.mu) if s is not None]):.6f}")
    return sol


def _fmt(values: Sequence[float]) -> str:
    return "(" + ", ".join(f"{v:.2f}" for v in values) + ")"
