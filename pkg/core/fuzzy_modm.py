from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .crisp_modm import alpha_floor, constraint_rows, objective_ranges, range_specs, relaxed_rhs, satisfaction_or_nan
from .errors import EmptyGrid, GridError, InfeasibleAtAlphaLower, NoFuzzyContent, UnboundedObjective
from .membership import GoalMembership, MembershipSpec, SoftMembership, affine_form, as_lp_rows, evaluate
from .models import (
    DecisionProblem,
    FuzzySolution,
    LinearProgram,
    LogFn,
    LpOutcome,
    LpRow,
    LpStatus,
    ObjectiveRange,
    Relation,
    Sense,
    SolveMode,
    SolverConfig,
    SweepRow,
    SweepTable,
    silent_log,
)
from .problem import normalize_weights
from .simplex import solve

# MODM flou : objectifs à but (z0, t) et ressources à tolérance d, résolus par le
# max-min augmenté joint, plus le balayage en alpha pour l'aide à la décision.

ProgressFn = Callable[[int, int], None]  # done, total


def relax(problem: DecisionProblem, theta: float) -> DecisionProblem:
    """Crisp snapshot of the fuzzy region: soft rhs moved by theta·d, relations hardened."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1] (got {theta})")
    constraints = tuple(
        replace(c, rhs=relaxed_rhs(c, theta), relation=c.relation.hardened(), tolerance=0.0)
        if c.relation.is_soft else c
        for c in problem.constraints
    )
    return replace(problem, constraints=constraints)


def fuzzy_individual_optima(
    problem: DecisionProblem,
    cfg: SolverConfig | None = None,
    *,
    log: LogFn | None = None,
    max_workers: int = 1,
) -> list[ObjectiveRange]:
    """z+ over the region relaxed by best_region_theta (default: fully), z- over worst_region_theta (default: crisp)."""
    cfg = cfg or SolverConfig()
    best_rows = constraint_rows(problem.constraints, cfg.best_region_theta)
    worst_rows = constraint_rows(problem.constraints, cfg.worst_region_theta)
    return objective_ranges(problem, cfg, best_rows, worst_rows, log=log, max_workers=max_workers)


# -------------------------
# Modèle auxiliaire flou
# -------------------------
@dataclass(frozen=True)
class _FuzzyModel:
    """
    Columns: x (n), alpha (index n), then one capped variable u per goal objective and per
    participating soft row (u <= mu(expr), u <= 1, alpha <= u).
    alpha and the goal columns are free; soft-row columns stay >= 0 (x within b + d).
    """
    n: int
    width: int
    rows: tuple[LpRow, ...]
    weighted: np.ndarray  # sum w_i mu_i + sum q_j mu_j, linear part over all columns
    obj_specs: tuple[Optional[MembershipSpec], ...]
    con_specs: tuple[Optional[SoftMembership], ...]
    free: tuple[int, ...]


def _objective_specs(
    problem: DecisionProblem,
    ranges: Sequence[ObjectiveRange],
    cfg: SolverConfig,
    log: LogFn,
) -> tuple[Optional[MembershipSpec], ...]:
    """Goal membership when (z0, t) is given, ramp over the fuzzy optima otherwise."""
    sub = [i for i, o in enumerate(problem.objectives) if not o.has_goal]
    ramps: dict[int, Optional[MembershipSpec]] = {}
    if sub:
        ramp_problem = replace(problem, objectives=tuple(problem.objectives[i] for i in sub))
        specs = range_specs(ramp_problem, [ranges[i] for i in sub], cfg, log,
                            allow_all_flat=len(sub) < len(problem.objectives) or problem.has_fuzzy_content)
        ramps = dict(zip(sub, specs))
    return tuple(
        GoalMembership(float(o.goal), float(o.tolerance), o.sense) if o.has_goal else ramps[i]
        for i, o in enumerate(problem.objectives)
    )


def _build_model(
    problem: DecisionProblem,
    cfg: SolverConfig,
    ranges: Sequence[ObjectiveRange],
    log: LogFn,
) -> _FuzzyModel:
    n = problem.n_vars
    obj_specs = _objective_specs(problem, ranges, cfg, log)
    con_specs = tuple(
        SoftMembership(float(c.rhs), float(c.tolerance), c.relation) if c.participates else None
        for c in problem.constraints
    )

    capped = [("obj", i, s) for i, s in enumerate(obj_specs) if isinstance(s, GoalMembership)]
    capped += [("con", j, s) for j, s in enumerate(con_specs) if s is not None]
    width = n + 1 + len(capped)

    w, q = normalize_weights(problem, cfg)
    weighted = np.zeros(width)
    rows: list[LpRow] = []

    hard = [c for c in problem.constraints if not c.participates]
    rows += constraint_rows(hard, 0.0, width)

    for i, (obj, spec) in enumerate(zip(problem.objectives, obj_specs)):
        if spec is None or isinstance(spec, GoalMembership):
            continue
        rows += as_lp_rows(spec, obj.coefficients, n, width)
        slope, _ = affine_form(spec)
        weighted[:n] += w[i] * slope * np.asarray(obj.coefficients, dtype=float)

    for offset, (kind, idx, spec) in enumerate(capped):
        col = n + 1 + offset
        coeffs = problem.objectives[idx].coefficients if kind == "obj" else problem.constraints[idx].coefficients
        rows += as_lp_rows(spec, coeffs, col, width)
        e = np.zeros(width)
        e[col] = 1.0
        rows.append(LpRow(tuple(e), Relation.LE, 1.0))
        e[n] = -1.0
        rows.append(LpRow(tuple(e), Relation.GE, 0.0))
        weighted[col] += w[idx] if kind == "obj" else q[idx]

    free = (n,) + tuple(n + 1 + k for k, (kind, _, _) in enumerate(capped) if kind == "obj")
    return _FuzzyModel(n, width, tuple(rows), weighted, obj_specs, con_specs, free)


def _level_rows(model: _FuzzyModel, lower: float | None, upper: float) -> tuple[LpRow, ...]:
    e = [0.0] * model.width
    e[model.n] = 1.0
    bounds = () if lower is None else (LpRow(tuple(e), Relation.GE, float(lower)),)
    return model.rows + bounds + (LpRow(tuple(e), Relation.LE, float(upper)),)


def _solve_model(
    model: _FuzzyModel,
    objective: np.ndarray,
    lower: float | None,
    upper: float,
    cfg: SolverConfig,
) -> LpOutcome:
    lp = LinearProgram(model.width, Sense.MAXIMIZE, tuple(float(v) for v in objective), _level_rows(model, lower, upper))
    return solve(lp, cfg, free=model.free)


def _evaluate_point(problem: DecisionProblem, model: _FuzzyModel, x: np.ndarray):
    z = tuple(float(np.dot(o.coefficients, x)) for o in problem.objectives)
    mu_obj = tuple(1.0 if s is None else evaluate(s, zi) for s, zi in zip(model.obj_specs, z))
    mu_con, used = [], []
    for c, s in zip(problem.constraints, model.con_specs):
        if s is None:
            mu_con.append(1.0)
            used.append(0.0)
            continue
        m = evaluate(s, float(np.dot(c.coefficients, x)))
        mu_con.append(m)
        used.append(1.0 - m)
    active = [m for s, m in zip(model.obj_specs, mu_obj) if s is not None]
    active += [m for s, m in zip(model.con_specs, mu_con) if s is not None]
    return z, mu_obj, tuple(mu_con), tuple(used), float(min(active))


def _solve_fuzzy(
    problem: DecisionProblem,
    cfg: SolverConfig,
    mode: SolveMode,
    log: LogFn,
    max_workers: int,
) -> FuzzySolution:
    ranges = fuzzy_individual_optima(problem, cfg, log=log, max_workers=max_workers)
    model = _build_model(problem, cfg, ranges, log)
    objective = cfg.delta * model.weighted
    objective[model.n] += 1.0
    out = _solve_model(model, objective, alpha_floor(cfg.alpha_lower), cfg.alpha_upper, cfg)
    if out.status is LpStatus.INFEASIBLE:
        raise InfeasibleAtAlphaLower(cfg.alpha_lower)
    if out.status is LpStatus.UNBOUNDED:
        raise UnboundedObjective("fuzzy auxiliary programme is unbounded")

    x = np.asarray(out.x[: model.n])
    z, mu_obj, mu_con, used, alpha = _evaluate_point(problem, model, x)
    log(f"[FUZZY] {mode.value}: alpha = {alpha:.6f}, z = ({', '.join(f'{v:.2f}' for v in z)})")
    return FuzzySolution(
        x=tuple(float(v) for v in x),
        z=z,
        mu_obj=mu_obj,
        mu_con=mu_con,
        alpha=alpha,
        phi=satisfaction_or_nan(z, ranges),
        slack_report=used,
        mode=mode,
        iterations=out.iterations,
    )


def solve_fuzzy_augmented(
    problem: DecisionProblem,
    cfg: SolverConfig | None = None,
    *,
    log: LogFn | None = None,
    max_workers: int = 1,
) -> FuzzySolution:
    """
    max alpha + delta·(sum_i w_i mu_i + sum_j q_j mu_j) over objective and soft-row memberships.
    Goal objectives use 1 - (z0 - z)/t, the others the ramp over the fuzzy individual optima;
    hard rows and soft rows with d = 0 stay crisp at b.
    """
    cfg = cfg or SolverConfig()
    if not problem.has_fuzzy_content:
        raise NoFuzzyContent("no goal objective and no soft row with a tolerance: use the crisp solvers")
    return _solve_fuzzy(problem, cfg, SolveMode.FUZZY, log or silent_log, max_workers)


def solve_goal_augmented(
    problem: DecisionProblem,
    cfg: SolverConfig | None = None,
    *,
    log: LogFn | None = None,
    max_workers: int = 1,
) -> FuzzySolution:
    """Goal memberships on the objectives, every constraint read crisply at b."""
    cfg = cfg or SolverConfig()
    if not any(o.has_goal for o in problem.objectives):
        raise NoFuzzyContent("no objective carries a goal and a tolerance")
    return _solve_fuzzy(relax(problem, 0.0), cfg, SolveMode.GOAL, log or silent_log, max_workers)


# -------------------------
# Balayage en alpha
# -------------------------
def _check_grid(grid: Sequence[float]) -> list[float]:
    values = [float(a) for a in grid]
    if not values:
        raise EmptyGrid("alpha grid is empty")
    for a in values:
        if not 0.0 <= a <= 1.0:
            raise GridError(f"alpha {a:g} outside [0, 1]")
    for a, b in zip(values, values[1:]):
        if not b > a:
            raise GridError(f"alpha grid must be strictly ascending ({a:g} then {b:g})")
    return values


def _sweep_level(
    problem: DecisionProblem,
    model: _FuzzyModel,
    ranges: Sequence[ObjectiveRange],
    alpha: float,
    cfg: SolverConfig,
) -> SweepRow:
    out = _solve_model(model, model.weighted, alpha_floor(alpha), alpha, cfg)
    if not out.optimal:
        return SweepRow(alpha, False)

    x = np.asarray(out.x[: model.n])
    z, mu_obj, mu_con, _, _ = _evaluate_point(problem, model, x)

    best = []
    for obj in problem.objectives:
        c = np.zeros(model.width)
        c[: model.n] = obj.coefficients
        lp = LinearProgram(model.width, obj.sense, tuple(c), _level_rows(model, alpha_floor(alpha), alpha))
        r = solve(lp, cfg, free=model.free)
        best.append(float(r.value) if r.optimal else float("nan"))

    w, q = normalize_weights(problem, cfg)
    total = float(np.dot(w, mu_obj) + np.dot(q, mu_con))
    return SweepRow(
        alpha=alpha,
        feasible=True,
        x=tuple(float(v) for v in x),
        z=z,
        phi=satisfaction_or_nan(z, ranges),
        z_best=tuple(best),
        membership_sum=total,
    )


def alpha_sweep(
    problem: DecisionProblem,
    cfg: SolverConfig | None,
    grid: Sequence[float],
    *,
    max_workers: int = 1,
    progress: ProgressFn | None = None,
    on_row: Callable[[int, SweepRow], None] | None = None,
    log: LogFn | None = None,
) -> SweepTable:
    """
    For every grid level, fix alpha and maximise the weighted membership sum under all
    membership rows at that level. Rows follow the grid order; infeasible levels are marked.
    `on_row(grid_index, row)` fires as soon as a level is solved, before `progress`.
    """
    cfg = cfg or SolverConfig()
    log = log or silent_log
    values = _check_grid(grid)
    ranges = fuzzy_individual_optima(problem, cfg, log=log)
    model = _build_model(problem, cfg, ranges, log)

    total = len(values)
    rows: list[Optional[SweepRow]] = [None] * total
    done = 0

    def _record(idx: int, row: SweepRow) -> None:
        nonlocal done
        rows[idx] = row
        done += 1
        if not row.feasible:
            log(f"[SWEEP] WARN alpha = {row.alpha:.4f}: infeasible")
        if on_row is not None:
            on_row(idx, row)
        if progress is not None:
            progress(done, total)

    if max_workers > 1 and total > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            future_map = {executor.submit(_sweep_level, problem, model, ranges, a, cfg): i for i, a in enumerate(values)}
            for fut in as_completed(future_map):
                _record(future_map[fut], fut.result())
    else:
        for i, a in enumerate(values):
            _record(i, _sweep_level(problem, model, ranges, a, cfg))

    table = SweepTable(tuple(rows))
    feasible = table.feasible_alphas
    log(f"[SWEEP] {len(feasible)}/{total} feasible levels" + (f", last at {feasible[-1]:.4f}" if feasible else ""))
    return table
