from __future__ import annotations

from dataclasses import replace
from itertools import combinations

import numpy as np
import pytest

from core.crisp_modm import (
    constraint_rows,
    individual_optima,
    satisfaction,
    solve_augmented,
    solve_maxmin,
    two_phase_refine,
)
from core.errors import (
    DegenerateRamp,
    InfeasibleAtAlphaLower,
    InfeasibleProblem,
    UnboundedObjective,
    ZeroBestValue,
)
from core.membership import RangeMembership, evaluate
from core.models import (
    DecisionProblem,
    FuzzyConstraint,
    LinearProgram,
    LpRow,
    Objective,
    ObjectiveRange,
    Relation,
    Sense,
    SolverConfig,
    WorstValuePolicy,
)
from core.simplex import feasible_vertices, solve

COMPUTED = SolverConfig(worst_value_policy=WorstValuePolicy.COMPUTED_MIN)


def _region_lp(problem: DecisionProblem) -> LinearProgram:
    rows = constraint_rows(problem.constraints, 0.0)
    return LinearProgram(problem.n_vars, Sense.MAXIMIZE, (0.0,) * problem.n_vars, tuple(rows))


def _brute_maxmin(problem: DecisionProblem) -> float:
    """2-D max-min by enumeration: region vertices refined by the mu_i = mu_j lines."""
    vertices = np.array(feasible_vertices(_region_lp(problem)))
    C = np.array([o.coefficients for o in problem.objectives])
    values = vertices @ C.T
    lo, hi = values.min(axis=0), values.max(axis=0)
    width = hi - lo

    lines = [(np.array(c.coefficients), c.rhs) for c in problem.constraints]
    lines += [(np.array([1.0, 0.0]), 0.0), (np.array([0.0, 1.0]), 0.0)]
    for i, j in combinations(range(len(C)), 2):
        lines.append((C[i] / width[i] - C[j] / width[j], lo[i] / width[i] - lo[j] / width[j]))

    A = np.array([c.coefficients for c in problem.constraints])
    b = np.array([c.rhs for c in problem.constraints])
    best = -np.inf
    for (a1, r1), (a2, r2) in combinations(lines, 2):
        M = np.vstack([a1, a2])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, [r1, r2])
        if (x < -1e-9).any() or (A @ x > b + 1e-9).any():
            continue
        best = max(best, float(np.min((C @ x - lo) / width)))
    return best


def test_plant_individual_optima(plant, plant_cfg):
    ranges = individual_optima(plant, plant_cfg)
    np.testing.assert_allclose([r.z_plus for r in ranges], [26301.29, 21224.0, 19291.0], atol=0.5)
    np.testing.assert_allclose(ranges[0].argmax_x, (734.02, 756.0, 903.0), atol=0.5)
    np.testing.assert_allclose(ranges[1].argmax_x, (588.0, 915.95, 903.0), atol=0.5)
    assert all(r.z_minus == 0.0 for r in ranges)


def test_plant_augmented_compromise(plant, plant_cfg):
    sol = solve_augmented(plant, plant_cfg)
    np.testing.assert_allclose(sol.x[:2], (635.94, 863.43), rtol=0.01)
    assert sol.x[2] == pytest.approx(903.0, abs=0.5)
    np.testing.assert_allclose(sol.z, (26199.0, 21130.0, 19259.0), rtol=0.01)
    np.testing.assert_allclose(sol.phi, (0.996, 0.996, 0.998), atol=0.002)
    assert sol.alpha == pytest.approx(min(sol.mu))
    assert sol.alpha == pytest.approx(0.9959, abs=5e-4)


def test_memberships_equal_satisfaction_under_zero_worst(plant, plant_cfg):
    sol = solve_augmented(plant, plant_cfg)
    np.testing.assert_allclose(sol.mu, sol.phi, atol=1e-12)


def test_alpha_lower_only_restricts(plant, plant_cfg):
    free = solve_maxmin(plant, replace(plant_cfg, alpha_lower=0.0))
    for lower in (0.5, 0.9, 0.99):
        sol = solve_maxmin(plant, replace(plant_cfg, alpha_lower=lower))
        assert sol.alpha == pytest.approx(free.alpha, abs=1e-9)
    with pytest.raises(InfeasibleAtAlphaLower) as info:
        solve_maxmin(plant, replace(plant_cfg, alpha_lower=0.999))
    assert info.value.alpha_lower == 0.999


def test_symmetric_compromise():
    p = DecisionProblem(
        ("x1", "x2"),
        (Objective("a", (1.0, 0.0)), Objective("b", (0.0, 1.0))),
        (FuzzyConstraint("cap", (1.0, 1.0), Relation.LE, 2.0),),
    )
    for solver in (solve_maxmin, solve_augmented, two_phase_refine):
        sol = solver(p)
        np.testing.assert_allclose(sol.x, (1.0, 1.0), atol=1e-6)
        assert sol.alpha == pytest.approx(0.5)


def test_two_phase_lifts_slack_memberships():
    p = DecisionProblem(
        ("x1", "x2", "x3"),
        (Objective("a", (1.0, 0.0, 0.0)), Objective("b", (0.0, 1.0, 0.0)), Objective("c", (0.0, 0.0, 1.0))),
        (
            FuzzyConstraint("pair", (1.0, 1.0, 0.0), Relation.LE, 2.0),
            FuzzyConstraint("third", (0.0, 0.0, 1.0), Relation.LE, 1.0),
        ),
    )
    sol = two_phase_refine(p)
    assert sol.alpha == pytest.approx(0.5)
    np.testing.assert_allclose(sol.mu, (0.5, 0.5, 1.0), atol=1e-6)
    assert np.mean(sol.mu) >= np.mean(solve_augmented(p).mu) - 1e-9


def test_maxmin_matches_brute_force(region_problem):
    rng = np.random.default_rng(42)
    for _ in range(50):
        p = region_problem(rng, 2, int(rng.integers(2, 4)))
        got = solve_maxmin(p, COMPUTED).alpha
        assert got == pytest.approx(_brute_maxmin(p), abs=1e-6)


def test_augmented_never_loses_more_than_delta(region_problem):
    rng = np.random.default_rng(8)
    for _ in range(100):
        p = region_problem(rng, int(rng.integers(2, 5)), int(rng.integers(2, 4)))
        mm = solve_maxmin(p, COMPUTED)
        aug = solve_augmented(p, COMPUTED)
        assert aug.alpha >= mm.alpha - COMPUTED.delta - 1e-9


def test_augmented_compromise_is_nondominated(region_problem):
    rng = np.random.default_rng(99)
    for _ in range(40):
        p = region_problem(rng, int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        sol = solve_augmented(p, COMPUTED)
        n = p.n_vars
        rows = list(constraint_rows(p.constraints, 0.0))
        rows += [LpRow(o.coefficients, Relation.GE, z) for o, z in zip(p.objectives, sol.z)]
        total = tuple(float(v) for v in np.sum([o.coefficients for o in p.objectives], axis=0))
        out = solve(LinearProgram(n, Sense.MAXIMIZE, total, tuple(rows)))
        assert out.optimal
        assert out.value <= sum(sol.z) + 1e-6 * (1.0 + abs(sum(sol.z)))


def test_scaling_an_objective_keeps_alpha(region_problem):
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = region_problem(rng, 3, 3)
        scaled = replace(p, objectives=tuple(
            replace(o, coefficients=tuple(s * c for c in o.coefficients))
            for o, s in zip(p.objectives, (10.0, 0.01, 3.0))
        ))
        base = solve_maxmin(p, COMPUTED)
        other = solve_maxmin(scaled, COMPUTED)
        assert other.alpha == pytest.approx(base.alpha, abs=1e-7)
        ranges = individual_optima(p, COMPUTED)
        mus = [evaluate(RangeMembership(r.z_minus, r.z_plus), float(np.dot(o.coefficients, other.x)))
               for o, r in zip(p.objectives, ranges)]
        assert min(mus) == pytest.approx(base.alpha, abs=1e-7)


def test_minimising_objective():
    # min x1 + x2 over x1 + x2 >= 1, x1 <= 3, x2 <= 3 ; max x1
    p = DecisionProblem(
        ("x1", "x2"),
        (Objective("cost", (1.0, 1.0), Sense.MINIMIZE), Objective("a", (1.0, 0.0))),
        (
            FuzzyConstraint("floor", (1.0, 1.0), Relation.GE, 1.0),
            FuzzyConstraint("x1cap", (1.0, 0.0), Relation.LE, 3.0),
            FuzzyConstraint("x2cap", (0.0, 1.0), Relation.LE, 3.0),
        ),
    )
    ranges = individual_optima(p, COMPUTED)
    assert ranges[0].z_plus == pytest.approx(1.0)
    assert ranges[0].z_minus == pytest.approx(6.0)
    sol = solve_maxmin(p, COMPUTED)
    # mu_cost = (6 - z)/5, mu_a = x1/3 avec x2 = 0 : (6 - x1)/5 = x1/3
    assert sol.alpha == pytest.approx(0.75, abs=1e-9)
    assert sol.x[0] == pytest.approx(2.25, abs=1e-9)


def test_user_supplied_worst_values_above_best():
    p = DecisionProblem(("x1",), (Objective("a", (1.0,)),), (FuzzyConstraint("cap", (1.0,), Relation.LE, 1.0),))
    cfg = SolverConfig(worst_value_policy=WorstValuePolicy.USER_SUPPLIED, worst_values=(5.0,))
    with pytest.raises(DegenerateRamp):
        solve_maxmin(p, cfg)


def test_every_ramp_flat():
    p = DecisionProblem(("x1",), (Objective("a", (0.0,)),), (FuzzyConstraint("cap", (1.0,), Relation.LE, 1.0),))
    with pytest.raises(DegenerateRamp):
        solve_augmented(p)


def test_flat_ramp_is_left_out():
    p = DecisionProblem(
        ("x1", "x2"),
        (Objective("a", (1.0, 0.0)), Objective("flat", (0.0, 0.0))),
        (FuzzyConstraint("cap", (1.0, 1.0), Relation.LE, 2.0),),
    )
    sol = solve_maxmin(p)
    assert sol.mu[1] == 1.0
    assert sol.alpha == pytest.approx(1.0)
    # z+ = 0 : phi non défini, NaN dans la solution, erreur via satisfaction
    assert sol.phi[0] == pytest.approx(1.0)
    assert np.isnan(sol.phi[1])
    with pytest.raises(ZeroBestValue):
        satisfaction(sol.z, individual_optima(p))


def test_empty_region_and_unbounded_objective():
    empty = DecisionProblem(
        ("x1",),
        (Objective("a", (1.0,)),),
        (FuzzyConstraint("lo", (1.0,), Relation.GE, 5.0), FuzzyConstraint("hi", (1.0,), Relation.LE, 3.0)),
    )
    with pytest.raises(InfeasibleProblem):
        individual_optima(empty)

    open_ = DecisionProblem(
        ("x1", "x2"), (Objective("a", (1.0, 0.0)),), (FuzzyConstraint("r", (1.0, -1.0), Relation.LE, 1.0),),
    )
    with pytest.raises(UnboundedObjective):
        solve_maxmin(open_)


def test_parallel_optima_match_sequential(plant, plant_cfg):
    assert individual_optima(plant, plant_cfg, max_workers=3) == individual_optima(plant, plant_cfg)


def test_satisfaction():
    ranges = [ObjectiveRange(4.0, 0.0, (1.0,)), ObjectiveRange(2.0, 0.0, (1.0,))]
    assert satisfaction((3.0, 2.0), ranges) == (0.75, 1.0)
    with pytest.raises(ZeroBestValue):
        satisfaction((1.0,), [ObjectiveRange(0.0, 0.0, (0.0,))])


def test_log_lines_are_tagged(plant, plant_cfg):
    lines: list[str] = []
    solve_augmented(plant, plant_cfg, log=lines.append)
    assert lines and all(line.startswith("[MODM]") for line in lines)


def test_compromise_outside_every_support():
    # z1 + z2 = -(x1 + x2) <= -1 : aucun point ne garde les deux objectifs >= 0
    p = DecisionProblem(
        ("x1", "x2"),
        (Objective("z1", (1.0, -2.0)), Objective("z2", (-2.0, 1.0))),
        (
            FuzzyConstraint("sum", (1.0, 1.0), Relation.GE, 1.0),
            FuzzyConstraint("c1", (1.0, 0.0), Relation.LE, 1.0),
            FuzzyConstraint("c2", (0.0, 1.0), Relation.LE, 1.0),
        ),
    )
    sol = solve_maxmin(p)
    assert sol.alpha == 0.0
    assert sol.mu == (0.0, 0.0)
    np.testing.assert_allclose(sol.x, (0.5, 0.5), atol=1e-7)
    for solver in (solve_augmented, two_phase_refine):
        assert solver(p).alpha == 0.0

    with pytest.raises(InfeasibleAtAlphaLower):
        solve_maxmin(p, SolverConfig(alpha_lower=0.1))
