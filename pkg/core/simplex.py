from __future__ import annotations

from itertools import combinations, islice
from typing import Iterator, Sequence

import numpy as np

from .errors import MalformedProblem, NumericalFailure, TooLarge
from .models import LinearProgram, LpOutcome, LpRow, LpStatus, Relation, Sense, SolverConfig

# Simplexe dense en deux phases (tableau numpy) + oracle par énumération des sommets
# pour les tests et la vérification des petites instances.

PIVOT_EPS = 1e-10
MAX_ENUM_VARS = 10
_ENUM_CHUNK = 20000

_HARD = (Relation.LE, Relation.GE, Relation.EQ)


def check_program(lp: LinearProgram) -> None:
    """Raise MalformedProblem on a dimension mismatch or a non-finite number."""
    n = int(lp.n_vars)
    if n < 1:
        raise MalformedProblem("n_vars must be >= 1")
    if len(lp.objective) != n:
        raise MalformedProblem(f"objective has {len(lp.objective)} coefficients, expected {n}")
    if not np.all(np.isfinite(np.asarray(lp.objective, dtype=float))):
        raise MalformedProblem("objective has a non-finite coefficient")
    for i, row in enumerate(lp.rows):
        if len(row.coefficients) != n:
            raise MalformedProblem(f"row {i}: {len(row.coefficients)} coefficients, expected {n}")
        if row.relation not in _HARD:
            raise MalformedProblem(f"row {i}: relation {row.relation.value!r} must be hardened before solving")
        if not np.all(np.isfinite(np.asarray(row.coefficients, dtype=float))) or not np.isfinite(row.rhs):
            raise MalformedProblem(f"row {i}: non-finite coefficient or rhs")


def _arrays(lp: LinearProgram) -> tuple[np.ndarray, np.ndarray, list[Relation]]:
    n = lp.n_vars
    if not lp.rows:
        return np.zeros((0, n)), np.zeros(0), []
    A = np.array([r.coefficients for r in lp.rows], dtype=float)
    b = np.array([r.rhs for r in lp.rows], dtype=float)
    return A, b, [r.relation for r in lp.rows]


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    piv = T[row] / T[row, col]
    T -= np.outer(T[:, col], piv)
    T[row] = piv


def _simplex(
    T: np.ndarray,
    basis: np.ndarray,
    cost: np.ndarray,
    allowed: np.ndarray,
    cfg: SolverConfig,
) -> tuple[LpStatus, int]:
    """
    Maximise cost·x sur le tableau courant (modifié en place).
    Règle de Dantzig, puis Bland dès que la série de pivots dégénérés dépasse 2·(n+m).
    """
    m, width = T.shape
    n_cols = width - 1
    degeneracy_limit = 2 * (n_cols + m)
    limit = 50 * (n_cols + m) + 1000
    bland = False
    degenerate_run = 0

    for it in range(limit):
        reduced = cost - cost[basis] @ T[:, :-1] if m else cost.copy()
        reduced[basis] = 0.0
        candidates = np.flatnonzero(allowed & (reduced > cfg.eps_opt))
        if candidates.size == 0:
            return LpStatus.OPTIMAL, it
        col = int(candidates[0]) if bland else int(candidates[np.argmax(reduced[candidates])])

        column = T[:, col]
        rows = np.flatnonzero(column > PIVOT_EPS)
        if rows.size == 0:
            return LpStatus.UNBOUNDED, it
        ratios = np.maximum(T[rows, -1], 0.0) / column[rows]
        best = float(ratios.min())
        ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
        row = int(ties[np.argmin(basis[ties])])

        degenerate_run = degenerate_run + 1 if best <= cfg.eps_feas else 0
        if degenerate_run > degeneracy_limit:
            bland = True

        _pivot(T, row, col)
        basis[row] = col

    raise NumericalFailure(f"simplex did not converge after {limit} pivots")


def _standardize(A: np.ndarray, b: np.ndarray, rels: list[Relation]):
    """Rend b >= 0 en retournant les lignes (et leur relation) si besoin."""
    A = A.copy()
    b = b.copy()
    rels = list(rels)
    for i, rel in enumerate(rels):
        if b[i] < 0 or (b[i] == 0 and rel is Relation.GE):
            A[i] = -A[i]
            b[i] = -b[i]
            if rel is Relation.LE:
                rels[i] = Relation.GE
            elif rel is Relation.GE:
                rels[i] = Relation.LE
    return A, b, rels


def _two_phase(c: np.ndarray, lp: LinearProgram, cfg: SolverConfig) -> tuple[LpStatus, np.ndarray | None, int]:
    A0, b0, rels0 = _arrays(lp)
    A, b, rels = _standardize(A0, b0, rels0)
    m, n = A.shape
    n_slack = sum(rel is not Relation.EQ for rel in rels)
    n_art = sum(rel is not Relation.LE for rel in rels)
    total = n + n_slack + n_art

    T = np.zeros((m, total + 1))
    T[:, :n] = A
    T[:, -1] = b
    basis = np.zeros(m, dtype=int)
    artificial = np.zeros(total, dtype=bool)
    s, a = n, n + n_slack
    for i, rel in enumerate(rels):
        if rel is Relation.LE:
            T[i, s] = 1.0
            basis[i] = s
            s += 1
            continue
        if rel is Relation.GE:
            T[i, s] = -1.0
            s += 1
        T[i, a] = 1.0
        basis[i] = a
        artificial[a] = True
        a += 1

    iterations = 0
    if n_art:
        # Phase 1 : minimiser la somme des artificielles
        cost1 = np.where(artificial, -1.0, 0.0)
        _, it = _simplex(T, basis, cost1, np.ones(total, dtype=bool), cfg)
        iterations += it
        residual = float(T[artificial[basis], -1].sum())
        scale = 1.0 + (float(np.abs(b).max()) if m else 0.0)
        if residual > cfg.eps_feas * scale:
            return LpStatus.INFEASIBLE, None, iterations
        T, basis = _drive_out_artificials(T, basis, artificial)

    cost2 = np.zeros(total)
    cost2[:n] = c
    status, it = _simplex(T, basis, cost2, ~artificial, cfg)
    iterations += it
    if status is not LpStatus.OPTIMAL:
        return status, None, iterations

    full = np.zeros(total)
    full[basis] = T[:, -1]
    x = full[:n]
    if x.size and x.min() < -1e-7 * (1.0 + float(np.abs(x).max())):
        raise NumericalFailure(f"negative component in optimal basis ({x.min():.3g})")
    x = np.maximum(x, 0.0)
    _verify(A0, b0, rels0, x)
    return LpStatus.OPTIMAL, x, iterations


def _drive_out_artificials(T: np.ndarray, basis: np.ndarray, artificial: np.ndarray):
    """Sort les artificielles restées en base (à valeur nulle) ; supprime les lignes redondantes."""
    keep = np.ones(T.shape[0], dtype=bool)
    for i in range(T.shape[0]):
        if not artificial[basis[i]]:
            continue
        cols = np.flatnonzero(~artificial & (np.abs(T[i, :-1]) > PIVOT_EPS))
        if cols.size:
            _pivot(T, i, int(cols[0]))
            basis[i] = int(cols[0])
        else:
            keep[i] = False
    return T[keep].copy(), basis[keep].copy()


def _verify(A: np.ndarray, b: np.ndarray, rels: list[Relation], x: np.ndarray) -> None:
    if not len(b):
        return
    lhs = A @ x
    tol = 1e-6 * (1.0 + np.abs(b) + np.abs(A) @ np.abs(x))
    for i, rel in enumerate(rels):
        gap = lhs[i] - b[i]
        bad = (rel is Relation.LE and gap > tol[i]) or (rel is Relation.GE and gap < -tol[i]) \
            or (rel is Relation.EQ and abs(gap) > tol[i])
        if bad:
            raise NumericalFailure(f"row {i} violated by {gap:.3g} after pivoting")


def _split_free(lp: LinearProgram, free: Sequence[int]) -> LinearProgram:
    """Chaque colonne libre j devient x_j - x'_j, avec x'_j >= 0 ajoutée en fin de tableau."""
    def extend(coeffs: Sequence[float]) -> tuple[float, ...]:
        return tuple(coeffs) + tuple(-coeffs[j] for j in free)

    rows = tuple(LpRow(extend(r.coefficients), r.relation, r.rhs) for r in lp.rows)
    return LinearProgram(lp.n_vars + len(free), lp.sense, extend(lp.objective), rows)


def solve(lp: LinearProgram, cfg: SolverConfig | None = None, *, free: Sequence[int] = ()) -> LpOutcome:
    """
    Global optimum of a single-objective LP (two-phase simplex).
    Minimisation is solved as the maximisation of -c, so min c == -max(-c) exactly.
    Columns listed in `free` may go negative; all others stay >= 0.
    """
    cfg = cfg or SolverConfig()
    check_program(lp)
    free = tuple(dict.fromkeys(int(j) for j in free))
    if any(not 0 <= j < lp.n_vars for j in free):
        raise MalformedProblem(f"free column out of range: {free}")
    n = lp.n_vars
    if free:
        lp = _split_free(lp, free)
    c = np.asarray(lp.objective, dtype=float)
    if lp.sense is Sense.MINIMIZE:
        c = -c
    status, x, iterations = _two_phase(c, lp, cfg)
    if status is not LpStatus.OPTIMAL:
        return LpOutcome(status, iterations=iterations)
    value = float(np.dot(c, x))
    if lp.sense is Sense.MINIMIZE:
        value = -value
    for k, j in enumerate(free):
        x[j] -= x[n + k]
    return LpOutcome(LpStatus.OPTIMAL, tuple(float(v) for v in x[:n]), value, iterations)


# -------------------------
# Oracle : énumération des sommets
# -------------------------
def _combination_chunks(count: int, size: int) -> Iterator[np.ndarray]:
    it = combinations(range(count), size)
    while True:
        chunk = list(islice(it, _ENUM_CHUNK))
        if not chunk:
            return
        yield np.array(chunk, dtype=int).reshape(len(chunk), size)


def _intersections(M: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Solve each square system of the batch; singular ones are dropped (Hadamard-scaled test)."""
    dets = np.linalg.det(M)
    scale = np.prod(np.linalg.norm(M, axis=2), axis=1)
    ok = np.abs(dets) > 1e-10 * scale
    if not ok.any():
        return np.zeros((0, M.shape[1]))
    return np.linalg.solve(M[ok], r[ok][..., None])[..., 0]


def _satisfies(A: np.ndarray, b: np.ndarray, rels: list[Relation], pts: np.ndarray) -> np.ndarray:
    ok = np.all(pts >= -1e-9 * (1.0 + np.abs(pts)), axis=1)
    if not len(b):
        return ok
    lhs = pts @ A.T
    tol = 1e-9 * (1.0 + np.abs(b)[None, :] + np.abs(pts) @ np.abs(A).T)
    for i, rel in enumerate(rels):
        gap = lhs[:, i] - b[i]
        if rel is Relation.LE:
            ok &= gap <= tol[:, i]
        elif rel is Relation.GE:
            ok &= gap >= -tol[:, i]
        else:
            ok &= np.abs(gap) <= tol[:, i]
    return ok


def feasible_vertices(lp: LinearProgram) -> list[tuple[float, ...]]:
    """Every basic feasible point: n active hyperplanes among the rows and the x_j = 0 bounds."""
    check_program(lp)
    n = lp.n_vars
    if n > MAX_ENUM_VARS:
        raise TooLarge(f"vertex enumeration limited to {MAX_ENUM_VARS} variables (got {n})")
    A, b, rels = _arrays(lp)
    H = np.vstack([A, np.eye(n)])
    h = np.concatenate([b, np.zeros(n)])

    out: list[tuple[float, ...]] = []
    seen: set[tuple[float, ...]] = set()
    for combos in _combination_chunks(H.shape[0], n):
        pts = _intersections(H[combos], h[combos])
        if not len(pts):
            continue
        for p in pts[_satisfies(A, b, rels, pts)]:
            key = tuple(np.round(p, 9) + 0.0)
            if key in seen:
                continue
            seen.add(key)
            out.append(tuple(float(v) for v in p))
    return out


def _has_improving_ray(A: np.ndarray, rels: list[Relation], c: np.ndarray) -> bool:
    """Extreme rays of the recession cone, normalised by sum(d) = 1 (d >= 0 keeps the cone pointed)."""
    n = c.size
    H = np.vstack([A, np.eye(n)])
    cone_rels = list(rels)
    zero = np.zeros(len(rels))
    tol = 1e-9 * (1.0 + float(np.abs(c).sum()))
    for combos in _combination_chunks(H.shape[0], n - 1):
        k = combos.shape[0]
        M = np.concatenate([H[combos], np.ones((k, 1, n))], axis=1)
        r = np.zeros((k, n))
        r[:, -1] = 1.0
        dirs = _intersections(M, r)
        if not len(dirs):
            continue
        dirs = dirs[_satisfies(A, zero, cone_rels, dirs)]
        if len(dirs) and float((dirs @ c).max()) > tol:
            return True
    return False


def enumerate_vertices(lp: LinearProgram) -> LpOutcome:
    """Brute-force optimum over all basic feasible points (test oracle, n_vars <= 10)."""
    vertices = feasible_vertices(lp)
    if not vertices:
        return LpOutcome(LpStatus.INFEASIBLE)
    c = np.asarray(lp.objective, dtype=float)
    c_eff = -c if lp.sense is Sense.MINIMIZE else c
    A, _, rels = _arrays(lp)
    if _has_improving_ray(A, rels, c_eff):
        return LpOutcome(LpStatus.UNBOUNDED)
    pts = np.array(vertices)
    best = int(np.argmax(pts @ c_eff))
    return LpOutcome(LpStatus.OPTIMAL, vertices[best], float(np.dot(c, pts[best])))
