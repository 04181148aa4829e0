from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Sequence, TextIO, Union

from case_study import ReproductionReport
from core.models import (
    CompromiseSolution,
    DecisionProblem,
    FuzzySolution,
    ObjectiveRange,
    SolverConfig,
    SweepTable,
)
from core.problem_file import config_document, serialize_problem

# Rendu des résultats : tableaux à largeur fixe (4 décimales) sur stdout, document JSON
# pleine précision pour --json. Couleurs ANSI sauf NO_COLOR ou sortie non-terminal.

Solution = Union[CompromiseSolution, FuzzySolution]

_COLORS = {"PASS": "\033[32m", "FAIL": "\033[31m", "EXPECTED": "\033[33m", "INFEASIBLE": "\033[33m"}
_RESET = "\033[0m"


def use_color(stream: TextIO) -> bool:
    if os.environ.get("NO_COLOR"):
        return False
    isatty = getattr(stream, "isatty", None)
    return bool(isatty and isatty())


def _paint(text: str, key: str, color: bool) -> str:
    code = _COLORS.get(key)
    return f"{code}{text}{_RESET}" if color and code else text


def _num(v: Optional[float]) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "-"
    return f"{v:.4f}"


def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]], statuses: Sequence[str] = (), color: bool = False) -> str:
    """Left-aligned first column, right-aligned numbers; status column (if any) painted last."""
    widths = [len(h) for h in headers]
    for r in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, r)]
    lines = ["  ".join(h.ljust(w) if i == 0 else h.rjust(w) for i, (h, w) in enumerate(zip(headers, widths)))]
    lines.append("  ".join("-" * w for w in widths))
    for k, r in enumerate(rows):
        cells = [c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths))]
        if k < len(statuses) and statuses[k]:
            cells[-1] = _paint(cells[-1], statuses[k], color)
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def render_ranges(problem: DecisionProblem, ranges: Sequence[ObjectiveRange]) -> str:
    headers = ["objective", "z+", "z-"] + list(problem.variable_names)
    rows = [[o.name, _num(r.z_plus), _num(r.z_minus)] + [_num(v) for v in r.argmax_x]
            for o, r in zip(problem.objectives, ranges)]
    return format_table(headers, rows)


def render_solution(problem: DecisionProblem, sol: Solution) -> str:
    parts = [f"mode: {sol.mode.value}    alpha = {_num(sol.alpha)}"]
    parts.append(format_table(["variable", "x"], [[n, _num(v)] for n, v in zip(problem.variable_names, sol.x)]))
    mu = sol.mu if isinstance(sol, CompromiseSolution) else sol.mu_obj
    parts.append(format_table(
        ["objective", "z", "mu", "phi"],
        [[o.name, _num(z), _num(m), _num(p)] for o, z, m, p in zip(problem.objectives, sol.z, mu, sol.phi)],
    ))
    if isinstance(sol, FuzzySolution):
        rows = [[c.name, _num(m), _num(u)] for c, m, u in zip(problem.constraints, sol.mu_con, sol.slack_report)]
        parts.append(format_table(["constraint", "mu", "tolerance used"], rows))
    return "\n\n".join(parts)


def render_sweep(problem: DecisionProblem, table: SweepTable, color: bool = False) -> str:
    names = [o.name for o in problem.objectives]
    headers = ["alpha"] + [f"z[{n}]" for n in names] + [f"best[{n}]" for n in names] + ["sum mu", "status"]
    rows, statuses = [], []
    for r in table.rows:
        if r.feasible:
            rows.append([_num(r.alpha)] + [_num(v) for v in r.z] + [_num(v) for v in r.z_best]
                        + [_num(r.membership_sum), "ok"])
            statuses.append("")
        else:
            rows.append([_num(r.alpha)] + ["-"] * (2 * len(names) + 1) + ["infeasible"])
            statuses.append("INFEASIBLE")
    return format_table(headers, rows, statuses, color)


def render_report(report: ReproductionReport, color: bool = False) -> str:
    rows = [[r.quantity, _num(r.reference), _num(r.computed), _num(r.relative_error), f"{r.tolerance:g}", r.status]
            for r in report.rows]
    table = format_table(["quantity", "published", "computed", "rel.err", "tol", "status"], rows,
                         [r.status for r in report.rows], color)
    notes = [f"  {r.quantity}: {r.note}" for r in report.rows if r.note]
    return table + ("\n\nnotes:\n" + "\n".join(notes) if notes else "")


# -------------------------
# Document JSON
# -------------------------
def problem_hash(problem: DecisionProblem) -> str:
    return hashlib.sha256(serialize_problem(problem).encode("utf-8")).hexdigest()


def _clean(value: Any) -> Any:
    """Tuples -> lists, enums -> values, NaN/inf -> null (strict JSON)."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    return value


def build_result_document(
    problem: DecisionProblem,
    cfg: SolverConfig,
    solution: Solution,
    wall_time_s: float,
) -> dict:
    sol = asdict(solution)
    iterations = sol.pop("iterations")
    mode = sol.pop("mode")
    return _clean({
        "mode": mode,
        "problem_hash": problem_hash(problem),
        "config": config_document(cfg),
        "variables": list(problem.variable_names),
        "objectives": [o.name for o in problem.objectives],
        "solution": sol,
        "solver": {"iterations": iterations, "wall_time_s": wall_time_s},
    })


def build_sweep_document(problem: DecisionProblem, cfg: SolverConfig, table: SweepTable, wall_time_s: float) -> dict:
    return _clean({
        "mode": "sweep",
        "problem_hash": problem_hash(problem),
        "config": config_document(cfg),
        "variables": list(problem.variable_names),
        "objectives": [o.name for o in problem.objectives],
        "rows": [asdict(r) for r in table.rows],
        "solver": {"wall_time_s": wall_time_s},
    })


def build_report_document(problem: DecisionProblem, cfg: SolverConfig, report: ReproductionReport, wall_time_s: float) -> dict:
    checks = []
    for r in report.rows:
        item = asdict(r)
        item["relative_error"] = r.relative_error
        item["status"] = r.status
        checks.append(item)
    return _clean({
        "mode": "case-study",
        "problem_hash": problem_hash(problem),
        "config": config_document(cfg),
        "ranges": [asdict(r) for r in report.ranges] if report.ranges is not None else None,
        "crisp": asdict(report.crisp) if report.crisp is not None else None,
        "fuzzy": asdict(report.fuzzy) if report.fuzzy is not None else None,
        "checks": checks,
        "solver": {"wall_time_s": wall_time_s},
    })


def dump_json(doc: dict) -> str:
    """Shortest round-trip float repr (json default), stable key order."""
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(doc: dict, path: str | Path) -> None:
    Path(path).write_text(dump_json(doc), encoding="utf-8")
