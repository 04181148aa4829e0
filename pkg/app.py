from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from typing import Optional, Sequence, TextIO

import numpy as np

from case_study import (
    CaseStudyVariant,
    ConstraintSet,
    case_study_config,
    concrete_plant_problem,
    export_comparison,
    reproduce_tables,
)
from core.crisp_modm import solve_augmented, solve_maxmin, two_phase_refine
from core.errors import (
    DegenerateRamp,
    FuzzyLpError,
    InfeasibleAtAlphaLower,
    InfeasibleProblem,
    MalformedProblem,
    ProblemFileError,
    ProblemValidationError,
    UnboundedObjective,
)
from core.fuzzy_modm import solve_fuzzy_augmented, solve_goal_augmented
from core.models import SolveMode, SolverConfig
from core.problem import validate
from core.problem_file import load_config, load_problem, write_problem
from reporting import (
    build_report_document,
    build_result_document,
    build_sweep_document,
    render_ranges,
    render_report,
    render_solution,
    render_sweep,
    use_color,
    write_json,
)
from workers.sweep_worker import SweepWorker

# Point d'entrée ligne de commande : validate / solve / sweep / case-study.
# Résultats sur stdout (tableaux), journal horodaté sur stderr, code de sortie 0/1/2/3.

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

_SOLVER_ERRORS = (InfeasibleProblem, UnboundedObjective, InfeasibleAtAlphaLower, DegenerateRamp)

_SOLVERS = {
    SolveMode.MAXMIN: solve_maxmin,
    SolveMode.AUGMENTED: solve_augmented,
    SolveMode.TWO_PHASE: two_phase_refine,
    SolveMode.FUZZY: solve_fuzzy_augmented,
    SolveMode.GOAL: solve_goal_augmented,
}


class Console:
    """Journal `[HH:MM:SS] LEVEL msg` sur stderr, filtré par niveau minimal."""

    LEVELS = {"ALL": 0, "DEBUG": 10, "INFO": 20, "WARN": 30, "WARNING": 30, "ERROR": 40}

    def __init__(self, level: str = "INFO", stream: Optional[TextIO] = None):
        self.stream = stream or sys.stderr
        self.level_min = self.LEVELS.get((level or "INFO").strip().upper(), 20)

    def logln(self, msg: str, level: str = "INFO"):
        if msg is None:
            return
        level = (level or "INFO").strip().upper()
        level_num = self.LEVELS.get(level, 20)
        if level_num < self.level_min:
            return
        ts = time.strftime("%H:%M:%S")
        for raw_line in str(msg).splitlines() or [""]:
            print(f"[{ts}] {level:<5} {raw_line.rstrip()}", file=self.stream, flush=True)

    def logexc(self, context: str, exc: BaseException):
        ctx = (context or "").strip()
        prefix = f"{ctx}: " if ctx else ""
        self.logln(f"{prefix}{type(exc).__name__}: {exc}", level="ERROR")

    def library_log(self, msg: str):
        """LogFn passed to the solvers; '[TAG] WARN ...' lines are raised to WARN."""
        head, _, rest = msg.partition("] ")
        if rest.startswith("WARN "):
            self.logln(f"{head}] {rest[5:]}", level="WARN")
        else:
            self.logln(msg, level="DEBUG" if msg.startswith("[MODM]") else "INFO")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write a machine-readable result document")
    common.add_argument("--config", metavar="PATH", help="JSON defaults for the solver configuration")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARN", "ERROR"])
    common.add_argument("--workers", type=int, default=1, help="parallel LP solves (individual optima, sweep levels)")
    common.add_argument("--delta", type=float)
    common.add_argument("--alpha-lower", type=float)
    common.add_argument("--alpha-upper", type=float)

    parser = argparse.ArgumentParser(prog="fuzzy-modm", description="Fuzzy multi-objective linear programming")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a problem file")
    p.add_argument("file")

    p = sub.add_parser("solve", parents=[common], help="solve a problem file")
    p.add_argument("file")
    p.add_argument("--mode", choices=[m.value for m in SolveMode])

    p = sub.add_parser("sweep", parents=[common], help="alpha sweep over [from, to] in N steps")
    p.add_argument("file")
    p.add_argument("--alpha-from", type=float, default=0.0)
    p.add_argument("--alpha-to", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=10)

    p = sub.add_parser("case-study", parents=[common], help="reproduce the concrete-plant case study")
    p.add_argument("--variant", choices=[c.value for c in ConstraintSet], default=ConstraintSet.FULL_LIST.value)
    p.add_argument("--csv", metavar="PATH", help="crisp vs fuzzy comparison data")
    p.add_argument("--export-problem", metavar="PATH", help="write the embedded dataset as a problem file")
    return parser


def _with_flags(cfg: SolverConfig, args: argparse.Namespace) -> SolverConfig:
    changes = {}
    if args.delta is not None:
        changes["delta"] = args.delta
    if args.alpha_lower is not None:
        changes["alpha_lower"] = args.alpha_lower
    if args.alpha_upper is not None:
        changes["alpha_upper"] = args.alpha_upper
    return replace(cfg, **changes) if changes else cfg


def _base_config(args: argparse.Namespace, cfg: SolverConfig | None = None) -> SolverConfig:
    cfg = cfg or SolverConfig()
    if args.config:
        cfg = load_config(args.config, cfg)
    return cfg


def _load(args: argparse.Namespace):
    problem, cfg = load_problem(args.file, _base_config(args))
    cfg = _with_flags(cfg, args)
    report = validate(problem, cfg)
    if not report.ok:
        raise ProblemValidationError(report.issues)
    return problem, cfg


def _cmd_validate(args, console: Console, out: TextIO) -> int:
    problem, _ = _load(args)
    fuzzy = "yes" if problem.has_fuzzy_content else "no"
    print(f"ok: {problem.n_vars} variables, {len(problem.objectives)} objectives, "
          f"{len(problem.constraints)} constraints (fuzzy content: {fuzzy})", file=out)
    return EXIT_OK


def _cmd_solve(args, console: Console, out: TextIO) -> int:
    problem, cfg = _load(args)
    if args.mode:
        mode = SolveMode(args.mode)
    else:
        mode = SolveMode.FUZZY if problem.has_fuzzy_content else SolveMode.AUGMENTED
    console.logln(f"[SOLVE] {args.file}: mode {mode.value}")

    t0 = time.perf_counter()
    sol = _SOLVERS[mode](problem, cfg, log=console.library_log, max_workers=args.workers)
    wall = time.perf_counter() - t0

    print(render_solution(problem, sol), file=out)
    if args.json:
        write_json(build_result_document(problem, cfg, sol, wall), args.json)
    return EXIT_OK


def _cmd_sweep(args, console: Console, out: TextIO) -> int:
    if args.steps < 1:
        raise ValueError("--steps must be >= 1")
    if not args.alpha_to > args.alpha_from:
        raise ValueError("--alpha-to must exceed --alpha-from")
    problem, cfg = _load(args)
    grid = [float(a) for a in np.linspace(args.alpha_from, args.alpha_to, args.steps + 1)]

    worker = SweepWorker(problem, cfg, grid, max_workers=args.workers, log=console.library_log)
    worker.progress_count.connect(lambda done, total: console.logln(f"[SWEEP] {done}/{total}", level="DEBUG"))
    t0 = time.perf_counter()
    worker.run()
    wall = time.perf_counter() - t0
    if worker.error is not None:
        raise worker.error

    print(render_sweep(problem, worker.table, use_color(out)), file=out)
    if args.json:
        write_json(build_sweep_document(problem, cfg, worker.table, wall), args.json)
    return EXIT_OK


def _cmd_case_study(args, console: Console, out: TextIO) -> int:
    variant = CaseStudyVariant(constraint_set=ConstraintSet(args.variant))
    problem = concrete_plant_problem(variant)
    cfg = _with_flags(_base_config(args, case_study_config(variant)), args)
    report_cfg = validate(problem, cfg)
    if not report_cfg.ok:
        raise ProblemValidationError(report_cfg.issues)

    if args.export_problem:
        write_problem(problem, args.export_problem, cfg)
        console.logln(f"[CASE] problem written to {args.export_problem}")

    t0 = time.perf_counter()
    report = reproduce_tables(cfg, variant, log=console.library_log)
    wall = time.perf_counter() - t0

    color = use_color(out)
    sections = []
    if report.ranges is not None:
        sections.append("Individual optima\n" + render_ranges(problem, report.ranges))
    if report.crisp is not None:
        sections.append("Crisp compromise\n" + render_solution(problem, report.crisp))
    if report.fuzzy is not None:
        sections.append("Fuzzy compromise\n" + render_solution(problem, report.fuzzy))
    sections.append("Reproduction checks\n" + render_report(report, color))
    print("\n\n".join(sections), file=out)

    if args.csv:
        export_comparison(report, args.csv)
        console.logln(f"[CASE] comparison written to {args.csv}")
    if args.json:
        write_json(build_report_document(problem, cfg, report, wall), args.json)
    return EXIT_OK if report.ok else EXIT_SOLVER


_COMMANDS = {
    "validate": _cmd_validate,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "case-study": _cmd_case_study,
}


def run_cli(argv: Sequence[str], out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    out = out or sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INPUT

    console = Console(args.log_level, err)
    try:
        return _COMMANDS[args.command](args, console, out)
    except _SOLVER_ERRORS as e:
        console.logexc(args.command, e)
        return EXIT_SOLVER
    except (OSError, ProblemFileError, MalformedProblem) as e:
        console.logexc(args.command, e)
        return EXIT_INPUT
    except FuzzyLpError as e:
        console.logexc(args.command, e)
        return EXIT_INPUT if isinstance(e, ValueError) else EXIT_INTERNAL
    except ValueError as e:
        console.logexc(args.command, e)
        return EXIT_INPUT
    except Exception as e:
        console.logexc(args.command, e)
        return EXIT_INTERNAL


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
