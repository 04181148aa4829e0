from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional

from .errors import ProblemSyntaxError, ProblemValidationError, SchemaError
from .models import (
    DecisionProblem,
    FuzzyConstraint,
    Objective,
    Relation,
    Sense,
    SolverConfig,
    WeightPolicy,
    WorstValuePolicy,
)
from .problem import validate

# Lecture/écriture des fichiers problème (JSON, schéma strict : toute clé inconnue est rejetée).

TOP_KEYS = {"variables", "objectives", "constraints", "config"}
OBJECTIVE_KEYS = {"name", "sense", "coefficients", "goal", "tolerance", "weight"}
CONSTRAINT_KEYS = {"name", "coefficients", "relation", "rhs", "tolerance", "weight"}
CONFIG_KEYS = {
    "delta", "alpha_lower", "alpha_upper", "worst_value_policy", "worst_values",
    "weight_policy", "eps_feas", "eps_opt", "best_region_theta", "worst_region_theta",
}


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _number(v: Any, path: str) -> float:
    if not _is_number(v):
        raise SchemaError(path, f"expected a number, got {type(v).__name__}")
    return float(v)


def _opt_number(obj: dict, key: str, path: str) -> Optional[float]:
    v = obj.get(key)
    return None if v is None else _number(v, f"{path}.{key}")


def _string(v: Any, path: str) -> str:
    if not isinstance(v, str):
        raise SchemaError(path, f"expected a string, got {type(v).__name__}")
    return v


def _numbers(v: Any, path: str) -> tuple[float, ...]:
    if not isinstance(v, list):
        raise SchemaError(path, "expected a list of numbers")
    return tuple(_number(x, f"{path}[{i}]") for i, x in enumerate(v))


def _object(v: Any, path: str, allowed: set[str], required: tuple[str, ...] = ()) -> dict:
    if not isinstance(v, dict):
        raise SchemaError(path, "expected an object")
    for key in v:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}" if path else key, "unknown key")
    for key in required:
        if key not in v:
            raise SchemaError(f"{path}.{key}" if path else key, "missing required key")
    return v


def _enum(enum_cls, v: Any, path: str):
    s = _string(v, path)
    try:
        return enum_cls(s)
    except ValueError:
        allowed = ", ".join(repr(e.value) for e in enum_cls)
        raise SchemaError(path, f"unknown value {s!r} (expected one of {allowed})") from None


def _relation(v: Any, path: str) -> Relation:
    if v == "=~":
        raise SchemaError(path, "soft equality '=~' is not supported")
    return _enum(Relation, v, path)


def _objective(v: Any, path: str) -> Objective:
    obj = _object(v, path, OBJECTIVE_KEYS, ("name", "sense", "coefficients"))
    return Objective(
        name=_string(obj["name"], f"{path}.name"),
        coefficients=_numbers(obj["coefficients"], f"{path}.coefficients"),
        sense=_enum(Sense, obj["sense"], f"{path}.sense"),
        goal=_opt_number(obj, "goal", path),
        tolerance=_opt_number(obj, "tolerance", path),
        weight=_opt_number(obj, "weight", path),
    )


def _constraint(v: Any, path: str) -> FuzzyConstraint:
    con = _object(v, path, CONSTRAINT_KEYS, ("name", "coefficients", "relation", "rhs"))
    tolerance = _opt_number(con, "tolerance", path)
    return FuzzyConstraint(
        name=_string(con["name"], f"{path}.name"),
        coefficients=_numbers(con["coefficients"], f"{path}.coefficients"),
        relation=_relation(con["relation"], f"{path}.relation"),
        rhs=_number(con["rhs"], f"{path}.rhs"),
        tolerance=0.0 if tolerance is None else tolerance,
        weight=_opt_number(con, "weight", path),
    )


def parse_config(mapping: Any, base: SolverConfig | None = None, path: str = "config") -> SolverConfig:
    """Overlay a config object on `base`; only the keys present are changed."""
    cfg = base or SolverConfig()
    raw = _object(mapping, path, CONFIG_KEYS)
    changes: dict[str, Any] = {}
    for key, v in raw.items():
        where = f"{path}.{key}" if path else key
        if key == "worst_value_policy":
            changes[key] = _enum(WorstValuePolicy, v, where)
        elif key == "weight_policy":
            changes[key] = _enum(WeightPolicy, v, where)
        elif key == "worst_values":
            changes[key] = None if v is None else _numbers(v, where)
        else:
            changes[key] = _number(v, where)
    return replace(cfg, **changes)


def _parse_document(text: str, origin: str = "") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        where = f"{origin}:" if origin else ""
        raise ProblemSyntaxError(f"{where}line {e.lineno}, column {e.colno}", e.msg) from None


def parse_problem(text: str, base_config: SolverConfig | None = None) -> tuple[DecisionProblem, SolverConfig]:
    """
    Parse a JSON problem file into a validated DecisionProblem plus its SolverConfig
    (base_config overlaid with the file's "config" object).
    """
    doc = _object(_parse_document(text), "", TOP_KEYS, ("variables", "objectives", "constraints"))

    if not isinstance(doc["variables"], list):
        raise SchemaError("variables", "expected a list of names")
    names = tuple(_string(v, f"variables[{i}]") for i, v in enumerate(doc["variables"]))
    if not isinstance(doc["objectives"], list):
        raise SchemaError("objectives", "expected a list")
    if not isinstance(doc["constraints"], list):
        raise SchemaError("constraints", "expected a list")

    problem = DecisionProblem(
        variable_names=names,
        objectives=tuple(_objective(o, f"objectives[{i}]") for i, o in enumerate(doc["objectives"])),
        constraints=tuple(_constraint(c, f"constraints[{j}]") for j, c in enumerate(doc["constraints"])),
    )
    cfg = base_config or SolverConfig()
    if doc.get("config") is not None:
        cfg = parse_config(doc["config"], cfg)

    report = validate(problem, cfg)
    if not report.ok:
        raise ProblemValidationError(report.issues)
    return problem, cfg


def load_problem(path: str | Path, base_config: SolverConfig | None = None) -> tuple[DecisionProblem, SolverConfig]:
    text = Path(path).read_text(encoding="utf-8")
    return parse_problem(text, base_config)


def load_config(path: str | Path, base: SolverConfig | None = None) -> SolverConfig:
    """Defaults file for --config: same strict keys as a problem's "config" object."""
    p = Path(path)
    return parse_config(_parse_document(p.read_text(encoding="utf-8"), str(p)), base, path="")


def config_document(cfg: SolverConfig) -> dict:
    out = {
        "delta": cfg.delta,
        "alpha_lower": cfg.alpha_lower,
        "alpha_upper": cfg.alpha_upper,
        "worst_value_policy": cfg.worst_value_policy.value,
        "weight_policy": cfg.weight_policy.value,
        "eps_feas": cfg.eps_feas,
        "eps_opt": cfg.eps_opt,
        "best_region_theta": cfg.best_region_theta,
        "worst_region_theta": cfg.worst_region_theta,
    }
    if cfg.worst_values is not None:
        out["worst_values"] = list(cfg.worst_values)
    return out


def problem_document(problem: DecisionProblem, cfg: SolverConfig | None = None) -> dict:
    objectives = []
    for o in problem.objectives:
        item: dict[str, Any] = {"name": o.name, "sense": o.sense.value, "coefficients": list(o.coefficients)}
        for key in ("goal", "tolerance", "weight"):
            if getattr(o, key) is not None:
                item[key] = getattr(o, key)
        objectives.append(item)

    constraints = []
    for c in problem.constraints:
        item = {
            "name": c.name,
            "coefficients": list(c.coefficients),
            "relation": c.relation.value,
            "rhs": c.rhs,
            "tolerance": c.tolerance,
        }
        if c.weight is not None:
            item["weight"] = c.weight
        constraints.append(item)

    doc: dict[str, Any] = {
        "variables": list(problem.variable_names),
        "objectives": objectives,
        "constraints": constraints,
    }
    if cfg is not None:
        doc["config"] = config_document(cfg)
    return doc


def serialize_problem(problem: DecisionProblem, cfg: SolverConfig | None = None) -> str:
    """Canonical text form; parse_problem(serialize_problem(p)) gives p back."""
    return json.dumps(problem_document(problem, cfg), indent=2, ensure_ascii=False) + "\n"


def write_problem(problem: DecisionProblem, path: str | Path, cfg: SolverConfig | None = None) -> None:
    Path(path).write_text(serialize_problem(problem, cfg), encoding="utf-8")
