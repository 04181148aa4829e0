from __future__ import annotations

# Hiérarchie d'erreurs du solveur. Chaque classe dérive aussi du builtin correspondant
# (ValueError pour une entrée invalide, RuntimeError pour un résultat de résolution).


class FuzzyLpError(Exception):
    """Base class for every error raised by the solver stack."""


# -------------------------
# Entrées invalides
# -------------------------
class MalformedProblem(FuzzyLpError, ValueError):
    """Dimension mismatch or non-finite number in a LinearProgram."""


class TooLarge(FuzzyLpError, ValueError):
    """Vertex enumeration refused: too many variables."""


class InvalidSpec(FuzzyLpError, ValueError):
    """Membership function parameters break their invariants."""


class AllZeroWeights(FuzzyLpError, ValueError):
    pass


class NoFuzzyContent(FuzzyLpError, ValueError):
    """Nothing soft in the problem: the crisp solvers should be used instead."""


class GridError(FuzzyLpError, ValueError):
    pass


class EmptyGrid(GridError):
    pass


# -------------------------
# Résultats de résolution
# -------------------------
class NumericalFailure(FuzzyLpError, RuntimeError):
    """The simplex lost track (iteration cap, feasibility lost after pivoting)."""


class InfeasibleProblem(FuzzyLpError, RuntimeError):
    pass


class UnboundedObjective(FuzzyLpError, RuntimeError):
    pass


class InfeasibleAtAlphaLower(FuzzyLpError, RuntimeError):
    """No point reaches the required minimal degree of acceptability."""

    def __init__(self, alpha_lower: float, msg: str | None = None):
        self.alpha_lower = float(alpha_lower)
        super().__init__(msg or f"no solution reaches alpha >= {self.alpha_lower:g}")


class DegenerateRamp(FuzzyLpError, RuntimeError):
    pass


class ZeroBestValue(FuzzyLpError, ValueError):
    pass


# -------------------------
# Fichiers problème
# -------------------------
class ProblemFileError(FuzzyLpError, ValueError):
    """Base for problem-file errors; `where` is a line/column or a JSON path."""

    def __init__(self, where: str, cause: str):
        self.where = where
        self.cause = cause
        super().__init__(f"{where}: {cause}" if where else cause)


class ProblemSyntaxError(ProblemFileError):
    pass


class SchemaError(ProblemFileError):
    pass


class ProblemValidationError(ProblemFileError):
    def __init__(self, issues: list):
        self.issues = list(issues)
        lines = [f"{i.path}: {i.message}" for i in self.issues]
        super().__init__("", "invalid problem\n  " + "\n  ".join(lines))
