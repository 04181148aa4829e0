from __future__ import annotations

from typing import Optional, Sequence

from PySide6 import QtCore

from core.fuzzy_modm import alpha_sweep
from core.models import DecisionProblem, LogFn, SolverConfig, SweepTable

# Worker Qt : balayage en alpha exécuté hors du thread appelant, niveaux résolus via un pool borné.


class SweepWorker(QtCore.QObject):
    """Runs alpha_sweep (optionally in a QThread), reporting progress per grid level."""

    progress = QtCore.Signal(int, bool)  # grid index, feasible
    progress_count = QtCore.Signal(int, int)  # done, total
    failed = QtCore.Signal(str)
    finished = QtCore.Signal()

    def __init__(
        self,
        problem: DecisionProblem,
        cfg: SolverConfig,
        grid: Sequence[float],
        max_workers: int = 1,
        log: Optional[LogFn] = None,
    ):
        super().__init__()
        self.problem = problem
        self.cfg = cfg
        self.grid = [float(a) for a in grid]
        self.max_workers = max(1, int(max_workers))
        self.log = log
        self.table: Optional[SweepTable] = None
        self.error: Optional[Exception] = None

    @QtCore.Slot()
    def run(self):
        """Boucle principale ; peut tourner dans un QThread parent ou être appelée directement."""
        try:
            self.table = alpha_sweep(
                self.problem,
                self.cfg,
                self.grid,
                max_workers=self.max_workers,
                progress=self.progress_count.emit,
                on_row=lambda idx, row: self.progress.emit(idx, row.feasible),
                log=self.log,
            )
        except Exception as e:
            self.error = e
            try:
                self.failed.emit(f"{type(e).__name__}: {e}")
            except Exception:
                pass
        finally:
            self.finished.emit()
