"""
Prüfung eines Punkts gegen die Nebenbedingungen eines LPs
"""
from dataclasses import dataclass

import numpy as np

from utils.errors import DimensionError
from .problem import LinearProgram


@dataclass(eq=False)
class ConstraintReport:
    """Verletzung je Zeile und je Variablenschranke"""
    row_violation: np.ndarray
    bound_violation: np.ndarray
    tol: float

    @property
    def max_row_violation(self) -> float:
        return float(self.row_violation.max()) if self.row_violation.size else 0.0

    @property
    def max_bound_violation(self) -> float:
        return float(self.bound_violation.max()) if self.bound_violation.size else 0.0

    @property
    def max_violation(self) -> float:
        return max(self.max_row_violation, self.max_bound_violation)

    @property
    def feasible(self) -> bool:
        return self.max_violation <= self.tol

    def worst_row(self) -> int:
        """Index der am stärksten verletzten Zeile (-1 ohne Zeilen)"""
        return int(np.argmax(self.row_violation)) if self.row_violation.size else -1


def row_activity(lp: LinearProgram, x: np.ndarray) -> np.ndarray:
    return lp.A @ x


def check_solution(lp: LinearProgram, x, tol: float = 1e-8) -> ConstraintReport:
    """
    Berechnet die Verletzung jeder Nebenbedingung und jeder Schranke.

    Args:
        lp: Lineares Programm
        x: Punkt der Länge n_vars
        tol: Toleranz für das feasible-Flag

    Returns:
        ConstraintReport mit nichtnegativen Verletzungen
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != lp.n_vars:
        raise DimensionError(f"x hat Länge {x.shape[0]}, LP hat {lp.n_vars} Variablen")

    activity = row_activity(lp, x)
    relations = np.array(lp.relations, dtype=object)
    gap = activity - lp.rhs
    row_violation = np.zeros(lp.n_rows)
    le = relations == "<="
    ge = relations == ">="
    eq = relations == "="
    row_violation[le] = np.maximum(gap[le], 0.0)
    row_violation[ge] = np.maximum(-gap[ge], 0.0)
    row_violation[eq] = np.abs(gap[eq])

    with np.errstate(invalid="ignore"):
        below = np.where(np.isfinite(lp.lower), lp.lower - x, 0.0)
        above = np.where(np.isfinite(lp.upper), x - lp.upper, 0.0)
    bound_violation = np.maximum(np.maximum(below, above), 0.0)
    return ConstraintReport(row_violation, bound_violation, tol)
