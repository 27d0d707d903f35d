"""
Datentypen für lineare Programme

Nebenbedingungen werden als dünne Triplet-Liste (Zeile, Spalte, Koeffizient)
gespeichert und bei der Konstruktion kanonisiert: doppelte Einträge werden
addiert, Nullen entfernt, Reihenfolge zeilenweise sortiert.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from utils.errors import DimensionError, ValidationError

SENSES = ("minimize", "maximize")
RELATIONS = ("<=", "=", ">=")
STATUSES = ("optimal", "infeasible", "unbounded", "iteration_limit")


def _float_array(values, length: int, name: str, default: float) -> np.ndarray:
    if values is None:
        return np.full(length, default, dtype=float)
    array = np.array(values, dtype=float).reshape(-1)
    if array.shape[0] != length:
        raise DimensionError(f"{name} braucht Länge {length}, hat {array.shape[0]}")
    return array


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """
    Lineares Programm  min/max c^T x  u.d.N.  A x (<=,=,>=) b,  lower <= x <= upper
    """
    n_vars: int
    objective: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    coeffs: np.ndarray
    relations: Tuple[str, ...]
    rhs: np.ndarray
    sense: str = "minimize"
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    var_names: Optional[Tuple[str, ...]] = None
    row_names: Optional[Tuple[str, ...]] = None
    # Kanonische CSR-Matrix, in __post_init__ aufgebaut
    A: sp.csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        n_vars = int(self.n_vars)
        if n_vars < 0:
            raise ValidationError("n_vars muss nichtnegativ sein")
        if self.sense not in SENSES:
            raise ValidationError(f"Unbekannte Zielrichtung '{self.sense}', erlaubt: {SENSES}")

        relations = tuple(self.relations)
        for relation in relations:
            if relation not in RELATIONS:
                raise ValidationError(f"Unbekannte Relation '{relation}', erlaubt: {RELATIONS}")
        n_rows = len(relations)

        objective = _float_array(self.objective, n_vars, "objective", 0.0)
        rhs = _float_array(self.rhs, n_rows, "rhs", 0.0)
        lower = _float_array(self.lower, n_vars, "lower", 0.0)
        upper = _float_array(self.upper, n_vars, "upper", np.inf)

        rows = np.asarray(self.rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(self.cols, dtype=np.int64).reshape(-1)
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if not (rows.shape == cols.shape == coeffs.shape):
            raise DimensionError("rows, cols und coeffs müssen gleich lang sein")
        if rows.size and (rows.min() < 0 or rows.max() >= n_rows):
            raise DimensionError(f"Zeilenindex außerhalb von [0, {n_rows})")
        if cols.size and (cols.min() < 0 or cols.max() >= n_vars):
            raise DimensionError(f"Spaltenindex außerhalb von [0, {n_vars})")

        for name, values in (("objective", objective), ("rhs", rhs), ("coeffs", coeffs)):
            if not np.all(np.isfinite(values)):
                raise ValidationError(f"{name} enthält NaN oder Inf")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValidationError("Schranken enthalten NaN")
        if np.any(lower == np.inf) or np.any(upper == -np.inf):
            raise ValidationError("Untere Schranke +inf oder obere Schranke -inf")
        if np.any(lower > upper):
            raise ValidationError("Untere Schranke größer als obere Schranke")

        if self.var_names is not None and len(self.var_names) != n_vars:
            raise DimensionError("var_names passt nicht zu n_vars")
        if self.row_names is not None and len(self.row_names) != n_rows:
            raise DimensionError("row_names passt nicht zur Zeilenzahl")

        # Kanonisieren: Duplikate addieren, Nullen entfernen, sortieren
        A = sp.coo_matrix((coeffs, (rows, cols)), shape=(n_rows, n_vars)).tocsr()
        A.sum_duplicates()
        A.eliminate_zeros()
        A.sort_indices()
        canonical = A.tocoo()

        for name, value in (
            ("n_vars", n_vars),
            ("objective", objective),
            ("rows", canonical.row.astype(np.int64)),
            ("cols", canonical.col.astype(np.int64)),
            ("coeffs", canonical.data.astype(float)),
            ("relations", relations),
            ("rhs", rhs),
            ("lower", lower),
            ("upper", upper),
            ("var_names", None if self.var_names is None else tuple(self.var_names)),
            ("row_names", None if self.row_names is None else tuple(self.row_names)),
            ("A", A),
        ):
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_rows(self) -> int:
        return len(self.relations)

    @property
    def maximize(self) -> bool:
        return self.sense == "maximize"

    def triplets(self) -> List[Tuple[int, int, float]]:
        """Kanonische Triplet-Liste (zeilenweise sortiert)"""
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.coeffs.tolist()))

    def objective_value(self, x) -> float:
        return float(self.objective @ np.asarray(x, dtype=float))


@dataclass(eq=False)
class LpSolution:
    """Ergebnis eines LP-Lösers"""
    status: str
    x: np.ndarray
    objective_value: float
    max_primal_infeasibility: float
    iterations: int = 0
    method: str = "simplex"

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValidationError(f"Unbekannter Status '{self.status}'")

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


class LpBuilder:
    """
    Baut ein LinearProgram blockweise auf.

    Zeilen werden in Blöcken hinzugefügt: lokale Zeilenindizes 0..k-1 des
    Blocks werden auf fortlaufende globale Indizes abgebildet.
    """

    def __init__(self, n_vars: int, sense: str = "minimize"):
        self.n_vars = int(n_vars)
        self.sense = sense
        self.objective = np.zeros(self.n_vars)
        self.lower = np.zeros(self.n_vars)
        self.upper = np.full(self.n_vars, np.inf)
        self.var_names: Optional[List[str]] = None
        self._rows: List[np.ndarray] = []
        self._cols: List[np.ndarray] = []
        self._coeffs: List[np.ndarray] = []
        self._relations: List[str] = []
        self._rhs: List[float] = []
        self._row_names: List[Optional[str]] = []

    @property
    def n_rows(self) -> int:
        return len(self._relations)

    def set_objective(self, cols, coeffs) -> None:
        """Setzt Zielfunktionskoeffizienten (nicht genannte bleiben 0)"""
        self.objective[np.asarray(cols, dtype=np.int64)] = coeffs

    def set_bounds(self, cols, lower=None, upper=None) -> None:
        cols = np.asarray(cols, dtype=np.int64)
        if lower is not None:
            self.lower[cols] = lower
        if upper is not None:
            self.upper[cols] = upper

    def add_rows(
        self,
        local_rows,
        cols,
        coeffs,
        relation: str,
        rhs,
        names: Optional[Sequence[str]] = None
    ) -> np.ndarray:
        """
        Fügt einen Block gleichartiger Zeilen hinzu.

        Args:
            local_rows: Zeilenindex innerhalb des Blocks je Triplet
            cols: Spaltenindex je Triplet
            coeffs: Koeffizient je Triplet (Skalar wird gebroadcastet)
            relation: "<=", "=" oder ">="
            rhs: Rechte Seiten, Länge = Blockgröße
            names: Optionale Zeilennamen

        Returns:
            Globale Indizes der neuen Zeilen
        """
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        local_rows = np.asarray(local_rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(cols, dtype=np.int64).reshape(-1)
        coeffs = np.broadcast_to(np.asarray(coeffs, dtype=float), cols.shape)
        if local_rows.shape != cols.shape:
            raise DimensionError("local_rows und cols müssen gleich lang sein")
        if local_rows.size and (local_rows.min() < 0 or local_rows.max() >= rhs.size):
            raise DimensionError("Lokaler Zeilenindex außerhalb des Blocks")
        if names is not None and len(names) != rhs.size:
            raise DimensionError("names passt nicht zur Blockgröße")

        offset = self.n_rows
        self._rows.append(local_rows + offset)
        self._cols.append(cols)
        self._coeffs.append(np.array(coeffs))
        self._relations.extend([relation] * rhs.size)
        self._rhs.extend(rhs.tolist())
        self._row_names.extend(names if names is not None else [None] * rhs.size)
        return np.arange(offset, offset + rhs.size)

    def add_row(self, cols, coeffs, relation: str, rhs: float, name: Optional[str] = None) -> int:
        """Fügt eine einzelne Zeile hinzu"""
        cols = np.asarray(cols, dtype=np.int64).reshape(-1)
        indices = self.add_rows(np.zeros(cols.size, dtype=np.int64), cols, coeffs, relation, [rhs],
                                names=None if name is None else [name])
        return int(indices[0])

    def build(self) -> LinearProgram:
        if self._rows:
            rows = np.concatenate(self._rows)
            cols = np.concatenate(self._cols)
            coeffs = np.concatenate(self._coeffs)
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            coeffs = np.zeros(0)
        row_names = None
        if any(name is not None for name in self._row_names):
            row_names = tuple(name if name is not None else f"R{i + 1:07d}" for i, name in enumerate(self._row_names))
        return LinearProgram(
            n_vars=self.n_vars,
            objective=self.objective.copy(),
            rows=rows,
            cols=cols,
            coeffs=coeffs,
            relations=tuple(self._relations),
            rhs=np.array(self._rhs, dtype=float),
            sense=self.sense,
            lower=self.lower.copy(),
            upper=self.upper.copy(),
            var_names=None if self.var_names is None else tuple(self.var_names),
            row_names=row_names,
        )
