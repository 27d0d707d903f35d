"""
Diskrete Wahrscheinlichkeitsmaße und Kostenmatrizen
"""
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from utils.errors import DataFormatError, DimensionError, ValidationError

SIMPLEX_TOL = 1e-12


def _points(points, name: str = "support") -> np.ndarray:
    try:
        array = np.array(points, dtype=float)
    except ValueError as exc:
        # ungleich lange Punkte
        raise DimensionError(f"{name}: alle Punkte brauchen dieselbe Dimension") from exc
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise DimensionError(f"{name}: alle Punkte brauchen dieselbe Dimension, Form {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name} enthält NaN oder Inf")
    return array


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """
    Diskretes Maß  sum_i w_i δ_{x_i}

    Die Gewichte liegen auf dem Simplex: w >= 0 und |sum(w) - 1| <= 1e-12.
    Innerhalb der Toleranz wird renormiert, größere Abweichungen werden
    abgelehnt.
    """
    support: np.ndarray  # Form (n, d)
    weights: np.ndarray  # Form (n,)

    def __post_init__(self):
        support = _points(self.support)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if support.shape[0] != weights.shape[0]:
            raise DimensionError(f"{support.shape[0]} Punkte, aber {weights.shape[0]} Gewichte")
        if support.shape[0] == 0:
            raise ValidationError("Ein Maß braucht mindestens einen Punkt")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValidationError("Gewichte müssen endlich und nichtnegativ sein")
        total = weights.sum()
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValidationError(f"Gewichte summieren sich zu {total!r}, nicht zu 1")
        weights = weights / total
        support.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.support.shape[0]

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        """Empirisches Maß mit Gewicht 1/n je Punkt"""
        points = _points(points)
        return cls(points, np.full(points.shape[0], 1.0 / points.shape[0]))

    @classmethod
    def from_lp_weights(cls, support, weights, tol: float = 1e-7) -> "DiscreteMeasure":
        """
        Maß aus LP-Lösungswerten: Rundungsfehler bis tol werden abgeschnitten
        und die Gewichte renormiert.
        """
        weights = np.array(weights, dtype=float).reshape(-1)
        if np.any(weights < -tol):
            raise ValidationError(f"Gewicht {weights.min():.3e} unterhalb von -{tol}")
        weights = np.clip(weights, 0.0, None)
        total = weights.sum()
        if abs(total - 1.0) > max(tol, SIMPLEX_TOL) * max(1, weights.size):
            raise ValidationError(f"LP-Gewichte summieren sich zu {total!r}")
        return cls(support, weights / total)

    def positive(self) -> "DiscreteMeasure":
        """Dasselbe Maß ohne Atome mit Gewicht 0"""
        keep = self.weights > 0
        return DiscreteMeasure(self.support[keep], self.weights[keep])


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Euklidische Kostenmatrix D_lm = ||s_l - s_m||_2 über einem Träger"""
    D: np.ndarray
    points: np.ndarray

    @property
    def size(self) -> int:
        return self.D.shape[0]


def cost_matrix(points) -> CostMatrix:
    """
    Paarweise euklidische Distanzen.

    Args:
        points: Nichtleere Liste von Punkten gleicher Dimension

    Returns:
        CostMatrix (symmetrisch, Nulldiagonale)
    """
    points = _points(points, "points")
    if points.shape[0] == 0:
        raise ValidationError("cost_matrix braucht mindestens einen Punkt")
    D = cdist(points, points, metric="euclidean")
    # exakt symmetrisch mit Nulldiagonale
    D = np.maximum(D, D.T)
    np.fill_diagonal(D, 0.0)
    D.setflags(write=False)
    points.setflags(write=False)
    return CostMatrix(D, points)


def write_measure_csv(measure: DiscreteMeasure, path) -> None:
    """Schreibt ein Maß als CSV mit Kopfzeile w,x1,...,x{d}"""
    frame = pd.DataFrame(measure.support, columns=[f"x{i + 1}" for i in range(measure.dim)])
    frame.insert(0, "w", measure.weights)
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")


def read_measure_csv(path) -> DiscreteMeasure:
    """Liest ein Maß aus einer w,x1,...,x{d}-CSV"""
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise DataFormatError(f"CSV nicht lesbar: {exc}", path=str(Path(path))) from exc
    columns = list(frame.columns)
    expected = ["w"] + [f"x{i + 1}" for i in range(len(columns) - 1)]
    if len(columns) < 2 or columns != expected:
        raise DataFormatError(f"Kopfzeile {columns} entspricht nicht w,x1,...,x<d>", path=str(path), line=1)
    values = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(values).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise DataFormatError("Ungültige Zahl", path=str(path), line=row + 2)
    try:
        return DiscreteMeasure(values[:, 1:], values[:, 0])
    except ValidationError as exc:
        raise DataFormatError(str(exc), path=str(path)) from exc
