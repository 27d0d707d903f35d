"""
Kerngeglättete Score-Funktion über den Worst-Case-Verteilungen

    f_k(z) = sum_l p_k,l K_σ(z - s_l)
    s(z)   = clip(log f_2(z) - log f_1(z), -c, c) + drift_offset

Alle Dichten werden im Log-Raum per log-sum-exp über die Atome mit
positivem Gewicht berechnet.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from utils.errors import DimensionError, ValidationError
from .kernel import BaseKernel, GaussianKernel

WEIGHT_TOL = 1e-6


def _simplex_weights(weights, n: int, name: str) -> np.ndarray:
    weights = np.array(weights, dtype=float).reshape(-1)
    if weights.shape[0] != n:
        raise DimensionError(f"{name} braucht Länge {n}, hat {weights.shape[0]}")
    if not np.all(np.isfinite(weights)) or np.any(weights < -WEIGHT_TOL):
        raise ValidationError(f"{name} muss auf dem Simplex liegen")
    weights = np.clip(weights, 0.0, None)
    total = weights.sum()
    if abs(total - 1.0) > WEIGHT_TOL:
        raise ValidationError(f"{name} summiert sich zu {total!r}, nicht zu 1")
    return weights / total


@dataclass(frozen=True, eq=False)
class ScoreModel:
    """
    Score-Modell aus Atomen, WCD-Gewichten und Kern-Parametern
    """
    atoms: np.ndarray  # Form (n, d)
    p1: np.ndarray
    p2: np.ndarray
    bandwidth: float
    clip: Optional[float] = None
    drift_offset: float = 0.0
    knn_truncation: Optional[int] = None
    kernel: BaseKernel = field(init=False, repr=False)

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float, ndmin=2)
        if atoms.ndim != 2 or atoms.shape[0] < 1:
            raise DimensionError(f"Atome brauchen die Form (n, d), nicht {atoms.shape}")
        if not np.all(np.isfinite(atoms)):
            raise ValidationError("Atome enthalten NaN oder Inf")
        p1 = _simplex_weights(self.p1, atoms.shape[0], "p1")
        p2 = _simplex_weights(self.p2, atoms.shape[0], "p2")
        if self.clip is not None and not self.clip > 0:
            raise ValidationError(f"clip muss positiv sein, ist {self.clip}")
        if not math.isfinite(self.drift_offset) or self.drift_offset > 0:
            raise ValidationError(f"drift_offset muss <= 0 sein, ist {self.drift_offset}")
        if self.knn_truncation is not None and int(self.knn_truncation) < 1:
            raise ValidationError("knn_truncation muss >= 1 sein")

        for array in (atoms, p1, p2):
            array.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)
        object.__setattr__(self, "kernel", GaussianKernel(self.bandwidth))
        object.__setattr__(self, "bandwidth", float(self.bandwidth))
        if self.clip is not None:
            object.__setattr__(self, "clip", float(self.clip))
        if self.knn_truncation is not None:
            object.__setattr__(self, "knn_truncation", int(self.knn_truncation))

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    def weights(self, k: int) -> np.ndarray:
        if k == 1:
            return self.p1
        if k == 2:
            return self.p2
        raise ValueError(f"k muss 1 oder 2 sein, ist {k}")

    def with_drift_offset(self, offset: float) -> "ScoreModel":
        return replace(self, drift_offset=float(offset))

    @classmethod
    def from_artifact(cls, artifact) -> "ScoreModel":
        """Baut das Score-Modell aus einem geladenen Modell-Artefakt"""
        params = artifact.score_model
        return cls(
            atoms=artifact.support,
            p1=artifact.p1,
            p2=artifact.p2,
            bandwidth=params["bandwidth"],
            clip=params.get("clip"),
            drift_offset=params.get("drift_offset", 0.0),
            knn_truncation=params.get("knn_truncation"),
        )


def _as_batch(model: ScoreModel, Z) -> np.ndarray:
    Z = np.array(Z, dtype=float, ndmin=2)
    if Z.ndim != 2 or Z.shape[1] != model.dim:
        raise DimensionError(f"Punkte brauchen Dimension {model.dim}, Form {Z.shape}")
    return Z


def log_density_batch(model: ScoreModel, k: int, Z) -> np.ndarray:
    """
    log f_k an mehreren Punkten.

    Args:
        model: Score-Modell
        k: 1 (nominal) oder 2 (Angriff)
        Z: Punkte, Form (T, d)

    Returns:
        Array der Länge T, überall endlich
    """
    Z = _as_batch(model, Z)
    weights = model.weights(k)
    positive = weights > 0
    atoms = model.atoms[positive]
    log_w = np.log(weights[positive])

    sq_dist = cdist(Z, atoms, metric="sqeuclidean")
    log_terms = log_w[np.newaxis, :] + model.kernel.log_value(sq_dist, model.dim)
    K = model.knn_truncation
    if K is not None and K < atoms.shape[0]:
        # nur die K nächsten Atome je Punkt
        nearest = np.argpartition(sq_dist, K - 1, axis=1)[:, :K]
        log_terms = np.take_along_axis(log_terms, nearest, axis=1)
    return logsumexp(log_terms, axis=1)


def density(model: ScoreModel, k: int, z) -> float:
    """Geglättete Dichte f_k(z) > 0"""
    return float(np.exp(log_density_batch(model, k, z)[0]))


def raw_score_batch(model: ScoreModel, Z) -> np.ndarray:
    """log f_2 - log f_1 ohne Clipping und Offset"""
    return log_density_batch(model, 2, Z) - log_density_batch(model, 1, Z)


def score_batch(model: ScoreModel, Z) -> np.ndarray:
    """Score s(z) für mehrere Punkte (Clipping, dann Drift-Offset)"""
    scores = raw_score_batch(model, Z)
    if model.clip is not None:
        scores = np.clip(scores, -model.clip, model.clip)
    return scores + model.drift_offset


def score(model: ScoreModel, z) -> float:
    return float(score_batch(model, z)[0])


def fit_drift_offset(h0_scores, margin: float = 0.0) -> float:
    """
    Offset, der den empirischen Mittelwert nominaler Scores auf <= -margin drückt.

    Args:
        h0_scores: Scores eines nominalen Stroms (nicht leer)
        margin: Sicherheitsabstand >= 0

    Returns:
        min(0, -(mean + margin))
    """
    scores = np.asarray(h0_scores, dtype=float).reshape(-1)
    if scores.size == 0:
        raise ValidationError("fit_drift_offset braucht mindestens einen Score")
    if margin < 0:
        raise ValidationError("margin muss nichtnegativ sein")
    return min(0.0, -(float(scores.mean()) + margin))
