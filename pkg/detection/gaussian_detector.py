"""
Klassischer Gauß-CUSUM als Vergleichsdetektor

Inkrement am Residuum z ist das exakte Log-Likelihood-Verhältnis zweier
zentrierter Normalverteilungen:
    ½ [z^T Σ0^-1 z - z^T Σ1^-1 z + ln det Σ0 - ln det Σ1]
"""
import logging
import warnings
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from utils.errors import DimensionError, NumericalError
from .base_detector import BaseDetector

logger = logging.getLogger(__name__)

RIDGE = 1e-6


def _factor(Sigma: np.ndarray, name: str):
    """Cholesky-Zerlegung, bei Singularität mit Ridge 1e-6 I"""
    try:
        return cho_factor(Sigma, lower=True)
    except LinAlgError:
        message = f"{name} ist nicht positiv definit, verwende Ridge {RIDGE:g}·I"
        warnings.warn(message, RuntimeWarning, stacklevel=3)
        logger.warning(message)
    try:
        return cho_factor(Sigma + RIDGE * np.eye(Sigma.shape[0]), lower=True)
    except LinAlgError as exc:
        raise NumericalError(f"{name} ist auch mit Ridge nicht positiv definit") from exc


class GaussianCusumDetector(BaseDetector):
    """
    Gauß-CUSUM mit Kovarianzen Σ0 (nominal) und Σ1 (Angriff)
    """

    detector_id = "baseline"

    def __init__(self, Sigma0, Sigma1, sigma_i: Optional[float] = None):
        """
        Args:
            Sigma0: Kovarianz der nominalen Residuen (d × d)
            Sigma1: Kovarianz der Residuen unter Angriff (d × d)
            sigma_i: σ_i für die Tail-Schranke (None = nur fester Schwellwert)
        """
        super().__init__(sigma_i)
        Sigma0 = np.array(Sigma0, dtype=float, ndmin=2)
        Sigma1 = np.array(Sigma1, dtype=float, ndmin=2)
        if Sigma0.shape != Sigma1.shape or Sigma0.shape[0] != Sigma0.shape[1]:
            raise DimensionError(f"Σ0 {Sigma0.shape} und Σ1 {Sigma1.shape} müssen gleich große quadratische Matrizen sein")
        self.Sigma0 = 0.5 * (Sigma0 + Sigma0.T)
        self.Sigma1 = 0.5 * (Sigma1 + Sigma1.T)
        self._chol0 = _factor(self.Sigma0, "Σ0")
        self._chol1 = _factor(self.Sigma1, "Σ1")
        logdet0 = 2.0 * np.sum(np.log(np.diag(self._chol0[0])))
        logdet1 = 2.0 * np.sum(np.log(np.diag(self._chol1[0])))
        self._log_det_ratio = logdet0 - logdet1

    @property
    def dim(self) -> int:
        return self.Sigma0.shape[0]

    def increments(self, samples: np.ndarray) -> np.ndarray:
        Z = np.asarray(samples, dtype=float)
        quad0 = np.einsum("ij,ji->i", Z, cho_solve(self._chol0, Z.T))
        quad1 = np.einsum("ij,ji->i", Z, cho_solve(self._chol1, Z.T))
        return 0.5 * (quad0 - quad1 + self._log_det_ratio)

    def with_sigma_i(self, sigma_i: float) -> "GaussianCusumDetector":
        return GaussianCusumDetector(self.Sigma0, self.Sigma1, sigma_i=sigma_i)


def sample_covariance(X) -> np.ndarray:
    """Stichprobenkovarianz (Zeilen = Beobachtungen); Nullmatrix bei nur einer Zeile"""
    X = np.array(X, dtype=float, ndmin=2)
    if X.shape[0] < 2:
        return np.zeros((X.shape[1], X.shape[1]))
    return np.atleast_2d(np.cov(X, rowvar=False))


def fit_baseline(X1, X2, sigma_i: Optional[float] = None) -> GaussianCusumDetector:
    """
    Baseline aus denselben Trainingsdaten wie der OT-Detektor.

    Args:
        X1: Nominale Trainingsresiduen
        X2: Trainingsresiduen unter Angriff
        sigma_i: Optionales σ_i

    Returns:
        GaussianCusumDetector mit Σ0 = cov(X1), Σ1 = cov(X2)
    """
    return GaussianCusumDetector(sample_covariance(X1), sample_covariance(X2), sigma_i=sigma_i)
