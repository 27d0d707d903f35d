"""
Detektor auf Basis der kerngeglätteten WCD-Score-Funktion
"""
from typing import Optional, Union

import numpy as np

from systems.models import ResidualStream
from .base_detector import BaseDetector, DetectionRun
from .cusum import ThresholdPolicy
from .score import ScoreModel, score_batch


class OTScoreDetector(BaseDetector):
    """
    CUSUM über s(z) = clip(log f_2 / f_1) + drift_offset

    Mit Clipping ist σ_i = c (beschränkte Inkremente sind sub-gaußsch),
    ohne Clipping muss σ_i explizit gesetzt werden, sonst ist nur ein
    fester Schwellwert möglich.
    """

    detector_id = "ot"

    def __init__(self, model: ScoreModel, sigma_i: Optional[float] = None):
        super().__init__(sigma_i)
        self.model = model

    @property
    def dim(self) -> int:
        return self.model.dim

    @property
    def sigma_i(self) -> Optional[float]:
        if self.model.clip is not None:
            return self.model.clip
        return self._sigma_i

    def increments(self, samples: np.ndarray) -> np.ndarray:
        return score_batch(self.model, samples)


def run_detector(
    model: Union[ScoreModel, BaseDetector],
    residuals: Union[ResidualStream, np.ndarray],
    policy: ThresholdPolicy,
    sigma_i: Optional[float] = None
) -> DetectionRun:
    """
    Lässt Score und CUSUM über einen Residuenstrom laufen.

    Args:
        model: ScoreModel (wird in einen OTScoreDetector verpackt) oder Detektor
        residuals: Residuenstrom
        policy: Fester oder kalibrierter Schwellwert
        sigma_i: σ_i ohne Clipping

    Returns:
        DetectionRun (tau_det = erster Schritt mit S_t >= h)
    """
    detector = model if isinstance(model, BaseDetector) else OTScoreDetector(model, sigma_i=sigma_i)
    return detector.run(residuals, policy)
