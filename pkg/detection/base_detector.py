"""
Basis-Klasse für alle CUSUM-Detektoren
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from systems.models import ResidualStream
from utils.errors import ConfigError, DimensionError, DomainError
from .cusum import ThresholdPolicy, cusum_trajectory, first_alarm


@dataclass(eq=False)
class DetectionRun:
    """Ergebnis eines Detektor-Laufs über einen Residuenstrom"""
    detector_id: str
    scores: np.ndarray  # Inkremente X_1..X_T
    S: np.ndarray  # CUSUM-Werte S_1..S_T
    h: float
    tau_det: Optional[int]  # Erster Schritt (1-basiert) mit S_t >= h, None = kein Alarm
    eta: Optional[float] = None
    V_t: Optional[float] = None

    @property
    def alarms(self) -> np.ndarray:
        """Alarm-Flag je Schritt (S_t >= h)"""
        return self.S >= self.h

    @property
    def detected(self) -> bool:
        return self.tau_det is not None

    @property
    def alarm_residual_time(self) -> Optional[int]:
        """0-basierte Zeit des Residuums, das den Alarm ausgelöst hat"""
        return None if self.tau_det is None else self.tau_det - 1

    def frame(self) -> pd.DataFrame:
        """Tabelle t, score, S, alarm (t 1-basiert)"""
        return pd.DataFrame({
            "t": np.arange(1, self.S.shape[0] + 1),
            "score": self.scores,
            "S": self.S,
            "alarm": self.alarms.astype(int),
        })

    def summary(self) -> Dict[str, Any]:
        return {"tau_det": self.tau_det, "h": self.h, "eta": self.eta, "V_t": self.V_t,
                "detector": self.detector_id}


class BaseDetector(ABC):
    """Abstrakte Basisklasse: Inkremente je Residuum + CUSUM + Schwellwert"""

    detector_id = "base"

    def __init__(self, sigma_i: Optional[float] = None):
        """
        Args:
            sigma_i: Sub-Gauß-Konstante pro Schritt (None = aus dem Detektor abgeleitet)
        """
        if sigma_i is not None and not sigma_i > 0:
            raise ConfigError(f"sigma_i muss positiv sein, ist {sigma_i}")
        self._sigma_i = sigma_i

    @property
    @abstractmethod
    def dim(self) -> int:
        """Erwartete Residuendimension"""
        pass

    @property
    def sigma_i(self) -> Optional[float]:
        return self._sigma_i

    @abstractmethod
    def increments(self, samples: np.ndarray) -> np.ndarray:
        """CUSUM-Inkremente für Residuen der Form (T, d)"""
        pass

    def samples_of(self, residuals: Union[ResidualStream, np.ndarray]) -> np.ndarray:
        samples = residuals.samples if isinstance(residuals, ResidualStream) else np.array(residuals, dtype=float, ndmin=2)
        if samples.ndim != 2 or samples.shape[1] != self.dim:
            raise DimensionError(f"Detektor erwartet Dimension {self.dim}, Residuen haben Form {samples.shape}")
        return samples

    def resolve_threshold(self, policy: ThresholdPolicy, stream_length: int):
        """(h, V_t) für einen Strom der gegebenen Länge"""
        if policy.mode == "tail_bound" and self.sigma_i is None:
            raise ConfigError("tail_bound-Schwellwert ohne Clipping braucht ein konfiguriertes sigma_i")
        try:
            return policy.resolve(self.sigma_i, stream_length)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def run(self, residuals: Union[ResidualStream, np.ndarray], policy: ThresholdPolicy) -> DetectionRun:
        """
        Überwacht einen Residuenstrom.

        Args:
            residuals: Residuen (T, d)
            policy: Schwellwert-Policy

        Returns:
            DetectionRun mit vollständiger S-Trajektorie
        """
        samples = self.samples_of(residuals)
        h, V_t = self.resolve_threshold(policy, samples.shape[0])
        scores = self.increments(samples)
        S = cusum_trajectory(scores)
        return DetectionRun(
            detector_id=self.detector_id,
            scores=scores,
            S=S,
            h=h,
            tau_det=first_alarm(S, h),
            eta=policy.eta,
            V_t=V_t,
        )
