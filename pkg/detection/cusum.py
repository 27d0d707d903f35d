"""
CUSUM-Rekursion und Schwellwert-Kalibrierung

Dieses Modul implementiert:
1. Die Rekursion S_t = max(0, S_{t-1} + X_t) mit Varianz-Proxy V_t = sum σ_i²
2. Die Tail-Schranke P(S_t >= h) <= 2 exp(-h² / (8 V_t)) und ihre Umkehrung
3. Schwellwert-Policies (fest oder über die Tail-Schranke kalibriert)

Zeitkonvention: S_0 = 0, S_t ist der Wert nach dem t-ten Inkrement (t >= 1).
"""
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from utils.errors import DomainError, ValidationError

POLICY_MODES = ("fixed", "tail_bound")


@dataclass(frozen=True)
class CusumState:
    """Zustand der CUSUM-Statistik"""
    S: float = 0.0  # >= 0
    t: int = 0  # Anzahl verarbeiteter Inkremente
    V: float = 0.0  # sum σ_i², nichtfallend


def cusum_step(state: CusumState, x: float, sigma_i: float) -> CusumState:
    """
    Ein Schritt der CUSUM-Rekursion.

    Args:
        state: Bisheriger Zustand
        x: Inkrement X_t
        sigma_i: Sub-Gauß-Konstante des Inkrements (> 0)

    Returns:
        Neuer Zustand mit S = max(0, S + x), t + 1, V + σ_i²
    """
    if not sigma_i > 0:
        raise DomainError(f"sigma_i muss positiv sein, ist {sigma_i}")
    return replace(state, S=max(0.0, state.S + float(x)), t=state.t + 1, V=state.V + sigma_i * sigma_i)


def cusum_trajectory(increments) -> np.ndarray:
    """
    CUSUM-Werte S_1..S_T für eine Inkrementfolge (Rekursion).

    Returns:
        Array der Länge T
    """
    increments = np.asarray(increments, dtype=float).reshape(-1)
    S = np.empty(increments.shape[0])
    current = 0.0
    for t, x in enumerate(increments.tolist()):
        current = current + x
        if current < 0.0:
            current = 0.0
        S[t] = current
    return S


def cusum_from_partial_sums(increments) -> np.ndarray:
    """
    CUSUM-Werte über Partialsummen: S_t = A_t - min_{0<=k<=t} A_k mit A_0 = 0.

    Gleiche Werte wie cusum_trajectory, dient zur Gegenprobe.
    """
    increments = np.asarray(increments, dtype=float).reshape(-1)
    A = np.cumsum(increments)
    running_min = np.minimum(np.minimum.accumulate(A), 0.0)
    return A - running_min


def first_alarm(S, h: float) -> Optional[int]:
    """Erster Schritt t (1-basiert) mit S_t >= h, sonst None"""
    hits = np.flatnonzero(np.asarray(S) >= h)
    return int(hits[0]) + 1 if hits.size else None


def tail_bound(h: float, V_t: float) -> float:
    """
    Obere Schranke für die Fehlalarm-Wahrscheinlichkeit P(S_t >= h).

    Args:
        h: Schwellwert (> 0)
        V_t: Summe der σ_i² bis t (> 0)

    Returns:
        min(1, 2 exp(-h² / (8 V_t)))
    """
    if not h > 0 or not V_t > 0:
        raise DomainError(f"tail_bound braucht h > 0 und V_t > 0 (h={h}, V_t={V_t})")
    return min(1.0, 2.0 * math.exp(-h * h / (8.0 * V_t)))


def calibrate_threshold(eta: float, V_t: float) -> float:
    """
    Kleinster Schwellwert, dessen Tail-Schranke höchstens eta ist.

    Args:
        eta: Fehlalarm-Toleranz in (0, 1)
        V_t: Summe der σ_i² bis zum Horizont (> 0)

    Returns:
        h = sqrt(8 V_t ln(2 / eta))
    """
    if not 0 < eta < 1:
        raise DomainError(f"eta muss in (0, 1) liegen, ist {eta}")
    if not V_t > 0:
        raise DomainError(f"V_t muss positiv sein, ist {V_t}")
    return math.sqrt(8.0 * V_t * math.log(2.0 / eta))


@dataclass(frozen=True)
class ThresholdPolicy:
    """
    Schwellwert-Policy: fester Wert h oder Kalibrierung über eta

    Bei tail_bound mit horizon=None wird die Länge des überwachten Stroms
    als Horizont verwendet.
    """
    mode: str
    h: Optional[float] = None
    eta: Optional[float] = None
    horizon: Optional[int] = None

    def __post_init__(self):
        if self.mode not in POLICY_MODES:
            raise ValidationError(f"Unbekannter Policy-Modus '{self.mode}', erlaubt: {POLICY_MODES}")
        if self.mode == "fixed":
            if self.h is None or not self.h > 0 or not math.isfinite(self.h):
                raise ValidationError(f"Fester Schwellwert braucht h > 0, ist {self.h}")
        else:
            if self.eta is None or not 0 < self.eta < 1:
                raise ValidationError(f"eta muss in (0, 1) liegen, ist {self.eta}")
            if self.horizon is not None and self.horizon < 1:
                raise ValidationError("horizon muss >= 1 sein")

    @classmethod
    def fixed(cls, h: float) -> "ThresholdPolicy":
        return cls("fixed", h=float(h))

    @classmethod
    def tail_bound(cls, eta: float, horizon: Optional[int] = None) -> "ThresholdPolicy":
        return cls("tail_bound", eta=float(eta), horizon=horizon)

    def resolve(self, sigma_i: Optional[float], stream_length: int) -> Tuple[float, Optional[float]]:
        """
        Schwellwert und V_t für einen Strom.

        Returns:
            (h, V_t); V_t ist None, wenn sigma_i unbekannt ist
        """
        horizon = self.horizon if self.horizon is not None else stream_length
        V_t = None if sigma_i is None else horizon * sigma_i * sigma_i
        if self.mode == "fixed":
            return self.h, V_t
        if V_t is None:
            raise DomainError("tail_bound braucht sigma_i")
        return calibrate_threshold(self.eta, V_t), V_t
