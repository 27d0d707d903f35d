"""
Einzelne Monte-Carlo-Versuche
"""
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from detection.base_detector import BaseDetector
from detection.cusum import cusum_trajectory, first_alarm
from detection.ot_detector import OTScoreDetector
from detection.score import ScoreModel
from systems.simulation import simulate_attacked
from utils.errors import ValidationError
from utils.seeding import make_rng
from .scenarios import Scenario


@dataclass(frozen=True)
class TrialResult:
    """Ergebnis eines Versuchs"""
    tau_det: Optional[int]  # 0-basierte Residuenzeit des Alarms, None = kein Alarm
    t_attack: int

    @property
    def false_alarm(self) -> bool:
        return self.tau_det is not None and self.tau_det < self.t_attack

    @property
    def delay(self) -> Optional[int]:
        """tau_det - t_attack, nur bei Alarm ab dem Angriff definiert"""
        if self.tau_det is None or self.tau_det < self.t_attack:
            return None
        return self.tau_det - self.t_attack

    @property
    def outcome(self) -> str:
        if self.tau_det is None:
            return "missed"
        return "false_alarm" if self.false_alarm else "detected"


def _as_detector(detector: Union[BaseDetector, ScoreModel]) -> BaseDetector:
    return detector if isinstance(detector, BaseDetector) else OTScoreDetector(detector)


def trial_trajectory(sc: Scenario, detector: Union[BaseDetector, ScoreModel], trial: int) -> np.ndarray:
    """
    CUSUM-Trajektorie S_1..S_T eines angegriffenen Laufs.

    Der Versuch zieht das Strecken-Rauschen aus (seed, trial, "evaluation") und
    das Angreifer-Rauschen aus (seed, trial, "attack"), ist also unabhängig von
    Reihenfolge und Parallelisierung.
    """
    stream = simulate_attacked(
        sc.system, sc.observer, sc.nominal_noise, sc.attack, sc.horizon,
        make_rng(sc.seed, trial, "evaluation"),
        attack_rng=make_rng(sc.seed, trial, "attack"),
    )
    detector = _as_detector(detector)
    return cusum_trajectory(detector.increments(detector.samples_of(stream)))


def classify(S: np.ndarray, h: float, t_attack: int) -> TrialResult:
    """TrialResult zu einer fertigen Trajektorie und einem Schwellwert"""
    step = first_alarm(S, h)
    # Schritt t gehört zum Residuum r_{t-1}
    return TrialResult(tau_det=None if step is None else step - 1, t_attack=t_attack)


def run_trial(sc: Scenario, detector: Union[BaseDetector, ScoreModel], h: float, trial: int) -> TrialResult:
    """
    Ein Versuch: angegriffener Lauf, CUSUM, Einordnung.

    Args:
        sc: Szenario
        detector: Detektor oder Score-Modell
        h: Schwellwert > 0
        trial: Versuchsindex (bestimmt den Zufallsstrom)

    Returns:
        TrialResult
    """
    if not h > 0:
        raise ValidationError(f"h muss positiv sein, ist {h}")
    return classify(trial_trajectory(sc, detector, trial), h, sc.t_attack)
