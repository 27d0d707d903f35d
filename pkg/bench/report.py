"""
ADD/FAR-Kurven über ein Schwellwert-Raster

FAR = Anteil der Versuche mit Alarm vor t_attack (auf angegriffenen Läufen)
ADD = mittlere Verzögerung über die Versuche mit Alarm ab t_attack
Versuche ohne Alarm zählen weder zu FAR noch zu ADD (n_missed).

Raster-Modi: "auto" setzt die Schwellwerte auf Quantile von max S_t auf
nominalen Strömen über das Fenster vor dem Angriff, damit die Kurve einen
echten FAR-Bereich überstreicht. "tail" nutzt die Tail-Schranke.
"""
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from detection.base_detector import BaseDetector
from detection.cusum import calibrate_threshold, cusum_trajectory, tail_bound
from systems.simulation import simulate_nominal
from utils.errors import ConfigError, ValidationError
from utils.files import write_json
from utils.seeding import make_rng
from .scenarios import Scenario, scenario_digest
from .trials import TrialResult, trial_trajectory

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["detector", "h", "eta", "far", "add", "n_trials", "n_detected"]
GRID_MODES = ("auto", "tail")
AUTO_POINTS = 10
AUTO_FAR_RANGE = (0.5, 0.005)  # Ziel-FAR des ersten und letzten Schwellwerts
CALIBRATION_STREAMS = 1000
GRID_FLOOR = 1e-3  # unterster Schwellwert relativ zum kleinsten positiven Quantil
TAIL_ETA_RANGE = (0.5, 1e-4)


@dataclass
class CurveRow:
    """Eine Zeile der ADD/FAR-Kurve"""
    h: float
    eta: Optional[float]  # Tail-Schranke zu h, None ohne σ_i
    far: float
    add: Optional[float]  # None, wenn kein Versuch ab t_attack alarmiert hat
    n_trials: int
    n_detected: int  # Alarme ab t_attack
    n_false_alarms: int
    n_missed: int
    far_se: float
    add_se: Optional[float]


@dataclass
class BenchReport:
    """ADD/FAR-Kurve eines Detektors mit Metadaten"""
    detector_id: str
    rows: List[CurveRow]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def h_grid(self) -> np.ndarray:
        return np.array([row.h for row in self.rows])

    def frame(self) -> pd.DataFrame:
        """Tabelle mit den Spalten detector,h,eta,far,add,n_trials,n_detected"""
        return pd.DataFrame(
            [[self.detector_id, row.h, row.eta, row.far, row.add, row.n_trials, row.n_detected]
             for row in self.rows],
            columns=CSV_COLUMNS,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "detector": self.detector_id,
            "rows": [asdict(row) for row in self.rows],
            "metadata": self.metadata,
        }

    def write_csv(self, path) -> Path:
        path = Path(path)
        self.frame().to_csv(path, index=False, lineterminator="\n")
        return path

    def write_json(self, path) -> Path:
        return write_json(Path(path), self.to_dict())


def auto_h_grid(V_T: float, points: int = AUTO_POINTS) -> np.ndarray:
    """
    Log-verteiltes Raster zwischen den kalibrierten Schwellwerten für
    eta = 0.5 und eta = 1e-4 (Modus "tail").
    """
    low = calibrate_threshold(TAIL_ETA_RANGE[0], V_T)
    high = calibrate_threshold(TAIL_ETA_RANGE[1], V_T)
    return np.geomspace(low, high, points)


def empirical_h_grid(maxima, points: int = AUTO_POINTS, scale: Optional[float] = None) -> np.ndarray:
    """
    Raster aus den Quantilen von max S_t auf nominalen Strömen.

    Für jede Ziel-FAR alpha (log-verteilt in AUTO_FAR_RANGE) ist h das
    (1 - alpha)-Quantil der Maxima. Nicht-positive Quantile (der Detektor
    erreicht diese FAR gar nicht) werden durch log-verteilte Werte unterhalb
    des kleinsten positiven Quantils ersetzt.

    Args:
        maxima: max S_t je Kalibrierstrom
        points: Anzahl Schwellwerte
        scale: Obergrenze, falls kein Strom je S_t > 0 erreicht (z.B. σ_i)

    Returns:
        Streng aufsteigendes Raster mit genau points Werten
    """
    maxima = np.asarray(maxima, dtype=float).reshape(-1)
    if maxima.size == 0:
        raise ValidationError("Keine Kalibrierströme für das Raster")
    alphas = np.geomspace(AUTO_FAR_RANGE[0], AUTO_FAR_RANGE[1], points)
    quantiles = np.quantile(maxima, 1.0 - alphas, method="higher")
    positive = np.unique(quantiles[quantiles > 0])
    if positive.size == 0:
        top = float(maxima.max()) if maxima.max() > 0 else scale
        if top is None or not top > 0:
            raise ConfigError("Nominale CUSUM bleibt überall 0 und es gibt kein sigma_i für das Raster")
        positive = np.array([top])
    lowest = positive[0]
    fill = np.geomspace(GRID_FLOOR * lowest, lowest, points - positive.size + 1)[:-1]
    return check_h_grid(np.concatenate([fill, positive]))


def _nominal_maximum(args) -> float:
    sc, detector, index, steps = args
    stream = simulate_nominal(sc.system, sc.observer, sc.nominal_noise, steps,
                              make_rng(sc.seed, index, "calibration"))
    S = cusum_trajectory(detector.increments(detector.samples_of(stream)))
    return float(S.max())


def nominal_maxima(sc: Scenario, detector: BaseDetector, n_streams: int, workers: int = 1) -> np.ndarray:
    """
    max S_t über das Fenster vor dem Angriff auf nominalen Strömen.

    Strom k nutzt (seed, k, "calibration") mit k = 1..n_streams, Strom 0
    gehört dem Training (Drift-Offset, Baseline-σ).
    """
    if n_streams < 1:
        raise ValidationError(f"calibration_streams muss >= 1 sein, ist {n_streams}")
    steps = min(sc.t_attack, sc.horizon)
    if steps < 1:
        raise ConfigError("Kein Fenster vor dem Angriff: t_attack muss >= 1 sein")
    tasks = [(sc, detector, index, steps) for index in range(1, n_streams + 1)]
    if workers == 1:
        return np.array([_nominal_maximum(task) for task in tasks])
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(_nominal_maximum, tasks, chunksize=max(1, n_streams // (4 * workers)))))


def parse_h_grid(text: str) -> Union[str, np.ndarray]:
    """
    Liest ein Raster aus der CLI: "auto", "tail" oder kommagetrennte Werte.

    Returns:
        Name des Modus oder aufsteigend sortiertes Array
    """
    if text is None:
        return "auto"
    mode = str(text).strip().lower()
    if mode in GRID_MODES:
        return mode
    try:
        values = [float(part) for part in str(text).split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"h_grid '{text}' ist weder {'/'.join(GRID_MODES)} noch eine Liste von Zahlen") from exc
    return check_h_grid(values)


def check_h_grid(values: Sequence[float]) -> np.ndarray:
    grid = np.asarray(values, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ConfigError("h_grid ist leer")
    if not np.all(np.isfinite(grid)) or np.any(grid <= 0):
        raise ConfigError("h_grid braucht endliche Werte > 0")
    if np.any(np.diff(grid) <= 0):
        raise ConfigError("h_grid muss streng aufsteigend sein")
    return grid


def h_grid_for(
    sc: Scenario,
    detector: BaseDetector,
    grid: Union[str, np.ndarray, None] = "auto",
    n_streams: int = CALIBRATION_STREAMS,
    workers: int = 1
) -> np.ndarray:
    """
    Raster für einen Detektor.

    "auto" kalibriert über nominale Maxima (empirical_h_grid), "tail" über
    die Tail-Schranke mit V_T = horizon·σ_i², ein Array wird nur geprüft.
    """
    if grid is None or (isinstance(grid, str) and grid == "auto"):
        maxima = nominal_maxima(sc, detector, n_streams, workers)
        logger.info("%s: %d von %d nominalen Strömen mit max S > 0", detector.detector_id,
                    int(np.count_nonzero(maxima > 0)), maxima.size)
        return empirical_h_grid(maxima, scale=detector.sigma_i)
    if isinstance(grid, str):
        if grid != "tail":
            raise ConfigError(f"Unbekannter Raster-Modus '{grid}'")
        if detector.sigma_i is None:
            raise ConfigError(f"h_grid 'tail' braucht sigma_i für Detektor '{detector.detector_id}'")
        return auto_h_grid(sc.horizon * detector.sigma_i ** 2)
    return check_h_grid(grid)


def _alarm_times(S: np.ndarray, h_grid: np.ndarray) -> List[Optional[int]]:
    """0-basierte Residuenzeit des ersten Alarms je Schwellwert"""
    running_max = np.maximum.accumulate(S)
    index = np.searchsorted(running_max, h_grid, side="left")
    return [None if i >= S.shape[0] else int(i) for i in index]


def _trial_alarms(args) -> List[Optional[int]]:
    sc, detector, h_grid, trial = args
    return _alarm_times(trial_trajectory(sc, detector, trial), h_grid)


def _row(h: float, results: List[TrialResult], sigma_i: Optional[float], horizon: int) -> CurveRow:
    n = len(results)
    n_false = sum(result.false_alarm for result in results)
    delays = np.array([result.delay for result in results if result.delay is not None], dtype=float)
    far = n_false / n
    add = float(delays.mean()) if delays.size else None
    add_se = float(delays.std(ddof=1) / math.sqrt(delays.size)) if delays.size > 1 else None
    eta = tail_bound(h, horizon * sigma_i ** 2) if sigma_i is not None else None
    return CurveRow(
        h=float(h),
        eta=eta,
        far=far,
        add=add,
        n_trials=n,
        n_detected=int(delays.size),
        n_false_alarms=int(n_false),
        n_missed=n - int(n_false) - int(delays.size),
        far_se=math.sqrt(far * (1.0 - far) / n),
        add_se=add_se,
    )


def add_far_curve(
    sc: Scenario,
    detector: BaseDetector,
    h_grid,
    n_trials: int,
    workers: int = 1
) -> BenchReport:
    """
    Monte-Carlo-Schätzung von FAR und ADD für jeden Schwellwert.

    Jeder Versuch wird einmal simuliert, die CUSUM-Trajektorie wird für
    alle Schwellwerte ausgewertet. Versuch k nutzt den Strom
    (seed, k, "evaluation"), die Reduktion läuft in Versuchsreihenfolge.

    Args:
        sc: Szenario
        detector: Detektor
        h_grid: Aufsteigende Schwellwerte > 0
        n_trials: Anzahl Versuche (>= 1)
        workers: Anzahl Prozesse (1 = ohne Pool)

    Returns:
        BenchReport
    """
    grid = check_h_grid(h_grid)
    if n_trials < 1:
        raise ValidationError(f"n_trials muss >= 1 sein, ist {n_trials}")
    if workers < 1:
        raise ValidationError(f"workers muss >= 1 sein, ist {workers}")

    started = time.perf_counter()
    tasks = [(sc, detector, grid, trial) for trial in range(n_trials)]
    if workers == 1:
        alarms = [_trial_alarms(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            alarms = list(pool.map(_trial_alarms, tasks, chunksize=max(1, n_trials // (4 * workers))))

    rows = []
    for j, h in enumerate(grid):
        results = [TrialResult(trial_alarms[j], sc.t_attack) for trial_alarms in alarms]
        rows.append(_row(h, results, detector.sigma_i, sc.horizon))

    wall_time = time.perf_counter() - started
    logger.info("%s: %d Versuche x %d Schwellwerte in %.1f s", detector.detector_id, n_trials, grid.size, wall_time)
    return BenchReport(
        detector_id=detector.detector_id,
        rows=rows,
        metadata={
            "scenario": sc.name,
            "scenario_digest": scenario_digest(sc),
            "seed": sc.seed,
            "t_attack": sc.t_attack,
            "horizon": sc.horizon,
            "sigma_i": detector.sigma_i,
            "wall_time": wall_time,
        },
    )
