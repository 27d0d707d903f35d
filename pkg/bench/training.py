"""
Training des OT-Detektors und der Gauß-CUSUM-Baseline

Ablauf:
1. Trainingsresiduen X1 (nominal) und X2 (Ersatzangriff) nach dem Burn-in sammeln
2. WCD-LP lösen
3. Score-Modell mit Kerngeglättung bauen und Drift-Offset auf einem
   nominalen Kalibrierungsstrom anpassen
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from detection.gaussian_detector import GaussianCusumDetector, fit_baseline
from detection.ot_detector import OTScoreDetector
from detection.score import ScoreModel, fit_drift_offset, score_batch
from robust.artifact import ModelArtifact
from robust.wcd import (
    TrainingSet, WcdProblem, WcdSolution, bandwidth_hint, make_problem, solve_wcd
)
from systems.simulation import simulate_attacked, simulate_nominal
from transport.measures import DiscreteMeasure
from utils.seeding import make_rng
from .scenarios import Scenario, TrainingParams, scenario_digest, scenario_to_dict

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class TrainedModel:
    """Alles, was ein Trainingslauf erzeugt"""
    score_model: ScoreModel
    solution: WcdSolution
    problem: WcdProblem
    training_set: TrainingSet
    baseline: GaussianCusumDetector
    artifact: ModelArtifact

    @property
    def detector(self) -> OTScoreDetector:
        return OTScoreDetector(self.score_model)


def generate_training_set(sc: Scenario) -> TrainingSet:
    """
    Simuliert n1 nominale und n2 angegriffene Residuen nach dem Burn-in.

    Der Ersatzangriff startet direkt nach dem Burn-in, sodass alle n2
    Residuen aus dem angegriffenen Regime stammen.
    """
    params = sc.training
    burn_in = params.burn_in
    nominal = simulate_nominal(
        sc.system, sc.observer, sc.nominal_noise,
        burn_in + params.n1, make_rng(sc.seed, 0, "training_nominal"),
    )
    attacked = simulate_attacked(
        sc.system, sc.observer, sc.nominal_noise,
        sc.surrogate_attack.with_start(burn_in),
        burn_in + params.n2, make_rng(sc.seed, 0, "training_attack"),
    )
    return TrainingSet(nominal.samples[burn_in:], attacked.samples[burn_in:])


def calibration_samples(sc: Scenario) -> np.ndarray:
    """Nominaler Strom nach dem Burn-in für Drift-Offset und Baseline-σ_i"""
    params = sc.training
    stream = simulate_nominal(
        sc.system, sc.observer, sc.nominal_noise,
        params.burn_in + params.n_calibration, make_rng(sc.seed, 0, "calibration"),
    )
    return stream.samples[params.burn_in:]


def increment_std(detector, samples: np.ndarray) -> Optional[float]:
    """Empirische Standardabweichung der Inkremente, None wenn entartet"""
    increments = detector.increments(samples)
    if increments.shape[0] < 2:
        return None
    std = float(np.std(increments, ddof=1))
    return std if std > 0 else None


def fit_model(
    ts: TrainingSet,
    params: TrainingParams,
    calibration: np.ndarray,
    seed: Optional[int] = None,
    digest: str = "",
    surrogate_attack: Optional[Dict[str, Any]] = None,
    lp_options: Optional[Dict[str, Any]] = None,
    sigma_i: Optional[float] = None
) -> TrainedModel:
    """
    Löst das WCD-LP und baut Score-Modell, Baseline und Artefakt.

    Args:
        ts: Trainingsdaten
        params: Trainingsparameter (Radien, Bandbreite, Clipping, Margin)
        calibration: Nominale Residuen für den Drift-Offset
        seed: Seed für die Metadaten
        digest: Konfigurations-Digest für die Metadaten
        surrogate_attack: Beschreibung des Ersatzangriffs (nur Metadaten)
        lp_options: method, tol, max_iters, auto_threshold für solve_wcd
        sigma_i: σ_i des OT-Detektors ohne Clipping

    Returns:
        TrainedModel
    """
    options = dict(lp_options or {})
    problem = make_problem(ts, params.eps1, params.eps2)
    solution = solve_wcd(problem, **options)

    p1 = DiscreteMeasure.from_lp_weights(solution.support, solution.p1).weights
    p2 = DiscreteMeasure.from_lp_weights(solution.support, solution.p2).weights
    raw_model = ScoreModel(
        atoms=solution.support, p1=p1, p2=p2,
        bandwidth=params.bandwidth, clip=params.clip, knn_truncation=params.knn,
    )
    offset = fit_drift_offset(score_batch(raw_model, calibration), params.margin)
    score_model = raw_model.with_drift_offset(offset)
    logger.info("Drift-Offset %.6f aus %d Kalibrierungsresiduen", offset, calibration.shape[0])

    baseline = fit_baseline(ts.X1, ts.X2)
    baseline_sigma = increment_std(baseline, calibration)
    if baseline_sigma is not None:
        baseline = baseline.with_sigma_i(baseline_sigma)

    artifact = ModelArtifact.from_solution(
        solution,
        score_model={
            "bandwidth": score_model.bandwidth,
            "clip": score_model.clip,
            "drift_offset": score_model.drift_offset,
            "knn_truncation": score_model.knn_truncation,
            "sigma_i": score_model.clip if score_model.clip is not None else sigma_i,
        },
        training={"n1": ts.n1, "n2": ts.n2, "surrogate_attack": surrogate_attack},
        metadata={"seed": seed, "config_digest": digest},
        baseline={"sigma0": baseline.Sigma0, "sigma1": baseline.Sigma1, "sigma_i": baseline_sigma},
        bandwidth_hint=bandwidth_hint(problem),
    )
    return TrainedModel(score_model, solution, problem, ts, baseline, artifact)


def train_scenario(
    sc: Scenario,
    lp_options: Optional[Dict[str, Any]] = None,
    sigma_i: Optional[float] = None
) -> TrainedModel:
    """
    Trainiert den Detektor für ein Szenario.

    Args:
        sc: Szenario
        lp_options: Optionen für solve_wcd
        sigma_i: σ_i des OT-Detektors ohne Clipping

    Returns:
        TrainedModel; gleicher Seed und gleiches Szenario ergeben identische Artefakte
    """
    ts = generate_training_set(sc)
    logger.info("Training %s: n1 = %d, n2 = %d, eps = (%g, %g)",
                sc.name, ts.n1, ts.n2, sc.training.eps1, sc.training.eps2)
    surrogate = scenario_to_dict(sc)["surrogate_attack"]
    return fit_model(
        ts, sc.training, calibration_samples(sc),
        seed=sc.seed, digest=scenario_digest(sc),
        surrogate_attack=surrogate, lp_options=lp_options, sigma_i=sigma_i,
    )


def baseline_gaussian_cusum(sc: Scenario, Sigma0, Sigma1) -> GaussianCusumDetector:
    """
    Gauß-CUSUM-Baseline mit σ_i aus dem nominalen Kalibrierungsstrom.

    Args:
        sc: Szenario (liefert den Kalibrierungsstrom)
        Sigma0: Kovarianz nominal
        Sigma1: Kovarianz unter Angriff

    Returns:
        GaussianCusumDetector
    """
    detector = GaussianCusumDetector(Sigma0, Sigma1)
    sigma = increment_std(detector, calibration_samples(sc))
    return detector if sigma is None else detector.with_sigma_i(sigma)


def detectors_from_artifact(
    artifact: ModelArtifact,
    sigma_i: Optional[float] = None
) -> Tuple[OTScoreDetector, Optional[GaussianCusumDetector]]:
    """OT-Detektor und (falls gespeichert) Baseline aus einem geladenen Artefakt"""
    stored_sigma = artifact.score_model.get("sigma_i")
    detector = OTScoreDetector(ScoreModel.from_artifact(artifact),
                               sigma_i=sigma_i if sigma_i is not None else stored_sigma)
    baseline = None
    if artifact.baseline is not None:
        baseline = GaussianCusumDetector(
            artifact.baseline["sigma0"], artifact.baseline["sigma1"],
            sigma_i=artifact.baseline.get("sigma_i"),
        )
    return detector, baseline
