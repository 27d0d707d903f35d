"""
Modell-Artefakt: Worst-Case-Verteilungen plus Detektor-Parameter als JSON

Das Artefakt ist die Schnittstelle zwischen train und detect/bench. Beim Laden
wird es gegen MODEL_SCHEMA geprüft.
"""
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import jsonschema
import numpy as np

from utils.errors import DataFormatError
from utils.files import dumps_json
from .wcd import WcdSolution

ARTIFACT_VERSION = 1

_NUMBER_LIST = {"type": "array", "items": {"type": "number"}}
_NULLABLE_NUMBER = {"type": ["number", "null"]}

MODEL_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["version", "support", "p1", "p2", "V_star", "tv_star", "minmax_risk",
                 "eps1", "eps2", "bandwidth_hint", "score_model", "training", "metadata"],
    "properties": {
        "version": {"const": ARTIFACT_VERSION},
        "support": {"type": "array", "minItems": 2, "items": {**_NUMBER_LIST, "minItems": 1}},
        "p1": _NUMBER_LIST,
        "p2": _NUMBER_LIST,
        "phi": _NUMBER_LIST,
        "V_star": {"type": "number"},
        "tv_star": {"type": "number"},
        "minmax_risk": {"type": "number"},
        "eps1": {"type": "number", "minimum": 0},
        "eps2": {"type": "number", "minimum": 0},
        "bandwidth_hint": _NULLABLE_NUMBER,
        "score_model": {
            "type": "object",
            "required": ["bandwidth", "clip", "drift_offset", "knn_truncation", "sigma_i"],
            "properties": {
                "bandwidth": {"type": "number", "exclusiveMinimum": 0},
                "clip": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "drift_offset": {"type": "number", "maximum": 0},
                "knn_truncation": {"type": ["integer", "null"], "minimum": 1},
                "sigma_i": {"type": ["number", "null"], "exclusiveMinimum": 0},
            },
        },
        "baseline": {
            "type": ["object", "null"],
            "required": ["sigma0", "sigma1", "sigma_i"],
            "properties": {
                "sigma0": {"type": "array", "items": _NUMBER_LIST},
                "sigma1": {"type": "array", "items": _NUMBER_LIST},
                "sigma_i": _NULLABLE_NUMBER,
            },
        },
        "training": {
            "type": "object",
            "required": ["n1", "n2"],
            "properties": {
                "n1": {"type": "integer", "minimum": 1},
                "n2": {"type": "integer", "minimum": 1},
                "surrogate_attack": {"type": ["object", "null"]},
            },
        },
        "metadata": {
            "type": "object",
            "required": ["seed", "config_digest"],
            "properties": {
                "seed": {"type": ["integer", "null"]},
                "config_digest": {"type": "string"},
            },
        },
    },
}


@dataclass(eq=False)
class ModelArtifact:
    """Inhalt einer Modell-Datei"""
    support: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    V_star: float
    tv_star: float
    minmax_risk: float
    eps1: float
    eps2: float
    bandwidth_hint: Optional[float]
    score_model: Dict[str, Any]
    training: Dict[str, Any]
    metadata: Dict[str, Any]
    baseline: Optional[Dict[str, Any]] = None
    phi: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    @classmethod
    def from_solution(
        cls,
        solution: WcdSolution,
        score_model: Dict[str, Any],
        training: Dict[str, Any],
        metadata: Dict[str, Any],
        baseline: Optional[Dict[str, Any]] = None,
        bandwidth_hint: Optional[float] = None
    ) -> "ModelArtifact":
        return cls(
            support=np.asarray(solution.support),
            p1=np.asarray(solution.p1),
            p2=np.asarray(solution.p2),
            V_star=solution.V_star,
            tv_star=solution.tv_star,
            minmax_risk=solution.minmax_risk,
            eps1=solution.eps1,
            eps2=solution.eps2,
            bandwidth_hint=bandwidth_hint,
            score_model=dict(score_model),
            training=dict(training),
            metadata=dict(metadata),
            baseline=None if baseline is None else dict(baseline),
            phi=np.asarray(solution.phi),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "version": ARTIFACT_VERSION,
            "support": self.support,
            "p1": self.p1,
            "p2": self.p2,
            "V_star": self.V_star,
            "tv_star": self.tv_star,
            "minmax_risk": self.minmax_risk,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "bandwidth_hint": self.bandwidth_hint,
            "score_model": self.score_model,
            "baseline": self.baseline,
            "training": self.training,
            "metadata": self.metadata,
        }
        if self.phi is not None:
            data["phi"] = self.phi
        return data


def dumps_model(artifact: ModelArtifact) -> str:
    """JSON-Text des Artefakts (sortierte Schlüssel, byte-reproduzierbar)"""
    return dumps_json(artifact.to_dict())


def save_model(artifact: ModelArtifact, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_model(artifact))
    return path


def load_model(path) -> ModelArtifact:
    """
    Liest und validiert ein Modell-Artefakt.

    Raises:
        DataFormatError: bei ungültigem JSON oder Schemaverletzung
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"Ungültiges JSON: {exc.msg}", path=str(path), line=exc.lineno) from exc

    try:
        jsonschema.validate(data, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        location = "/".join(str(part) for part in exc.absolute_path) or "<root>"
        raise DataFormatError(f"Modell-Artefakt ungültig bei {location}: {exc.message}", path=str(path)) from exc

    try:
        support = np.array(data["support"], dtype=float)
    except ValueError as exc:
        raise DataFormatError("support-Punkte haben unterschiedliche Dimension", path=str(path)) from exc
    p1 = np.array(data["p1"], dtype=float)
    p2 = np.array(data["p2"], dtype=float)
    if support.ndim != 2 or p1.shape != (support.shape[0],) or p2.shape != (support.shape[0],):
        raise DataFormatError("support, p1 und p2 passen nicht zusammen", path=str(path))

    return ModelArtifact(
        support=support,
        p1=p1,
        p2=p2,
        V_star=float(data["V_star"]),
        tv_star=float(data["tv_star"]),
        minmax_risk=float(data["minmax_risk"]),
        eps1=float(data["eps1"]),
        eps2=float(data["eps2"]),
        bandwidth_hint=data["bandwidth_hint"],
        score_model=data["score_model"],
        training=data["training"],
        metadata=data["metadata"],
        baseline=data.get("baseline"),
        phi=np.array(data["phi"], dtype=float) if "phi" in data else None,
    )
