"""
Szenarien für den Benchmark: Vier-Tank-System mit Täuschungsangriff

Presets:
    qtank-gauss-<σ_a>  v̂_t ~ N(0, σ_a I)              σ_a in {0.5, 1.5, 2.5}
    qtank-gexp-<λ>     v̂_t ~ N(0, 0.05 I) + Exp(λ)     λ in {0.5, 1.5}
"""
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional

import numpy as np

from systems.linalg import default_observer_gain
from systems.models import (
    AttackModel, NoiseModel, ObserverGain, SystemModel,
    attack_from_dict, noise_from_dict, system_from_dict
)
from utils.config import config_digest
from utils.errors import ConfigError, ValidationError

# Linearisiertes Vier-Tank-System
QTANK_A = [
    [0.968, 0.0, 0.082, 0.0],
    [0.0, 0.978, 0.0, 0.064],
    [0.0, 0.0, 0.917, 0.0],
    [0.0, 0.0, 0.0, 0.935],
]
QTANK_B = [
    [0.164, 0.004],
    [0.002, 0.124],
    [0.0, 0.092],
    [0.06, 0.0],
]
PROCESS_VARIANCE = 0.1
MEASUREMENT_VARIANCE = 0.05
GEXP_ATTACK_VARIANCE = 0.05
ATTACK_GAIN = 0.5
T_ATTACK = 250

# Erlaubte Werte der Originalexperimente (andere nur mit custom=True)
GAUSS_LEVELS = (0.5, 1.5, 2.5)
GEXP_RATES = (0.5, 1.5)

# Radien und Stichprobengrößen je Angriffsvariante
TABLE_PARAMETERS = {
    "gaussian": {"eps1": 0.001, "eps2": 0.001, "n1": 150, "n2": 150},
    "gaussian_exp": {"eps1": 0.001, "eps2": 0.01, "n1": 150, "n2": 150},
}

PRESETS = {
    "qtank-gauss-0.5": ("gaussian", 0.5),
    "qtank-gauss-1.5": ("gaussian", 1.5),
    "qtank-gauss-2.5": ("gaussian", 2.5),
    "qtank-gexp-0.5": ("gaussian_exp", 0.5),
    "qtank-gexp-1.5": ("gaussian_exp", 1.5),
}


@dataclass(frozen=True)
class TrainingParams:
    """Parameter für Training und Score-Modell"""
    n1: int
    n2: int
    eps1: float
    eps2: float
    bandwidth: float = 0.5
    clip: Optional[float] = 2.0
    margin: float = 0.05
    burn_in: int = 200
    n_calibration: int = 2000
    knn: Optional[int] = None

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValidationError(f"n1 und n2 müssen >= 1 sein ({self.n1}, {self.n2})")
        if not self.eps1 > 0 or not self.eps2 > 0:
            raise ValidationError(f"eps1 und eps2 müssen positiv sein ({self.eps1}, {self.eps2})")
        if not self.bandwidth > 0:
            raise ValidationError("bandwidth muss positiv sein")
        if self.clip is not None and not self.clip > 0:
            raise ValidationError("clip muss positiv sein (oder None)")
        if self.margin < 0 or self.burn_in < 0 or self.n_calibration < 1:
            raise ValidationError("margin, burn_in >= 0 und n_calibration >= 1 erwartet")
        if self.knn is not None and self.knn < 1:
            raise ValidationError("knn muss >= 1 sein")


@dataclass(frozen=True, eq=False)
class Scenario:
    """
    Vollständige Beschreibung eines Experiments: Strecke, Beobachter,
    Rauschen, Angriff (Auswertung und Training), Trainingsparameter
    """
    name: str
    system: SystemModel
    observer: ObserverGain
    nominal_noise: NoiseModel
    attack: AttackModel
    surrogate_attack: AttackModel
    training: TrainingParams
    horizon: int = 1000
    seed: int = 2

    def __post_init__(self):
        if self.horizon < 1:
            raise ValidationError("horizon muss >= 1 sein")
        if self.attack.t_attack >= self.horizon:
            raise ValidationError(f"t_attack ({self.attack.t_attack}) muss kleiner als horizon ({self.horizon}) sein")
        if self.seed < 0:
            raise ValidationError("seed muss nichtnegativ sein")

    @property
    def t_attack(self) -> int:
        return self.attack.t_attack

    def with_overrides(self, **changes) -> "Scenario":
        """Kopie mit geänderten Feldern; Trainingsparameter als training_<name>"""
        training_changes = {key[len("training_"):]: value for key, value in changes.items()
                            if key.startswith("training_")}
        other = {key: value for key, value in changes.items() if not key.startswith("training_")}
        training = replace(self.training, **training_changes) if training_changes else self.training
        return replace(self, training=training, **other)


def _plant(process_variance: float, measurement_variance: float):
    # w_t = (Prozessrauschen, Messrauschen) in R^8, E = [I 0], F = [0 I]
    identity = np.eye(4)
    zeros = np.zeros((4, 4))
    system = SystemModel(
        A=QTANK_A,
        B=QTANK_B,
        C=identity,
        E=np.hstack([identity, zeros]),
        F=np.hstack([zeros, identity]),
    )
    cov = np.block([
        [process_variance * identity, zeros],
        [zeros, measurement_variance * identity],
    ])
    return system, NoiseModel.gaussian(cov)


def attack_noise(variant: str, value: float) -> NoiseModel:
    """Rauschen des Angreifers für eine Variante"""
    if variant == "gaussian":
        return NoiseModel.gaussian(value * np.eye(4))
    if variant == "gaussian_exp":
        return NoiseModel.gaussian_plus_exp(GEXP_ATTACK_VARIANCE * np.eye(4), rate=value)
    raise ConfigError(f"Unbekannte Angriffsvariante '{variant}', erlaubt: gaussian, gaussian_exp")


def quadruple_tank_scenario(
    variant: str,
    value: float,
    custom: bool = False,
    seed: int = 2,
    horizon: int = 1000,
    t_attack: int = T_ATTACK
) -> Scenario:
    """
    Vier-Tank-Szenario mit den Parametern der Originalexperimente.

    Args:
        variant: "gaussian" (value = σ_a) oder "gaussian_exp" (value = λ)
        value: Varianzfaktor bzw. Rate
        custom: Andere Werte als die Originalexperimente zulassen
        seed: Globaler Seed
        horizon: Simulationsdauer je Versuch
        t_attack: Angriffsbeginn

    Returns:
        Scenario
    """
    allowed = GAUSS_LEVELS if variant == "gaussian" else GEXP_RATES
    if variant in TABLE_PARAMETERS and not custom and value not in allowed:
        raise ConfigError(f"{variant}({value}) ist kein Preset-Wert (erlaubt {allowed}); custom=True verwenden")

    system, noise = _plant(PROCESS_VARIANCE, MEASUREMENT_VARIANCE)
    observer = default_observer_gain(system, noise)
    attack = AttackModel(ATTACK_GAIN * np.eye(4), attack_noise(variant, value), t_attack)
    table = TABLE_PARAMETERS[variant]
    prefix = "gauss" if variant == "gaussian" else "gexp"
    return Scenario(
        name=f"qtank-{prefix}-{value:g}",
        system=system,
        observer=observer,
        nominal_noise=noise,
        attack=attack,
        surrogate_attack=attack,
        training=TrainingParams(**table),
        horizon=horizon,
        seed=seed,
    )


def get_preset(name: str, **kwargs) -> Scenario:
    """Szenario über den Preset-Namen; unbekannte Namen -> ConfigError mit Liste"""
    if name not in PRESETS:
        raise ConfigError(f"Unbekanntes Preset '{name}'. Verfügbar: {', '.join(sorted(PRESETS))}")
    variant, value = PRESETS[name]
    return quadruple_tank_scenario(variant, value, **kwargs)


def _attack_to_dict(attack: AttackModel) -> Dict[str, Any]:
    return {
        "Aa": attack.Aa.tolist(),
        "variant": attack.noise.variant,
        "cov": attack.noise.cov.tolist(),
        "rate": attack.noise.rate,
        "t_attack": attack.t_attack,
        "mode": attack.mode,
    }


def scenario_to_dict(sc: Scenario) -> Dict[str, Any]:
    """Vollständige, JSON-fähige Beschreibung (Grundlage des Digests)"""
    system = sc.system
    return {
        "name": sc.name,
        "system": {key: getattr(system, key).tolist() for key in ("A", "B", "C", "E", "F", "x0", "xhat0")},
        "observer": sc.observer.L.tolist(),
        "noise": {"variant": sc.nominal_noise.variant, "cov": sc.nominal_noise.cov.tolist(),
                  "rate": sc.nominal_noise.rate},
        "attack": _attack_to_dict(sc.attack),
        "surrogate_attack": _attack_to_dict(sc.surrogate_attack),
        "training": asdict(sc.training),
        "horizon": sc.horizon,
        "seed": sc.seed,
    }


def scenario_digest(sc: Scenario) -> str:
    return config_digest(scenario_to_dict(sc))


def _training_overrides(section: Dict[str, Any]) -> Dict[str, Any]:
    overrides = {}
    for key in ("n1", "n2", "burn_in", "n_calibration", "knn"):
        if section.get(key) is not None:
            overrides[key] = int(section[key])
    for key in ("eps1", "eps2", "bandwidth", "margin"):
        if section.get(key) is not None:
            overrides[key] = float(section[key])
    if "clip" in section and section["clip"] is not None:
        # clip = 0 oder false schaltet das Clipping ab
        overrides["clip"] = float(section["clip"]) if section["clip"] else None
    return overrides


def scenario_from_config(config: Dict[str, Any]) -> Scenario:
    """
    Szenario aus einer zusammengeführten Konfiguration.

    Mit [system]-Abschnitt wird ein eigenes Szenario gebaut ([noise], [attack],
    [training] mit n1, n2, eps1, eps2 sind dann Pflicht), sonst das Preset aus
    [run] preset mit Überschreibungen.
    """
    run = config.get("run", {})
    bench = config.get("bench", {})
    training = config.get("training", {})
    seed = int(run.get("seed", 2))
    horizon = int(bench.get("horizon", 1000))

    try:
        if "system" in config:
            for section in ("noise", "attack"):
                if section not in config:
                    raise ConfigError(f"Eigenes Szenario braucht den Abschnitt [{section}]")
            system = system_from_dict(config["system"])
            noise = noise_from_dict(config["noise"])
            attack = attack_from_dict(config["attack"])
            surrogate = attack_from_dict(config["surrogate_attack"]) if "surrogate_attack" in config else attack
            params = _training_overrides(training)
            missing = [key for key in ("n1", "n2", "eps1", "eps2") if key not in params]
            if missing:
                raise ConfigError(f"[training] braucht {', '.join(missing)}")
            return Scenario(
                name=str(run.get("name", "custom")),
                system=system,
                observer=default_observer_gain(system, noise),
                nominal_noise=noise,
                attack=attack,
                surrogate_attack=surrogate,
                training=TrainingParams(**params),
                horizon=horizon,
                seed=seed,
            )

        preset = run.get("preset", "qtank-gauss-1.5")
        scenario = get_preset(preset, seed=seed, horizon=horizon)
        overrides = {f"training_{key}": value for key, value in _training_overrides(training).items()}
        return scenario.with_overrides(**overrides) if overrides else scenario
    except (ValidationError, TypeError) as exc:
        raise ConfigError(f"Ungültiges Szenario: {exc}") from exc
