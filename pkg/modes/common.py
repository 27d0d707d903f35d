"""
Gemeinsame Hilfen der Kommandos: Konfiguration zusammenführen, Ausgabepfade,
Trainingsdaten aus CSV-Dateien
"""
from pathlib import Path
from typing import Any, Dict, Optional

import click
import numpy as np

from robust.wcd import TrainingSet
from systems.simulation import read_residual_csv
from utils.config import config_digest, merge_config, resolve_output_dir
from utils.errors import ConfigError
from utils.files import write_meta


class RunContext:
    """Effektive Konfiguration eines Kommandos mit Ausgabeverzeichnis und Digest"""

    def __init__(self, ctx: click.Context, command: str, overrides: Dict[str, Dict[str, Any]]):
        """
        Args:
            ctx: click-Kontext der Gruppe (enthält Dateikonfiguration und --output-dir)
            command: Name des Kommandos
            overrides: Werte aus den Kommandozeilen-Optionen (None = nicht gesetzt)
        """
        root = ctx.find_root().obj or {}
        file_config = root.get("file_config", {})
        self.command = command
        self.config = merge_config(file_config, overrides)
        self.output_dir = resolve_output_dir(root.get("output_dir"), self.config)
        self.digest = config_digest({"command": command, "config": self.config})

    @property
    def seed(self) -> int:
        return int(self.config["run"]["seed"])

    def section(self, name: str) -> Dict[str, Any]:
        return self.config.get(name, {})

    def output_path(self, out: Optional[str], default: str) -> Path:
        """Ausgabedatei; relative Pfade liegen im Ausgabeverzeichnis"""
        return self.output_dir / (out or default)

    def meta(self, path: Path, **extra: Any) -> Path:
        return write_meta(path, self.seed, self.digest, self.command, **extra)

    def metadata(self) -> Dict[str, Any]:
        return {"seed": self.seed, "config_digest": self.digest, "command": self.command}

    def lp_options(self) -> Dict[str, Any]:
        lp = self.section("lp")
        return {
            "method": str(lp["method"]),
            "tol": float(lp["tol"]),
            "max_iters": int(lp["max_iters"]),
            "auto_threshold": int(lp["auto_threshold"]),
        }


def training_set_from_csv(nominal_csv: Optional[str], attacked_csv: Optional[str]) -> Optional[TrainingSet]:
    """
    Trainingsdaten aus zwei Residuen-CSVs.

    X1 = alle Zeilen der nominalen Datei, X2 = die angegriffenen Zeilen der
    zweiten Datei (alle Zeilen, wenn sie keine Regime-Markierung trägt).

    Returns:
        TrainingSet oder None, wenn keine Datei angegeben ist
    """
    if nominal_csv is None and attacked_csv is None:
        return None
    if nominal_csv is None or attacked_csv is None:
        raise ConfigError("--nominal-csv und --attacked-csv nur gemeinsam angeben")
    nominal = read_residual_csv(nominal_csv)
    attacked = read_residual_csv(attacked_csv)
    X2 = attacked.samples if attacked.t_attack is None else attacked.samples[attacked.t_attack:]
    if X2.shape[0] == 0:
        raise ConfigError(f"{attacked_csv} enthält keine Residuen unter Angriff")
    return TrainingSet(np.asarray(nominal.samples), X2)
