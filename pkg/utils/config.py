"""
Konfiguration und Hilfetexte für den OT-Detektor

Reihenfolge der Quellen (höchste zuerst):
1. Kommandozeilen-Option
2. Wert aus der Konfigurationsdatei (TOML)
3. Wert des gewählten Presets
4. Eingebaute Defaults (DEFAULTS)
"""
import copy
import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

import toml

from .errors import ConfigError, DataFormatError

OUTPUT_DIR_ENV = "OTDETECT_OUTPUT_DIR"

# Eingebaute Defaults, gruppiert wie die Abschnitte der Konfigurationsdatei
DEFAULTS: Dict[str, Dict[str, Any]] = {
    "run": {
        "seed": 2,
        "preset": "qtank-gauss-1.5",
        "output_dir": ".",
    },
    "training": {
        "burn_in": 200,
        "n_calibration": 2000,
        "clip": 2.0,
        "margin": 0.05,
        "knn": None,
    },
    "detector": {
        "eta": None,
        "h": None,
        "sigma_i": None,
    },
    "bench": {
        "trials": 200,
        "h_grid": "auto",
        "horizon": 1000,
        "workers": 1,
        "calibration_streams": 1000,
        "detector": "both",
    },
    "lp": {
        "method": "auto",
        "tol": 1e-8,
        "max_iters": 1_000_000,
        "auto_threshold": 20_000,
    },
}

# Hilfetexte für die CLI-Optionen
HELP_TEXTS = {
    "config": "TOML-Konfigurationsdatei. Kommandozeilen-Optionen überschreiben Werte daraus.",
    "verbose": "Ausführliche Log-Ausgabe (DEBUG).",
    "output_dir": f"Ausgabeverzeichnis (Default: ${OUTPUT_DIR_ENV} oder aktuelles Verzeichnis).",
    "preset": "Szenario-Preset, z.B. qtank-gauss-1.5 oder qtank-gexp-0.5.",
    "seed": "Globaler Seed. Gleicher Seed + gleiche Konfiguration = identische Ausgaben.",
    "horizon": "Anzahl Zeitschritte der Simulation.",
    "regime": "nominal = ohne Angriff, attacked = Täuschungsangriff ab t_attack.",
    "nominal_csv": "Residuen-CSV mit nominalen Trainingsdaten (X1).",
    "attacked_csv": "Residuen-CSV mit Trainingsdaten unter Angriff (X2).",
    "eps1": "Wasserstein-Radius der nominalen Ambiguitätsmenge.",
    "eps2": "Wasserstein-Radius der Ambiguitätsmenge unter Angriff.",
    "n1": "Anzahl nominaler Trainingsresiduen.",
    "n2": "Anzahl Trainingsresiduen unter Angriff.",
    "model": "Modell-Artefakt (JSON) aus dem train-Kommando.",
    "residuals": "Residuen-CSV, die überwacht werden soll.",
    "h": "Fester Schwellwert h > 0 für die CUSUM-Statistik.",
    "eta": """Toleranz für Fehlalarme in (0, 1). Der Schwellwert wird über die
Tail-Schranke kalibriert: h = sqrt(8 * V_t * ln(2 / eta)).""",
    "sigma_i": "Sub-Gauß-Konstante pro Schritt (nur nötig ohne Clipping).",
    "trials": "Anzahl Monte-Carlo-Versuche pro Schwellwert.",
    "h_grid": """Schwellwerte für die ADD/FAR-Kurve: 'auto' (10 Quantile von max S auf nominalen
Strömen für FAR 0.5 bis 0.005), 'tail' (log-verteilt zwischen eta = 0.5 und eta = 1e-4)
oder kommagetrennte Liste.""",
    "calibration_streams": "Anzahl nominaler Ströme für das automatische Raster.",
    "detector": "both = OT-Detektor und Gauß-CUSUM-Baseline, ot-only = nur OT-Detektor.",
    "workers": "Anzahl paralleler Prozesse für die Monte-Carlo-Versuche.",
    "lp_method": "LP-Verfahren: simplex, highs oder auto (Simplex bis auto_threshold Variablen).",
    "out": "Ausgabedatei.",
}


def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    """
    Liest eine TOML-Konfigurationsdatei.

    Args:
        path: Pfad oder None (dann leere Konfiguration)

    Returns:
        Verschachteltes Dict {Abschnitt: {Schlüssel: Wert}}
    """
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = toml.load(f)
    except toml.TomlDecodeError as exc:
        raise DataFormatError(f"Ungültiges TOML: {exc.msg}", path=str(path), line=exc.lineno) from exc

    for section, values in data.items():
        if not isinstance(values, dict):
            raise ConfigError(f"Abschnitt [{section}] erwartet, Wert '{section}' gefunden")
    return data


def merge_config(*layers: Dict[str, Any]) -> Dict[str, Any]:
    """
    Führt Konfigurationsebenen zusammen (spätere Ebenen gewinnen).

    Werte None in einer späteren Ebene überschreiben nichts - so können
    nicht gesetzte CLI-Optionen direkt übergeben werden.
    """
    merged = copy.deepcopy(DEFAULTS)
    for layer in layers:
        for section, values in (layer or {}).items():
            target = merged.setdefault(section, {})
            for key, value in values.items():
                if value is not None:
                    target[key] = value
    return merged


def config_digest(config: Dict[str, Any]) -> str:
    """SHA-256 der kanonischen JSON-Darstellung"""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_to_jsonable)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def resolve_output_dir(cli_value: Optional[str], config: Dict[str, Any]) -> Path:
    """
    Ausgabeverzeichnis: Option > Konfigurationsdatei > Umgebungsvariable > Default.
    """
    file_value = config.get("run", {}).get("output_dir")
    if cli_value:
        directory = cli_value
    elif file_value and file_value != DEFAULTS["run"]["output_dir"]:
        directory = file_value
    else:
        directory = os.environ.get(OUTPUT_DIR_ENV, DEFAULTS["run"]["output_dir"])
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _to_jsonable(value: Any) -> Any:
    # numpy-Werte und Pfade für den Digest
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)
