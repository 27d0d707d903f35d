"""
Hilfsfunktionen für reproduzierbare Ausgabedateien
"""
import json
from pathlib import Path
from typing import Any, Dict

import numpy as np


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Nicht JSON-serialisierbar: {type(value).__name__}")


def dumps_json(data: Dict[str, Any]) -> str:
    """Deterministische JSON-Darstellung (sortierte Schlüssel, feste Einrückung)"""
    return json.dumps(data, sort_keys=True, indent=2, default=_jsonable) + "\n"


def write_json(path: Path, data: Dict[str, Any]) -> Path:
    """Schreibt JSON byte-reproduzierbar"""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_json(data))
    return path


def write_meta(path: Path, seed: int, digest: str, command: str, **extra: Any) -> Path:
    """
    Legt neben einer CSV-Datei die Metadaten-Datei <name>.meta.json an.

    Die CSV-Formate haben feste Kopfzeilen, deshalb stehen Seed und
    Konfigurations-Digest in der Begleitdatei. Zusätzliche Felder (etwa
    model_seed bei detect) werden mitgeschrieben.
    """
    path = Path(path)
    meta_path = path.with_name(path.name + ".meta.json")
    meta = {"seed": seed, "config_digest": digest, "command": command, "file": path.name, **extra}
    return write_json(meta_path, meta)
