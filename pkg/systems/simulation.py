"""
Simulation von Strecke und Beobachter - nominal und unter Täuschungsangriff

Der Regler ist u_t = 0: die Residuendynamik hängt nicht von u ab (der Beobachter
kompensiert B u exakt) und die Benchmark-Strecke ist bereits Schur-stabil.
"""
import logging
from typing import Optional

import numpy as np
import pandas as pd

from utils.errors import DataFormatError, DimensionError, ValidationError
from .linalg import spectral_radius
from .models import AttackModel, NoiseModel, ObserverGain, ResidualStream, SystemModel
from .noise import sample_noise_sequence

logger = logging.getLogger(__name__)


def _check_observer(model: SystemModel, L: ObserverGain, noise: NoiseModel, horizon: int) -> None:
    if L.L.shape != (model.d_x, model.d_y):
        raise DimensionError(f"L braucht Form {(model.d_x, model.d_y)}, hat {L.L.shape}")
    if noise.dim != model.d_w:
        raise DimensionError(f"Rauschdimension {noise.dim} passt nicht zu d_w = {model.d_w}")
    if int(horizon) != horizon or horizon < 1:
        raise ValidationError(f"horizon muss >= 1 sein, ist {horizon}")
    rho = spectral_radius(model.A - L.L @ model.C)
    if rho >= 1.0:
        raise ValidationError(f"Beobachter instabil: Spektralradius(A - L C) = {rho:.6f} >= 1")


def _run(
    model: SystemModel,
    L: ObserverGain,
    noise: NoiseModel,
    horizon: int,
    rng: np.random.Generator,
    attack: Optional[AttackModel],
    attack_rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    A, C, E, F, gain = model.A, model.C, model.E, model.F, L.L
    # Strecken-Rauschen immer zuerst und für den vollen Horizont ziehen, damit
    # der Teil vor dem Angriff mit dem nominalen Lauf übereinstimmt
    W = sample_noise_sequence(noise, model.d_w, horizon, rng)

    t_attack = horizon if attack is None else min(attack.t_attack, horizon)
    n_attacked = horizon - t_attack
    if attack is not None and n_attacked > 0:
        source = rng if attack_rng is None else attack_rng
        V_hat = sample_noise_sequence(attack.noise, model.d_y, n_attacked, source)
    else:
        V_hat = None

    x = model.x0.copy()
    xhat = model.xhat0.copy()
    v = np.zeros(model.d_y)
    residuals = np.empty((horizon, model.d_y))

    for t in range(horizon):
        w = W[t]
        y = C @ x + F @ w
        if t >= t_attack:
            # v_{t_attack - 1} = 0, der Angreifer ersetzt die Messung vollständig
            v = attack.Aa @ v + V_hat[t - t_attack]
            y = v
        r = y - C @ xhat
        residuals[t] = r
        xhat = A @ xhat + gain @ r
        x = A @ x + E @ w

    return residuals


def simulate_nominal(
    model: SystemModel,
    L: ObserverGain,
    noise: NoiseModel,
    horizon: int,
    rng: np.random.Generator
) -> ResidualStream:
    """
    Simuliert den geschlossenen Kreis ohne Angriff.

    Args:
        model: Strecke
        L: Beobachterverstärkung (Spektralradius(A - L C) < 1)
        noise: Verteilung von w_t
        horizon: Anzahl Zeitschritte (>= 1)
        rng: Zufallsgenerator

    Returns:
        ResidualStream mit r_t = y_t - C x̂_t für t = 0..horizon-1
    """
    _check_observer(model, L, noise, horizon)
    residuals = _run(model, L, noise, horizon, rng, attack=None)
    return ResidualStream(residuals, "nominal")


def simulate_attacked(
    model: SystemModel,
    L: ObserverGain,
    noise: NoiseModel,
    attack: AttackModel,
    horizon: int,
    rng: np.random.Generator,
    attack_rng: Optional[np.random.Generator] = None
) -> ResidualStream:
    """
    Simuliert den geschlossenen Kreis mit Täuschungsangriff.

    Vor t_attack identisch zu simulate_nominal (gleicher Generatorzustand
    vorausgesetzt). Ab t_attack sieht der Beobachter statt y_t die Ausgabe
    v_t = Aa v_{t-1} + v̂_t des Angreifers. v̂ kommt aus attack_rng, sonst
    aus rng nach dem Strecken-Rauschen.

    Args:
        model: Strecke
        L: Beobachterverstärkung
        noise: Verteilung von w_t
        attack: Angriffsmodell
        horizon: Anzahl Zeitschritte
        rng: Zufallsgenerator der Strecke
        attack_rng: Eigener Generator für das Angreifer-Rauschen (Rolle "attack")

    Returns:
        ResidualStream mit Regime "attacked"
    """
    _check_observer(model, L, noise, horizon)
    if attack.d_y != model.d_y:
        raise DimensionError(f"Angriff hat Dimension {attack.d_y}, Strecke d_y = {model.d_y}")
    residuals = _run(model, L, noise, horizon, rng, attack=attack, attack_rng=attack_rng)
    if attack.t_attack >= horizon:
        logger.debug("Angriff startet bei %d, Horizont %d - Angriff wird nicht aktiv", attack.t_attack, horizon)
    return ResidualStream(residuals, "attacked", t_attack=attack.t_attack)


def residual_frame(stream: ResidualStream) -> pd.DataFrame:
    """Residuen als DataFrame mit Spalten t, r1..r{d_y}, regime"""
    frame = pd.DataFrame(stream.samples, columns=[f"r{i + 1}" for i in range(stream.d_y)])
    frame.insert(0, "t", np.arange(stream.horizon))
    frame["regime"] = stream.row_regimes()
    return frame


def write_residual_csv(stream: ResidualStream, path) -> None:
    """Schreibt die Residuen als CSV (Kopfzeile t,r1,...,r{d_y},regime)"""
    residual_frame(stream).to_csv(path, index=False, lineterminator="\n")


def read_residual_csv(path) -> ResidualStream:
    """
    Liest eine Residuen-CSV.

    Fehlerhafte Zeilen werden mit Zeilennummer (1-basiert, Kopfzeile = 1)
    gemeldet.

    Returns:
        ResidualStream; Regime "attacked", sobald eine Zeile attacked ist
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.ParserError as exc:
        raise DataFormatError(f"CSV nicht lesbar: {exc}", path=str(path)) from exc
    except pd.errors.EmptyDataError as exc:
        raise DataFormatError("CSV ist leer", path=str(path)) from exc

    columns = list(frame.columns)
    value_columns = [c for c in columns if c.startswith("r") and c[1:].isdigit()]
    expected = ["t"] + [f"r{i + 1}" for i in range(len(value_columns))] + ["regime"]
    if not value_columns or columns != expected:
        raise DataFormatError(f"Kopfzeile {columns} entspricht nicht t,r1,...,r<d>,regime", path=str(path), line=1)

    numeric = frame[["t"] + value_columns].apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().any(axis=1) | ~np.isfinite(numeric.to_numpy(dtype=float)).all(axis=1)
    bad = bad | ~frame["regime"].isin(["nominal", "attacked"])
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise DataFormatError(f"Ungültige Werte: {frame.iloc[row].tolist()}", path=str(path), line=row + 2)

    times = numeric["t"].to_numpy()
    if not np.array_equal(times, np.arange(len(frame))):
        row = int(np.flatnonzero(times != np.arange(len(frame)))[0])
        raise DataFormatError("Zeitindex t muss bei 0 beginnen und lückenlos sein", path=str(path), line=row + 2)

    samples = numeric[value_columns].to_numpy(dtype=float)
    attacked = np.flatnonzero(frame["regime"].to_numpy() == "attacked")
    if attacked.size:
        return ResidualStream(samples, "attacked", t_attack=int(attacked[0]))
    return ResidualStream(samples, "nominal")
