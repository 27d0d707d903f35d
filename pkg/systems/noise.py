"""
Ziehen von Rauschvektoren
"""
import numpy as np

from utils.errors import DimensionError
from .models import NoiseModel


def sample_noise(nm: NoiseModel, dim: int, rng: np.random.Generator) -> np.ndarray:
    """
    Zieht einen Rauschvektor.

    gaussian: N(0, cov). gaussian_plus_exp: zusätzlich unabhängig Exp(rate)
    auf jede Koordinate (nicht zentriert, Mittelwert 1/rate).

    Args:
        nm: Rauschmodell
        dim: Erwartete Dimension (muss zu cov passen)
        rng: Generator, Ergebnis ist durch dessen Zustand festgelegt

    Returns:
        Vektor der Länge dim
    """
    return sample_noise_sequence(nm, dim, 1, rng)[0]


def sample_noise_sequence(nm: NoiseModel, dim: int, horizon: int, rng: np.random.Generator) -> np.ndarray:
    """
    Zieht horizon Rauschvektoren auf einmal, Form (horizon, dim).

    Erst alle Gauß-Anteile, dann alle Exponential-Anteile - die Reihenfolge ist
    Teil des Reproduzierbarkeitsvertrags.
    """
    if dim != nm.dim:
        raise DimensionError(f"Rauschmodell hat Dimension {nm.dim}, angefordert {dim}")
    if horizon < 0:
        raise ValueError("horizon muss nichtnegativ sein")
    gaussian = rng.standard_normal((horizon, dim)) @ nm.factor.T
    if nm.variant == "gaussian_plus_exp":
        gaussian = gaussian + rng.exponential(1.0 / nm.rate, size=(horizon, dim))
    return gaussian
