"""
Reproduzierbare Zufallsströme

Jeder Strom ist über (Seed, Versuchsindex, Rolle) adressiert und wird aus einer
numpy SeedSequence abgeleitet. Generator ist immer PCG64 (numpy default_rng).
Gleiche Schlüssel ergeben bitidentische Ströme, verschiedene Schlüssel sind
statistisch unabhängig.
"""
import numpy as np

# Feste Rollen-Codes, NICHT umnummerieren (sonst ändern sich alle Ergebnisse)
ROLES = {
    "plant": 0,            # Prozess- und Messrauschen der Strecke
    "attack": 1,           # Rauschen des Angreifers in Versuchen und simulate
    "training_nominal": 2,
    "training_attack": 3,  # Strecke und Ersatzangriff im Training
    "calibration": 4,      # nominale Ströme für Drift-Offset, Baseline-Sigma und h-Raster
    "evaluation": 5,       # Monte-Carlo-Versuche im Benchmark
    "tie": 6,              # Randomisierung bei Gleichstand im On-Support-Test
}


def make_rng(seed: int, trial: int = 0, role: str = "plant") -> np.random.Generator:
    """
    Erzeugt einen unabhängigen Generator für (seed, trial, role).

    Args:
        seed: Globaler Seed des Laufs
        trial: Index des Monte-Carlo-Versuchs (0 für Einzelläufe)
        role: Verwendungszweck, siehe ROLES

    Returns:
        numpy Generator (PCG64)
    """
    if role not in ROLES:
        raise ValueError(f"Unbekannte Rolle für Zufallsstrom: {role}")
    if seed < 0 or trial < 0:
        raise ValueError("Seed und Versuchsindex müssen nichtnegativ sein")
    sequence = np.random.SeedSequence([int(seed), int(trial), ROLES[role]])
    return np.random.Generator(np.random.PCG64(sequence))
