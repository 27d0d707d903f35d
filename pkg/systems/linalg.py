"""
Spektralradius und stationäre Beobachterverstärkung (Riccati-Iteration)
"""
import logging

import numpy as np

from utils.errors import ConvergenceError, DimensionError, NumericalError
from .models import NoiseModel, ObserverGain, SystemModel

logger = logging.getLogger(__name__)

RIDGE = 1e-9


def spectral_radius(M) -> float:
    """
    Betragsgrößter Eigenwert einer quadratischen Matrix.

    Args:
        M: Quadratische, endliche Matrix

    Returns:
        max |λ_i(M)|
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"Spektralradius braucht eine quadratische Matrix, Form {M.shape}")
    if M.size == 0:
        return 0.0
    if not np.all(np.isfinite(M)):
        raise NumericalError("Matrix enthält NaN oder Inf")
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def steady_state_gain(
    model: SystemModel,
    Qw,
    Rv,
    tol: float = 1e-10,
    max_iter: int = 100_000
) -> ObserverGain:
    """
    Stationäre Kalman-Verstärkung über die diskrete Riccati-Rekursion.

    Iteriert P <- A P A^T - A P C^T (C P C^T + Rv)^-1 C P A^T + Qw, bis sich
    aufeinanderfolgende Iterierte in der Maximumnorm um höchstens tol
    unterscheiden, und liefert L = A P C^T (C P C^T + Rv)^-1.

    Args:
        model: Strecke (A, C werden verwendet)
        Qw: Kovarianz des Prozessrauschens (d_x × d_x)
        Rv: Kovarianz des Messrauschens (d_y × d_y)
        tol: Abbruchtoleranz (> 0)
        max_iter: Maximale Anzahl Iterationen

    Returns:
        ObserverGain mit Spektralradius(A - L C) < 1
    """
    if tol <= 0:
        raise ValueError("tol muss positiv sein")
    A, C = model.A, model.C
    Qw = np.asarray(Qw, dtype=float)
    Rv = np.asarray(Rv, dtype=float)
    if Qw.shape != (model.d_x, model.d_x):
        raise DimensionError(f"Qw braucht Form {(model.d_x, model.d_x)}, hat {Qw.shape}")
    if Rv.shape != (model.d_y, model.d_y):
        raise DimensionError(f"Rv braucht Form {(model.d_y, model.d_y)}, hat {Rv.shape}")

    P = Qw.copy()
    for iteration in range(1, max_iter + 1):
        S = C @ P @ C.T + Rv
        try:
            K = np.linalg.solve(S, C @ P @ A.T).T  # = A P C^T S^-1
        except np.linalg.LinAlgError as exc:
            raise NumericalError("Innovationskovarianz C P C^T + Rv ist singulär") from exc
        P_next = A @ P @ A.T - K @ C @ P @ A.T + Qw
        P_next = 0.5 * (P_next + P_next.T)
        if not np.all(np.isfinite(P_next)):
            raise ConvergenceError("Riccati-Iteration divergiert")
        delta = np.max(np.abs(P_next - P))
        P = P_next
        if delta <= tol:
            logger.debug("Riccati-Iteration nach %d Schritten konvergiert (Δ=%.2e)", iteration, delta)
            break
    else:
        raise ConvergenceError(f"Riccati-Iteration nach {max_iter} Schritten nicht konvergiert")

    S = C @ P @ C.T + Rv
    try:
        L = np.linalg.solve(S, C @ P @ A.T).T
    except np.linalg.LinAlgError as exc:
        raise NumericalError("Innovationskovarianz C P C^T + Rv ist singulär") from exc

    rho = spectral_radius(A - L @ C)
    if rho >= 1.0:
        raise ConvergenceError(f"Beobachter nicht stabil: Spektralradius(A - L C) = {rho:.6f}")
    return ObserverGain(L)


def default_observer_gain(model: SystemModel, noise: NoiseModel) -> ObserverGain:
    """
    Beobachter aus der Rauschkovarianz: Qw = E cov E^T, Rv = F cov F^T + 1e-9 I
    """
    if noise.dim != model.d_w:
        raise DimensionError(f"Rauschdimension {noise.dim} passt nicht zu d_w = {model.d_w}")
    Qw = model.E @ noise.cov @ model.E.T
    Rv = model.F @ noise.cov @ model.F.T + RIDGE * np.eye(model.d_y)
    return steady_state_gain(model, Qw, Rv)
