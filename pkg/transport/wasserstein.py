"""
1-Wasserstein-Distanz (exaktes Transport-LP) und Totalvariation
"""
import numpy as np
from scipy.spatial.distance import cdist

from lp.problem import LpBuilder
from lp.solver import solve
from utils.errors import DimensionError, SolverError, ValidationError
from .measures import DiscreteMeasure


def transport_lp(mu: DiscreteMeasure, nu: DiscreteMeasure):
    """
    Transport-LP  min sum_ij Γ_ij ||x_i - y_j||  mit Randverteilungen mu, nu.

    Variable Γ_ij hat den Index i * m + j.
    """
    n, m = mu.size, nu.size
    D = cdist(mu.support, nu.support, metric="euclidean")
    builder = LpBuilder(n * m, sense="minimize")
    builder.set_objective(np.arange(n * m), D.ravel())

    index = np.arange(n * m).reshape(n, m)
    builder.add_rows(np.repeat(np.arange(n), m), index.ravel(), 1.0, "=", mu.weights)
    builder.add_rows(np.tile(np.arange(m), n), index.ravel(), 1.0, "=", nu.weights)
    return builder.build()


def w1_distance(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    tol: float = 1e-10,
    method: str = "simplex"
) -> float:
    """
    Exakte 1-Wasserstein-Distanz mit euklidischen Kosten.

    Atome mit Gewicht 0 werden vorher entfernt.

    Args:
        mu: Erstes Maß
        nu: Zweites Maß (Träger darf verschieden sein)
        tol: LP-Toleranz
        method: LP-Verfahren

    Returns:
        W1(mu, nu) >= 0
    """
    if mu.dim != nu.dim:
        raise DimensionError(f"Maße haben Dimension {mu.dim} und {nu.dim}")
    mu = mu.positive()
    nu = nu.positive()
    solution = solve(transport_lp(mu, nu), tol=tol, method=method)
    if not solution.is_optimal:
        raise SolverError(f"Transport-LP nicht gelöst: {solution.status}")
    return max(0.0, solution.objective_value)


def tv_common_support(p, q) -> float:
    """
    Totalvariation zweier Gewichtsvektoren auf demselben Träger.

    Args:
        p: Gewichte auf dem Simplex
        q: Gewichte auf dem Simplex, gleiche Länge

    Returns:
        1 - sum_l min(p_l, q_l), in [0, 1]
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise DimensionError(f"Gewichtsvektoren haben Länge {p.size} und {q.size}")
    if np.any(p < 0) or np.any(q < 0):
        raise ValidationError("Gewichte müssen nichtnegativ sein")
    return float(np.clip(1.0 - np.minimum(p, q).sum(), 0.0, 1.0))


def pairwise_risk(p, q) -> float:
    """Minimales Testrisiko für ein festes Paar: 1 - TV(p, q)"""
    return 1.0 - tv_common_support(p, q)
