"""
Einheitliche Schnittstelle für die LP-Verfahren

    simplex - eigener revidierter Simplex (Standard)
    highs   - scipy.optimize.linprog mit HiGHS für große Instanzen
"""
import logging

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from utils.errors import SolverError
from .check import check_solution
from .problem import LinearProgram, LpSolution
from .simplex import simplex_solve

logger = logging.getLogger(__name__)

METHODS = ("simplex", "highs")

# linprog-Statuscodes -> LpSolution.status
_HIGHS_STATUS = {
    0: "optimal",
    1: "iteration_limit",
    2: "infeasible",
    3: "unbounded",
}


def solve(
    lp: LinearProgram,
    tol: float = 1e-8,
    max_iters: int = 1_000_000,
    method: str = "simplex"
) -> LpSolution:
    """
    Löst ein lineares Programm.

    Args:
        lp: Lineares Programm
        tol: Toleranz für Zulässigkeit und Optimalität (> 0)
        max_iters: Maximale Iterationen
        method: "simplex" oder "highs"

    Returns:
        LpSolution (Status optimal, infeasible, unbounded oder iteration_limit)
    """
    if tol <= 0:
        raise ValueError("tol muss positiv sein")
    if method == "simplex":
        solution = simplex_solve(lp, tol=tol, max_iters=max_iters)
    elif method == "highs":
        solution = _solve_highs(lp, tol, max_iters)
    else:
        raise ValueError(f"Unbekanntes LP-Verfahren '{method}', erlaubt: {METHODS}")

    logger.debug("LP %dx%d mit %s: %s, Ziel %.10g, Unzulässigkeit %.2e",
                 lp.n_rows, lp.n_vars, method, solution.status,
                 solution.objective_value, solution.max_primal_infeasibility)
    return solution


def _solve_highs(lp: LinearProgram, tol: float, max_iters: int) -> LpSolution:
    relations = np.array(lp.relations, dtype=object)
    A = lp.A
    le = np.flatnonzero(relations == "<=")
    ge = np.flatnonzero(relations == ">=")
    eq = np.flatnonzero(relations == "=")

    # >=-Zeilen werden negiert als <=-Zeilen übergeben
    A_ub = sp.vstack([A[le], -A[ge]], format="csr") if le.size + ge.size else None
    b_ub = np.concatenate([lp.rhs[le], -lp.rhs[ge]]) if A_ub is not None else None
    A_eq = A[eq] if eq.size else None
    b_eq = lp.rhs[eq] if eq.size else None
    bounds = [
        (None if np.isinf(low) else low, None if np.isinf(high) else high)
        for low, high in zip(lp.lower.tolist(), lp.upper.tolist())
    ]
    cost = -lp.objective if lp.maximize else lp.objective

    result = linprog(
        cost,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
        options={
            "maxiter": int(max_iters),
            "primal_feasibility_tolerance": tol,
            "dual_feasibility_tolerance": tol,
        },
    )
    if result.status not in _HIGHS_STATUS:
        raise SolverError(f"HiGHS meldet Status {result.status}: {result.message}")

    status = _HIGHS_STATUS[result.status]
    x = np.zeros(lp.n_vars) if result.x is None else np.clip(result.x, lp.lower, lp.upper)
    report = check_solution(lp, x, tol)
    return LpSolution(
        status=status,
        x=x,
        objective_value=lp.objective_value(x),
        max_primal_infeasibility=report.max_violation,
        iterations=int(getattr(result, "nit", 0) or 0),
        method="highs",
    )
