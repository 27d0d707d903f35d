"""
Revidierter Simplex mit beschränkten Variablen (Zwei-Phasen-Verfahren)

Standardform: jede Zeile i bekommt eine logische Variable s_i mit
    a_i x + s_i = b_i
    <=  ->  s_i in [0, inf)
    >=  ->  s_i in (-inf, 0]
    =   ->  s_i in [0, 0]
Zeilen, deren Startwert nicht in die Schranken der logischen Variable passt,
bekommen eine künstliche Variable. Phase I minimiert deren Summe, Phase II
die eigentliche Zielfunktion. Die Basis wird in jeder Iteration mit SuperLU
neu faktorisiert.
"""
import logging
from enum import IntEnum

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from utils.errors import NumericalError
from .check import check_solution
from .problem import LinearProgram, LpSolution

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
DEGENERATE_STEP = 1e-12
# Nach so vielen degenerierten Pivots in Folge: Bland-Regel bis zum Ende
BLAND_AFTER = 500


class VarStatus(IntEnum):
    BASIC = 0
    AT_LOWER = 1
    AT_UPPER = 2
    FREE = 3


class _BasisFactor:
    """LU-Zerlegung der Basismatrix (auch für 0 Zeilen)"""

    def __init__(self, B: sp.csc_matrix):
        self.size = B.shape[0]
        self.lu = None
        if self.size:
            try:
                self.lu = splu(B.tocsc())
            except RuntimeError as exc:
                raise NumericalError(f"Basismatrix ist singulär: {exc}") from exc

    def solve(self, v: np.ndarray, trans: str = "N") -> np.ndarray:
        if not self.size:
            return np.zeros(0)
        return self.lu.solve(np.asarray(v, dtype=float), trans=trans)


class RevisedSimplex:
    """
    Zustand eines Simplex-Laufs auf einem LinearProgram.

    Args:
        lp: Lineares Programm
        tol: Zulässigkeits- und Optimalitätstoleranz
        max_iters: Maximale Anzahl Pivots über beide Phasen
    """

    def __init__(self, lp: LinearProgram, tol: float = 1e-8, max_iters: int = 1_000_000):
        if tol <= 0:
            raise ValueError("tol muss positiv sein")
        self.lp = lp
        self.tol = float(tol)
        self.max_iters = int(max_iters)
        self.iterations = 0
        self.bland = False
        self.degenerate_run = 0
        self.phase = 1

        m, n = lp.n_rows, lp.n_vars
        self.m, self.n = m, n
        relations = np.array(lp.relations, dtype=object)
        slack_lower = np.where(relations == ">=", -np.inf, 0.0)
        slack_upper = np.where(relations == "<=", np.inf, 0.0)

        # Startpunkt der Strukturvariablen: endliche untere, sonst obere Schranke, sonst 0
        x = np.zeros(n + m)
        status = np.full(n + m, VarStatus.AT_LOWER, dtype=np.int8)
        finite_lower = np.isfinite(lp.lower)
        finite_upper = np.isfinite(lp.upper)
        x[:n] = np.where(finite_lower, lp.lower, np.where(finite_upper, lp.upper, 0.0))
        status[:n] = np.where(finite_lower, VarStatus.AT_LOWER,
                              np.where(finite_upper, VarStatus.AT_UPPER, VarStatus.FREE))
        status[n:] = np.where(relations == ">=", VarStatus.AT_UPPER, VarStatus.AT_LOWER)

        residual = lp.rhs - lp.A @ x[:n]
        fits = (residual >= slack_lower) & (residual <= slack_upper)
        art_rows = np.flatnonzero(~fits)
        k = art_rows.size
        art_signs = np.where(residual[art_rows] >= 0, 1.0, -1.0)

        artificial = sp.csc_matrix((art_signs, (art_rows, np.arange(k))), shape=(m, k))
        self.M = sp.hstack([lp.A.tocsc(), sp.identity(m, format="csc"), artificial], format="csc")
        self.MT = self.M.T.tocsr()
        self.art_start = n + m
        self.n_art = k

        self.lower = np.concatenate([lp.lower, slack_lower, np.zeros(k)])
        self.upper = np.concatenate([lp.upper, slack_upper, np.full(k, np.inf)])
        self.b = np.array(lp.rhs, dtype=float)

        basis = n + np.arange(m)
        basis[art_rows] = self.art_start + np.arange(k)
        self.basis = basis
        self.x = np.concatenate([x, np.zeros(k)])
        self.status = np.concatenate([status, np.full(k, VarStatus.AT_LOWER, dtype=np.int8)])
        self.status[basis] = VarStatus.BASIC
        self.x[n + np.flatnonzero(fits)] = residual[fits]
        self.x[self.art_start:] = np.abs(residual[art_rows])

    def solve(self) -> LpSolution:
        lp = self.lp
        if self.n_art:
            logger.debug("Phase I mit %d künstlichen Variablen", self.n_art)
            cost = np.zeros(self.M.shape[1])
            cost[self.art_start:] = 1.0
            self.phase = 1
            outcome = self._iterate(cost)
            if outcome == "iteration_limit":
                return self._result(outcome)
            if outcome == "unbounded":
                raise NumericalError("Phase I meldet unbeschränkt - numerisches Problem")
            infeasibility = float(self.x[self.art_start:].sum())
            scale = max(1.0, float(np.max(np.abs(self.b)))) if self.m else 1.0
            if infeasibility > self.tol * scale:
                logger.debug("Phase I endet mit Unzulässigkeit %.3e", infeasibility)
                return self._result("infeasible")
            # Künstliche Variablen fixieren, sie werden nie wieder bepreist
            self.upper[self.art_start:] = 0.0

        self.phase = 2
        cost = np.zeros(self.M.shape[1])
        cost[:self.n] = -lp.objective if lp.maximize else lp.objective
        outcome = self._iterate(cost)
        logger.debug("Simplex beendet: %s nach %d Iterationen", outcome, self.iterations)
        return self._result(outcome)

    def _iterate(self, cost: np.ndarray) -> str:
        while True:
            factor = _BasisFactor(self.M[:, self.basis])
            self._update_basic_values(factor)
            if self.iterations >= self.max_iters:
                return "iteration_limit"

            y = factor.solve(cost[self.basis], trans="T")
            reduced = cost - self.MT @ y if self.m else cost.copy()
            entering, direction = self._price(reduced)
            if entering < 0:
                return "optimal"

            column = self.M[:, [entering]].toarray().ravel()
            w = factor.solve(column)
            step, position = self._ratio_test(w, direction, entering)
            if not np.isfinite(step):
                return "unbounded"
            self._pivot(entering, direction, step, position, w)
            self.iterations += 1

    def _update_basic_values(self, factor: _BasisFactor) -> None:
        nonbasic = self.x.copy()
        nonbasic[self.basis] = 0.0
        self.x[self.basis] = factor.solve(self.b - self.M @ nonbasic)

    def _price(self, reduced: np.ndarray):
        status = self.status
        movable = self.lower < self.upper
        improving = (
            ((status == VarStatus.AT_LOWER) & (reduced < -self.tol))
            | ((status == VarStatus.AT_UPPER) & (reduced > self.tol))
            | ((status == VarStatus.FREE) & (np.abs(reduced) > self.tol))
        ) & movable
        if self.phase == 2:
            improving[self.art_start:] = False
        candidates = np.flatnonzero(improving)
        if candidates.size == 0:
            return -1, 0
        if self.bland:
            entering = int(candidates[0])
        else:
            # Dantzig: größter Betrag der reduzierten Kosten
            entering = int(candidates[np.argmax(np.abs(reduced[candidates]))])
        direction = 1 if reduced[entering] < 0 else -1
        return entering, direction

    def _ratio_test(self, w: np.ndarray, direction: int, entering: int):
        flip = self.upper[entering] - self.lower[entering]
        if not self.m:
            return flip, -1

        delta = -direction * w
        basic = self.x[self.basis]
        lower = self.lower[self.basis]
        upper = self.upper[self.basis]
        ratios = np.full(self.m, np.inf)
        falling = delta < -PIVOT_TOL
        rising = delta > PIVOT_TOL
        with np.errstate(invalid="ignore"):
            ratios[falling] = (basic[falling] - lower[falling]) / -delta[falling]
            ratios[rising] = (upper[rising] - basic[rising]) / delta[rising]
        ratios = np.maximum(ratios, 0.0)

        best = float(ratios.min())
        if flip <= best:
            return flip, -1
        ties = np.flatnonzero(ratios <= best + DEGENERATE_STEP)
        if self.bland:
            position = int(ties[np.argmin(self.basis[ties])])
        else:
            position = int(ties[np.argmax(np.abs(delta[ties]))])
        return best, position

    def _pivot(self, entering: int, direction: int, step: float, position: int, w: np.ndarray) -> None:
        if position < 0:
            # Schrankentausch, Basis bleibt
            if direction > 0:
                self.x[entering] = self.upper[entering]
                self.status[entering] = VarStatus.AT_UPPER
            else:
                self.x[entering] = self.lower[entering]
                self.status[entering] = VarStatus.AT_LOWER
        else:
            leaving = self.basis[position]
            if -direction * w[position] < 0:
                self.x[leaving] = self.lower[leaving]
                self.status[leaving] = VarStatus.AT_LOWER
            else:
                self.x[leaving] = self.upper[leaving]
                self.status[leaving] = VarStatus.AT_UPPER
            self.x[entering] += direction * step
            self.basis[position] = entering
            self.status[entering] = VarStatus.BASIC

        if step <= DEGENERATE_STEP:
            self.degenerate_run += 1
            if not self.bland and self.degenerate_run >= BLAND_AFTER:
                self.bland = True
                logger.debug("%d degenerierte Pivots in Folge, wechsle auf Bland-Regel (Iteration %d)",
                             self.degenerate_run, self.iterations)
        else:
            self.degenerate_run = 0

    def _result(self, status: str) -> LpSolution:
        lp = self.lp
        x = np.clip(self.x[:self.n], lp.lower, lp.upper)
        report = check_solution(lp, x, self.tol)
        return LpSolution(
            status=status,
            x=x,
            objective_value=lp.objective_value(x),
            max_primal_infeasibility=report.max_violation,
            iterations=self.iterations,
            method="simplex",
        )


def simplex_solve(lp: LinearProgram, tol: float = 1e-8, max_iters: int = 1_000_000) -> LpSolution:
    """
    Löst ein LP mit dem revidierten Simplex.

    Args:
        lp: Lineares Programm
        tol: Toleranz (> 0)
        max_iters: Maximale Anzahl Pivots

    Returns:
        LpSolution; bei iteration_limit die letzte Iterierte
    """
    return RevisedSimplex(lp, tol, max_iters).solve()
