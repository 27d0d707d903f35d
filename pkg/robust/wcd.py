"""
Worst-Case-Verteilungen (WCD) über zwei Wasserstein-Bällen

Die beiden Trainingsmengen werden auf einen gemeinsamen Träger s_1..s_n
gelegt (erst X1, dann X2). Gesucht sind p1, p2 auf diesem Träger mit
W1(Q_k, p_k) <= eps_k, die sum_l min(p1_l, p2_l) maximieren. Das ist ein
endliches LP in (p1, p2, Γ1, Γ2, t).
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from lp.problem import LinearProgram, LpBuilder
from lp.solver import solve
from transport.measures import CostMatrix, cost_matrix
from utils.errors import DimensionError, SolverError, ValidationError, WcdInternalError

logger = logging.getLogger(__name__)

TIE_TOL = 1e-9
AUTO_THRESHOLD = 20_000


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Nominale Residuen X1 (n1 × d) und Residuen unter Angriff X2 (n2 × d)"""
    X1: np.ndarray
    X2: np.ndarray

    def __post_init__(self):
        X1 = np.array(self.X1, dtype=float, ndmin=2)
        X2 = np.array(self.X2, dtype=float, ndmin=2)
        if X1.ndim != 2 or X2.ndim != 2:
            raise DimensionError("X1 und X2 müssen Listen von Vektoren sein")
        if X1.shape[0] < 1 or X2.shape[0] < 1:
            raise ValidationError("X1 und X2 brauchen jeweils mindestens einen Vektor")
        if X1.shape[1] != X2.shape[1]:
            raise DimensionError(f"X1 hat Dimension {X1.shape[1]}, X2 {X2.shape[1]}")
        if not (np.all(np.isfinite(X1)) and np.all(np.isfinite(X2))):
            raise ValidationError("Trainingsdaten enthalten NaN oder Inf")
        X1.setflags(write=False)
        X2.setflags(write=False)
        object.__setattr__(self, "X1", X1)
        object.__setattr__(self, "X2", X2)

    @property
    def n1(self) -> int:
        return self.X1.shape[0]

    @property
    def n2(self) -> int:
        return self.X2.shape[0]

    @property
    def dim(self) -> int:
        return self.X1.shape[1]


@dataclass(frozen=True, eq=False)
class PooledSupport:
    """Gemeinsamer Träger mit den empirischen Gewichten Q1, Q2"""
    points: np.ndarray
    n1: int
    n2: int
    Q1: np.ndarray
    Q2: np.ndarray

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def I1(self) -> np.ndarray:
        return np.arange(self.n1)

    @property
    def I2(self) -> np.ndarray:
        return np.arange(self.n1, self.n)


def pool(ts: TrainingSet) -> PooledSupport:
    """
    Legt X1 und X2 (in dieser Reihenfolge) auf einen Träger.

    Doppelte Punkte bleiben getrennte Atome.

    Returns:
        PooledSupport mit Q1 = 1/n1 auf I1, Q2 = 1/n2 auf I2
    """
    points = np.vstack([ts.X1, ts.X2])
    n = ts.n1 + ts.n2
    Q1 = np.zeros(n)
    Q2 = np.zeros(n)
    Q1[:ts.n1] = 1.0 / ts.n1
    Q2[ts.n1:] = 1.0 / ts.n2
    for array in (points, Q1, Q2):
        array.setflags(write=False)
    return PooledSupport(points, ts.n1, ts.n2, Q1, Q2)


@dataclass(frozen=True, eq=False)
class WcdProblem:
    """Gemeinsamer Träger, Kostenmatrix und Radien der Ambiguitätsmengen"""
    pooled: PooledSupport
    D: CostMatrix
    eps1: float
    eps2: float

    @property
    def n(self) -> int:
        return self.pooled.n

    @property
    def Q1(self) -> np.ndarray:
        return self.pooled.Q1

    @property
    def Q2(self) -> np.ndarray:
        return self.pooled.Q2

    @property
    def n_vars(self) -> int:
        return 2 * self.n * self.n + 3 * self.n


def make_problem(ts: TrainingSet, eps1: float, eps2: float, allow_zero_radius: bool = False) -> WcdProblem:
    """
    Baut das WCD-Problem aus den Trainingsdaten.

    Args:
        ts: Trainingsdaten
        eps1: Radius um Q1 (> 0)
        eps2: Radius um Q2 (> 0)
        allow_zero_radius: Radius 0 zulassen (nur für Tests)

    Returns:
        WcdProblem
    """
    for name, eps in (("eps1", eps1), ("eps2", eps2)):
        if not np.isfinite(eps) or eps < 0 or (eps == 0 and not allow_zero_radius):
            raise ValidationError(f"{name} muss positiv sein, ist {eps}")
    pooled = pool(ts)
    return WcdProblem(pooled, cost_matrix(pooled.points), float(eps1), float(eps2))


class _Layout:
    """Variablen-Offsets: p1[n], p2[n], Γ1[n²], Γ2[n²], t[n]"""

    def __init__(self, n: int):
        self.n = n
        self.p1 = 0
        self.p2 = n
        self.gamma1 = 2 * n
        self.gamma2 = 2 * n + n * n
        self.t = 2 * n + 2 * n * n
        self.total = 3 * n + 2 * n * n

    def p(self, k: int) -> np.ndarray:
        return (self.p1 if k == 1 else self.p2) + np.arange(self.n)

    def gamma(self, k: int) -> np.ndarray:
        # Index von Γ_k[l, m] = base + l * n + m
        base = self.gamma1 if k == 1 else self.gamma2
        return base + np.arange(self.n * self.n).reshape(self.n, self.n)


def build_lp(prob: WcdProblem) -> LinearProgram:
    """
    Das endliche LP der Worst-Case-Verteilungen.

    Zeilen in dieser Reihenfolge: Kosten Γ1, Kosten Γ2, Zeilenränder Γ1 (n),
    Zeilenränder Γ2 (n), Spaltenränder Γ1 (n), Spaltenränder Γ2 (n),
    t <= p1 (n), t <= p2 (n), sum p1 = 1, sum p2 = 1. Alle Variablen >= 0,
    Ziel: max sum t.
    """
    n = prob.n
    layout = _Layout(n)
    builder = LpBuilder(layout.total, sense="maximize")
    builder.set_objective(layout.t + np.arange(n), 1.0)

    D = prob.D.D
    eps = {1: prob.eps1, 2: prob.eps2}
    Q = {1: prob.Q1, 2: prob.Q2}
    ell = np.repeat(np.arange(n), n)
    m = np.tile(np.arange(n), n)

    for k in (1, 2):
        builder.add_row(layout.gamma(k).ravel(), D.ravel(), "<=", eps[k])
    for k in (1, 2):
        builder.add_rows(ell, layout.gamma(k).ravel(), 1.0, "=", Q[k])
    for k in (1, 2):
        # sum_l Γ_k[l, m] - p_k[m] = 0
        local = np.concatenate([m, np.arange(n)])
        cols = np.concatenate([layout.gamma(k).ravel(), layout.p(k)])
        coeffs = np.concatenate([np.ones(n * n), -np.ones(n)])
        builder.add_rows(local, cols, coeffs, "=", np.zeros(n))
    for k in (1, 2):
        local = np.concatenate([np.arange(n), np.arange(n)])
        cols = np.concatenate([layout.t + np.arange(n), layout.p(k)])
        coeffs = np.concatenate([np.ones(n), -np.ones(n)])
        builder.add_rows(local, cols, coeffs, "<=", np.zeros(n))
    for k in (1, 2):
        builder.add_row(layout.p(k), 1.0, "=", 1.0)

    return builder.build()


@dataclass(eq=False)
class WcdSolution:
    """
    Worst-Case-Verteilungen p1, p2 mit Kopplungen und Überlappung t

    minmax_risk = V_star (Summe der Minima), tv_star = 1 - V_star.
    """
    support: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    Gamma1: np.ndarray
    Gamma2: np.ndarray
    t: np.ndarray
    V_star: float
    tv_star: float
    minmax_risk: float
    phi: np.ndarray
    eps1: float
    eps2: float
    status: str = "optimal"
    iterations: int = 0
    method: str = "simplex"

    @property
    def n(self) -> int:
        return self.p1.shape[0]


def _phi(p1: np.ndarray, p2: np.ndarray, tie_tol: float = TIE_TOL) -> np.ndarray:
    phi = np.full(p1.shape, 0.5)
    phi[p2 > p1 + tie_tol] = 1.0
    phi[p2 < p1 - tie_tol] = 0.0
    return phi


def _solution_from_vector(prob: WcdProblem, x: np.ndarray, objective: float, **info) -> WcdSolution:
    layout = _Layout(prob.n)
    p1 = x[layout.p(1)]
    p2 = x[layout.p(2)]
    t = x[layout.t:layout.t + prob.n]
    return WcdSolution(
        support=prob.pooled.points,
        p1=p1,
        p2=p2,
        Gamma1=x[layout.gamma(1)],
        Gamma2=x[layout.gamma(2)],
        t=t,
        V_star=float(objective),
        tv_star=1.0 - float(objective),
        minmax_risk=float(objective),
        phi=_phi(p1, p2),
        eps1=prob.eps1,
        eps2=prob.eps2,
        **info,
    )


def resolve_method(method: str, n_vars: int, auto_threshold: int = AUTO_THRESHOLD) -> str:
    """auto: Simplex bis auto_threshold Variablen, darüber HiGHS"""
    if method == "auto":
        return "simplex" if n_vars <= auto_threshold else "highs"
    return method


def solve_wcd(
    prob: WcdProblem,
    tol: float = 1e-8,
    method: str = "auto",
    max_iters: int = 1_000_000,
    auto_threshold: int = AUTO_THRESHOLD
) -> WcdSolution:
    """
    Löst das WCD-LP.

    Das LP ist immer zulässig (p_k = Q_k, diagonale Kopplungen, t = 0) und
    beschränkt; ein anderer Status deutet auf einen Fehler im Aufbau hin.

    Args:
        prob: WCD-Problem
        tol: LP-Toleranz
        method: "simplex", "highs" oder "auto"
        max_iters: Maximale LP-Iterationen
        auto_threshold: Variablenzahl, ab der "auto" HiGHS verwendet

    Returns:
        WcdSolution mit V_star = LP-Zielwert
    """
    lp = build_lp(prob)
    chosen = resolve_method(method, lp.n_vars, auto_threshold)
    logger.info("WCD-LP: n = %d, %d Variablen, %d Zeilen, Verfahren %s",
                prob.n, lp.n_vars, lp.n_rows, chosen)
    result = solve(lp, tol=tol, max_iters=max_iters, method=chosen)

    if result.status in ("infeasible", "unbounded"):
        raise WcdInternalError(f"WCD-LP meldet '{result.status}' - das LP ist per Konstruktion lösbar")
    if result.status != "optimal":
        raise SolverError(f"WCD-LP nicht gelöst: {result.status} nach {result.iterations} Iterationen")

    solution = _solution_from_vector(prob, result.x, result.objective_value,
                                     status=result.status, iterations=result.iterations, method=chosen)
    logger.info("V* = %.8f, TV* = %.8f (%d Iterationen)", solution.V_star, solution.tv_star, result.iterations)
    return solution


def feasible_start(prob: WcdProblem) -> WcdSolution:
    """Zulässiger Startpunkt: p_k = Q_k, Γ_k = diag(Q_k), t = 0"""
    layout = _Layout(prob.n)
    x = np.zeros(layout.total)
    x[layout.p(1)] = prob.Q1
    x[layout.p(2)] = prob.Q2
    x[np.diag(layout.gamma(1))] = prob.Q1
    x[np.diag(layout.gamma(2))] = prob.Q2
    return _solution_from_vector(prob, x, 0.0, status="feasible_start", iterations=0, method="none")


def on_support_test(sol: WcdSolution, tie_tol: float = TIE_TOL) -> np.ndarray:
    """
    Test auf dem Träger: 1 wo p2 > p1, 0 wo p2 < p1, 1/2 bei Gleichstand.

    Returns:
        Vektor phi mit Werten in {0, 0.5, 1}
    """
    return _phi(np.asarray(sol.p1), np.asarray(sol.p2), tie_tol)


def test_risk(phi, p1, p2) -> float:
    """Risiko des Tests phi: Fehlalarm unter p1 plus Fehlentscheidung unter p2, sum p1 phi + p2 (1 - phi)"""
    phi = np.asarray(phi, dtype=float)
    return float(np.sum(np.asarray(p1) * phi + np.asarray(p2) * (1.0 - phi)))


def randomized_decision(phi, rng: np.random.Generator) -> np.ndarray:
    """
    Löst Gleichstände (phi = 1/2) per fairer Münze auf.

    Returns:
        Entscheidungen in {0, 1}
    """
    phi = np.asarray(phi, dtype=float)
    decision = (phi > 0.5).astype(int)
    ties = np.flatnonzero(phi == 0.5)
    if ties.size:
        decision[ties] = rng.integers(0, 2, size=ties.size)
    return decision


@dataclass
class WcdReport:
    """Maximale Verletzung je Nebenbedingungsgruppe"""
    row_marginal: float
    column_marginal: float
    cost: float
    simplex: float
    nonnegativity: float
    overlap: float
    tol: float

    @property
    def max_violation(self) -> float:
        return max(self.row_marginal, self.column_marginal, self.cost,
                   self.simplex, self.nonnegativity, self.overlap)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol


def verify_wcd(prob: WcdProblem, sol: WcdSolution, tol: float = 1e-7) -> WcdReport:
    """
    Prüft alle Nebenbedingungen des WCD-LPs an einer Lösung.

    Args:
        prob: WCD-Problem
        sol: Zu prüfende Lösung
        tol: Toleranz für passed

    Returns:
        WcdReport
    """
    D = prob.D.D
    row_marginal = column_marginal = cost = simplex = 0.0
    for Gamma, p, Q, eps in ((sol.Gamma1, sol.p1, prob.Q1, prob.eps1), (sol.Gamma2, sol.p2, prob.Q2, prob.eps2)):
        row_marginal = max(row_marginal, float(np.max(np.abs(Gamma.sum(axis=1) - Q))))
        column_marginal = max(column_marginal, float(np.max(np.abs(Gamma.sum(axis=0) - p))))
        cost = max(cost, float(np.sum(Gamma * D)) - eps)
        simplex = max(simplex, abs(float(np.sum(p)) - 1.0))

    smallest = min(float(np.min(array)) for array in (sol.p1, sol.p2, sol.Gamma1, sol.Gamma2, sol.t))
    overlap = float(np.max(np.abs(sol.t - np.minimum(sol.p1, sol.p2))))
    return WcdReport(
        row_marginal=row_marginal,
        column_marginal=column_marginal,
        cost=max(cost, 0.0),
        simplex=simplex,
        nonnegativity=max(0.0, -smallest),
        overlap=overlap,
        tol=tol,
    )


def bandwidth_hint(prob: WcdProblem) -> Optional[float]:
    """Median der positiven paarweisen Distanzen des Trägers (None bei nur einem Punkt)"""
    upper = prob.D.D[np.triu_indices(prob.n, k=1)]
    upper = upper[upper > 0]
    return float(np.median(upper)) if upper.size else None
