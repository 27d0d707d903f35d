"""
Unit Tests für LP-Datentypen, Simplex, HiGHS-Anbindung und MPS-Export
"""
import itertools
import os
import sys
import unittest

import numpy as np

# Füge das Parent-Verzeichnis zum Python-Path hinzu
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from lp.check import check_solution
from lp.mps import read_mps, write_mps
from lp.problem import LinearProgram, LpBuilder
from lp.solver import solve
from utils.errors import DataFormatError, DimensionError, ValidationError

METHODS = ("simplex", "highs")


def single_variable(relation_rows):
    """max x u.d.N. den gegebenen (relation, rhs)-Zeilen"""
    builder = LpBuilder(1, sense="maximize")
    builder.set_objective([0], [1.0])
    for relation, rhs in relation_rows:
        builder.add_row([0], [1.0], relation, rhs)
    return builder.build()


def random_lp(seed: int) -> LinearProgram:
    """Zufälliges, zulässiges und beschränktes LP mit allen drei Relationen"""
    rng = np.random.default_rng(seed)
    n = 6
    x0 = rng.uniform(0.0, 1.0, n)
    builder = LpBuilder(n, sense="minimize")
    builder.set_objective(np.arange(n), rng.normal(size=n))
    builder.set_bounds(np.arange(n), upper=np.full(n, 5.0))
    for relation, slack in (("<=", 1.0), (">=", -1.0), ("=", 0.0)):
        a = rng.uniform(0.0, 1.0, (2, n))
        local_rows = np.repeat(np.arange(2), n)
        cols = np.tile(np.arange(n), 2)
        builder.add_rows(local_rows, cols, a.ravel(), relation, a @ x0 + slack)
    return builder.build()


def basic_solution_optimum(lp: LinearProgram) -> float:
    """
    Minimum von c'x über alle zulässigen Basislösungen von Ax = b, x >= 0.

    Nur für kleine LPs in Gleichungsform ohne obere Schranken.
    """
    A = lp.A.toarray()
    rank = np.linalg.matrix_rank(A)
    best = np.inf
    for basis in itertools.combinations(range(lp.n_vars), rank):
        B = A[:, basis]
        if np.linalg.matrix_rank(B) < rank:
            continue
        x_B = np.linalg.lstsq(B, lp.rhs, rcond=None)[0]
        if np.linalg.norm(B @ x_B - lp.rhs) > 1e-9 or np.any(x_B < -1e-10):
            continue
        best = min(best, float(lp.objective[list(basis)] @ x_B))
    return best


def small_transport_lp(rng, m: int, n: int) -> LinearProgram:
    """Transport-LP m x n mit zufälligen Rändern und Kosten"""
    builder = LpBuilder(m * n)
    builder.set_objective(np.arange(m * n), rng.uniform(0.0, 2.0, m * n))
    index = np.arange(m * n).reshape(m, n)
    builder.add_rows(np.repeat(np.arange(m), n), index.ravel(), 1.0, "=", rng.dirichlet(np.ones(m)))
    builder.add_rows(np.tile(np.arange(n), m), index.ravel(), 1.0, "=", rng.dirichlet(np.ones(n)))
    return builder.build()


class TestLinearProgram(unittest.TestCase):
    """Tests für LinearProgram und LpBuilder"""

    def test_canonical_triplets(self):
        """Duplikate werden addiert, Nullen entfernt, zeilenweise sortiert"""
        lp = LinearProgram(
            n_vars=3,
            objective=[0.0, 0.0, 0.0],
            rows=[1, 0, 0, 1, 1],
            cols=[2, 1, 1, 0, 0],
            coeffs=[4.0, 1.0, 2.0, 1.0, -1.0],
            relations=("<=", "="),
            rhs=[1.0, 2.0],
        )
        self.assertEqual(lp.triplets(), [(0, 1, 3.0), (1, 2, 4.0)])

    def test_invalid_input(self):
        """Ungültige Relation, Zielrichtung, Indizes"""
        with self.assertRaises(ValidationError):
            LinearProgram(1, [1.0], [0], [0], [1.0], ("<",), [1.0])
        with self.assertRaises(ValidationError):
            LinearProgram(1, [1.0], [0], [0], [1.0], ("<=",), [1.0], sense="best")
        with self.assertRaises(DimensionError):
            LinearProgram(1, [1.0], [0], [3], [1.0], ("<=",), [1.0])
        with self.assertRaises(ValidationError):
            LinearProgram(1, [np.nan], [0], [0], [1.0], ("<=",), [1.0])

    def test_builder_blocks(self):
        """Lokale Zeilenindizes werden fortlaufend verschoben"""
        builder = LpBuilder(2)
        first = builder.add_rows([0, 1], [0, 1], 1.0, "<=", [1.0, 2.0])
        second = builder.add_row([0, 1], [1.0, 1.0], "=", 3.0)
        np.testing.assert_array_equal(first, [0, 1])
        self.assertEqual(second, 2)
        lp = builder.build()
        self.assertEqual(lp.n_rows, 3)
        np.testing.assert_array_equal(lp.A.toarray(), [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


class TestSolve(unittest.TestCase):
    """Tests für solve mit beiden Verfahren"""

    def test_trivial_maximum(self):
        """max x u.d.N. x <= 1 ergibt x = 1"""
        for method in METHODS:
            with self.subTest(method=method):
                solution = solve(single_variable([("<=", 1.0)]), method=method)
                self.assertEqual(solution.status, "optimal")
                self.assertAlmostEqual(solution.x[0], 1.0, places=9)
                self.assertAlmostEqual(solution.objective_value, 1.0, places=9)

    def test_infeasible(self):
        """x <= 1 und x >= 2"""
        solution = solve(single_variable([("<=", 1.0), (">=", 2.0)]), method="simplex")
        self.assertEqual(solution.status, "infeasible")
        solution = solve(single_variable([("<=", 1.0), (">=", 2.0)]), method="highs")
        self.assertFalse(solution.is_optimal)

    def test_unbounded(self):
        """max x u.d.N. x - y <= 1"""
        builder = LpBuilder(2, sense="maximize")
        builder.set_objective([0], [1.0])
        builder.add_row([0, 1], [1.0, -1.0], "<=", 1.0)
        self.assertEqual(solve(builder.build(), method="simplex").status, "unbounded")

    def test_transport_on_same_point(self):
        """2x2-Transport mit gleichen Rändern und Nulldiagonale kostet 0"""
        builder = LpBuilder(4)
        builder.set_objective(np.arange(4), [0.0, 1.0, 1.0, 0.0])
        builder.add_rows([0, 0, 1, 1], [0, 1, 2, 3], 1.0, "=", [0.5, 0.5])
        builder.add_rows([0, 1, 0, 1], [0, 1, 2, 3], 1.0, "=", [0.5, 0.5])
        for method in METHODS:
            with self.subTest(method=method):
                solution = solve(builder.build(), method=method)
                self.assertEqual(solution.status, "optimal")
                self.assertAlmostEqual(solution.objective_value, 0.0, places=9)

    def test_simplex_matches_highs(self):
        """Zufällige LPs: gleicher Optimalwert, zulässige Lösungen"""
        for seed in range(10):
            with self.subTest(seed=seed):
                lp = random_lp(seed)
                ours = solve(lp, method="simplex")
                highs = solve(lp, method="highs")
                self.assertEqual(ours.status, "optimal")
                self.assertEqual(highs.status, "optimal")
                self.assertAlmostEqual(ours.objective_value, highs.objective_value, places=6)
                self.assertTrue(check_solution(lp, ours.x, tol=1e-7).feasible)

    def test_invalid_arguments(self):
        """Unbekanntes Verfahren und nichtpositive Toleranz"""
        lp = single_variable([("<=", 1.0)])
        with self.assertRaises(ValueError):
            solve(lp, method="interior")
        with self.assertRaises(ValueError):
            solve(lp, tol=0.0)


class TestBasicSolutions(unittest.TestCase):
    """Optimum beider Verfahren gegen Aufzählung aller Basislösungen"""

    def test_transport(self):
        """Transport-LPs bis 3 x 3 (rangdefizitäre Gleichungen)"""
        rng = np.random.default_rng(17)
        for m, n in itertools.product((1, 2, 3), repeat=2):
            lp = small_transport_lp(rng, m, n)
            expected = basic_solution_optimum(lp)
            for method in METHODS:
                with self.subTest(m=m, n=n, method=method):
                    solution = solve(lp, method=method)
                    self.assertEqual(solution.status, "optimal")
                    self.assertAlmostEqual(solution.objective_value, expected, places=7)

    def test_standard_form(self):
        """Zufällige Gleichungssysteme mit bis zu 3 Zeilen"""
        rng = np.random.default_rng(18)
        for m in (1, 2, 3):
            for _ in range(3):
                n = m + 3
                A = rng.uniform(0.1, 1.0, (m, n))
                builder = LpBuilder(n)
                builder.set_objective(np.arange(n), rng.normal(size=n))
                builder.add_rows(np.repeat(np.arange(m), n), np.tile(np.arange(n), m), A.ravel(), "=",
                                 A @ rng.uniform(0.0, 1.0, n))
                lp = builder.build()
                expected = basic_solution_optimum(lp)
                for method in METHODS:
                    with self.subTest(m=m, method=method):
                        self.assertAlmostEqual(solve(lp, method=method).objective_value, expected, places=7)


class TestCheckSolution(unittest.TestCase):
    """Tests für check_solution"""

    def test_violation(self):
        """x = 2 verletzt x <= 1 um 1"""
        report = check_solution(single_variable([("<=", 1.0)]), [2.0])
        self.assertAlmostEqual(report.max_row_violation, 1.0)
        self.assertFalse(report.feasible)
        self.assertEqual(report.worst_row(), 0)

    def test_bounds(self):
        """Negative Werte verletzen die Schranke x >= 0"""
        report = check_solution(single_variable([("<=", 1.0)]), [-0.5])
        self.assertAlmostEqual(report.max_bound_violation, 0.5)
        self.assertEqual(report.max_row_violation, 0.0)

    def test_dimension(self):
        """Falsche Länge von x"""
        with self.assertRaises(DimensionError):
            check_solution(single_variable([("<=", 1.0)]), [1.0, 2.0])


class TestMps(unittest.TestCase):
    """Tests für write_mps und read_mps"""

    def test_structure(self):
        """Abschnitte in der richtigen Reihenfolge"""
        text = write_mps(single_variable([("<=", 1.0), (">=", 0.5)]))
        sections = [line.split()[0] for line in text.splitlines() if not line[0].isspace()]
        self.assertEqual(sections, ["NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"])
        self.assertIn(" L  R0000001\n", text)
        self.assertIn(" G  R0000002\n", text)
        self.assertNotIn("-0.0", text)

    def test_deterministic(self):
        """Gleiches LP, gleicher Text"""
        self.assertEqual(write_mps(random_lp(4)), write_mps(random_lp(4)))

    def test_read_back(self):
        """Gelesenes LP stimmt mit dem geschriebenen überein"""
        lp = random_lp(2)
        loaded = read_mps(write_mps(lp))
        self.assertEqual(loaded.n_vars, lp.n_vars)
        self.assertEqual(loaded.relations, lp.relations)
        self.assertEqual(loaded.sense, lp.sense)
        # 12 Zeichen je Zahl: mindestens fünf signifikante Stellen
        np.testing.assert_allclose(loaded.A.toarray(), lp.A.toarray(), rtol=1e-5)
        np.testing.assert_allclose(loaded.objective, lp.objective, rtol=1e-5)
        np.testing.assert_allclose(loaded.rhs, lp.rhs, rtol=1e-5)
        np.testing.assert_array_equal(loaded.upper, lp.upper)
        self.assertAlmostEqual(solve(loaded).objective_value, solve(lp).objective_value, places=4)

    def test_fixed_columns(self):
        """Datenzeilen halten die festen Spalten: Namen 5-12 und 15-22, Zahl 25-36"""
        builder = LpBuilder(2, sense="maximize")
        builder.set_objective([0, 1], [0.5666389128761923, -1.2345678901234e-5])
        builder.add_row([0, 1], [123456789.123456, -0.000123456789], "<=", 3.141592653589793)
        builder.add_row([0, 1], [1.0, 2.0 / 3.0], ">=", -1e-300)
        builder.set_bounds([0, 1], lower=[-2.718281828459045, 0.0], upper=[1e20, 7.0])
        for lp in (builder.build(), random_lp(3)):
            section = None
            for line in write_mps(lp).splitlines():
                if not line[0].isspace():
                    section = line.split()[0]
                    continue
                with self.subTest(line=line):
                    if section == "ROWS":
                        self.assertLessEqual(len(line), 12)
                        self.assertEqual((line[0], line[3]), (" ", " "))
                        continue
                    if section == "OBJSENSE":
                        continue
                    self.assertLessEqual(len(line), 36)
                    self.assertEqual(line[0] + line[3] + line[12:14], "    ")
                    self.assertEqual(line[4:12].split(), [line[4:12].strip()])
                    if len(line) > 14:
                        self.assertEqual(line[14:22].split(), [line[14:22].strip()])
                    if len(line) > 24:
                        self.assertEqual(line[22:24], "  ")
                        float(line[24:36])
                        self.assertNotIn(" ", line[24:36])

    def test_fixed_columns_precision(self):
        """Zahlen werden auf 12 Zeichen gerundet, nicht abgeschnitten"""
        text = write_mps(single_variable([("<=", 0.5666389128761923)]))
        self.assertIn("    RHS       R0000001  0.5666389129\n", text)
        self.assertAlmostEqual(read_mps(text).rhs[0], 0.5666389128761923, places=9)

    def test_long_name_rejected(self):
        """Namen über 8 Zeichen passen nicht ins feste Format"""
        lp = LinearProgram(n_vars=1, objective=[1.0], rows=[0], cols=[0], coeffs=[1.0],
                           relations=("<=",), rhs=[1.0], var_names=("VARIABLE1",))
        with self.assertRaises(ValidationError):
            write_mps(lp)

    def test_bad_line(self):
        """Fehler mit Zeilennummer"""
        text = "NAME          X\nROWS\n N  OBJ\n Q  R1\nENDATA\n"
        with self.assertRaises(DataFormatError) as ctx:
            read_mps(text)
        self.assertEqual(ctx.exception.line, 4)


if __name__ == '__main__':
    unittest.main()
