"""
Unit Tests für diskrete Maße, Kostenmatrizen und Wasserstein-Distanz
"""
import os
import sys
import tempfile
import unittest

import numpy as np

# Füge das Parent-Verzeichnis zum Python-Path hinzu
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from transport.measures import DiscreteMeasure, cost_matrix, read_measure_csv, write_measure_csv
from transport.wasserstein import pairwise_risk, tv_common_support, w1_distance
from utils.errors import DataFormatError, DimensionError, ValidationError


class TestDiscreteMeasure(unittest.TestCase):
    """Tests für DiscreteMeasure"""

    def test_uniform(self):
        """Empirisches Maß mit Gewicht 1/n"""
        measure = DiscreteMeasure.uniform([[0.0], [1.0], [2.0], [3.0]])
        np.testing.assert_array_equal(measure.weights, np.full(4, 0.25))
        self.assertEqual(measure.size, 4)
        self.assertEqual(measure.dim, 1)

    def test_invalid_weights(self):
        """Negative Gewichte oder Summe != 1"""
        with self.assertRaises(ValidationError):
            DiscreteMeasure([[0.0], [1.0]], [1.5, -0.5])
        with self.assertRaises(ValidationError):
            DiscreteMeasure([[0.0], [1.0]], [0.5, 0.6])

    def test_length_mismatch(self):
        """Träger und Gewichte unterschiedlich lang"""
        with self.assertRaises((DimensionError, ValidationError)):
            DiscreteMeasure([[0.0], [1.0]], [1.0])

    def test_from_lp_weights(self):
        """LP-Rundungsfehler werden abgeschnitten und renormiert"""
        measure = DiscreteMeasure.from_lp_weights([[0.0], [1.0]], [1.0 + 1e-9, -1e-9])
        self.assertGreaterEqual(measure.weights.min(), 0.0)
        self.assertAlmostEqual(float(measure.weights.sum()), 1.0, places=12)
        with self.assertRaises(ValidationError):
            DiscreteMeasure.from_lp_weights([[0.0], [1.0]], [1.1, -0.1])

    def test_positive(self):
        """Atome mit Gewicht 0 fallen weg"""
        measure = DiscreteMeasure([[0.0], [1.0], [2.0]], [0.5, 0.0, 0.5]).positive()
        self.assertEqual(measure.size, 2)

    def test_csv(self):
        """Maß als CSV schreiben und lesen"""
        measure = DiscreteMeasure([[0.1, 0.2], [0.3, -0.4]], [0.25, 0.75])
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "measure.csv")
            write_measure_csv(measure, path)
            loaded = read_measure_csv(path)
            np.testing.assert_array_equal(loaded.support, measure.support)
            np.testing.assert_array_equal(loaded.weights, measure.weights)

            with open(path, "w", encoding="utf-8") as f:
                f.write("w,x1\n0.5,1.0\n0.5,oops\n")
            with self.assertRaises(DataFormatError) as ctx:
                read_measure_csv(path)
            self.assertEqual(ctx.exception.line, 3)


class TestCostMatrix(unittest.TestCase):
    """Tests für cost_matrix"""

    def test_single_point(self):
        """Ein Punkt ergibt die 1×1-Nullmatrix"""
        np.testing.assert_array_equal(cost_matrix([[2.0, 3.0]]).D, np.zeros((1, 1)))

    def test_line(self):
        """Punkte 0 und 3 auf der Geraden"""
        np.testing.assert_array_equal(cost_matrix([[0.0], [3.0]]).D, [[0.0, 3.0], [3.0, 0.0]])

    def test_pythagoras(self):
        """3-4-5-Dreieck"""
        D = cost_matrix([[0.0, 0.0], [3.0, 4.0]]).D
        self.assertEqual(D[0, 1], 5.0)
        self.assertEqual(D[1, 0], 5.0)

    def test_symmetry(self):
        """Exakt symmetrisch mit Nulldiagonale"""
        points = np.random.default_rng(0).normal(size=(6, 3))
        D = cost_matrix(points).D
        np.testing.assert_array_equal(D, D.T)
        np.testing.assert_array_equal(np.diag(D), np.zeros(6))

    def test_triangle_inequality(self):
        """D_ik <= D_ij + D_jk für alle Tripel"""
        points = np.random.default_rng(4).normal(size=(7, 3))
        D = cost_matrix(points).D
        slack = D[:, :, None] + D[None, :, :] - D[:, None, :]
        self.assertGreaterEqual(slack.min(), -1e-12)


class TestWassersteinDistance(unittest.TestCase):
    """Tests für w1_distance"""

    def test_identity(self):
        """W1(mu, mu) = 0"""
        mu = DiscreteMeasure([[0.0, 1.0], [2.0, 0.5], [1.0, 1.0]], [0.2, 0.5, 0.3])
        self.assertAlmostEqual(w1_distance(mu, mu), 0.0, places=10)

    def test_diracs(self):
        """W1 zweier Dirac-Maße ist der Abstand"""
        mu = DiscreteMeasure([[0.0, 0.0]], [1.0])
        nu = DiscreteMeasure([[3.0, 4.0]], [1.0])
        self.assertAlmostEqual(w1_distance(mu, nu), 5.0, places=10)

    def test_split_mass(self):
        """1/2 δ0 + 1/2 δ1 gegen δ_0.5"""
        mu = DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5])
        nu = DiscreteMeasure([[0.5]], [1.0])
        self.assertAlmostEqual(w1_distance(mu, nu), 0.5, places=10)

    def test_one_dimensional_formula(self):
        """In 1D: W1 = Integral |F - G|"""
        rng = np.random.default_rng(3)
        points = np.sort(rng.normal(size=5))
        p = rng.dirichlet(np.ones(5))
        q = rng.dirichlet(np.ones(5))
        expected = float(np.sum(np.abs(np.cumsum(p) - np.cumsum(q))[:-1] * np.diff(points)))
        mu = DiscreteMeasure(points[:, None], p)
        nu = DiscreteMeasure(points[:, None], q)
        self.assertAlmostEqual(w1_distance(mu, nu), expected, places=9)

    def test_highs_agrees(self):
        """Eigener Simplex und HiGHS liefern dieselbe Distanz"""
        rng = np.random.default_rng(8)
        mu = DiscreteMeasure(rng.normal(size=(4, 2)), rng.dirichlet(np.ones(4)))
        nu = DiscreteMeasure(rng.normal(size=(5, 2)), rng.dirichlet(np.ones(5)))
        self.assertAlmostEqual(w1_distance(mu, nu), w1_distance(mu, nu, method="highs"), places=7)

    def test_dimension_mismatch(self):
        """Maße verschiedener Dimension"""
        with self.assertRaises(DimensionError):
            w1_distance(DiscreteMeasure([[0.0]], [1.0]), DiscreteMeasure([[0.0, 0.0]], [1.0]))

    def test_scaling(self):
        """W1 skaliert linear mit den Trägerpunkten"""
        rng = np.random.default_rng(12)
        x, y = rng.normal(size=(3, 2)), rng.normal(size=(4, 2))
        p, q = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(4))
        base = w1_distance(DiscreteMeasure(x, p), DiscreteMeasure(y, q))
        for scale in (0.5, 3.0):
            scaled = w1_distance(DiscreteMeasure(scale * x, p), DiscreteMeasure(scale * y, q))
            self.assertAlmostEqual(scaled, scale * base, places=8)

    def test_bounded_by_largest_distance(self):
        """0 <= W1 <= größter Abstand zwischen den Trägern"""
        rng = np.random.default_rng(13)
        for _ in range(5):
            x, y = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
            mu = DiscreteMeasure(x, rng.dirichlet(np.ones(3)))
            nu = DiscreteMeasure(y, rng.dirichlet(np.ones(3)))
            largest = np.max(np.linalg.norm(x[:, None, :] - y[None, :, :], axis=2))
            distance = w1_distance(mu, nu)
            self.assertGreaterEqual(distance, 0.0)
            self.assertLessEqual(distance, largest + 1e-9)


class TestTotalVariation(unittest.TestCase):
    """Tests für tv_common_support und pairwise_risk"""

    def test_equal(self):
        """p = q ergibt 0"""
        self.assertEqual(tv_common_support([0.3, 0.7], [0.3, 0.7]), 0.0)

    def test_disjoint(self):
        """Disjunkte Träger ergeben 1"""
        self.assertEqual(tv_common_support([0.5, 0.5, 0.0], [0.0, 0.0, 1.0]), 1.0)

    def test_example(self):
        """(0.75, 0.25) gegen (0.25, 0.75)"""
        self.assertAlmostEqual(tv_common_support([0.75, 0.25], [0.25, 0.75]), 0.5, places=12)
        self.assertAlmostEqual(pairwise_risk([0.75, 0.25], [0.25, 0.75]), 0.5, places=12)

    def test_length_mismatch(self):
        """Unterschiedliche Längen"""
        with self.assertRaises(DimensionError):
            tv_common_support([1.0], [0.5, 0.5])


if __name__ == '__main__':
    unittest.main()
