"""
Unit Tests für Score-Funktion, CUSUM und die beiden Detektoren
"""
import math
import os
import sys
import unittest

import numpy as np

# Füge das Parent-Verzeichnis zum Python-Path hinzu
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from detection.cusum import (
    CusumState, ThresholdPolicy, calibrate_threshold, cusum_from_partial_sums, cusum_step,
    cusum_trajectory, first_alarm, tail_bound
)
from detection.gaussian_detector import GaussianCusumDetector, fit_baseline, sample_covariance
from detection.kernel import GaussianKernel
from detection.ot_detector import OTScoreDetector, run_detector
from detection.score import (
    ScoreModel, density, fit_drift_offset, log_density_batch, raw_score_batch, score, score_batch
)
from utils.errors import ConfigError, DimensionError, DomainError, ValidationError


def two_atom_model(p1, p2, bandwidth=0.5, **kwargs) -> ScoreModel:
    return ScoreModel(atoms=[[0.0], [1.0]], p1=p1, p2=p2, bandwidth=bandwidth, **kwargs)


class TestKernelAndDensity(unittest.TestCase):
    """Tests für GaussianKernel und density"""

    def test_center_value(self):
        """Ein Atom bei 0, σ=1, z=0: (2π)^(-1/2)"""
        model = ScoreModel(atoms=[[0.0]], p1=[1.0], p2=[1.0], bandwidth=1.0)
        self.assertAlmostEqual(density(model, 1, [0.0]), 0.3989422804014327, places=12)

    def test_invalid_bandwidth(self):
        """Bandbreite muss positiv sein"""
        with self.assertRaises(ValidationError):
            GaussianKernel(0.0)
        with self.assertRaises(ValidationError):
            two_atom_model([0.5, 0.5], [0.5, 0.5], bandwidth=-1.0)

    def test_symmetry(self):
        """Symmetrisches Modell: gleiche Dichten im Mittelpunkt"""
        model = two_atom_model([1.0, 0.0], [0.0, 1.0])
        self.assertAlmostEqual(density(model, 1, [0.5]), density(model, 2, [0.5]), places=14)
        self.assertAlmostEqual(score(model, [0.5]), 0.0, places=12)

    def test_integral(self):
        """Dichte integriert zu 1"""
        model = ScoreModel(atoms=[[-1.0], [0.5], [2.0]], p1=[0.2, 0.5, 0.3], p2=[0.6, 0.1, 0.3], bandwidth=0.5)
        grid = np.linspace(-10.0, 12.0, 100_001)
        step = grid[1] - grid[0]
        for k in (1, 2):
            values = np.exp(log_density_batch(model, k, grid[:, None]))
            self.assertAlmostEqual(float(values.sum() * step), 1.0, delta=1e-2)

    def test_far_away_finite(self):
        """Weit entfernte Punkte: log-Dichte bleibt endlich"""
        model = two_atom_model([0.5, 0.5], [0.5, 0.5], bandwidth=0.01)
        self.assertTrue(np.all(np.isfinite(log_density_batch(model, 1, [[1e3]]))))

    def test_dimension_mismatch(self):
        """Punkt falscher Dimension"""
        with self.assertRaises(DimensionError):
            density(two_atom_model([0.5, 0.5], [0.5, 0.5]), 1, [0.0, 1.0])

    def test_log_density_matches_direct_sum(self):
        """Log-Raum-Auswertung gegen direkte Summe der Gauß-Kerne"""
        rng = np.random.default_rng(21)
        atoms = rng.normal(size=(4, 2))
        p1, p2 = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
        model = ScoreModel(atoms=atoms, p1=p1, p2=p2, bandwidth=0.8)
        Z = rng.normal(size=(6, 2))
        sq_dist = np.sum((Z[:, None, :] - atoms[None, :, :]) ** 2, axis=2)
        kernel = np.exp(-sq_dist / (2.0 * 0.8 ** 2)) / (2.0 * math.pi * 0.8 ** 2)
        for k, weights in ((1, p1), (2, p2)):
            np.testing.assert_allclose(log_density_batch(model, k, Z), np.log(kernel @ weights), rtol=1e-10)


class TestScore(unittest.TestCase):
    """Tests für score und fit_drift_offset"""

    def test_equal_weights(self):
        """p1 = p2: Score überall 0"""
        model = two_atom_model([0.3, 0.7], [0.3, 0.7])
        Z = np.linspace(-3.0, 3.0, 13)[:, None]
        np.testing.assert_allclose(raw_score_batch(model, Z), np.zeros(13), atol=1e-12)

    def test_small_bandwidth_limit(self):
        """σ → 0 am Atom: log(p2 / p1)"""
        model = two_atom_model([0.7, 0.3], [0.2, 0.8], bandwidth=1e-3)
        self.assertAlmostEqual(score(model, [0.0]), math.log(0.2 / 0.7), delta=1e-6)
        self.assertAlmostEqual(score(model, [1.0]), math.log(0.8 / 0.3), delta=1e-6)

    def test_clip(self):
        """Roh-Score 6 wird auf c = 2 begrenzt"""
        model = two_atom_model([1.0, 0.0], [0.0, 1.0], bandwidth=0.5)
        self.assertAlmostEqual(float(raw_score_batch(model, [[2.0]])[0]), 6.0, places=10)
        clipped = two_atom_model([1.0, 0.0], [0.0, 1.0], bandwidth=0.5, clip=2.0)
        self.assertAlmostEqual(score(clipped, [2.0]), 2.0)
        self.assertAlmostEqual(score(clipped, [-1.0]), -2.0)

    def test_drift_offset(self):
        """Offset wird nach dem Clipping addiert"""
        model = two_atom_model([1.0, 0.0], [0.0, 1.0], clip=2.0, drift_offset=-0.5)
        self.assertAlmostEqual(score(model, [2.0]), 1.5)
        self.assertAlmostEqual(model.with_drift_offset(-1.0).drift_offset, -1.0)
        with self.assertRaises(ValidationError):
            two_atom_model([1.0, 0.0], [0.0, 1.0], drift_offset=0.1)

    def test_knn_truncation(self):
        """K >= Atomzahl ändert nichts, K=1 nähert weit getrennte Atome an"""
        rng = np.random.default_rng(0)
        atoms = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0], [20.0, 0.0], [0.0, 20.0]])
        p1 = rng.dirichlet(np.ones(6))
        p2 = rng.dirichlet(np.ones(6))
        Z = atoms + 0.01
        full = ScoreModel(atoms, p1, p2, bandwidth=0.2)
        np.testing.assert_allclose(score_batch(ScoreModel(atoms, p1, p2, bandwidth=0.2, knn_truncation=6), Z),
                                   score_batch(full, Z))
        np.testing.assert_allclose(score_batch(ScoreModel(atoms, p1, p2, bandwidth=0.2, knn_truncation=1), Z),
                                   score_batch(full, Z), atol=1e-6)

    def test_invalid_weights(self):
        """Gewichte außerhalb des Simplex"""
        with self.assertRaises(ValidationError):
            two_atom_model([0.9, 0.3], [0.5, 0.5])
        with self.assertRaises(DimensionError):
            two_atom_model([1.0], [0.5, 0.5])

    def test_fit_drift_offset(self):
        """Mittelwert -1 ergibt 0, Mittelwert 0.3 mit Marge 0.05 ergibt -0.35"""
        self.assertEqual(fit_drift_offset([-2.0, 0.0], 0.0), 0.0)
        self.assertAlmostEqual(fit_drift_offset([0.1, 0.5], 0.05), -0.35)
        scores = np.random.default_rng(1).normal(0.4, 1.0, 500)
        offset = fit_drift_offset(scores, 0.1)
        self.assertLessEqual(float(np.mean(scores + offset)), -0.1 + 1e-12)
        with self.assertRaises(ValidationError):
            fit_drift_offset([], 0.0)


class TestCusum(unittest.TestCase):
    """Tests für die CUSUM-Rekursion"""

    def test_example(self):
        """Inkremente (1, -2, 3) ergeben (1, 0, 3)"""
        np.testing.assert_array_equal(cusum_trajectory([1.0, -2.0, 3.0]), [1.0, 0.0, 3.0])

    def test_nonpositive(self):
        """Nur nichtpositive Inkremente: S bleibt 0"""
        np.testing.assert_array_equal(cusum_trajectory([-1.0, 0.0, -0.5]), np.zeros(3))

    def test_step(self):
        """cusum_step führt V_t mit"""
        state = CusumState()
        for x in (1.0, -2.0, 3.0):
            state = cusum_step(state, x, 0.5)
        self.assertEqual(state.S, 3.0)
        self.assertEqual(state.t, 3)
        self.assertAlmostEqual(state.V, 0.75)
        with self.assertRaises(DomainError):
            cusum_step(state, 1.0, 0.0)

    def test_partial_sums(self):
        """Rekursion und Partialsummen-Form stimmen überein"""
        increments = np.random.default_rng(2).normal(-0.1, 1.0, 1000)
        S = cusum_trajectory(increments)
        np.testing.assert_allclose(S, cusum_from_partial_sums(increments), atol=1e-9)
        self.assertTrue(np.all(S >= 0.0))

    def test_first_alarm(self):
        """1-basierter Alarmzeitpunkt"""
        self.assertEqual(first_alarm([0.0, 0.5, 1.0, 2.0], 1.0), 3)
        self.assertIsNone(first_alarm([0.0, 0.5], 1.0))

    def test_alarm_time_monotone_in_threshold(self):
        """Größeres h alarmiert auf demselben Strom nie früher"""
        increments = np.random.default_rng(5).normal(0.1, 1.0, size=300)
        S = cusum_trajectory(increments)
        times = [first_alarm(S, h) for h in np.linspace(0.1, S.max() + 1.0, 40)]
        missed = [t is None for t in times]
        self.assertEqual(missed, sorted(missed))
        detected = [t for t in times if t is not None]
        self.assertEqual(detected, sorted(detected))
        self.assertTrue(missed[-1])


class TestThresholds(unittest.TestCase):
    """Tests für tail_bound, calibrate_threshold und ThresholdPolicy"""

    def test_tail_bound_examples(self):
        """V=1, h=4 ergibt 2e^-2; h = sqrt(8 ln 2) ergibt 1"""
        self.assertAlmostEqual(tail_bound(4.0, 1.0), 2.0 * math.exp(-2.0), places=12)
        self.assertAlmostEqual(tail_bound(math.sqrt(8.0 * math.log(2.0)), 1.0), 1.0, places=12)
        values = [tail_bound(h, 1.0) for h in (3.0, 5.0, 8.0, 20.0)]
        self.assertEqual(values, sorted(values, reverse=True))
        with self.assertRaises(DomainError):
            tail_bound(0.0, 1.0)

    def test_calibrate(self):
        """ln(2/eta) = 1 und V = 1 ergibt sqrt(8)"""
        self.assertAlmostEqual(calibrate_threshold(2.0 / math.e, 1.0), math.sqrt(8.0), places=12)
        with self.assertRaises(DomainError):
            calibrate_threshold(2.0, 1.0)
        with self.assertRaises(DomainError):
            calibrate_threshold(0.0, 1.0)

    def test_eta_one_rejected(self):
        """eta = 1 ist keine Toleranz mehr, nur (0, 1) ist erlaubt"""
        with self.assertRaises(DomainError):
            calibrate_threshold(1.0, 1.0)
        with self.assertRaises(ValidationError):
            ThresholdPolicy.tail_bound(1.0)
        self.assertGreater(calibrate_threshold(0.999, 1.0), 0.0)

    def test_round_trip(self):
        """tail_bound(calibrate_threshold(eta, V), V) = eta"""
        for eta in (0.5, 0.1, 0.01, 1e-4):
            for V in (1.0, 37.5, 4000.0):
                self.assertAlmostEqual(tail_bound(calibrate_threshold(eta, V), V), eta, delta=1e-12)

    def test_policy(self):
        """Ungültige Policies und Auflösung"""
        with self.assertRaises(ValidationError):
            ThresholdPolicy.fixed(0.0)
        with self.assertRaises(ValidationError):
            ThresholdPolicy.tail_bound(1.5)
        h, V_t = ThresholdPolicy.tail_bound(0.01).resolve(2.0, 100)
        self.assertAlmostEqual(V_t, 400.0)
        self.assertAlmostEqual(h, calibrate_threshold(0.01, 400.0))
        h, V_t = ThresholdPolicy.fixed(3.0).resolve(None, 100)
        self.assertEqual((h, V_t), (3.0, None))

    def test_nominal_false_alarm_rate(self):
        """Nominale beschränkte Inkremente mit Drift <= 0 halten die Schranke ein"""
        rng = np.random.default_rng(3)
        horizon, eta, runs = 100, 0.05, 2000
        h = calibrate_threshold(eta, horizon * 1.0)
        increments = np.clip(rng.normal(-0.05, 0.5, size=(runs, horizon)), -1.0, 1.0)
        alarms = sum(cusum_trajectory(row)[-1] >= h for row in increments)
        self.assertLessEqual(alarms / runs, eta)


class TestOTScoreDetector(unittest.TestCase):
    """Tests für OTScoreDetector und run_detector"""

    def test_no_alarm_for_equal_weights(self):
        """p1 = p2: S ≡ 0, kein Alarm"""
        model = two_atom_model([0.5, 0.5], [0.5, 0.5], clip=2.0)
        residuals = np.random.default_rng(4).normal(size=(200, 1))
        run = run_detector(model, residuals, ThresholdPolicy.fixed(1e-9))
        self.assertIsNone(run.tau_det)
        np.testing.assert_allclose(run.S, np.zeros(200), atol=1e-12)

    def test_tiny_threshold(self):
        """Positiver erster Score und h = 1e-12: Alarm im ersten Schritt"""
        model = two_atom_model([1.0, 0.0], [0.0, 1.0], clip=2.0)
        run = run_detector(model, [[1.0], [0.0]], ThresholdPolicy.fixed(1e-12))
        self.assertEqual(run.tau_det, 1)
        self.assertEqual(run.alarm_residual_time, 0)
        self.assertEqual(list(run.frame().columns), ["t", "score", "S", "alarm"])

    def test_sigma_i_from_clip(self):
        """Mit Clipping ist σ_i = c, ohne braucht tail_bound ein σ_i"""
        clipped = OTScoreDetector(two_atom_model([1.0, 0.0], [0.0, 1.0], clip=2.0))
        self.assertEqual(clipped.sigma_i, 2.0)
        run = clipped.run(np.zeros((50, 1)), ThresholdPolicy.tail_bound(0.01))
        self.assertAlmostEqual(run.h, calibrate_threshold(0.01, 50 * 4.0))

        unclipped = OTScoreDetector(two_atom_model([1.0, 0.0], [0.0, 1.0]))
        with self.assertRaises(ConfigError):
            unclipped.run(np.zeros((50, 1)), ThresholdPolicy.tail_bound(0.01))
        self.assertEqual(OTScoreDetector(unclipped.model, sigma_i=3.0).sigma_i, 3.0)

    def test_dimension_mismatch(self):
        """Residuen falscher Dimension"""
        detector = OTScoreDetector(two_atom_model([0.5, 0.5], [0.5, 0.5]))
        with self.assertRaises(DimensionError):
            detector.run(np.zeros((5, 2)), ThresholdPolicy.fixed(1.0))


class TestGaussianCusumDetector(unittest.TestCase):
    """Tests für den Gauß-CUSUM"""

    def test_scalar_examples(self):
        """Σ0=1, Σ1=4: z=0 ergibt -ln 2, z=2 ergibt 1.5 - ln 2"""
        detector = GaussianCusumDetector([[1.0]], [[4.0]])
        np.testing.assert_allclose(detector.increments(np.array([[0.0], [2.0]])),
                                   [-math.log(2.0), 1.5 - math.log(2.0)], rtol=1e-12)

    def test_equal_covariances(self):
        """Σ0 = Σ1: Inkremente ≡ 0"""
        Sigma = [[2.0, 0.3], [0.3, 1.0]]
        detector = GaussianCusumDetector(Sigma, Sigma)
        run = detector.run(np.random.default_rng(5).normal(size=(100, 2)), ThresholdPolicy.fixed(0.1))
        np.testing.assert_allclose(run.scores, np.zeros(100), atol=1e-12)
        self.assertIsNone(run.tau_det)

    def test_singular_covariance(self):
        """Singuläre Kovarianz: Ridge mit Warnung"""
        with self.assertWarns(RuntimeWarning):
            detector = GaussianCusumDetector([[1.0, 1.0], [1.0, 1.0]], np.eye(2))
        self.assertTrue(np.all(np.isfinite(detector.increments(np.ones((3, 2))))))

    def test_dimension_mismatch(self):
        """Σ0 und Σ1 verschieden groß"""
        with self.assertRaises(DimensionError):
            GaussianCusumDetector(np.eye(2), np.eye(3))

    def test_fit_baseline(self):
        """Kovarianzen aus den Trainingsdaten"""
        rng = np.random.default_rng(6)
        X1 = rng.normal(size=(400, 2))
        X2 = rng.normal(size=(400, 2)) * 2.0
        detector = fit_baseline(X1, X2, sigma_i=1.0)
        np.testing.assert_allclose(detector.Sigma0, np.cov(X1, rowvar=False))
        self.assertEqual(detector.with_sigma_i(2.0).sigma_i, 2.0)
        np.testing.assert_array_equal(sample_covariance([[1.0, 2.0]]), np.zeros((2, 2)))


if __name__ == '__main__':
    unittest.main()
