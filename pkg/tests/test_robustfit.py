import math
import unittest

from circuit_hardness.lab.check import InvalidParameterError
from circuit_hardness.lab.polyapprox import Polynomial
from circuit_hardness.lab.robustfit import (FIT_TRIAL_COLUMNS, DegenerateSampleError,
                                            NoisyOracle, SamplePlan,
                                            UnderdeterminedFitError,
                                            chebyshev_sample_points,
                                            coefficient_norm_check, extrapolate_to_m,
                                            log2_abs, meets_success_contract, robust_fit,
                                            run_fit_trial, sample_count, success_rate,
                                            sup_error, synthetic_polynomial)
from circuit_hardness.lab.statcheck import ks_arcsine

import mpmath

import numpy as np


class TestSamplePlan(unittest.TestCase):

    def test_count(self):
        self.assertEqual(sample_count(3), math.ceil(4 * 3 * math.log(5)))
        self.assertEqual(chebyshev_sample_points(3, 0.25).count, sample_count(3))

    def test_points_in_window_and_seeded(self):
        plan = chebyshev_sample_points(5, 0.2, seed=4)
        self.assertTrue(all(0.0 <= x <= 0.2 for x in plan.points))
        self.assertEqual(plan.points, chebyshev_sample_points(5, 0.2, seed=4).points)
        self.assertNotEqual(plan.points, chebyshev_sample_points(5, 0.2, seed=5).points)

    def test_points_follow_the_arcsine_law(self):
        plan = chebyshev_sample_points(50, 0.25, sample_constant=40, seed=1)
        self.assertTrue(ks_arcsine(plan.points, 0.25, alpha=1e-4).passes)

    def test_window_range(self):
        with self.assertRaises(InvalidParameterError):
            chebyshev_sample_points(3, 1.0)


class TestNoisyOracle(unittest.TestCase):

    def test_noiseless(self):
        oracle = NoisyOracle(lambda theta: theta ** 2)
        self.assertEqual(oracle(0.5, 3), mpmath.mpf(0.25))

    def test_noise_is_bounded(self):
        oracle = NoisyOracle(lambda theta: 0.5, delta=1e-3, seed=2)
        for index in range(50):
            self.assertLessEqual(abs(oracle(0.1, index) - 0.5), 1e-3)

    def test_contamination_range(self):
        with self.assertRaises(InvalidParameterError):
            NoisyOracle(lambda theta: 0.0, eta=0.25)

    def test_failure_mode(self):
        with self.assertRaises(InvalidParameterError):
            NoisyOracle(lambda theta: 0.0, failure_mode='sometimes')

    def test_per_circuit_failures_are_all_or_nothing(self):
        for seed in range(40):
            oracle = NoisyOracle(lambda theta: 0.0, eta=0.2, seed=seed,
                                 failure_mode='per_circuit')
            statuses = {oracle.is_outlier(index) for index in range(30)}
            self.assertEqual(statuses, {oracle.circuit_fails})

    def test_per_circuit_failure_rate(self):
        failed = sum(NoisyOracle(lambda theta: 0.0, eta=0.2, seed=seed,
                                 failure_mode='per_circuit').circuit_fails
                     for seed in range(2000))
        self.assertAlmostEqual(failed / 2000, 0.2, delta=0.03)

    def test_failing_circuit_fails_at_every_theta(self):
        oracles = [NoisyOracle(lambda theta: 0.5, delta=1e-6, eta=0.2, seed=seed,
                               failure_mode='per_circuit') for seed in range(60)]
        thetas = np.linspace(0.0, 0.25, 20)
        self.assertTrue(any(oracle.circuit_fails for oracle in oracles))
        for oracle in oracles:
            gaps = [abs(oracle(theta, index) - 0.5) for index, theta in enumerate(thetas)]
            if oracle.circuit_fails:
                self.assertTrue(all(gap > 1e-6 for gap in gaps))
            else:
                self.assertTrue(all(gap <= 1e-6 for gap in gaps))

    def test_failure_modes_differ(self):
        for seed in range(10):
            per_query = NoisyOracle(lambda theta: 0.0, eta=0.2, seed=seed)
            per_circuit = NoisyOracle(lambda theta: 0.0, eta=0.2, seed=seed,
                                      failure_mode='per_circuit')
            self.assertEqual({per_query.is_outlier(index) for index in range(200)},
                             {False, True})
            self.assertEqual(len({per_circuit.is_outlier(index) for index in range(200)}),
                             1)

    def test_outlier_share(self):
        oracle = NoisyOracle(lambda theta: 0.0, eta=0.2, seed=3)
        share = sum(oracle.is_outlier(index) for index in range(4000)) / 4000
        self.assertAlmostEqual(share, 0.2, delta=0.03)


class TestRobustFit(unittest.TestCase):

    def test_noiseless_fit_is_exact(self):
        truth = synthetic_polynomial(4, 0.25, seed=0)
        plan = chebyshev_sample_points(4, 0.25, seed=0)
        fit = robust_fit(plan, [truth(x) for x in plan.points], 4)
        self.assertLess(sup_error(fit, truth), 1e-12)
        self.assertEqual(fit.interval, (0.0, 0.25))

    def test_outliers_are_ignored(self):
        truth = synthetic_polynomial(3, 0.25, seed=1)
        plan = chebyshev_sample_points(3, 0.25, sample_constant=8, seed=1)
        values = [truth(x) for x in plan.points]
        for index in range(0, len(values), 20):
            values[index] = 0.9
        fit = robust_fit(plan, values, 3)
        self.assertLess(sup_error(fit, truth), 1e-8)

    def test_extended_precision_refit(self):
        truth = synthetic_polynomial(3, 0.25, seed=2)
        plan = chebyshev_sample_points(3, 0.25, seed=2)
        values = [truth.evaluate_extended(x, 256) for x in plan.points]
        fit = robust_fit(plan, values, 3, precision=256)
        self.assertIsInstance(fit.coefficients[0], mpmath.mpf)
        self.assertLess(sup_error(fit, truth, precision=256), 1e-30)

    def test_underdetermined(self):
        plan = SamplePlan(0.25, (0.0, 0.1, 0.2), 0, 3)
        with self.assertRaises(UnderdeterminedFitError):
            robust_fit(plan, (0.0, 0.0, 0.0), 3)

    def test_degenerate_points(self):
        plan = SamplePlan(0.25, (0.1,) * 6, 0, 2)
        with self.assertRaises(DegenerateSampleError):
            robust_fit(plan, (0.0,) * 6, 2)

    def test_value_count(self):
        plan = chebyshev_sample_points(2, 0.25)
        with self.assertRaises(InvalidParameterError):
            robust_fit(plan, (0.0,), 2)


class TestExtrapolation(unittest.TestCase):

    def test_certificate(self):
        fit = Polynomial((0.5, 0.1), (0.0, 0.25))
        certificate = extrapolate_to_m(fit, 4, 0.25, delta=1e-6)
        self.assertAlmostEqual(float(certificate.p_m), 0.5 + 0.1 * 31)
        self.assertAlmostEqual(certificate.log2_bound,
                               math.log2(9e-6 / 4) + math.log2(8 * 4 / 0.25))
        self.assertAlmostEqual(certificate.delta_prime_scale, 0.25 / 32)
        self.assertTrue(certificate.covers(0.5 + 0.1 * 31))

    def test_interval_must_be_the_window(self):
        with self.assertRaises(InvalidParameterError):
            extrapolate_to_m(Polynomial((1.0,), (0.0, 0.5)), 4, 0.25)

    def test_m_beyond_window(self):
        with self.assertRaises(InvalidParameterError):
            extrapolate_to_m(Polynomial((1.0,), (0.0, 0.25)), 0.1, 0.25)

    def test_coefficient_norm(self):
        delta_prime = 1e-3
        self.assertTrue(coefficient_norm_check(Polynomial((0.0, 0.0, delta_prime)),
                                               delta_prime))
        self.assertFalse(coefficient_norm_check(Polynomial((0.0, 0.0, 1.0)), delta_prime))

    def test_log2_abs(self):
        self.assertEqual(log2_abs(0), -math.inf)
        self.assertAlmostEqual(log2_abs(mpmath.ldexp(mpmath.mpf(1), -5000)), -5000)
        self.assertAlmostEqual(log2_abs(-0.25), -2.0)


class TestFitTrials(unittest.TestCase):

    def test_noiseless_trial_is_certified(self):
        trial = run_fit_trial(0, 2, 0.25, 0.0, 0.0, 4)
        self.assertTrue(trial.within_fit_contract())
        self.assertTrue(trial.within_certificate)
        self.assertEqual(len(trial.as_row()), len(FIT_TRIAL_COLUMNS))

    def test_extended_precision_trial(self):
        trial = run_fit_trial(1, 4, 0.25, 0.0, 0.0, 8, precision=256)
        self.assertTrue(trial.within_certificate)
        self.assertLess(trial.measured_log2_error, -60)

    def test_contaminated_trials(self):
        trials = [run_fit_trial(seed, 3, 0.25, 1e-6, 0.1, 8, sample_constant=8)
                  for seed in range(12)]
        self.assertTrue(meets_success_contract(trials))

    def test_per_circuit_failures(self):
        trials = [run_fit_trial(seed, 2, 0.25, 1e-6, 0.1, 4, sample_constant=8,
                                failure_mode='per_circuit')
                  for seed in range(30)]
        self.assertGreaterEqual(success_rate(trials), 2 / 3)

    def test_exact_recovery_without_noise(self):
        for d in range(1, 11):
            trial = run_fit_trial(d, d, 0.25, 0.0, 0.0, 8)
            self.assertLessEqual(trial.sup_error, 1e-9, msg=f'd={d}')

    def test_fit_contract_under_contamination(self):
        for d in (2, 4, 6, 8, 10):
            trials = [run_fit_trial(seed, d, 0.25, 1e-6, 0.2, 8, sample_constant=8)
                      for seed in range(50)]
            self.assertTrue(meets_success_contract(trials), msg=f'd={d}')

    def test_constant_polynomial_with_outliers(self):
        truth = Polynomial((0.5,), (0.0, 0.25))
        errors = []
        for seed in range(50):
            oracle = NoisyOracle(lambda theta: 0.5, 1e-6, 0.2, seed)
            plan = chebyshev_sample_points(3, 0.25, sample_constant=8, seed=seed)
            fit = robust_fit(plan, oracle.query_plan(plan), 3, 1e-6)
            errors.append(sup_error(fit, truth))
        self.assertGreaterEqual(sum(error <= 2.25e-6 for error in errors), 2 / 3 * 50)

    def test_extrapolation_stays_within_certificate(self):
        for d in (2, 3, 5):
            for seed in range(50):
                trial = run_fit_trial(seed, d, 0.25, 1e-12, 0.0, 8)
                self.assertTrue(trial.within_certificate, msg=f'd={d} seed={seed}')

    def test_residual_coefficients_are_bounded(self):
        for d in (2, 3, 5):
            for seed in range(50):
                truth = synthetic_polynomial(d, 0.25, seed)
                oracle = NoisyOracle(truth, 1e-6, 0.0, seed)
                plan = chebyshev_sample_points(d, 0.25, seed=seed)
                fit = robust_fit(plan, oracle.query_plan(plan), d, 1e-6)
                residual = Polynomial(tuple(float(a) - float(b) for a, b in
                                            zip(fit.coefficients, truth.coefficients)))
                self.assertTrue(coefficient_norm_check(residual, sup_error(fit, truth)),
                                msg=f'd={d} seed={seed}')

    def test_no_trials(self):
        with self.assertRaises(InvalidParameterError):
            success_rate([])
