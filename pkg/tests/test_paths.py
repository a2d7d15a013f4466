import unittest
from unittest import mock

from circuit_hardness.lab.families import paths
from circuit_hardness.lab.families.draws import FamilyKind, p_theta, sample_random_draw
from circuit_hardness.lab.families.paths import (TooLargeForEnumerationError, path_terms,
                                                 sum_over_paths_probability)
from circuit_hardness.lab.polyapprox import log2_derivative_prefactor, required_degree
from circuit_hardness.lab.worstcase.builders import (build_haar_hard_circuit,
                                                     build_iqp_hard_circuit,
                                                     build_qaoa_hard_circuit)
from circuit_hardness.lab.worstcase.signs import (balanced_sign_function,
                                                  random_sign_function)

import numpy as np


class TestPathSums(unittest.TestCase):

    def setUp(self):
        self.f = balanced_sign_function(2, seed=7)

    def assert_matches_simulation(self, draw):
        for theta in np.linspace(0.0, draw.m, 5):
            self.assertAlmostEqual(sum_over_paths_probability(draw, float(theta)),
                                   p_theta(draw, float(theta)), places=10)

    def test_qaoa(self):
        circuit = build_qaoa_hard_circuit(self.f, pad_to=4)
        self.assert_matches_simulation(
            sample_random_draw(FamilyKind.QAOA_P1, None, circuit, seed=1))

    def test_iqp(self):
        circuit = build_iqp_hard_circuit(self.f, pad_to=2)
        self.assert_matches_simulation(
            sample_random_draw(FamilyKind.IQP, None, circuit, seed=2))

    def test_haar(self):
        circuit = build_haar_hard_circuit(self.f)
        self.assert_matches_simulation(
            sample_random_draw(FamilyKind.HAAR, None, circuit, seed=3))

    def test_term_counts(self):
        circuit = build_qaoa_hard_circuit(self.f)
        draw = sample_random_draw(FamilyKind.QAOA_P1, None, circuit, seed=0)
        self.assertEqual(len(path_terms(draw)), 1 << 8)
        circuit = build_iqp_hard_circuit(self.f)
        draw = sample_random_draw(FamilyKind.IQP, None, circuit, seed=0)
        self.assertEqual(len(path_terms(draw)), 1 << 4)

    def test_enumeration_limit(self):
        circuit = build_qaoa_hard_circuit(self.f)
        draw = sample_random_draw(FamilyKind.QAOA_P1, None, circuit, seed=0)
        with mock.patch.object(paths, 'MAX_PATH_TERMS', 10):
            with self.assertRaises(TooLargeForEnumerationError):
                path_terms(draw)


class TestPathAmplitudes(unittest.TestCase):

    def audit(self, draw, budget):
        terms = path_terms(draw)
        self.assertTrue(np.all(np.abs(terms.delta_phases) <= 2 * np.pi * draw.m + 1e-9))
        total = float(np.sum(np.abs(terms.amplitudes)))
        self.assertLessEqual(total, 2.0 ** log2_derivative_prefactor(budget) * (1 + 1e-9))
        return np.abs(terms.amplitudes)

    def test_qaoa_terms_have_equal_moduli(self):
        for n in (1, 2):
            f = random_sign_function(n, seed=n)
            circuit = build_qaoa_hard_circuit(f, pad_to=n + 2)
            budget = required_degree(n + 2, n, 4, FamilyKind.QAOA_P1)
            for seed in range(5):
                draw = sample_random_draw(FamilyKind.QAOA_P1, None, circuit, seed=seed)
                moduli = self.audit(draw, budget)
                np.testing.assert_allclose(moduli, 2.0 ** (-3 * n), rtol=1e-12)

    def test_iqp_terms_have_equal_moduli(self):
        for n in (1, 2, 3):
            f = random_sign_function(n, seed=n)
            circuit = build_iqp_hard_circuit(f, pad_to=n + 1)
            for seed in range(5):
                draw = sample_random_draw(FamilyKind.IQP, None, circuit, seed=seed)
                moduli = self.audit(draw, required_degree(draw.m, n, 4, FamilyKind.IQP))
                np.testing.assert_allclose(moduli, 2.0 ** (-2 * n), rtol=1e-12)

    def test_haar_terms_are_bounded(self):
        for n, m in ((1, 3), (1, 5), (2, 3), (2, 5)):
            circuit = build_haar_hard_circuit(random_sign_function(n, seed=m), pad_to=m)
            for seed in range(3):
                draw = sample_random_draw(FamilyKind.HAAR, None, circuit, seed=seed)
                moduli = self.audit(draw, required_degree(m, n, 4, FamilyKind.HAAR))
                self.assertLessEqual(float(moduli.max()), 1 + 1e-12)
                self.assertAlmostEqual(sum_over_paths_probability(draw, 0.0),
                                       p_theta(draw, 0.0), places=9)
