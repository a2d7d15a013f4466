import math
import unittest

from circuit_hardness.lab.check import InvalidParameterError, ThetaRangeError
from circuit_hardness.lab.circuits import gates as gatelib
from circuit_hardness.lab.circuits.circuit import Circuit, InitialState, zeros
from circuit_hardness.lab.circuits.simulator import output_probability
from circuit_hardness.lab.families.draws import (FamilyKind, HaarRandomness,
                                                 LayoutMismatchError,
                                                 QaoaPhaseDistribution, SlotBasis,
                                                 build_architecture,
                                                 build_interpolated_circuit, p_theta,
                                                 random_circuit, sample_random_draw)
from circuit_hardness.lab.families.haar import (UnsupportedDimensionError, eigendecompose,
                                                haar_matrix, haar_unitary,
                                                unitary_fractional_power)
from circuit_hardness.lab.families.serialization import dump_draw, load_draw
from circuit_hardness.lab.schema import ValidationError
from circuit_hardness.lab.statcheck import ks_uniform
from circuit_hardness.lab.utils import child_rng
from circuit_hardness.lab.worstcase.builders import (build_haar_hard_circuit,
                                                     build_iqp_hard_circuit,
                                                     build_qaoa_hard_circuit,
                                                     hard_probability_reference)
from circuit_hardness.lab.worstcase.signs import (balanced_sign_function,
                                                  constant_sign_function,
                                                  random_sign_function)

import numpy as np


BUILDERS = {
    FamilyKind.QAOA_P1: build_qaoa_hard_circuit,
    FamilyKind.IQP: build_iqp_hard_circuit,
    FamilyKind.HAAR: build_haar_hard_circuit,
}


class TestArchitecture(unittest.TestCase):

    def test_qaoa_slots(self):
        circuit = build_qaoa_hard_circuit(constant_sign_function(2), pad_to=4)
        architecture = build_architecture(FamilyKind.QAOA_P1, circuit)
        self.assertEqual(architecture.m, 4)
        self.assertEqual([slot.basis for slot in architecture.slots],
                         [SlotBasis.Z, SlotBasis.Z, SlotBasis.X, SlotBasis.X])
        self.assertEqual(architecture.local_dimension, 4)

    def test_iqp_counts_diagonal_gates_only(self):
        circuit = build_iqp_hard_circuit(constant_sign_function(2), pad_to=3)
        self.assertEqual(build_architecture(FamilyKind.IQP, circuit).m, 3)

    def test_iqp_needs_zero_initial_state(self):
        circuit = build_qaoa_hard_circuit(constant_sign_function(1))
        with self.assertRaises(LayoutMismatchError):
            build_architecture(FamilyKind.IQP, circuit)

    def test_qaoa_mixer_must_be_x_diagonal(self):
        circuit = Circuit(1, (gatelib.diagonal((0, 1), (0,)), gatelib.phase_t(0)),
                          InitialState.PLUS)
        with self.assertRaises(LayoutMismatchError):
            build_architecture(FamilyKind.QAOA_P1, circuit)

    def test_unknown_phase_distribution(self):
        with self.assertRaises(InvalidParameterError):
            QaoaPhaseDistribution('gaussian')


class TestDraws(unittest.TestCase):

    def test_endpoint_is_the_base_circuit(self):
        f = balanced_sign_function(2, seed=1)
        for family, builder in BUILDERS.items():
            circuit = builder(f, pad_to=3)
            draw = sample_random_draw(family, None, circuit, seed=5)
            expected = output_probability(circuit, zeros(2))
            self.assertAlmostEqual(p_theta(draw, draw.m), expected, places=12, msg=family)

    def test_hard_circuits_reach_the_closed_form(self):
        f = random_sign_function(2, seed=3)
        for family, builder in BUILDERS.items():
            circuit = builder(f)
            self.assertAlmostEqual(output_probability(circuit, zeros(2)),
                                   hard_probability_reference(f), places=12, msg=family)

    def test_same_seed_same_draw(self):
        circuit = build_qaoa_hard_circuit(constant_sign_function(2))
        first = sample_random_draw(FamilyKind.QAOA_P1, None, circuit, seed=11)
        second = sample_random_draw(FamilyKind.QAOA_P1, None, circuit, seed=11)
        for a, b in zip(first.randomness.random_phases, second.randomness.random_phases):
            np.testing.assert_array_equal(a, b)

    def test_degenerate_draw_is_constant(self):
        f = constant_sign_function(2)
        circuit = build_iqp_hard_circuit(f, pad_to=2)
        draw = sample_random_draw(FamilyKind.IQP, None, circuit, seed=2)
        draw = draw.without_randomness()
        for theta in (0.0, 0.7, 2.0):
            self.assertAlmostEqual(p_theta(draw, theta), 1.0, places=12)

    def test_theta_outside_of_range(self):
        circuit = build_qaoa_hard_circuit(constant_sign_function(1))
        draw = sample_random_draw(FamilyKind.QAOA_P1, None, circuit)
        with self.assertRaises(ThetaRangeError):
            p_theta(draw, draw.m + 0.5)
        with self.assertRaises(ThetaRangeError):
            build_interpolated_circuit(draw, -1e-3)

    def test_probabilities_are_probabilities(self):
        circuit = build_haar_hard_circuit(balanced_sign_function(2, seed=0))
        draw = sample_random_draw(FamilyKind.HAAR, None, circuit, seed=4)
        for theta in np.linspace(0.0, draw.m, 7):
            self.assertTrue(-1e-12 <= p_theta(draw, float(theta)) <= 1 + 1e-12)

    def test_sk_phases_are_couplings(self):
        circuit = build_qaoa_hard_circuit(constant_sign_function(2), pad_to=4)
        draw = sample_random_draw(FamilyKind.QAOA_P1, None, circuit,
                                  QaoaPhaseDistribution('sk'), seed=9)
        self.assertEqual(draw.distribution.kind, 'sk')
        self.assertEqual(len(random_circuit(draw)), len(circuit))


class TestHaar(unittest.TestCase):

    def test_seeded_and_unitary(self):
        first, second = haar_unitary(4, seed=1), haar_unitary(4, seed=1)
        np.testing.assert_array_equal(first.matrix, second.matrix)
        first.check_unitary()

    def test_unsupported_dimension(self):
        with self.assertRaises(UnsupportedDimensionError):
            haar_unitary(8, seed=0)

    def test_decomposition_reproduces_the_matrix(self):
        gate = haar_unitary(4, seed=2)
        np.testing.assert_allclose(eigendecompose(gate.matrix).power(1.0), gate.matrix,
                                   atol=1e-10)

    def test_square_root(self):
        gate = haar_unitary(2, seed=3)
        root = unitary_fractional_power(gate, 0.5)
        np.testing.assert_allclose(root.matrix @ root.matrix, gate.matrix, atol=1e-10)

    def test_degenerate_spectrum(self):
        decomposition = eigendecompose(np.diag([1j, 1j, -1, -1]))
        np.testing.assert_allclose(decomposition.power(0.0), np.eye(4), atol=1e-12)

    def test_grouping_wraps_around_the_branch_cut(self):
        phases = np.array([math.pi - 1e-14, -math.pi + 1e-14])
        decomposition = eigendecompose(np.diag(np.exp(1j * phases)))
        self.assertEqual(decomposition.phases[0], decomposition.phases[1])
        self.assertAlmostEqual(abs(decomposition.phases[0]), math.pi, places=12)
        root = decomposition.power(0.5)
        np.testing.assert_allclose(root, root[0, 0] * np.eye(2), atol=1e-12)
        np.testing.assert_allclose(root @ root, -np.eye(2), atol=1e-12)

    def test_eigenphases_are_uniform(self):
        rng = child_rng(7)
        phases = np.concatenate([eigendecompose(haar_matrix(2, rng)).phases
                                 for _ in range(10 ** 4)])
        self.assertTrue(ks_uniform(phases, -math.pi, math.pi, alpha=0.01).passes)

    def test_trace_has_zero_mean(self):
        rng = child_rng(8)
        traces = [np.trace(haar_matrix(2, rng)) for _ in range(10 ** 4)]
        self.assertLess(abs(np.mean(traces)), 3 / math.sqrt(10 ** 4))

    def test_haar_draws_use_one_and_two_qubit_gates(self):
        for n in (1, 2, 3):
            circuit = build_haar_hard_circuit(random_sign_function(n, seed=n))
            draw = sample_random_draw(FamilyKind.HAAR, None, circuit, seed=n)
            self.assertTrue(all(gate.arity <= 2 for gate in circuit.gates))
            self.assertTrue(all(gate.matrix.shape[0] in (2, 4)
                                for gate in random_circuit(draw).gates))


class TestSerialization(unittest.TestCase):

    def test_draw_survives_json(self):
        f = balanced_sign_function(2, seed=0)
        for family, builder in BUILDERS.items():
            draw = sample_random_draw(family, None, builder(f), seed=6)
            loaded = load_draw(dump_draw(draw))
            self.assertIs(loaded.family, family)
            self.assertEqual(loaded.seed, 6)
            self.assertAlmostEqual(p_theta(loaded, 0.5), p_theta(draw, 0.5), places=12)
            if family is FamilyKind.HAAR:
                self.assertIsInstance(loaded.randomness, HaarRandomness)

    def test_malformed_document(self):
        with self.assertRaises(ValidationError):
            load_draw('{"family": "qaoa"}')

    def test_not_json(self):
        with self.assertRaises(ValidationError):
            load_draw('family=qaoa')
