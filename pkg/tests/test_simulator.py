import math
import unittest

from circuit_hardness.lab.circuits import gates as gatelib
from circuit_hardness.lab.circuits.circuit import (Circuit, InitialState, OutcomeError,
                                                   SupportError, bits_from_index,
                                                   index_from_bits, parse_bits)
from circuit_hardness.lab.circuits.gates import Gate, GateError, NonUnitaryError
from circuit_hardness.lab.circuits.simulator import (InvalidGadgetError, StateVector,
                                                     apply_gate, dense_unitary,
                                                     output_probabilities,
                                                     output_probability,
                                                     postselected_probability, simulate)

import numpy as np


def random_two_qubit_circuit(seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    return Circuit(3, (gatelib.hadamard(0), gatelib.from_matrix((2, 0), q),
                       gatelib.controlled_z(1, 2), gatelib.phase_t(1),
                       gatelib.rx(0.3, 2)))


def random_circuit(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    gates = []
    for _ in range(int(rng.integers(1, 9))):
        arity = int(rng.integers(1, min(n, 2) + 1))
        support = tuple(int(q) for q in rng.permutation(n)[:arity])
        dim = 1 << arity
        ginibre = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        q, _ = np.linalg.qr(ginibre)
        gates.append(gatelib.from_matrix(support, q))
    initial = InitialState.PLUS if rng.random() < 0.5 else InitialState.ZERO
    return Circuit(n, tuple(gates), initial)


class TestBits(unittest.TestCase):

    def test_qubit_zero_is_least_significant(self):
        self.assertEqual(bits_from_index(1, 3), (1, 0, 0))
        self.assertEqual(index_from_bits(parse_bits('001')), 4)

    def test_rejects_non_binary_bits(self):
        with self.assertRaises(OutcomeError):
            index_from_bits((0, 2))


class TestGates(unittest.TestCase):

    def test_non_unitary_matrix_is_rejected(self):
        with self.assertRaises(NonUnitaryError):
            gatelib.from_matrix((0,), np.array([[1, 1], [0, 1]]))

    def test_repeated_support_is_rejected(self):
        with self.assertRaises(GateError):
            Gate((1, 1), np.eye(4))

    def test_gate_outside_register(self):
        with self.assertRaises(SupportError):
            Circuit(2, (gatelib.hadamard(2),))

    def test_controlled_x_flips_the_target(self):
        circuit = Circuit(2, (gatelib.pauli_x(1), gatelib.controlled_x(1, 0)))
        self.assertAlmostEqual(output_probability(circuit, (1, 1)), 1.0, places=12)

    def test_embedding_on_a_wider_support(self):
        embedded = gatelib.embed_matrix(gatelib.pauli_x(1), (0, 1))
        expected = np.kron(gatelib.pauli_x(1).matrix, np.eye(2))
        np.testing.assert_allclose(embedded, expected)
        with self.assertRaises(GateError):
            gatelib.embed_matrix(gatelib.controlled_z(0, 2), (0, 1))

    def test_x_basis_phases_round_trip(self):
        gate = gatelib.x_basis_gate((0.5, 2.0), 0)
        np.testing.assert_allclose(gatelib.x_basis_phases(gate), (0.5, 2.0), atol=1e-12)

    def test_x_basis_phases_reject_z_rotation(self):
        with self.assertRaises(GateError):
            gatelib.x_basis_phases(gatelib.phase_t(0))


class TestSimulator(unittest.TestCase):

    def test_bell_state(self):
        circuit = Circuit(2, (gatelib.hadamard(0), gatelib.hadamard(1),
                              gatelib.controlled_z(0, 1), gatelib.hadamard(1)))
        probabilities = output_probabilities(circuit)
        np.testing.assert_allclose(probabilities, (0.5, 0, 0, 0.5), atol=1e-12)

    def test_plus_initial_state(self):
        circuit = Circuit(2, (gatelib.hadamard(0), gatelib.hadamard(1)),
                          InitialState.PLUS)
        self.assertAlmostEqual(output_probability(circuit, (0, 0)), 1.0, places=12)

    def test_statevector_matches_dense_unitary(self):
        for seed in range(5):
            circuit = random_two_qubit_circuit(seed)
            expected = dense_unitary(circuit)[:, 0]
            np.testing.assert_allclose(simulate(circuit).amplitudes, expected, atol=1e-12)

    def test_random_circuits_match_dense_unitary(self):
        for seed in range(20):
            circuit = random_circuit(seed)
            expected = np.abs(dense_unitary(circuit) @ circuit.initial_amplitudes()) ** 2
            np.testing.assert_allclose(output_probabilities(circuit), expected,
                                       atol=1e-10, err_msg=f'seed={seed}')

    def test_probabilities_sum_to_one(self):
        probabilities = output_probabilities(random_two_qubit_circuit(7))
        self.assertAlmostEqual(math.fsum(probabilities), 1.0, places=12)

    def test_outcome_length_is_checked(self):
        with self.assertRaises(OutcomeError):
            output_probability(random_two_qubit_circuit(0), (0, 0))

    def test_apply_gate_outside_state(self):
        state = StateVector(np.array([1, 0], dtype=complex))
        with self.assertRaises(SupportError):
            apply_gate(state, gatelib.hadamard(1))

    def test_postselection(self):
        # ancilla 1 post-selected on 0 after a CZ leaves qubit 0 untouched
        circuit = Circuit(2, (gatelib.hadamard(0), gatelib.controlled_z(0, 1)))
        probability = postselected_probability(circuit, {1: 0}, (0,), (0,))
        self.assertAlmostEqual(probability, 0.5, places=12)

    def test_postselection_on_impossible_outcome(self):
        circuit = Circuit(2, (gatelib.hadamard(0),))
        with self.assertRaises(InvalidGadgetError):
            postselected_probability(circuit, {1: 1}, (0,), (0,))
