import unittest

from circuit_hardness.lab.circuits import gates as gatelib
from circuit_hardness.lab.circuits.circuit import Circuit
from circuit_hardness.lab.circuits.simulator import simulate
from circuit_hardness.lab.worstcase.builders import build_iqp_hard_circuit
from circuit_hardness.lab.worstcase.ising import (IsingCoefficients, NonIqpFormError,
                                                  NotIsingRepresentable,
                                                  amplitude_as_ising_partition,
                                                  compile_to_ising, diagonal_block,
                                                  diagonal_phases, ising_diagonal,
                                                  ising_phases)
from circuit_hardness.lab.worstcase.signs import SignFunction, random_sign_function

import numpy as np


def pairwise_circuit(n, seed):
    rng = np.random.default_rng(seed)
    gates = [gatelib.rz(rng.uniform(0, 6), q) for q in range(n)]
    gates += [gatelib.diagonal((0.0, 0.0, 0.0, rng.uniform(0, 6)), (j, k))
              for j in range(n) for k in range(j + 1, n)]
    return Circuit(n, tuple(gates))


def random_iqp_circuit(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    layer = [gatelib.hadamard(q) for q in range(n)]
    block = []
    for _ in range(int(rng.integers(1, 3 * n + 1))):
        kind = int(rng.integers(4))
        qubit = int(rng.integers(n))
        if kind == 0:
            block.append(gatelib.rz(rng.uniform(0, 2 * np.pi), qubit))
        elif kind == 1:
            block.append(gatelib.phase_t(qubit))
        elif kind == 2:
            block.append(gatelib.phase_s(qubit))
        elif n > 1:
            other = int(rng.choice([q for q in range(n) if q != qubit]))
            block.append(gatelib.controlled_z(qubit, other))
    if not block:
        block.append(gatelib.phase_t(0))
    return Circuit(n, tuple(layer + block + layer))


class TestIsingCompilation(unittest.TestCase):

    def test_pairwise_circuits_are_representable(self):
        for seed in range(3):
            circuit = pairwise_circuit(3, seed)
            coefficients = compile_to_ising(circuit)
            np.testing.assert_allclose(
                ising_diagonal(coefficients, 3),
                np.exp(1j * diagonal_phases(circuit)), atol=1e-9)

    def test_clifford_t_diagonals_round_trip(self):
        circuit = Circuit(3, (gatelib.controlled_z(0, 1), gatelib.phase_s(2),
                              gatelib.phase_t(0), gatelib.controlled_z(1, 2)))
        coefficients = compile_to_ising(circuit)
        np.testing.assert_allclose(ising_diagonal(coefficients, 3),
                                   np.exp(1j * diagonal_phases(circuit)), atol=1e-12)

    def test_sign_convention(self):
        # S = diag(1, i) is exp(iπ/4) exp(-iπ/4 σ^z)
        coefficients = compile_to_ising(Circuit(1, (gatelib.phase_s(0),)))
        self.assertAlmostEqual(coefficients.linear[0], -np.pi / 4)
        self.assertAlmostEqual(coefficients.offset, np.pi / 4)

    def test_cubic_phase_is_not_representable(self):
        phases = np.zeros(8)
        phases[7] = np.pi
        circuit = Circuit(3, (gatelib.diagonal(phases, (0, 1, 2)),))
        with self.assertRaises(NotIsingRepresentable):
            compile_to_ising(circuit)

    def test_coefficients_resynthesise(self):
        coefficients = IsingCoefficients(np.array([0.3, -0.1]),
                                         np.array([[0.0, 0.7], [0.7, 0.0]]), 0.2)
        self.assertEqual(ising_phases(coefficients).shape, (4,))
        recompiled = compile_to_ising(Circuit(2, (gatelib.diagonal_from_values(
            ising_diagonal(coefficients, 2), (0, 1)),)))
        np.testing.assert_allclose(recompiled.linear, coefficients.linear, atol=1e-9)
        np.testing.assert_allclose(recompiled.quadratic, coefficients.quadratic,
                                   atol=1e-9)


class TestPartitionFunction(unittest.TestCase):

    def test_matches_the_simulated_amplitude(self):
        f = SignFunction(2, (1, -1, -1, 1))
        circuit = build_iqp_hard_circuit(f)
        amplitude = amplitude_as_ising_partition(circuit)
        self.assertAlmostEqual(amplitude, complex(simulate(circuit).amplitudes[0]))

    def test_random_iqp_circuits(self):
        for seed in range(50):
            circuit = random_iqp_circuit(seed)
            amplitude = amplitude_as_ising_partition(circuit)
            expected = complex(simulate(circuit).amplitudes[0])
            self.assertLessEqual(abs(amplitude - expected), 1e-9, msg=f'seed={seed}')

    def test_general_diagonal_falls_back_to_raw_phases(self):
        circuit = build_iqp_hard_circuit(random_sign_function(3, seed=6))
        amplitude = amplitude_as_ising_partition(circuit)
        self.assertAlmostEqual(abs(amplitude) ** 2,
                               (random_sign_function(3, seed=6).total() / 8) ** 2)

    def test_diagonal_block(self):
        circuit = build_iqp_hard_circuit(random_sign_function(2, seed=1), pad_to=3)
        self.assertEqual(len(diagonal_block(circuit)), 3)

    def test_rejects_non_iqp_layout(self):
        with self.assertRaises(NonIqpFormError):
            amplitude_as_ising_partition(pairwise_circuit(2, 0))
