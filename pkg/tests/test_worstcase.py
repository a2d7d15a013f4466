import itertools
import os
import tempfile
import unittest
from fractions import Fraction

from circuit_hardness.lab.check import InvalidParameterError
from circuit_hardness.lab.circuits import gates as gatelib
from circuit_hardness.lab.circuits.circuit import Circuit, bits_from_index, zeros
from circuit_hardness.lab.circuits.simulator import (output_probabilities,
                                                     output_probability,
                                                     postselected_probability,
                                                     postselected_state, simulate)
from circuit_hardness.lab.worstcase.builders import (build_haar_hard_circuit,
                                                     build_iqp_hard_circuit,
                                                     build_qaoa_hard_circuit,
                                                     hard_probability_fraction)
from circuit_hardness.lab.worstcase.gadget import (UnsupportedGateError,
                                                   hadamard_gadget_expand)
from circuit_hardness.lab.worstcase.signs import (SignFunction, SignFunctionError,
                                                  balanced_sign_function,
                                                  constant_sign_function,
                                                  parity_sign_function,
                                                  parse_sign_function,
                                                  random_sign_function,
                                                  read_sign_function,
                                                  write_sign_function)

import numpy as np


BUILDERS = (build_qaoa_hard_circuit, build_iqp_hard_circuit, build_haar_hard_circuit)


class TestSignFunctions(unittest.TestCase):

    def test_table_size(self):
        with self.assertRaises(SignFunctionError):
            SignFunction(2, (1, 1, 1))

    def test_entries_are_signs(self):
        with self.assertRaises(SignFunctionError):
            SignFunction(1, (1, 0))

    def test_balanced_and_parity_sum_to_zero(self):
        self.assertEqual(parity_sign_function(3).total(), 0)
        self.assertEqual(balanced_sign_function(4, seed=5).total(), 0)

    def test_random_is_seeded(self):
        self.assertEqual(random_sign_function(4, seed=1), random_sign_function(4, seed=1))

    def test_file_round_trip(self):
        f = random_sign_function(3, seed=2)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'f.txt')
            write_sign_function(f, path)
            self.assertEqual(read_sign_function(path), f)

    def test_missing_header(self):
        with self.assertRaises(SignFunctionError):
            parse_sign_function('1\n-1\n')


class TestHardCircuits(unittest.TestCase):

    def test_closed_form(self):
        self.assertEqual(hard_probability_fraction(constant_sign_function(2)), 1)
        self.assertEqual(hard_probability_fraction(parity_sign_function(2)), 0)
        f = SignFunction(2, (1, 1, 1, -1))
        self.assertEqual(hard_probability_fraction(f), Fraction(1, 4))

    def test_every_family_reaches_the_closed_form(self):
        for seed in range(4):
            f = random_sign_function(3, seed=seed)
            expected = float(hard_probability_fraction(f))
            for builder in (build_qaoa_hard_circuit, build_iqp_hard_circuit,
                            build_haar_hard_circuit):
                self.assertAlmostEqual(output_probability(builder(f), zeros(3)),
                                       expected, places=12)

    def test_padding(self):
        f = constant_sign_function(2)
        self.assertEqual(len(build_qaoa_hard_circuit(f, pad_to=7)), 7)
        self.assertEqual(len(build_iqp_hard_circuit(f, pad_to=4)), 4 + 2 * 2)
        with self.assertRaises(InvalidParameterError):
            build_qaoa_hard_circuit(f, pad_to=2)

    def test_padding_keeps_the_probability(self):
        f = SignFunction(2, (1, 1, 1, -1))
        self.assertAlmostEqual(output_probability(build_qaoa_hard_circuit(f, pad_to=9),
                                                  zeros(2)), 0.25, places=12)

    def test_haar_circuit_uses_small_gates(self):
        for n, count in ((1, 1), (2, 1), (3, 6)):
            circuit = build_haar_hard_circuit(constant_sign_function(n))
            self.assertEqual(len(circuit), count)
        for n in (3, 4):
            circuit = build_haar_hard_circuit(random_sign_function(n, seed=n))
            self.assertTrue(all(gate.arity <= 2 for gate in circuit.gates))

    def test_every_table_on_two_qubits(self):
        for table in itertools.product((1, -1), repeat=4):
            f = SignFunction(2, table)
            expected = float(hard_probability_fraction(f))
            for builder in BUILDERS:
                self.assertAlmostEqual(output_probability(builder(f), zeros(2)), expected,
                                       delta=1e-9, msg=f'{builder.__name__} {table}')

    def test_random_tables_on_three_and_four_qubits(self):
        for n in (3, 4):
            for seed in range(200):
                f = random_sign_function(n, seed=seed)
                expected = float(hard_probability_fraction(f))
                for builder in BUILDERS:
                    self.assertAlmostEqual(output_probability(builder(f), zeros(n)),
                                           expected, delta=1e-9,
                                           msg=f'{builder.__name__} n={n} seed={seed}')

    def test_closed_form_for_every_outcome(self):
        f = random_sign_function(3, seed=9)
        for index in range(8):
            outcome = bits_from_index(index, 3)
            expected = float(hard_probability_fraction(f, outcome))
            for builder in BUILDERS:
                self.assertAlmostEqual(output_probability(builder(f), outcome), expected,
                                       places=12, msg=f'{builder.__name__} {outcome}')
        self.assertEqual(hard_probability_fraction(parity_sign_function(2), (1, 1)), 1)
        self.assertEqual(hard_probability_fraction(constant_sign_function(2), (1, 0)), 0)


class TestHadamardGadget(unittest.TestCase):

    def test_expansion_reproduces_the_output(self):
        circuit = Circuit(2, (gatelib.hadamard(0), gatelib.phase_t(0),
                              gatelib.controlled_z(0, 1), gatelib.hadamard(1),
                              gatelib.hadamard(0), gatelib.phase_s(1)))
        expansion = hadamard_gadget_expand(circuit)
        self.assertEqual(expansion.circuit.n_qubits, 5)
        expected = output_probabilities(circuit)
        for index, probability in enumerate(expected):
            outcome = bits_from_index(index, 2)
            self.assertAlmostEqual(
                postselected_probability(expansion.circuit, expansion.postselect_mask,
                                         outcome, expansion.data_qubits),
                probability, places=12)

    def test_conditional_state_matches_up_to_phase(self):
        circuit = build_iqp_hard_circuit(random_sign_function(2, seed=4))
        expansion = hadamard_gadget_expand(circuit)
        state = postselected_state(expansion.circuit, expansion.postselect_mask,
                                   expansion.data_qubits).amplitudes
        reference = simulate(circuit).amplitudes
        overlap = abs(np.vdot(reference, state))
        self.assertAlmostEqual(overlap, 1.0, places=12)

    def test_without_hadamards(self):
        circuit = Circuit(1, (gatelib.phase_t(0),))
        expansion = hadamard_gadget_expand(circuit)
        self.assertIs(expansion.circuit, circuit)
        self.assertEqual(expansion.postselect_mask, {})

    def test_unsupported_gate(self):
        with self.assertRaises(UnsupportedGateError):
            hadamard_gadget_expand(Circuit(1, (gatelib.rx(0.2, 0),)))
