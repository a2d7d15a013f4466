"""Worst-case hard circuits, Hadamard gadgets and Ising forms."""
from circuit_hardness.lab.worstcase.builders import (build_haar_hard_circuit,
                                                     build_iqp_hard_circuit,
                                                     build_qaoa_hard_circuit,
                                                     hard_probability_fraction,
                                                     hard_probability_reference)
from circuit_hardness.lab.worstcase.gadget import (GadgetExpansion, UnsupportedGateError,
                                                   hadamard_gadget_expand)
from circuit_hardness.lab.worstcase.ising import (IsingCoefficients, NonIqpFormError,
                                                  NotIsingRepresentable,
                                                  amplitude_as_ising_partition,
                                                  compile_to_ising, ising_diagonal)
from circuit_hardness.lab.worstcase.signs import (SignFunction, SignFunctionError,
                                                  balanced_sign_function,
                                                  constant_sign_function,
                                                  parity_sign_function,
                                                  parse_sign_function,
                                                  random_sign_function,
                                                  read_sign_function,
                                                  write_sign_function)

__all__ = [
    'GadgetExpansion', 'IsingCoefficients', 'NonIqpFormError', 'NotIsingRepresentable',
    'SignFunction', 'SignFunctionError', 'UnsupportedGateError',
    'amplitude_as_ising_partition', 'balanced_sign_function', 'build_haar_hard_circuit',
    'build_iqp_hard_circuit', 'build_qaoa_hard_circuit', 'compile_to_ising',
    'constant_sign_function', 'hadamard_gadget_expand', 'hard_probability_fraction',
    'hard_probability_reference', 'ising_diagonal', 'parity_sign_function',
    'parse_sign_function', 'random_sign_function', 'read_sign_function',
    'write_sign_function',
]
