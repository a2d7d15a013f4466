"""Exact statevector simulation of small circuits."""
from circuit_hardness.lab.circuits.circuit import (BitString, Circuit, InitialState,
                                                   bits_from_index, format_bits,
                                                   index_from_bits, parse_bits, zeros)
from circuit_hardness.lab.circuits.gates import Gate
from circuit_hardness.lab.circuits.simulator import (StateVector, apply_gate,
                                                     output_probability,
                                                     postselected_probability,
                                                     postselected_state, simulate)

__all__ = [
    'BitString', 'Circuit', 'Gate', 'InitialState', 'StateVector', 'apply_gate',
    'bits_from_index', 'format_bits', 'index_from_bits', 'output_probability',
    'parse_bits', 'postselected_probability', 'postselected_state', 'simulate', 'zeros',
]
