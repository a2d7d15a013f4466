"""Dense statevector simulation, qubit 0 being the least significant amplitude bit."""
import math
from typing import Dict, Optional, Sequence

from circuit_hardness.lab.circuits.circuit import (BitString, Circuit, OutcomeError,
                                                   SupportError, index_from_bits)
from circuit_hardness.lab.circuits.gates import Gate

import numpy as np


NORM_TOLERANCE = 1e-10


class InvalidGadgetError(Exception):
    """Simple error class to handle post-selections that happen with probability 0."""

    pass


class StateVector:
    """
    Mutable amplitude buffer of a register of qubits.

    :amplitudes (np.ndarray) Complex amplitudes, length 2^n
    """

    def __init__(self, amplitudes: np.ndarray):
        self.amplitudes = np.array(amplitudes, dtype=np.complex128)
        dim = self.amplitudes.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise SupportError(f'A statevector needs 2^n amplitudes, got {dim}')
        self.n_qubits = dim.bit_length() - 1

    def norm(self) -> float:
        return math.sqrt(math.fsum(np.abs(self.amplitudes) ** 2))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> 'StateVector':
        return StateVector(self.amplitudes)

    def is_normalised(self, tolerance: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm() - 1.0) <= tolerance


def apply_matrix(amplitudes: np.ndarray, matrix: np.ndarray,
                 support: Sequence[int], n_qubits: int) -> np.ndarray:
    """
    Apply a 2^k x 2^k matrix to the qubits in support, without any check.

    The target axes are moved last so the gate multiplies contiguous blocks of 2^k
    amplitudes; the first qubit of the support is the least significant local bit.

    :amplitudes (np.ndarray) The flat state, length 2^n
    :matrix (np.ndarray) The matrix, not necessarily unitary
    :support (Sequence[int]) The target qubits
    :n_qubits (int) The register size

    Return the new flat state
    """
    k = len(support)
    target_axes = [n_qubits - 1 - qubit for qubit in reversed(support)]
    other_axes = [axis for axis in range(n_qubits) if axis not in target_axes]
    permutation = other_axes + target_axes
    tensor = amplitudes.reshape([2] * n_qubits).transpose(permutation)
    blocks = tensor.reshape(-1, 1 << k) @ matrix.T
    inverse = np.argsort(permutation)
    return blocks.reshape([2] * n_qubits).transpose(inverse).reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """
    Apply a gate to a statevector in place.

    :state (StateVector) The state to update
    :gate (Gate) A unitary gate whose support lies within the register

    Return the updated state
    """
    if max(gate.support) >= state.n_qubits:
        raise SupportError(
            f'Gate {gate.name} acts on {gate.support}, '
            f'outside of {state.n_qubits} qubits')
    gate.check_unitary()
    state.amplitudes = apply_matrix(state.amplitudes, gate.matrix, gate.support,
                                    state.n_qubits)
    return state


def simulate(circuit: Circuit) -> StateVector:
    """
    Run a circuit from its initial state.

    :circuit (Circuit) The circuit to simulate

    Return the final statevector
    """
    state = StateVector(circuit.initial_amplitudes())
    for gate in circuit.gates:
        apply_gate(state, gate)
    return state


def dense_unitary(circuit: Circuit) -> np.ndarray:
    """
    Multiply out the full 2^n x 2^n matrix of a circuit.

    Used as an independent reference for the statevector kernel.
    """
    dim = 1 << circuit.n_qubits
    total = np.eye(dim, dtype=np.complex128)
    for gate in circuit.gates:
        full = np.zeros((dim, dim), dtype=np.complex128)
        for column in range(dim):
            _embed_column(full, column, gate)
        total = full @ total
    return total


def _embed_column(full: np.ndarray, index: int, gate: Gate):
    local_in = sum(((index >> qubit) & 1) << position
                   for position, qubit in enumerate(gate.support))
    rest = index
    for qubit in gate.support:
        rest &= ~(1 << qubit)
    for local_out in range(gate.dim):
        target = rest
        for position, qubit in enumerate(gate.support):
            target |= ((local_out >> position) & 1) << qubit
        full[target, index] += gate.matrix[local_out, local_in]


def _check_outcome(circuit: Circuit, outcome: BitString):
    if len(outcome) != circuit.n_qubits:
        raise OutcomeError(
            f'Outcome {outcome} has {len(outcome)} bits, circuit has {circuit.n_qubits}')


def output_probability(circuit: Circuit, outcome: BitString) -> float:
    """
    Exact probability of measuring an outcome string.

    :circuit (Circuit) The circuit
    :outcome (BitString) One bit per qubit

    Return |<outcome|C|init>|^2
    """
    _check_outcome(circuit, outcome)
    amplitude = simulate(circuit).amplitudes[index_from_bits(outcome)]
    return float(abs(amplitude) ** 2)


def output_probabilities(circuit: Circuit) -> np.ndarray:
    return simulate(circuit).probabilities()


def _postselect(circuit: Circuit, postselect_mask: Dict[int, int],
                data_qubits: Optional[Sequence[int]]):
    ancillas = sorted(postselect_mask)
    if data_qubits is None:
        data_qubits = [q for q in range(circuit.n_qubits) if q not in postselect_mask]
    data_qubits = list(data_qubits)
    if set(ancillas) & set(data_qubits):
        raise SupportError('Ancilla and data qubits overlap')
    if sorted(ancillas + data_qubits) != list(range(circuit.n_qubits)):
        raise SupportError('Ancilla and data qubits must cover the register')
    amplitudes = simulate(circuit).amplitudes
    indices = np.arange(1 << circuit.n_qubits)
    keep = np.ones(indices.shape, dtype=bool)
    for qubit, bit in postselect_mask.items():
        keep &= ((indices >> qubit) & 1) == bit
    selected = amplitudes[keep]
    weight = math.fsum(np.abs(selected) ** 2)
    if weight <= 0.0:
        raise InvalidGadgetError(f'Post-selection {postselect_mask} has probability 0')
    data_index = np.zeros(int(keep.sum()), dtype=int)
    for position, qubit in enumerate(data_qubits):
        data_index |= ((indices[keep] >> qubit) & 1) << position
    conditional = np.zeros(1 << len(data_qubits), dtype=np.complex128)
    conditional[data_index] = selected
    return conditional, weight


def postselected_state(circuit: Circuit, postselect_mask: Dict[int, int],
                       data_qubits: Optional[Sequence[int]] = None) -> StateVector:
    """
    Normalised state of the data register given the ancilla outcomes.

    :circuit (Circuit) The circuit
    :postselect_mask (Dict[int, int]) Required outcome per ancilla qubit
    :data_qubits (Sequence[int], optional) Data qubits, in register order;
        defaults to the non-ancilla qubits in increasing order

    Return the conditional statevector
    """
    conditional, weight = _postselect(circuit, postselect_mask, data_qubits)
    return StateVector(conditional / math.sqrt(weight))


def postselected_probability(circuit: Circuit, postselect_mask: Dict[int, int],
                             outcome: BitString,
                             data_qubits: Optional[Sequence[int]] = None) -> float:
    """
    Conditional probability of a data outcome given the ancilla outcomes.

    :circuit (Circuit) The circuit
    :postselect_mask (Dict[int, int]) Required outcome per ancilla qubit
    :outcome (BitString) Outcome on the data register
    :data_qubits (Sequence[int], optional) Data qubits, in outcome order

    Return Pr[data=outcome and ancillas=mask] / Pr[ancillas=mask]
    """
    conditional, weight = _postselect(circuit, postselect_mask, data_qubits)
    if len(outcome) != conditional.shape[0].bit_length() - 1:
        raise OutcomeError(f'Outcome {outcome} does not match the data register')
    return float(abs(conditional[index_from_bits(outcome)]) ** 2 / weight)
