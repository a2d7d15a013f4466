"""
Ising form of diagonal circuits.

A diagonal with phases Θ(x) is Ising representable when, with spins s_j = 1 - 2x_j,

    Θ(x) = offset + Σ_j b_j s_j + Σ_{j<k} c_{j,k} s_j s_k   (mod 2π)
"""
import itertools
import logging
import math
from dataclasses import dataclass

from circuit_hardness.lab.check import InvalidParameterError
from circuit_hardness.lab.circuits.circuit import Circuit
from circuit_hardness.lab.circuits.simulator import simulate
from circuit_hardness.lab.families.draws import (FamilyKind, LayoutMismatchError,
                                                 build_architecture)
from circuit_hardness.lab.worstcase.gadget import UnsupportedGateError

import numpy as np


ISING_TOLERANCE = 1e-9


class NotIsingRepresentable(Exception):
    """Simple error class to handle diagonals with terms of order three or more."""

    pass


class NonIqpFormError(Exception):
    """Simple error class to handle circuits that are not Hadamard-diagonal-Hadamard."""

    pass


@dataclass(frozen=True, eq=False)
class IsingCoefficients:
    """
    Coefficients of exp(i(offset + Σ b_j σ^z_j + Σ_{j<k} c_{j,k} σ^z_j σ^z_k)).

    :linear (np.ndarray) The fields b_j
    :quadratic (np.ndarray) Symmetric couplings c_{j,k} with a zero diagonal
    :offset (float) The global phase
    """

    linear: np.ndarray
    quadratic: np.ndarray
    offset: float = 0.0

    @property
    def n_qubits(self) -> int:
        return len(self.linear)


def spins(n_qubits: int) -> np.ndarray:
    """Spin values s_j(x) = 1 - 2x_j, one row per outcome index x."""
    labels = np.arange(1 << n_qubits)
    return 1 - 2 * ((labels[:, None] >> np.arange(n_qubits)[None, :]) & 1)


def diagonal_phases(circuit: Circuit) -> np.ndarray:
    """
    Phase function Θ(x) of a circuit of Z-diagonal gates.

    :circuit (Circuit) The circuit

    Return Θ for every outcome index, in (-π, π]
    """
    labels = np.arange(1 << circuit.n_qubits)
    total = np.zeros(labels.shape)
    for position, gate in enumerate(circuit.gates):
        if not gate.is_diagonal():
            raise UnsupportedGateError(f'Gate {position} ({gate.name}) is not Z-diagonal')
        local = np.zeros(labels.shape, dtype=int)
        for bit, qubit in enumerate(gate.support):
            local |= ((labels >> qubit) & 1) << bit
        total += np.angle(gate.diagonal())[local]
    return np.angle(np.exp(1j * total))


def _phase_gap(left: np.ndarray, right: np.ndarray) -> float:
    return float(np.max(np.abs(np.angle(np.exp(1j * (left - right))))))


def ising_phases(coefficients: IsingCoefficients) -> np.ndarray:
    s = spins(coefficients.n_qubits)
    pairs = np.einsum('xj,jk,xk->x', s, np.triu(coefficients.quadratic, 1), s)
    return coefficients.offset + s @ coefficients.linear + pairs


def ising_diagonal(coefficients: IsingCoefficients, n_qubits: int) -> np.ndarray:
    """
    Re-synthesise the diagonal of an Ising phase function.

    :coefficients (IsingCoefficients) The coefficients
    :n_qubits (int) The register size

    Return the 2^n diagonal entries
    """
    if coefficients.n_qubits != n_qubits:
        raise InvalidParameterError(
            f'Coefficients act on {coefficients.n_qubits} qubits, not {n_qubits}')
    return np.exp(1j * ising_phases(coefficients))


def compile_to_ising(circuit: Circuit) -> IsingCoefficients:
    """
    Find Ising coefficients reproducing the diagonal of a circuit.

    The 0/1 multilinear coefficients up to order two are read off the strings of weight
    at most two by inclusion-exclusion, then mapped to spins; the result is checked on
    every string.

    :circuit (Circuit) A circuit of Z-diagonal gates

    Return the coefficients, or raise NotIsingRepresentable
    """
    n = circuit.n_qubits
    theta = diagonal_phases(circuit)
    single = np.array([theta[1 << j] - theta[0] for j in range(n)])
    double = np.zeros((n, n))
    for j, k in itertools.combinations(range(n), 2):
        double[j, k] = double[k, j] = \
            theta[(1 << j) | (1 << k)] - theta[1 << j] - theta[1 << k] + theta[0]
    quadratic = double / 4
    linear = -single / 2 - quadratic.sum(axis=1)
    offset = theta[0] + single.sum() / 2 + np.triu(double, 1).sum() / 4
    coefficients = IsingCoefficients(linear, quadratic, float(offset))
    gap = _phase_gap(ising_phases(coefficients), theta)
    if gap > ISING_TOLERANCE:
        raise NotIsingRepresentable(
            f'The diagonal has terms of order three or more (phase gap {gap:.3e})')
    return coefficients


def diagonal_block(circuit: Circuit) -> Circuit:
    try:
        architecture = build_architecture(FamilyKind.IQP, circuit)
    except LayoutMismatchError as exc:
        raise NonIqpFormError(str(exc))
    return Circuit(circuit.n_qubits,
                   tuple(circuit.gates[slot.index] for slot in architecture.slots))


def amplitude_as_ising_partition(iqp_circuit: Circuit) -> complex:
    """
    Evaluate <0^n|H^n D H^n|0^n> as the partition function (1/2^n) Σ_x exp(iΘ(x)).

    :iqp_circuit (Circuit) A Hadamard layer, Z-diagonal gates and a Hadamard layer

    Return the amplitude, checked against the statevector simulation
    """
    block = diagonal_block(iqp_circuit)
    try:
        weights = ising_diagonal(compile_to_ising(block), block.n_qubits)
    except NotIsingRepresentable:
        logging.debug('diagonal is not Ising representable, summing the raw phases')
        weights = np.exp(1j * diagonal_phases(block))
    amplitude = complex(math.fsum(weights.real), math.fsum(weights.imag)) \
        / (1 << block.n_qubits)
    simulated = complex(simulate(iqp_circuit).amplitudes[0])
    if abs(amplitude - simulated) > ISING_TOLERANCE:
        raise NonIqpFormError(
            f'Partition function {amplitude} differs from the amplitude {simulated}')
    return amplitude
