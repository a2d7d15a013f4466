import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np


UNITARY_TOLERANCE = 1e-10

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)

TWO_PI = 2 * math.pi


class GateError(Exception):
    """Simple error class to handle malformed gate definitions."""

    pass


class NonUnitaryError(GateError):
    """Simple error class to handle gate matrices that are not unitary."""

    pass


def wrap_phases(phases) -> np.ndarray:
    """Map phases into [0, 2π)."""
    wrapped = np.mod(np.asarray(phases, dtype=float), TWO_PI)
    wrapped[wrapped >= TWO_PI] = 0.0
    return wrapped


def unitarity_defect(matrix: np.ndarray) -> float:
    """
    Measure how far a matrix is from being unitary.

    :matrix (np.ndarray) A square complex matrix

    Return the Frobenius norm of U†U - I
    """
    identity = np.eye(matrix.shape[0], dtype=np.complex128)
    return float(np.linalg.norm(matrix.conj().T @ matrix - identity))


@dataclass(frozen=True, eq=False)
class Gate:
    """
    A dense gate acting on an ordered set of qubits.

    :support (Tuple[int]) The qubits the gate acts on, the first one being the
        least significant bit of the local basis index
    :matrix (np.ndarray) The 2^k x 2^k complex matrix
    :name (str) A label used by the text format and the gadget expander
    :params (Tuple[float]) Parameters of named gates (angles, phases)
    """

    support: Tuple[int, ...]
    matrix: np.ndarray
    name: str = 'M'
    params: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        support = tuple(int(qubit) for qubit in self.support)
        matrix = np.array(self.matrix, dtype=np.complex128)
        matrix.setflags(write=False)
        object.__setattr__(self, 'support', support)
        object.__setattr__(self, 'matrix', matrix)
        if not support:
            raise GateError('A gate needs at least one qubit')
        if len(set(support)) != len(support):
            raise GateError(f'Gate support {support} has repeated qubits')
        if min(support) < 0:
            raise GateError(f'Gate support {support} has negative qubits')
        dim = 1 << len(support)
        if matrix.shape != (dim, dim):
            raise GateError(
                f'Gate on {len(support)} qubits needs a {dim}x{dim} matrix, '
                f'got {matrix.shape}')

    @property
    def arity(self) -> int:
        return len(self.support)

    @property
    def dim(self) -> int:
        return 1 << len(self.support)

    def check_unitary(self, tolerance: float = UNITARY_TOLERANCE):
        """
        Raise if the gate matrix is not unitary within tolerance.

        :tolerance (float) Allowed Frobenius norm of U†U - I
        """
        defect = unitarity_defect(self.matrix)
        if defect > tolerance:
            raise NonUnitaryError(
                f'Gate {self.name} on {self.support} is not unitary '
                f'(defect {defect:.3e})')

    def is_diagonal(self, tolerance: float = UNITARY_TOLERANCE) -> bool:
        off_diagonal = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.linalg.norm(off_diagonal) <= tolerance)

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    def relabel(self, mapping: dict) -> 'Gate':
        """Return the same gate acting on qubits renamed through mapping."""
        return Gate(tuple(mapping[q] for q in self.support),
                    self.matrix, self.name, self.params)

    def distance(self, other: 'Gate') -> float:
        """Frobenius distance to another gate, infinite if the supports differ."""
        if self.support != other.support:
            return math.inf
        return float(np.linalg.norm(self.matrix - other.matrix))


def from_matrix(support: Sequence[int], matrix: np.ndarray, check: bool = True) -> Gate:
    """
    Build a generic gate from a raw matrix.

    :support (Sequence[int]) The qubits the gate acts on
    :matrix (np.ndarray) The dense complex matrix
    :check (bool) Whether to validate unitarity

    Return the gate
    """
    gate = Gate(tuple(support), matrix, 'M')
    if check:
        gate.check_unitary()
    return gate


def hadamard(qubit: int) -> Gate:
    return Gate((qubit,), HADAMARD, 'H')


def pauli_x(qubit: int) -> Gate:
    return Gate((qubit,), np.array([[0, 1], [1, 0]]), 'X')


def pauli_z(qubit: int) -> Gate:
    return Gate((qubit,), np.diag([1, -1]), 'Z')


def phase_s(qubit: int) -> Gate:
    return Gate((qubit,), np.diag([1, 1j]), 'S')


def phase_t(qubit: int) -> Gate:
    return Gate((qubit,), np.diag([1, cmath.exp(1j * math.pi / 4)]), 'T')


def controlled_z(control: int, target: int) -> Gate:
    return Gate((control, target), np.diag([1, 1, 1, -1]), 'CZ')


def controlled_x(control: int, target: int) -> Gate:
    """CNOT, flipping target when control is 1."""
    matrix = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])
    return Gate((control, target), matrix, 'CX')


def embed_matrix(gate: Gate, support: Sequence[int]) -> np.ndarray:
    """
    Write the matrix of a gate in the local basis of a larger support.

    :gate (Gate) The gate
    :support (Sequence[int]) Qubits containing the gate support, the first one being
        the least significant

    Return the 2^k x 2^k matrix, k being the length of support
    """
    support = tuple(support)
    if not set(gate.support) <= set(support):
        raise GateError(f'Support {support} does not contain {gate.support}')
    positions = [support.index(qubit) for qubit in gate.support]
    mask = sum(1 << position for position in positions)
    dim = 1 << len(support)
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for column in range(dim):
        local_column = sum(((column >> p) & 1) << j for j, p in enumerate(positions))
        rest = column & ~mask
        for local_row in range(gate.dim):
            row = rest | sum(((local_row >> j) & 1) << p for j, p in enumerate(positions))
            matrix[row, column] = gate.matrix[local_row, local_column]
    return matrix


def rz(angle: float, qubit: int) -> Gate:
    """Z rotation exp(-i angle/2 σ^z)."""
    half = angle / 2
    return Gate((qubit,), np.diag([cmath.exp(-1j * half), cmath.exp(1j * half)]),
                'RZ', (float(angle),))


def rx(angle: float, qubit: int) -> Gate:
    """X rotation exp(-i angle/2 σ^x)."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return Gate((qubit,), np.array([[c, -1j * s], [-1j * s, c]]), 'RX', (float(angle),))


def x_rotation(beta: float, qubit: int) -> Gate:
    """
    Mixer gate exp(i beta σ^x).

    :beta (float) The mixing angle
    :qubit (int) The qubit the gate acts on

    Return the gate, labelled as the equivalent RX(-2 beta)
    """
    return rx(-2 * beta, qubit)


def diagonal(phases: Iterable[float], support: Sequence[int]) -> Gate:
    """
    Build a diagonal gate diag(exp(i phase_k)).

    :phases (Iterable[float]) One phase per local basis index
    :support (Sequence[int]) The qubits, the first one being the least significant

    Return the gate
    """
    phases = tuple(float(phase) for phase in phases)
    return Gate(tuple(support), np.diag(np.exp(1j * np.array(phases))), 'DIAG', phases)


def diagonal_from_values(values: np.ndarray, support: Sequence[int]) -> Gate:
    """Build a DIAG gate from unit-modulus diagonal entries."""
    return diagonal(np.angle(values), support)


def x_basis_gate(phases: Sequence[float], qubit: int) -> Gate:
    """
    Build a single-qubit gate diagonal in the X basis.

    :phases (Sequence[float]) The eigenphases on |+> (label 0) and |-> (label 1)
    :qubit (int) The qubit

    Return H diag(exp(i phases)) H as a generic gate
    """
    matrix = HADAMARD @ np.diag(np.exp(1j * np.asarray(phases, dtype=float))) @ HADAMARD
    return Gate((qubit,), matrix, 'M')


def x_basis_phases(gate: Gate, tolerance: float = UNITARY_TOLERANCE) -> np.ndarray:
    """
    Extract the eigenphases of a single-qubit gate that is diagonal in the X basis.

    :gate (Gate) A single-qubit gate
    :tolerance (float) Allowed off-diagonal weight in the X basis

    Return the phases on |+> and |-> in [0, 2π)
    """
    if gate.arity != 1:
        raise GateError(f'X-basis phases need a single-qubit gate, got {gate.support}')
    rotated = HADAMARD @ gate.matrix @ HADAMARD
    if np.linalg.norm(rotated - np.diag(np.diag(rotated))) > tolerance:
        raise GateError(f'Gate {gate.name} on {gate.support} is not X-diagonal')
    return wrap_phases(np.angle(np.diag(rotated)))


def z_basis_phases(gate: Gate, tolerance: float = UNITARY_TOLERANCE) -> np.ndarray:
    """Return the eigenphases in [0, 2π) of a Z-diagonal gate, raising otherwise."""
    if not gate.is_diagonal(tolerance):
        raise GateError(f'Gate {gate.name} on {gate.support} is not Z-diagonal')
    return wrap_phases(np.angle(gate.diagonal()))


NAMED_GATES = {
    'H': hadamard,
    'X': pauli_x,
    'Z': pauli_z,
    'S': phase_s,
    'T': phase_t,
}

