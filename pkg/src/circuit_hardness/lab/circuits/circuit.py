import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

from circuit_hardness.lab.circuits.gates import Gate

import numpy as np


class SupportError(Exception):
    """Simple error class to handle gates acting outside of the register."""

    pass


class OutcomeError(Exception):
    """Simple error class to handle outcome strings of the wrong length."""

    pass


class InitialState(enum.Enum):
    ZERO = 'zero'
    PLUS = 'plus'


BitString = Tuple[int, ...]


def bits_from_index(index: int, n_qubits: int) -> BitString:
    """Split an amplitude index into bits, qubit 0 being the least significant."""
    return tuple((index >> qubit) & 1 for qubit in range(n_qubits))


def index_from_bits(bits: Sequence[int]) -> int:
    index = 0
    for qubit, bit in enumerate(bits):
        if bit not in (0, 1):
            raise OutcomeError(f'Outcome bits must be 0 or 1, got {bit}')
        index |= int(bit) << qubit
    return index


def parse_bits(text: str) -> BitString:
    """Parse '101' as the outcome with qubit 0 equal to 1, qubit 1 to 0, qubit 2 to 1."""
    return tuple(int(char) for char in text.strip())


def format_bits(bits: Sequence[int]) -> str:
    return ''.join(str(bit) for bit in bits)


def zeros(n_qubits: int) -> BitString:
    return (0,) * n_qubits


@dataclass(frozen=True, eq=False)
class Circuit:
    """
    An ordered list of gates applied left to right to a product initial state.

    :n_qubits (int) The register size
    :gates (Tuple[Gate]) The gates, in application order
    :initial_state (InitialState) Either |0^n> or |+^n>
    """

    n_qubits: int
    gates: Tuple[Gate, ...] = ()
    initial_state: InitialState = InitialState.ZERO

    def __post_init__(self):
        object.__setattr__(self, 'gates', tuple(self.gates))
        object.__setattr__(self, 'initial_state', InitialState(self.initial_state))
        if self.n_qubits < 1:
            raise SupportError(f'A circuit needs at least one qubit, got {self.n_qubits}')
        for position, gate in enumerate(self.gates):
            if max(gate.support) >= self.n_qubits:
                raise SupportError(
                    f'Gate {position} ({gate.name}) acts on {gate.support}, '
                    f'outside of {self.n_qubits} qubits')

    def __len__(self) -> int:
        return len(self.gates)

    def initial_amplitudes(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        if self.initial_state is InitialState.PLUS:
            return np.full(dim, 1 / math.sqrt(dim), dtype=np.complex128)
        amplitudes = np.zeros(dim, dtype=np.complex128)
        amplitudes[0] = 1.0
        return amplitudes

    def with_gates(self, gates: Iterable[Gate]) -> 'Circuit':
        return Circuit(self.n_qubits, tuple(gates), self.initial_state)

    def max_gate_distance(self, other: 'Circuit') -> float:
        """Largest per-gate Frobenius distance to a circuit of the same length."""
        if len(self.gates) != len(other.gates) or self.n_qubits != other.n_qubits:
            return math.inf
        pairs = zip(self.gates, other.gates)
        return max((mine.distance(theirs) for mine, theirs in pairs), default=0.0)
