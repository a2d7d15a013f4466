"""Random circuit families and the circuits C(θ) between a draw and its base circuit."""
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

from circuit_hardness.lab.check import InvalidParameterError, check_range, theta_checker
from circuit_hardness.lab.circuits import gates as gatelib
from circuit_hardness.lab.circuits.circuit import Circuit, InitialState, zeros
from circuit_hardness.lab.circuits.gates import Gate, GateError
from circuit_hardness.lab.circuits.simulator import output_probability
from circuit_hardness.lab.families.haar import (SUPPORTED_DIMENSIONS, EigenDecomposition,
                                                eigendecompose, haar_unitary)
from circuit_hardness.lab.utils import child_rng, child_seed

import numpy as np


class LayoutMismatchError(Exception):
    """Simple error class to handle circuits whose layout does not fit a family."""

    pass


class FamilyKind(enum.Enum):
    QAOA_P1 = 'qaoa'
    HAAR = 'haar'
    IQP = 'iqp'


class SlotBasis(enum.Enum):
    Z = 'z'
    X = 'x'
    GENERIC = 'generic'


@dataclass(frozen=True)
class QaoaPhaseDistribution:
    """
    Law of the random Z-block phases of a QAOA draw.

    :kind (str) One of 'uniform', 'sk' or 'erdos_renyi'
    :edge_prob (float) Edge probability of the Erdős–Rényi graph
    """

    kind: str = 'uniform'
    edge_prob: float = 0.5

    KINDS = ('uniform', 'sk', 'erdos_renyi')

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidParameterError(f'Unknown QAOA phase distribution {self.kind!r}, '
                                        f'use one of {self.KINDS}')
        check_range('edge_prob', self.edge_prob, 0.0, 1.0, low_open=True)

    def coupling(self, n_qubits: int, rng: np.random.Generator) -> float:
        """Draw the coupling J of one gate, already scaled."""
        if self.kind == 'sk':
            return float(rng.standard_normal()) / math.sqrt(n_qubits)
        edge = rng.random() < self.edge_prob
        weight = float(rng.standard_normal())
        return weight / math.sqrt(self.edge_prob) if edge else 0.0

    def sample_phases(self, arity: int, n_qubits: int,
                      rng: np.random.Generator) -> np.ndarray:
        """
        Draw the eigenphases of one Z-diagonal gate.

        :arity (int) Number of qubits of the gate
        :n_qubits (int) Register size, for the SK scaling
        :rng (np.random.Generator) The random source

        Return 2^arity phases in [0, 2π)
        """
        if self.kind == 'uniform':
            return rng.uniform(0.0, gatelib.TWO_PI, size=1 << arity)
        labels = np.arange(1 << arity)
        signs = np.ones(1 << arity)
        for position in range(arity):
            signs *= 1 - 2 * ((labels >> position) & 1)
        return gatelib.wrap_phases(self.coupling(n_qubits, rng) * signs)


@dataclass(frozen=True)
class GateSlot:
    """
    A gate of the base circuit that receives randomness.

    :index (int) Position of the gate in the base circuit
    :support (Tuple[int]) The gate qubits
    :basis (SlotBasis) The basis the gate is diagonal in
    """

    index: int
    support: Tuple[int, ...]
    basis: SlotBasis

    @property
    def dim(self) -> int:
        return 1 << len(self.support)


@dataclass(frozen=True)
class Architecture:
    n_qubits: int
    initial_state: InitialState
    slots: Tuple[GateSlot, ...]

    @property
    def m(self) -> int:
        return len(self.slots)

    @property
    def local_dimension(self) -> int:
        """Largest gate dimension, the N of the degree budgets."""
        return max(slot.dim for slot in self.slots)


def _qaoa_slots(circuit: Circuit) -> Tuple[GateSlot, ...]:
    n = circuit.n_qubits
    if circuit.initial_state is not InitialState.PLUS:
        raise LayoutMismatchError('A QAOA circuit starts in |+^n>')
    if len(circuit.gates) < n + 1:
        raise LayoutMismatchError(
            f'A QAOA circuit on {n} qubits needs a Z block and {n} mixer gates')
    split = len(circuit.gates) - n
    slots = []
    for index, gate in enumerate(circuit.gates[:split]):
        if not gate.is_diagonal():
            raise LayoutMismatchError(f'Gate {index} ({gate.name}) of the Z block is '
                                      'not Z-diagonal')
        slots.append(GateSlot(index, gate.support, SlotBasis.Z))
    mixed = set()
    for index, gate in enumerate(circuit.gates[split:], start=split):
        try:
            gatelib.x_basis_phases(gate)
        except GateError:
            raise LayoutMismatchError(f'Gate {index} ({gate.name}) of the mixer layer is '
                                      'not a single-qubit X-diagonal gate')
        mixed.add(gate.support[0])
        slots.append(GateSlot(index, gate.support, SlotBasis.X))
    if len(mixed) != n:
        raise LayoutMismatchError('The mixer layer must act once on every qubit')
    return tuple(slots)


def _is_hadamard_layer(gates: Tuple[Gate, ...], n_qubits: int) -> bool:
    return (sorted(gate.support for gate in gates) == [(q,) for q in range(n_qubits)]
            and all(gate.distance(gatelib.hadamard(gate.support[0])) <= 1e-12
                    for gate in gates))


def _iqp_slots(circuit: Circuit) -> Tuple[GateSlot, ...]:
    n = circuit.n_qubits
    gates = circuit.gates
    if circuit.initial_state is not InitialState.ZERO:
        raise LayoutMismatchError('An IQP circuit starts in |0^n>')
    if len(gates) < 2 * n + 1 or not (_is_hadamard_layer(gates[:n], n)
                                      and _is_hadamard_layer(gates[-n:], n)):
        raise LayoutMismatchError(
            'An IQP circuit is a Hadamard layer, Z-diagonal gates, a Hadamard layer')
    slots = []
    for index in range(n, len(gates) - n):
        if not gates[index].is_diagonal():
            raise LayoutMismatchError(f'Gate {index} ({gates[index].name}) between the '
                                      'Hadamard layers is not Z-diagonal')
        slots.append(GateSlot(index, gates[index].support, SlotBasis.Z))
    return tuple(slots)


def _haar_slots(circuit: Circuit) -> Tuple[GateSlot, ...]:
    if not circuit.gates:
        raise LayoutMismatchError('A HAAR circuit needs at least one gate')
    for index, gate in enumerate(circuit.gates):
        if gate.dim not in SUPPORTED_DIMENSIONS:
            raise LayoutMismatchError(f'Gate {index} acts on {gate.arity} qubits, HAAR '
                                      f'gates have dimension {SUPPORTED_DIMENSIONS}')
    return tuple(GateSlot(index, gate.support, SlotBasis.GENERIC)
                 for index, gate in enumerate(circuit.gates))


LAYOUTS = {
    FamilyKind.QAOA_P1: _qaoa_slots,
    FamilyKind.IQP: _iqp_slots,
    FamilyKind.HAAR: _haar_slots,
}


def build_architecture(family: FamilyKind, circuit: Circuit) -> Architecture:
    """
    Derive the random gate slots of a base circuit.

    QAOA circuits are a Z-diagonal block followed by one mixer gate per qubit on |+^n>,
    IQP circuits a Z-diagonal block between two Hadamard layers on |0^n>; any circuit of
    one and two qubit gates is a HAAR architecture.

    :family (FamilyKind) The family
    :circuit (Circuit) The base circuit

    Return the architecture, or raise LayoutMismatchError
    """
    slots = LAYOUTS[FamilyKind(family)](circuit)
    return Architecture(circuit.n_qubits, circuit.initial_state, slots)


@dataclass(frozen=True, eq=False)
class PhaseAssignment:
    """
    Worst-case phases h and random phases φ of the slots of a QAOA or IQP draw.

    :worst_phases (Tuple[np.ndarray]) Per slot, the base gate eigenphases
    :random_phases (Tuple[np.ndarray]) Per slot, the random eigenphases
    """

    worst_phases: Tuple[np.ndarray, ...]
    random_phases: Tuple[np.ndarray, ...]

    def __post_init__(self):
        shapes = [len(h) for h in self.worst_phases]
        if shapes != [len(phi) for phi in self.random_phases]:
            raise LayoutMismatchError('Worst-case and random phases differ in shape')
        for phases in self.worst_phases + self.random_phases:
            if not np.all(np.isfinite(phases)):
                raise InvalidParameterError('Phases must be finite')


@dataclass(frozen=True, eq=False)
class HaarRandomness:
    """
    Per-slot Haar unitaries H_j with their eigendecompositions.

    :unitaries (Tuple[Gate]) The gates H_j, on the slot supports
    :decompositions (Tuple[EigenDecomposition]) Their spectral forms
    """

    unitaries: Tuple[Gate, ...]
    decompositions: Tuple[EigenDecomposition, ...] = field(default=None)

    def __post_init__(self):
        if self.decompositions is None:
            decompositions = tuple(eigendecompose(gate.matrix) for gate in self.unitaries)
            object.__setattr__(self, 'decompositions', decompositions)


Randomness = Union[PhaseAssignment, HaarRandomness]


@dataclass(frozen=True, eq=False)
class RandomDraw:
    """
    A base circuit together with the randomness of one family draw.

    :family (FamilyKind) The family
    :architecture (Architecture) The random gate slots
    :base_circuit (Circuit) The circuit reached at θ = m
    :randomness (Randomness) Phases (QAOA, IQP) or Haar unitaries (HAAR)
    :seed (int) The seed the draw was sampled with
    :distribution (QaoaPhaseDistribution, optional) The law of QAOA Z phases
    """

    family: FamilyKind
    architecture: Architecture
    base_circuit: Circuit
    randomness: Randomness
    seed: int = 0
    distribution: Optional[QaoaPhaseDistribution] = None

    @property
    def m(self) -> int:
        return self.architecture.m

    @property
    def n_qubits(self) -> int:
        return self.architecture.n_qubits

    def without_randomness(self) -> 'RandomDraw':
        """Return the degenerate draw, for which C(θ) is the base circuit for every θ."""
        if isinstance(self.randomness, HaarRandomness):
            randomness = HaarRandomness(tuple(Gate(gate.support, np.eye(gate.dim), 'M')
                                              for gate in self.randomness.unitaries))
        else:
            randomness = PhaseAssignment(
                self.randomness.worst_phases,
                tuple(np.zeros_like(phi) for phi in self.randomness.random_phases))
        return RandomDraw(self.family, self.architecture, self.base_circuit, randomness,
                          self.seed, self.distribution)

    def with_worst_phases(self, worst_phases) -> 'RandomDraw':
        """Return the draw around the base circuit whose slot gates have worst_phases."""
        worst_phases = tuple(worst_phases)
        gates = list(self.base_circuit.gates)
        for slot, phases in zip(self.architecture.slots, worst_phases):
            gates[slot.index] = slot_gate(slot, phases)
        randomness = PhaseAssignment(worst_phases, self.randomness.random_phases)
        return RandomDraw(self.family, self.architecture,
                          self.base_circuit.with_gates(gates), randomness, self.seed,
                          self.distribution)


def slot_gate(slot: GateSlot, phases) -> Gate:
    """Build the gate of a QAOA or IQP slot from its eigenphases."""
    if slot.basis is SlotBasis.X:
        return gatelib.x_basis_gate(phases, slot.support[0])
    return gatelib.diagonal(phases, slot.support)


def _check_architecture(architecture: Architecture, circuit: Circuit):
    if architecture.n_qubits != circuit.n_qubits or \
       architecture.initial_state is not circuit.initial_state:
        raise LayoutMismatchError('Architecture and base circuit registers differ')
    for slot in architecture.slots:
        if slot.index >= len(circuit.gates) or \
           circuit.gates[slot.index].support != slot.support:
            raise LayoutMismatchError(f'Slot {slot.index} does not fit the base circuit')


def _worst_phases(gate: Gate, slot: GateSlot) -> np.ndarray:
    if slot.basis is SlotBasis.X:
        return gatelib.x_basis_phases(gate)
    return gatelib.z_basis_phases(gate)


def sample_random_draw(family: FamilyKind, architecture: Optional[Architecture],
                       base_circuit: Circuit,
                       dist: Optional[QaoaPhaseDistribution] = None,
                       seed: int = 0) -> RandomDraw:
    """
    Sample the randomness of a family around a base circuit.

    Every slot j uses its own generator derived from (seed, j), so draws are
    reproducible whatever the evaluation order.

    :family (FamilyKind) The family
    :architecture (Architecture, optional) The slots, derived from the circuit if None
    :base_circuit (Circuit) The worst-case circuit
    :dist (QaoaPhaseDistribution, optional) Law of the QAOA Z phases, uniform by default
    :seed (int) The seed

    Return the draw
    """
    family = FamilyKind(family)
    if architecture is None:
        architecture = build_architecture(family, base_circuit)
    _check_architecture(architecture, base_circuit)
    if family is FamilyKind.HAAR:
        unitaries = tuple(
            haar_unitary(slot.dim, child_seed(seed, slot.index), slot.support)
            for slot in architecture.slots)
        logging.debug(f'sampled {len(unitaries)} Haar gates with seed {seed}')
        return RandomDraw(family, architecture, base_circuit, HaarRandomness(unitaries),
                          seed)
    if family is FamilyKind.QAOA_P1 and dist is None:
        dist = QaoaPhaseDistribution()
    worst, random = [], []
    for slot in architecture.slots:
        gate = base_circuit.gates[slot.index]
        rng = child_rng(seed, slot.index)
        worst.append(_worst_phases(gate, slot))
        if family is FamilyKind.QAOA_P1 and slot.basis is SlotBasis.Z:
            random.append(
                dist.sample_phases(len(slot.support), architecture.n_qubits, rng))
        else:
            random.append(rng.uniform(0.0, gatelib.TWO_PI, size=slot.dim))
    return RandomDraw(family, architecture, base_circuit,
                      PhaseAssignment(tuple(worst), tuple(random)), seed,
                      dist if family is FamilyKind.QAOA_P1 else None)


def interpolated_gate(draw: RandomDraw, position: int, scale: float) -> Gate:
    """
    Gate of slot number position in C(θ), scale being 1 - θ/m.

    :draw (RandomDraw) The draw
    :position (int) Position of the slot in the architecture
    :scale (float) The weight of the randomness

    Return the gate
    """
    slot = draw.architecture.slots[position]
    if isinstance(draw.randomness, HaarRandomness):
        decomposition = draw.randomness.decompositions[position]
        power = decomposition.power(scale)
        return Gate(slot.support, power @ draw.base_circuit.gates[slot.index].matrix, 'M')
    phases = draw.randomness.worst_phases[position] \
        + scale * draw.randomness.random_phases[position]
    return slot_gate(slot, phases)


@theta_checker
def build_interpolated_circuit(draw: RandomDraw, theta: float) -> Circuit:
    """
    Build C(θ) from a draw.

    :draw (RandomDraw) The draw
    :theta (float) The interpolation parameter in [0, m]

    Return the circuit, fully random at θ = 0 and the base circuit at θ = m
    """
    scale = 1.0 - theta / draw.m
    gates = list(draw.base_circuit.gates)
    for position, slot in enumerate(draw.architecture.slots):
        gates[slot.index] = interpolated_gate(draw, position, scale)
    return draw.base_circuit.with_gates(gates)


@theta_checker
def p_theta(draw: RandomDraw, theta: float,
            outcome: Optional[Sequence[int]] = None) -> float:
    """Return |<outcome|C(θ)|init>|^2, the outcome being 0^n by default."""
    circuit = build_interpolated_circuit(draw, theta)
    if outcome is None:
        outcome = zeros(draw.n_qubits)
    return output_probability(circuit, outcome)


def random_circuit(draw: RandomDraw) -> Circuit:
    """Return the fully random circuit C(0) of a draw."""
    return build_interpolated_circuit(draw, 0.0)
