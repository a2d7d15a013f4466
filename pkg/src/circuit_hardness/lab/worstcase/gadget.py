"""
Hadamard gadgets.

A Hadamard on wire w is teleported onto a fresh ancilla a prepared in |+>:

    CZ(a, w), S on w, exp(-iπ/4 σ^x) on w, post-select w = 0

leaves H|ψ> on a. The data qubit w is retired, and its final rotation commutes with every
later gate, so all of them are deferred to the end of the circuit.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple

from circuit_hardness.lab.circuits import gates as gatelib
from circuit_hardness.lab.circuits.circuit import Circuit, InitialState


GADGET_INPUT_GATES = frozenset(('H', 'CZ', 'S', 'T', 'Z', 'RZ', 'DIAG'))


class UnsupportedGateError(Exception):
    """Simple error class to handle gates outside of the supported gate set."""

    pass


@dataclass(frozen=True)
class GadgetExpansion:
    """
    A circuit without Hadamards on data qubits, and how to read it.

    :circuit (Circuit) The expanded circuit
    :postselect_mask (Dict[int, int]) Required outcome of every retired qubit
    :data_qubits (Tuple[int]) Wire holding each original qubit at the end
    """

    circuit: Circuit
    postselect_mask: Dict[int, int]
    data_qubits: Tuple[int, ...]


def hadamard_gadget_expand(circuit: Circuit) -> GadgetExpansion:
    """
    Replace every Hadamard of a circuit by a post-selected gadget.

    :circuit (Circuit) A circuit over H, CZ, S, T, Z, RZ and DIAG gates

    Return the expansion; its post-selected state equals the circuit output state
    """
    for position, gate in enumerate(circuit.gates):
        if gate.name not in GADGET_INPUT_GATES:
            raise UnsupportedGateError(
                f'Gate {position} ({gate.name}) is outside of '
                f'{sorted(GADGET_INPUT_GATES)}')
    n = circuit.n_qubits
    wires = list(range(n))
    preparation, body, deferred = [], [], []
    mask = {}
    for gate in circuit.gates:
        if gate.name != 'H':
            body.append(gate.relabel(dict(enumerate(wires))))
            continue
        qubit = gate.support[0]
        data, ancilla = wires[qubit], n + len(mask)
        if circuit.initial_state is InitialState.ZERO:
            preparation.append(gatelib.hadamard(ancilla))
        body.append(gatelib.controlled_z(ancilla, data))
        body.append(gatelib.phase_s(data))
        deferred.append(gatelib.rx(math.pi / 2, data))
        mask[data] = 0
        wires[qubit] = ancilla
    if not mask:
        return GadgetExpansion(circuit, {}, tuple(range(n)))
    gates = preparation + body + deferred
    logging.debug(f'expanded {len(mask)} Hadamard gadgets onto {n + len(mask)} qubits')
    expanded = Circuit(n + len(mask), tuple(gates), circuit.initial_state)
    return GadgetExpansion(expanded, mask, tuple(wires))
