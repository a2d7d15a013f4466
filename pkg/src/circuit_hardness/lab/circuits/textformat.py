"""
Plain-text circuit format.

    n=2 init=plus
    GATE H 0
    GATE CZ 0,1
    GATE RZ(0.25) 1
    GATE DIAG(0,1.5707963267948966) 0
    GATE [1:0,0:0,0:0,1:0] 1

Raw matrices are written row-major as re:im pairs with enough digits to round-trip.
"""
import logging
import re
from typing import List

from circuit_hardness.lab.circuits import gates as gatelib
from circuit_hardness.lab.circuits.circuit import Circuit, InitialState
from circuit_hardness.lab.circuits.gates import Gate

import numpy as np


HEADER = re.compile(r'^n=(\d+)\s+init=(zero|plus)$')
GATE_LINE = re.compile(r'^GATE\s+(\S+)\s+(\d+(?:,\d+)*)$')
CALL = re.compile(r'^([A-Z]+)\((.*)\)$')


class CircuitFormatError(Exception):
    """Simple error class to handle malformed circuit text."""

    pass


def _parse_matrix(token: str, arity: int) -> np.ndarray:
    entries = []
    for pair in token[1:-1].split(','):
        try:
            real, imag = pair.split(':')
            entries.append(complex(float(real), float(imag)))
        except ValueError:
            raise CircuitFormatError(f'Bad matrix entry {pair!r}')
    dim = 1 << arity
    if len(entries) != dim * dim:
        raise CircuitFormatError(
            f'A gate on {arity} qubits needs {dim * dim} entries, got {len(entries)}')
    return np.array(entries, dtype=np.complex128).reshape(dim, dim)


def _parse_gate(token: str, support: List[int]) -> Gate:
    if token.startswith('['):
        return gatelib.from_matrix(support, _parse_matrix(token, len(support)))
    if token in gatelib.NAMED_GATES:
        if len(support) != 1:
            raise CircuitFormatError(f'{token} acts on a single qubit')
        return gatelib.NAMED_GATES[token](support[0])
    if token == 'CZ':
        if len(support) != 2:
            raise CircuitFormatError('CZ acts on two qubits')
        return gatelib.controlled_z(*support)
    call = CALL.match(token)
    if call is None:
        raise CircuitFormatError(f'Unknown gate {token!r}')
    name, arguments = call.groups()
    try:
        values = [float(value) for value in arguments.split(',')]
    except ValueError:
        raise CircuitFormatError(f'Bad parameters in {token!r}')
    if name == 'DIAG':
        if len(values) != 1 << len(support):
            raise CircuitFormatError(f'DIAG on {len(support)} qubits needs '
                                     f'{1 << len(support)} phases')
        return gatelib.diagonal(values, support)
    if name in ('RZ', 'RX') and len(values) == 1 and len(support) == 1:
        builder = gatelib.rz if name == 'RZ' else gatelib.rx
        return builder(values[0], support[0])
    raise CircuitFormatError(f'Unknown gate {token!r}')


def parse_circuit(text: str) -> Circuit:
    """
    Parse a circuit from its text form.

    :text (str) The circuit text, header first

    Return the circuit
    """
    lines = [line.split('#')[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise CircuitFormatError('Empty circuit text')
    header = HEADER.match(lines[0])
    if header is None:
        raise CircuitFormatError(f'Bad header {lines[0]!r}, expected n=<int> init=<kind>')
    n_qubits, init = int(header.group(1)), InitialState(header.group(2))
    parsed = []
    for number, line in enumerate(lines[1:], start=2):
        match = GATE_LINE.match(line)
        if match is None:
            raise CircuitFormatError(f'Line {number}: cannot parse {line!r}')
        support = [int(qubit) for qubit in match.group(2).split(',')]
        parsed.append(_parse_gate(match.group(1), support))
    logging.debug(f'parsed a circuit of {len(parsed)} gates on {n_qubits} qubits')
    return Circuit(n_qubits, tuple(parsed), init)


def _format_gate(gate: Gate) -> str:
    if gate.name in gatelib.NAMED_GATES or gate.name == 'CZ':
        return gate.name
    if gate.name in ('RZ', 'RX', 'DIAG'):
        return f'{gate.name}({",".join(repr(value) for value in gate.params)})'
    entries = ','.join(f'{float(entry.real)!r}:{float(entry.imag)!r}'
                       for entry in gate.matrix.ravel())
    return f'[{entries}]'


def dump_circuit(circuit: Circuit) -> str:
    """
    Render a circuit in the text format.

    :circuit (Circuit) The circuit

    Return the text, one gate per line
    """
    lines = [f'n={circuit.n_qubits} init={circuit.initial_state.value}']
    for gate in circuit.gates:
        support = ','.join(str(qubit) for qubit in gate.support)
        lines.append(f'GATE {_format_gate(gate)} {support}')
    return '\n'.join(lines) + '\n'
