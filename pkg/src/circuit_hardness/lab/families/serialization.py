import json
from typing import AnyStr, Dict

from circuit_hardness.lab.circuits.circuit import InitialState
from circuit_hardness.lab.circuits.gates import Gate
from circuit_hardness.lab.circuits.textformat import dump_circuit, parse_circuit
from circuit_hardness.lab.families.draws import (Architecture, FamilyKind, GateSlot,
                                                 HaarRandomness, PhaseAssignment,
                                                 QaoaPhaseDistribution, RandomDraw,
                                                 SlotBasis)
from circuit_hardness.lab.schema import ValidationError, validate_draw_document

import numpy as np


def _interleave(matrix: np.ndarray):
    return [[float(value) for entry in row for value in (entry.real, entry.imag)]
            for row in matrix]


def _deinterleave(rows) -> np.ndarray:
    values = np.array(rows, dtype=float)
    return values[:, 0::2] + 1j * values[:, 1::2]


def draw_to_dict(draw: RandomDraw) -> Dict:
    """
    Convert a draw into a JSON-compatible dictionary.

    :draw (RandomDraw) The draw

    Return the dictionary
    """
    architecture = draw.architecture
    if isinstance(draw.randomness, HaarRandomness):
        randomness = {'unitaries': [_interleave(gate.matrix)
                                    for gate in draw.randomness.unitaries]}
    else:
        randomness = {
            'worst_phases': [[float(v) for v in h] for h in draw.randomness.worst_phases],
            'random_phases': [[float(v) for v in phi]
                              for phi in draw.randomness.random_phases],
        }
    distribution = None
    if draw.distribution is not None:
        distribution = {'kind': draw.distribution.kind,
                        'edge_prob': draw.distribution.edge_prob}
    return {
        'family': draw.family.value,
        'seed': int(draw.seed),
        'distribution': distribution,
        'architecture': {
            'n_qubits': architecture.n_qubits,
            'initial_state': architecture.initial_state.value,
            'slots': [{'index': slot.index, 'support': list(slot.support),
                       'basis': slot.basis.value} for slot in architecture.slots],
        },
        'base_circuit': dump_circuit(draw.base_circuit),
        'randomness': randomness,
    }


def draw_from_dict(document: Dict) -> RandomDraw:
    """
    Rebuild a draw from its dictionary form.

    :document (Dict) A dictionary produced by draw_to_dict

    Return the draw
    """
    validate_draw_document(document)
    family = FamilyKind(document['family'])
    layout = document['architecture']
    architecture = Architecture(
        layout['n_qubits'], InitialState(layout['initial_state']),
        tuple(GateSlot(slot['index'], tuple(slot['support']), SlotBasis(slot['basis']))
              for slot in layout['slots']))
    randomness = document['randomness']
    if family is FamilyKind.HAAR:
        if 'unitaries' not in randomness:
            raise ValidationError('Invalid draw document: HAAR draws store unitaries')
        randomness = HaarRandomness(tuple(
            Gate(slot.support, _deinterleave(rows), 'M')
            for slot, rows in zip(architecture.slots, randomness['unitaries'])))
    else:
        if 'unitaries' in randomness:
            raise ValidationError(
                f'Invalid draw document: {family.value} draws store phases')
        randomness = PhaseAssignment(
            tuple(np.array(h, dtype=float) for h in randomness['worst_phases']),
            tuple(np.array(phi, dtype=float) for phi in randomness['random_phases']))
    distribution = document.get('distribution')
    if distribution is not None:
        distribution = QaoaPhaseDistribution(distribution['kind'],
                                             distribution.get('edge_prob', 0.5))
    return RandomDraw(family, architecture, parse_circuit(document['base_circuit']),
                      randomness, document['seed'], distribution)


def dump_draw(draw: RandomDraw) -> AnyStr:
    """Serialise a draw as JSON; floats are written with repr so they round-trip."""
    return json.dumps(draw_to_dict(draw), indent=1)


def load_draw(text: AnyStr) -> RandomDraw:
    """
    Parse a draw serialised by dump_draw.

    :text (AnyStr) The JSON text

    Return the draw, or raise ValidationError
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f'Invalid draw document: {exc}')
    return draw_from_dict(document)
