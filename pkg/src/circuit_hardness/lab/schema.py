from typing import Dict

import jsonschema


class ValidationError(Exception):
    """Simple class to handle draw document and experiment manifest validation error."""

    pass


NUMBER_LIST = {'type': 'array', 'items': {'type': 'number'}}

DRAW_SCHEMA = {
    'type': 'object',
    'required': ['family', 'seed', 'architecture', 'base_circuit', 'randomness'],
    'properties': {
        'family': {'enum': ['qaoa', 'haar', 'iqp']},
        'seed': {'type': 'integer', 'minimum': 0},
        'distribution': {
            'oneOf': [
                {'type': 'null'},
                {
                    'type': 'object',
                    'required': ['kind'],
                    'properties': {
                        'kind': {'enum': ['uniform', 'sk', 'erdos_renyi']},
                        'edge_prob': {'type': 'number', 'exclusiveMinimum': 0,
                                      'maximum': 1},
                    },
                },
            ],
        },
        'architecture': {
            'type': 'object',
            'required': ['n_qubits', 'initial_state', 'slots'],
            'properties': {
                'n_qubits': {'type': 'integer', 'minimum': 1},
                'initial_state': {'enum': ['zero', 'plus']},
                'slots': {
                    'type': 'array',
                    'minItems': 1,
                    'items': {
                        'type': 'object',
                        'required': ['index', 'support', 'basis'],
                        'properties': {
                            'index': {'type': 'integer', 'minimum': 0},
                            'support': {'type': 'array', 'minItems': 1,
                                        'items': {'type': 'integer', 'minimum': 0}},
                            'basis': {'enum': ['z', 'x', 'generic']},
                        },
                    },
                },
            },
        },
        'base_circuit': {'type': 'string'},
        'randomness': {
            'oneOf': [
                {
                    'type': 'object',
                    'required': ['worst_phases', 'random_phases'],
                    'properties': {
                        'worst_phases': {'type': 'array', 'items': NUMBER_LIST},
                        'random_phases': {'type': 'array', 'items': NUMBER_LIST},
                    },
                    'additionalProperties': False,
                },
                {
                    'type': 'object',
                    'required': ['unitaries'],
                    'properties': {
                        'unitaries': {
                            'type': 'array',
                            'items': {'type': 'array', 'items': NUMBER_LIST},
                        },
                    },
                    'additionalProperties': False,
                },
            ],
        },
    },
}

MANIFEST_SCHEMA = {
    'type': 'object',
    'properties': {
        'family': {'enum': ['qaoa', 'haar', 'iqp']},
        'n': {'type': 'integer', 'minimum': 1},
        'm': {'type': 'integer', 'minimum': 1},
        'seed': {'type': 'integer', 'minimum': 0},
        'trials': {'type': 'integer', 'minimum': 1},
        'workers': {'type': 'integer', 'minimum': 1},
        'degree': {'type': 'integer', 'minimum': 1},
        'delta': {'type': 'number', 'minimum': 0},
        'delta_cap': {'type': 'number', 'exclusiveMinimum': 0},
        'eta': {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 0.25},
        'eta_prime': {'type': 'number', 'exclusiveMinimum': 0, 'exclusiveMaximum': 1},
        'sample_constant': {'type': 'integer', 'minimum': 1},
        'failure_mode': {'enum': ['per_query', 'per_circuit']},
        'distribution': {'enum': ['uniform', 'sk', 'erdos_renyi']},
        'f': {'type': 'string'},
        'z': {'type': 'string', 'pattern': '^[01]+$'},
        'outcome': {'type': 'string', 'pattern': '^[01]+$'},
        'circuit': {'type': 'string'},
        'degenerate': {'type': 'boolean'},
        'samples': {'type': 'integer', 'minimum': 1},
        'bins': {'type': 'integer', 'minimum': 2},
        'degrees': {'type': 'array', 'items': {'type': 'integer', 'minimum': 1}},
        'grid': {'type': 'integer', 'minimum': 2},
        'precision': {'type': 'integer', 'minimum': 53},
        'output': {'type': 'string'},
        'ledger': {'type': 'string'},
        'log_level': {'enum': ['DEBUG', 'INFO', 'WARNING', 'ERROR']},
    },
    'additionalProperties': False,
}


def _validate(document: Dict, schema: Dict, kind: str) -> Dict:
    try:
        jsonschema.validate(instance=document, schema=schema)
    except jsonschema.ValidationError as exc:
        location = '/'.join(str(part) for part in exc.absolute_path) or '<root>'
        raise ValidationError(f'Invalid {kind} at {location}: {exc.message}')
    return document


def validate_draw_document(document: Dict) -> Dict:
    """
    Validate a serialised random draw.

    :document (Dict) The decoded JSON document

    Return the validated document
    """
    _validate(document, DRAW_SCHEMA, 'draw document')
    slots = document['architecture']['slots']
    randomness = document['randomness']
    if 'unitaries' in randomness:
        if len(randomness['unitaries']) != len(slots):
            raise ValidationError('Invalid draw document: one unitary per slot expected')
    elif not len(randomness['worst_phases']) == len(randomness['random_phases']) \
            == len(slots):
        raise ValidationError('Invalid draw document: one phase vector per slot expected')
    return document


def validate_manifest(manifest: Dict) -> Dict:
    """
    Validate an experiment manifest.

    If it doesn't crash, it works !

    :manifest (Dict) The parsed manifest, keys being the command-line option names

    Return the validated manifest
    """
    if not isinstance(manifest, dict):
        raise ValidationError(
            f'Wrong type for manifest, expected dict got {type(manifest)}')
    return _validate(manifest, MANIFEST_SCHEMA, 'manifest')
