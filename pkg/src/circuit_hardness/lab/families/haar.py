import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from circuit_hardness.lab.circuits.gates import Gate, NonUnitaryError
from circuit_hardness.lab.utils import child_rng

import numpy as np

import scipy.linalg


SUPPORTED_DIMENSIONS = (2, 4)

# eigenphases closer than this are merged into one eigenspace
EIGENPHASE_GROUPING = 1e-12


class UnsupportedDimensionError(Exception):
    """Simple error class to handle Haar requests for unsupported dimensions."""

    pass


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """
    Spectral form U = V diag(exp(i phases)) V† of a unitary.

    :phases (np.ndarray) Principal-branch eigenphases in (-π, π]
    :vectors (np.ndarray) Unitary matrix whose columns are the eigenvectors
    """

    phases: np.ndarray
    vectors: np.ndarray

    def power(self, exponent: float) -> np.ndarray:
        """Return exp(exponent log U) on the principal branch."""
        rotation = np.exp(1j * exponent * self.phases)
        return (self.vectors * rotation) @ self.vectors.conj().T

    def projector(self, label: int) -> np.ndarray:
        column = self.vectors[:, label]
        return np.outer(column, column.conj())


def principal_phases(values: np.ndarray) -> np.ndarray:
    """Arguments of complex numbers in (-π, π]."""
    phases = np.angle(values)
    phases[phases <= -math.pi] += 2 * math.pi
    return phases


def _group_phases(phases: np.ndarray) -> np.ndarray:
    order = np.argsort(phases)
    ordered = phases[order]
    starts = np.flatnonzero(np.diff(ordered) > EIGENPHASE_GROUPING) + 1
    groups = np.split(np.arange(len(ordered)), starts)
    wraps = len(groups) > 1 and \
        ordered[0] + 2 * math.pi - ordered[-1] <= EIGENPHASE_GROUPING
    if wraps:
        # eigenphases on both sides of the branch cut at ±π form one eigenspace
        groups = groups[1:-1] + [np.concatenate([groups[-1], groups[0]])]
    grouped = phases.copy()
    for position, group in enumerate(groups):
        values = ordered[group]
        if wraps and position == len(groups) - 1:
            values = np.where(values < 0, values + 2 * math.pi, values)
        mean = values.mean()
        grouped[order[group]] = mean - 2 * math.pi if mean > math.pi else mean
    return grouped


def eigendecompose(matrix: np.ndarray) -> EigenDecomposition:
    """
    Diagonalise a unitary through its complex Schur form.

    For a normal matrix the Schur factor is diagonal and the Schur vectors are an
    orthonormal eigenbasis, also inside degenerate eigenspaces.

    :matrix (np.ndarray) A unitary matrix

    Return the eigen decomposition
    """
    triangular, vectors = scipy.linalg.schur(np.asarray(matrix, dtype=np.complex128),
                                             output='complex')
    phases = _group_phases(principal_phases(np.diag(triangular)))
    return EigenDecomposition(phases, vectors)


def haar_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """
    Sample a Haar-distributed unitary from a Ginibre matrix.

    :dim (int) The matrix dimension
    :rng (np.random.Generator) The random source

    Return the unitary Q of Z = QR, with the phases of R's diagonal moved into Q
    """
    ginibre = (rng.standard_normal((dim, dim))
               + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = scipy.linalg.qr(ginibre)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_unitary(dim: int, seed: int, support: Optional[Sequence[int]] = None) -> Gate:
    """
    Draw a Haar-random gate.

    :dim (int) The gate dimension, 2 or 4
    :seed (int) The seed, the same seed giving the same gate
    :support (Sequence[int], optional) The qubits, defaults to the first ones

    Return the gate
    """
    if dim not in SUPPORTED_DIMENSIONS:
        raise UnsupportedDimensionError(
            f'Haar gates of dimension {dim} are not supported, use one of '
            f'{SUPPORTED_DIMENSIONS}')
    arity = dim.bit_length() - 1
    if support is None:
        support = tuple(range(arity))
    gate = Gate(tuple(support), haar_matrix(dim, child_rng(seed)), 'M')
    gate.check_unitary()
    return gate


def unitary_fractional_power(gate: Gate, exponent: float) -> Gate:
    """
    Raise a unitary gate to a real power.

    :gate (Gate) A unitary gate H
    :exponent (float) The power t

    Return exp(t log H) with the principal branch of the logarithm
    """
    try:
        gate.check_unitary()
    except NonUnitaryError:
        logging.error(f'cannot take a fractional power of non-unitary {gate.name}')
        raise
    result = Gate(gate.support, eigendecompose(gate.matrix).power(exponent), 'M')
    result.check_unitary()
    return result
