"""
Brute-force sum-over-paths form of p(θ).

Every family writes the amplitude <0^n|C(θ)|init> as Σ_k b_k exp(i s Φ_k), s = 1 - θ/m,
so p(θ) = Σ_{k,k'} b_k conj(b_k') exp(i s (Φ_k - Φ_k')).
A path term is one (k, k') pair.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Tuple

from circuit_hardness.lab.check import theta_checker
from circuit_hardness.lab.circuits.simulator import apply_matrix
from circuit_hardness.lab.families.draws import FamilyKind, RandomDraw, SlotBasis

import numpy as np


MAX_PATH_TERMS = 10 ** 7

IMAGINARY_TOLERANCE = 1e-9


class TooLargeForEnumerationError(Exception):
    """Simple error class to handle path sums too large to enumerate."""

    pass


@dataclass(frozen=True, eq=False)
class PathTermSet:
    """
    The terms A_r exp(i (1 - θ/m) Δφ_r) of p(θ).

    :delta_phases (np.ndarray) The phase differences Δφ_r
    :amplitudes (np.ndarray) The θ-independent complex factors A_r
    :m (int) The gate count
    """

    delta_phases: np.ndarray
    amplitudes: np.ndarray
    m: int

    def __len__(self) -> int:
        return len(self.delta_phases)

    @property
    def terms(self) -> Iterator[Tuple[float, complex]]:
        return zip(self.delta_phases.tolist(), self.amplitudes.tolist())

    def evaluate(self, theta: float) -> complex:
        """Sum of the terms at θ, with compensated summation."""
        values = self.amplitudes * np.exp(1j * (1.0 - theta / self.m) * self.delta_phases)
        return complex(math.fsum(values.real), math.fsum(values.imag))


def _check_size(count: int):
    if count > MAX_PATH_TERMS:
        raise TooLargeForEnumerationError(
            f'{count} path terms exceed the enumeration limit of {MAX_PATH_TERMS}')


def _pair_terms(branch_amplitudes: np.ndarray, branch_phases: np.ndarray):
    delta = (branch_phases[:, None] - branch_phases[None, :]).ravel()
    amplitudes = (branch_amplitudes[:, None] * branch_amplitudes.conj()[None, :]).ravel()
    return delta, amplitudes


def _slot_values(draw: RandomDraw, position: int, labels: np.ndarray):
    slot = draw.architecture.slots[position]
    local = np.zeros(labels.shape, dtype=int)
    for bit, qubit in enumerate(slot.support):
        local |= ((labels >> qubit) & 1) << bit
    return (draw.randomness.worst_phases[position][local],
            draw.randomness.random_phases[position][local])


def _diagonal_branches(draw: RandomDraw, basis: SlotBasis, labels: np.ndarray):
    worst = np.zeros(labels.shape)
    random = np.zeros(labels.shape)
    for position, slot in enumerate(draw.architecture.slots):
        if slot.basis is basis:
            h, phi = _slot_values(draw, position, labels)
            worst += h
            random += phi
    return worst, random


def _qaoa_branches(draw: RandomDraw):
    n = draw.n_qubits
    labels = np.arange(1 << n)
    z_worst, z_random = _diagonal_branches(draw, SlotBasis.Z, labels)
    x_worst, x_random = _diagonal_branches(draw, SlotBasis.X, labels)
    # branch (x, z): Z-block input x, mixer eigenbasis label z
    x, z = np.meshgrid(labels, labels, indexing='ij')
    parity = np.array([bin(value).count('1') & 1 for value in range(1 << n)])[x & z]
    worst = z_worst[x] + x_worst[z]
    amplitudes = 2.0 ** (-1.5 * n) * (1 - 2 * parity) * np.exp(1j * worst)
    return amplitudes.ravel(), (z_random[x] + x_random[z]).ravel()


def _iqp_branches(draw: RandomDraw):
    n = draw.n_qubits
    worst, random = _diagonal_branches(draw, SlotBasis.Z, np.arange(1 << n))
    return 2.0 ** (-n) * np.exp(1j * worst), random


def _haar_branches(draw: RandomDraw):
    n = draw.n_qubits
    base = draw.base_circuit
    slots = draw.architecture.slots
    decompositions = draw.randomness.decompositions
    amplitudes, phases = [], []
    labels = itertools.product(*(range(slot.dim) for slot in slots))
    for branch in labels:
        state = base.initial_amplitudes()
        phase = 0.0
        for position, (slot, label) in enumerate(zip(slots, branch)):
            projected = decompositions[position].projector(label) \
                @ base.gates[slot.index].matrix
            state = apply_matrix(state, projected, slot.support, n)
            phase += decompositions[position].phases[label]
        amplitudes.append(state[0])
        phases.append(phase)
    return np.array(amplitudes), np.array(phases)


def path_terms(draw: RandomDraw) -> PathTermSet:
    """
    Enumerate the path terms of p(θ) for a draw.

    QAOA branches run over the Z-block basis state x and the mixer eigenbasis labels z
    (2^{4n} terms of modulus 2^{-3n}), IQP branches over the diagonal basis state
    (2^{2n} terms of modulus 2^{-2n}), HAAR branches over one eigenvector per gate.

    :draw (RandomDraw) The draw

    Return the term set, or raise TooLargeForEnumerationError
    """
    if draw.family is FamilyKind.HAAR:
        branches = math.prod(slot.dim for slot in draw.architecture.slots)
        _check_size(branches * branches)
        amplitudes, phases = _haar_branches(draw)
    elif draw.family is FamilyKind.QAOA_P1:
        _check_size(1 << (4 * draw.n_qubits))
        amplitudes, phases = _qaoa_branches(draw)
    else:
        _check_size(1 << (2 * draw.n_qubits))
        amplitudes, phases = _iqp_branches(draw)
    delta, products = _pair_terms(amplitudes, phases)
    logging.debug(f'enumerated {len(delta)} path terms for a {draw.family.value} draw')
    return PathTermSet(delta, products, draw.m)


@theta_checker
def sum_over_paths_probability(draw: RandomDraw, theta: float) -> float:
    """
    Evaluate p(θ) as an explicit sum over paths.

    :draw (RandomDraw) The draw
    :theta (float) The interpolation parameter in [0, m]

    Return the real part of the sum
    """
    total = path_terms(draw).evaluate(theta)
    if abs(total.imag) > IMAGINARY_TOLERANCE:
        logging.warning(
            f'path sum at theta={theta} has imaginary residue {total.imag:.3e}')
    return total.real
