"""Transport of a draw turning outcome z of its circuits into outcome 0^n."""
import logging
import math
from typing import List, Sequence

from circuit_hardness.lab.circuits.circuit import OutcomeError
from circuit_hardness.lab.circuits.gates import wrap_phases
from circuit_hardness.lab.families.draws import (FamilyKind, LayoutMismatchError,
                                                 RandomDraw, SlotBasis)

import numpy as np


class UnsupportedFamilyError(Exception):
    """Simple error class to handle families without a hiding transport."""

    pass


def _qaoa_shift(draw: RandomDraw, z: Sequence[int]) -> List[np.ndarray]:
    # <1| H D H = <0| H Z D H: a flipped bit adds π to the |-> phase of its mixer
    shifted = []
    for slot, h in zip(draw.architecture.slots, draw.randomness.worst_phases):
        h = h.copy()
        if slot.basis is SlotBasis.X and z[slot.support[0]]:
            h[1] += math.pi
        shifted.append(h)
    return shifted


def _iqp_shift(draw: RandomDraw, z: Sequence[int]) -> List[np.ndarray]:
    # <z| H^n = <0| H^n Z^z, and Z^z is absorbed by one diagonal gate per flipped qubit
    shifted = [h.copy() for h in draw.randomness.worst_phases]
    for qubit, bit in enumerate(z):
        if not bit:
            continue
        for position, slot in enumerate(draw.architecture.slots):
            if qubit in slot.support:
                local = slot.support.index(qubit)
                labels = np.arange(slot.dim)
                shifted[position] += math.pi * ((labels >> local) & 1)
                break
        else:
            raise LayoutMismatchError(f'Qubit {qubit} is not covered by a diagonal gate')
    return shifted


def hiding_transport(draw: RandomDraw, z: Sequence[int]) -> RandomDraw:
    """
    Move a draw so that p_z(C(θ)) = p_0(C'(θ)) for every θ in [0, m].

    The π shifts go into the worst-case phases h, which every C(θ) carries unscaled. At
    θ = 0 a gate phase h + π + φ with φ uniform is uniform again, so the random circuits
    of the transported draw follow the law of the original ones.

    :draw (RandomDraw) A QAOA or IQP draw
    :z (Sequence[int]) The outcome to hide, one bit per qubit

    Return the transported draw, equal to the input for z = 0^n
    """
    if draw.family is FamilyKind.HAAR:
        raise UnsupportedFamilyError('HAAR draws have no hiding transport')
    if len(z) != draw.n_qubits or any(bit not in (0, 1) for bit in z):
        raise OutcomeError(f'Outcome {tuple(z)} is not a {draw.n_qubits}-bit string')
    if not any(z):
        return draw
    if draw.family is FamilyKind.QAOA_P1:
        shifted = _qaoa_shift(draw, z)
    else:
        shifted = _iqp_shift(draw, z)
    logging.debug(f'transported a {draw.family.value} draw for outcome {tuple(z)}')
    return draw.with_worst_phases(wrap_phases(h) for h in shifted)
