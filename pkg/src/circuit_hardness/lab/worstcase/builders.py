"""
Worst-case circuits whose 0^n output probability is |Σ_x f(x)|^2 / 2^{2n}.

Deciding whether that probability is zero is hard for suitable sign functions f, and it is
either 0 or at least 1/2^{2n}.
"""
import itertools
import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from circuit_hardness.lab.check import InvalidParameterError
from circuit_hardness.lab.circuits import gates as gatelib
from circuit_hardness.lab.circuits.circuit import Circuit, InitialState, index_from_bits
from circuit_hardness.lab.circuits.gates import Gate
from circuit_hardness.lab.worstcase.signs import SignFunction

import numpy as np

import scipy.linalg


MIXER_ANGLE = math.pi / 4


def _padding(n_qubits: int, count: int) -> List[Gate]:
    """Identity Z-diagonal gates, cycling over the qubits."""
    return [gatelib.diagonal((0.0, 0.0), (k % n_qubits,)) for k in range(count)]


def _pad_count(pad_to: Optional[int], minimum: int, family: str) -> int:
    if pad_to is None:
        return 0
    if pad_to < minimum:
        raise InvalidParameterError(
            f'A {family} hard circuit on this register needs m >= {minimum}, '
            f'got {pad_to}')
    return pad_to - minimum


def qaoa_phases(f: SignFunction) -> np.ndarray:
    """Phases of f(x) = (-i)^{|x|} f̃(x) for every outcome index x."""
    weights = np.array([bin(x).count('1') for x in range(1 << f.n)])
    return -math.pi / 2 * weights + math.pi * (f.as_array() == -1)


def _mixer_layer(n_qubits: int) -> List[Gate]:
    return [gatelib.x_rotation(MIXER_ANGLE, qubit) for qubit in range(n_qubits)]


def build_qaoa_hard_circuit(f: SignFunction, pad_to: Optional[int] = None) -> Circuit:
    """
    Build exp(iπ/4 Σσ^x) C_Z on |+^n>, C_Z being the diagonal gate of (-i)^{|x|} f(x).

    :f (SignFunction) The sign function f̃
    :pad_to (int, optional) Total gate count m, reached with identity diagonal gates

    Return the circuit, of m = n + 1 gates without padding
    """
    n = f.n
    padding = _padding(n, _pad_count(pad_to, n + 1, 'QAOA'))
    gates = [gatelib.diagonal(qaoa_phases(f), range(n))] + padding + _mixer_layer(n)
    logging.debug(f'built a QAOA hard circuit with {len(gates)} gates on {n} qubits')
    return Circuit(n, tuple(gates), InitialState.PLUS)


def build_iqp_hard_circuit(f: SignFunction, pad_to: Optional[int] = None) -> Circuit:
    """
    Build H^n U_f H^n on |0^n>, U_f being the diagonal gate of f.

    :f (SignFunction) The sign function
    :pad_to (int, optional) Number m of diagonal gates, reached with identity gates

    Return the circuit
    """
    n = f.n
    layer = [gatelib.hadamard(qubit) for qubit in range(n)]
    diagonal = gatelib.diagonal(math.pi * (f.as_array() == -1), range(n))
    padding = _padding(n, _pad_count(pad_to, 1, 'IQP'))
    return Circuit(n, tuple(layer + [diagonal] + padding + layer), InitialState.ZERO)


def walsh_coefficients(phases) -> np.ndarray:
    """
    Expand φ(x) = Σ_S a_S (-1)^{|x ∧ S|} over the parities of qubit subsets S.

    :phases (array-like) φ at every outcome index, 2^n values

    Return a_S indexed by the bit mask of S
    """
    phases = np.asarray(phases, dtype=float)
    return scipy.linalg.hadamard(len(phases)) @ phases / len(phases)


def diagonal_network(phases, n: int) -> List[Gate]:
    """
    Compile diag(exp(iφ(x))) into diagonal gates and CNOTs on at most two qubits.

    Parities of one or two qubits share one diagonal gate per qubit pair. The parity of a
    larger subset is folded by a CNOT ladder onto its last qubit, rotated with its second
    to last qubit, and unfolded.

    :phases (array-like) φ at every outcome index
    :n (int) Number of qubits

    Return the gates, in application order
    """
    if n == 1:
        return [gatelib.diagonal(phases, (0,))]
    coefficients = walsh_coefficients(phases)
    labels = np.arange(4)
    low, high = 1 - 2 * (labels & 1), 1 - 2 * ((labels >> 1) & 1)
    gates, placed = [], set()
    for a, b in itertools.combinations(range(n), 2):
        pair = coefficients[(1 << a) | (1 << b)] * low * high
        if not gates:
            pair = pair + coefficients[0]
        for qubit, signs in ((a, low), (b, high)):
            if qubit not in placed:
                pair = pair + coefficients[1 << qubit] * signs
                placed.add(qubit)
        gates.append(gatelib.diagonal(pair, (a, b)))
    for mask in range(1 << n):
        support = [qubit for qubit in range(n) if mask >> qubit & 1]
        if len(support) < 3:
            continue
        *folded, second, last = support
        ladder = [gatelib.controlled_x(qubit, last) for qubit in folded]
        rotation = gatelib.diagonal(coefficients[mask] * low * high, (second, last))
        gates += ladder + [rotation] + ladder[::-1]
    return gates


def _joint_support(first: Gate, second: Gate) -> Tuple[int, ...]:
    return first.support + tuple(q for q in second.support if q not in first.support)


def _fuse(first: Gate, second: Gate) -> Gate:
    """Return the gate applying first, then second."""
    support = _joint_support(first, second)
    product = gatelib.embed_matrix(second, support) @ gatelib.embed_matrix(first, support)
    return gatelib.from_matrix(support, product)


def _overlapping(gates: Sequence[Gate], gate: Gate) -> List[int]:
    return [k for k, other in enumerate(gates) if set(other.support) & set(gate.support)]


def merge_gates(gates: Sequence[Gate], max_arity: int = 2) -> List[Gate]:
    """
    Fuse neighbouring gates while the fused supports stay within max_arity qubits.

    A gate is fused into the last earlier gate it overlaps, then a forward pass fuses
    each gate into the next gate it overlaps. Gates in between are disjoint from the
    moved one, so the circuit unitary is unchanged.

    :gates (Sequence[Gate]) Gates in application order
    :max_arity (int) Largest support of a fused gate

    Return the fused gates
    """
    merged = []
    for gate in gates:
        earlier = _overlapping(merged, gate)
        if earlier and len(_joint_support(merged[earlier[-1]], gate)) <= max_arity:
            merged[earlier[-1]] = _fuse(merged[earlier[-1]], gate)
        else:
            merged.append(gate)
    index = 0
    while index < len(merged):
        later = [k for k in _overlapping(merged, merged[index]) if k > index]
        if later and len(_joint_support(merged[index], merged[later[0]])) <= max_arity:
            merged[later[0]] = _fuse(merged[index], merged[later[0]])
            del merged[index]
        else:
            index += 1
    return merged


def build_haar_hard_circuit(f: SignFunction, pad_to: Optional[int] = None) -> Circuit:
    """
    The QAOA hard circuit moved onto |0^n>, compiled into gates on one or two qubits.

    :f (SignFunction) The sign function f̃
    :pad_to (int, optional) Total gate count m, reached with identity diagonal gates

    Return the circuit, of 1, 1 and 6 gates for n = 1, 2 and 3 without padding
    """
    n = f.n
    layer = [gatelib.hadamard(qubit) for qubit in range(n)]
    gates = merge_gates(layer + diagonal_network(qaoa_phases(f), n) + _mixer_layer(n))
    gates += _padding(n, _pad_count(pad_to, len(gates), 'HAAR'))
    logging.debug(f'built a HAAR hard circuit with {len(gates)} gates on {n} qubits')
    return Circuit(n, tuple(gates), InitialState.ZERO)


def hard_probability_fraction(f: SignFunction,
                              outcome: Optional[Sequence[int]] = None) -> Fraction:
    """
    Exact outcome probability of every hard circuit built from f.

    The amplitude of outcome z is Σ_x f(x) (-1)^{x·z} / 2^n up to a phase, so the
    probability is 0 or at least 1/2^{2n} for every z.

    :f (SignFunction) The sign function
    :outcome (Sequence[int], optional) Bits z, 0^n if unset

    Return |Σ_x f(x) (-1)^{x·z}|^2 / 2^{2n}
    """
    signs = f.as_array()
    if outcome is not None:
        mask = index_from_bits(outcome)
        parities = np.array([bin(x & mask).count('1') & 1 for x in range(1 << f.n)])
        signs = signs * (1 - 2 * parities)
    total = int(signs.sum())
    return Fraction(total ** 2, 1 << (2 * f.n))


def hard_probability_reference(f: SignFunction) -> float:
    """
    Closed form of the 0^n probability of every hard circuit built from f.

    :f (SignFunction) The sign function

    Return |Σ_x f(x)|^2 / 2^{2n}, computed exactly then rounded
    """
    return float(hard_probability_fraction(f))
