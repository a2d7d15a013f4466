"""
Sign functions f: {0,1}^n -> {-1, +1} and their text format.

    n=2
    1
    1
    1
    -1

Line j holds f at the outcome index j, qubit 0 being the least significant bit.
"""
import logging
import re
from dataclasses import dataclass
from typing import AnyStr, Tuple

from circuit_hardness.lab.utils import child_rng

import numpy as np


HEADER = re.compile(r'^n=(\d+)$')

# a table of 2^20 signs is the largest we agree to materialise
MAX_ARITY = 20


class SignFunctionError(Exception):
    """Simple error class to handle malformed sign function tables."""

    pass


@dataclass(frozen=True)
class SignFunction:
    """
    A sign function given by its truth table.

    :n (int) The arity
    :table (Tuple[int]) 2^n entries in {-1, +1}, indexed by the outcome index
    """

    n: int
    table: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'table', tuple(int(value) for value in self.table))
        if not 1 <= self.n <= MAX_ARITY:
            raise SignFunctionError(f'Arity {self.n} is outside of [1, {MAX_ARITY}]')
        if len(self.table) != 1 << self.n:
            raise SignFunctionError(
                f'A sign function of arity {self.n} needs {1 << self.n} entries, '
                f'got {len(self.table)}')
        if any(value not in (-1, 1) for value in self.table):
            raise SignFunctionError('Sign function entries must be -1 or +1')

    def __call__(self, index: int) -> int:
        return self.table[index]

    def total(self) -> int:
        """Σ_x f(x), an integer in [-2^n, 2^n]."""
        return sum(self.table)

    def as_array(self) -> np.ndarray:
        return np.array(self.table, dtype=int)


def parse_sign_function(text: AnyStr) -> SignFunction:
    """
    Parse a sign function from its text form.

    :text (AnyStr) Header 'n=<int>' then one sign per line

    Return the sign function
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or HEADER.match(lines[0]) is None:
        raise SignFunctionError('A sign function starts with a n=<int> header')
    n = int(HEADER.match(lines[0]).group(1))
    try:
        table = [int(line) for line in lines[1:]]
    except ValueError as exc:
        raise SignFunctionError(f'Bad sign function entry: {exc}')
    return SignFunction(n, tuple(table))


def dump_sign_function(f: SignFunction) -> AnyStr:
    return '\n'.join([f'n={f.n}'] + [str(value) for value in f.table]) + '\n'


def read_sign_function(path: AnyStr) -> SignFunction:
    with open(path, 'r') as handle:
        f = parse_sign_function(handle.read())
    logging.info(f'read sign function of arity {f.n} from {path}')
    return f


def write_sign_function(f: SignFunction, path: AnyStr):
    with open(path, 'w') as handle:
        handle.write(dump_sign_function(f))


def constant_sign_function(n: int, value: int = 1) -> SignFunction:
    return SignFunction(n, (value,) * (1 << n))


def parity_sign_function(n: int) -> SignFunction:
    """f(x) = (-1)^{|x|}, a balanced function."""
    return SignFunction(n, tuple(1 - 2 * (bin(x).count('1') & 1) for x in range(1 << n)))


def random_sign_function(n: int, seed: int) -> SignFunction:
    """Independent uniform signs, deterministic in seed."""
    signs = child_rng(seed, n).choice((-1, 1), size=1 << n)
    return SignFunction(n, tuple(int(value) for value in signs))


def balanced_sign_function(n: int, seed: int) -> SignFunction:
    """A uniformly random function with as many -1 as +1 entries."""
    signs = np.array([1, -1] * (1 << (n - 1)))
    child_rng(seed, n).shuffle(signs)
    return SignFunction(n, tuple(int(value) for value in signs))
