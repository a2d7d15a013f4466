"""
Low-degree polynomial approximants p̃(θ) of the probability p(θ).

p̃ interpolates p at d Chebyshev points of [0, 1] and at θ = m, so that p̃(m) = p(m)
while |p - p̃| stays below 2^{-(2n+2)} on [0, 1] for a large enough degree d.
"""
import logging
import math
from dataclasses import dataclass
from typing import AnyStr, List, Optional, Sequence, Tuple

from circuit_hardness.lab.check import InvalidParameterError, check_range
from circuit_hardness.lab.families.draws import FamilyKind, RandomDraw, p_theta

import mpmath

import numpy as np
from numpy.polynomial import chebyshev

from scipy.special import gammaln


# barycentric weights of more nodes than this overflow double precision
DOUBLE_PRECISION_MAX_DEGREE = 60

EXTENDED_PRECISION_BITS = 128

LOG2 = math.log(2)


class DuplicateNodesError(Exception):
    """Simple error class to handle interpolation on repeated nodes."""

    pass


class Polynomial:
    """
    A polynomial in the Chebyshev basis of an interval [a, b].

    :coefficients (Sequence) Coefficients c_k of T_k((2θ - a - b) / (b - a))
    :interval (Tuple[float, float]) The interval [a, b]
    """

    def __init__(self, coefficients: Sequence,
                 interval: Tuple[float, float] = (-1.0, 1.0)):
        if len(coefficients) < 1:
            raise InvalidParameterError('A polynomial needs at least one coefficient')
        low, high = float(interval[0]), float(interval[1])
        if not high > low:
            raise InvalidParameterError(f'Empty polynomial interval [{low}, {high}]')
        self._coefficients = tuple(coefficients)
        self.interval = (low, high)

    @property
    def coefficients(self) -> Tuple:
        return self._coefficients

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def to_unit(self, theta):
        """Map [a, b] affinely onto [-1, 1], in the arithmetic of theta."""
        low, high = self.interval
        return (2 * theta - low - high) / (high - low)

    def __call__(self, theta):
        coefficients = np.array([float(c) for c in self.coefficients])
        t = self.to_unit(np.asarray(theta, dtype=float))
        return chebyshev.chebval(t, coefficients)

    def evaluate_extended(self, theta, precision: int = EXTENDED_PRECISION_BITS):
        """
        Evaluate with the Clenshaw recurrence in extended binary floating point.

        :theta (float or mpf) The point, possibly far outside of [a, b]
        :precision (int) Working precision in bits

        Return an mpmath number
        """
        with mpmath.workprec(precision):
            t = self.to_unit(mpmath.mpf(theta))
            upper, lower = mpmath.mpf(0), mpmath.mpf(0)
            for coefficient in reversed(self.coefficients[1:]):
                upper, lower = 2 * t * upper - lower + mpmath.mpf(coefficient), upper
            return t * upper - lower + mpmath.mpf(self.coefficients[0])

    def monomial_coefficients(self) -> np.ndarray:
        """Return the coefficients a_i of Σ a_i t^i, t being the [-1, 1] variable."""
        return chebyshev.cheb2poly(np.array([float(c) for c in self.coefficients]))

    def to_text(self) -> AnyStr:
        """Render the interval and the coefficients as decimal text."""
        lines = [f'interval={self.interval[0]!r},{self.interval[1]!r}']
        lines += [mpmath.nstr(mpmath.mpf(c), 40) if isinstance(c, mpmath.mpf)
                  else repr(float(c)) for c in self.coefficients]
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text: AnyStr) -> 'Polynomial':
        lines = [line.strip() for line in text.splitlines() if line.strip()]
        if not lines or not lines[0].startswith('interval='):
            raise InvalidParameterError('Polynomial text starts with interval=<a>,<b>')
        low, high = (float(value) for value in lines[0][len('interval='):].split(','))
        return cls([float(line) for line in lines[1:]], (low, high))


def _barycentric_weights(nodes: Sequence, precision: Optional[int]):
    count = len(nodes)
    if precision is None:
        x = np.array(nodes, dtype=float)
        differences = x[:, None] - x[None, :]
        np.fill_diagonal(differences, 1.0)
        return 1.0 / np.prod(differences, axis=1)
    with mpmath.workprec(precision):
        x = [mpmath.mpf(node) for node in nodes]
        return [1 / mpmath.fprod(x[j] - x[k] for k in range(count) if k != j)
                for j in range(count)]


class BarycentricInterpolant(Polynomial):
    """
    The interpolating polynomial of (node, value) pairs, evaluated by the second
    barycentric formula.

    :nodes (Sequence[float]) Distinct nodes
    :values (Sequence) Values at the nodes, floats or mpmath numbers
    :precision (int, optional) Bits for the weights, double precision if None
    """

    def __init__(self, nodes: Sequence[float], values: Sequence,
                 precision: Optional[int] = None):
        if len(nodes) != len(values):
            raise InvalidParameterError(f'{len(nodes)} nodes for {len(values)} values')
        if len(set(float(node) for node in nodes)) != len(nodes):
            raise DuplicateNodesError('Interpolation nodes must be distinct')
        if precision is None and len(nodes) > DOUBLE_PRECISION_MAX_DEGREE + 1:
            precision = EXTENDED_PRECISION_BITS
        self.nodes = tuple(float(node) for node in nodes)
        self.values = tuple(values)
        self.precision = precision
        self.weights = _barycentric_weights(self.nodes, precision)
        # the second formula is invariant under a common scaling of the weights
        largest = max(abs(weight) for weight in self.weights)
        self._double_weights = np.array([float(w / largest) for w in self.weights])
        self._double_values = np.array([float(value) for value in self.values])
        if len(nodes) > 1:
            interval = (min(self.nodes), max(self.nodes))
        else:
            interval = (self.nodes[0] - 1.0, self.nodes[0] + 1.0)
        super().__init__((0.0,), interval)
        self._coefficients = None

    @property
    def coefficients(self) -> Tuple:
        """Fit the Chebyshev coefficients on the node interval in double precision."""
        if self._coefficients is None:
            fitted = chebyshev.chebfit(self.to_unit(np.array(self.nodes)),
                                       self._double_values, len(self.nodes) - 1)
            self._coefficients = tuple(fitted)
        return self._coefficients

    def _double(self, theta: float) -> float:
        differences = theta - np.array(self.nodes)
        exact = np.flatnonzero(differences == 0)
        if exact.size:
            return float(self._double_values[exact[0]])
        ratios = self._double_weights / differences
        return float(np.dot(ratios, self._double_values) / np.sum(ratios))

    def __call__(self, theta):
        if np.ndim(theta):
            values = [self._double(float(t)) for t in np.ravel(theta)]
            return np.array(values).reshape(np.shape(theta))
        return self._double(float(theta))

    def evaluate_extended(self, theta, precision: int = EXTENDED_PRECISION_BITS):
        with mpmath.workprec(max(precision, self.precision or 0)):
            theta = mpmath.mpf(theta)
            numerator, denominator = mpmath.mpf(0), mpmath.mpf(0)
            for node, value, weight in zip(self.nodes, self.values, self.weights):
                if theta == node:
                    return mpmath.mpf(value)
                ratio = mpmath.mpf(weight) / (theta - node)
                numerator += ratio * mpmath.mpf(value)
                denominator += ratio
            return numerator / denominator


def lagrange_interpolant(nodes: Sequence[float], values: Sequence,
                         precision: Optional[int] = None) -> BarycentricInterpolant:
    """
    Build the unique interpolant of degree len(nodes) - 1.

    :nodes (Sequence[float]) Distinct nodes
    :values (Sequence) The values to interpolate
    :precision (int, optional) Bits used for the barycentric weights

    Return the interpolant
    """
    return BarycentricInterpolant(nodes, values, precision)


def interpolation_nodes(d: int, m: float) -> List[float]:
    """
    Place d Chebyshev points of the second kind on [0, 1], followed by the point m.

    :d (int) Number of nodes inside [0, 1]
    :m (float) The last node, larger than 1

    Return the d + 1 nodes in increasing order
    """
    if d < 1:
        raise InvalidParameterError(f'Degree {d} must be at least 1')
    check_range('m', m, 1.0, math.inf, low_open=True)
    if d == 1:
        inner = [0.5]
    else:
        inner = [(1 - math.cos(math.pi * k / (d - 1))) / 2 for k in range(d)]
    return inner + [float(m)]


@dataclass(frozen=True)
class DegreeBudget:
    """
    The degree of the approximant for a family, and what it was derived from.

    :m (int) Gate count
    :n (int) Qubit count
    :N (int) Local dimension
    :family (FamilyKind) The family
    :d (int) Smallest degree satisfying the family inequality
    :closed_form (int) ceil(4πe m / ln m) - 1, for comparison
    """

    m: int
    n: int
    N: int
    family: FamilyKind
    d: int
    closed_form: int


def degree_log_requirement(m: int, n: int, N: int, family: FamilyKind, d: int) -> float:
    """
    Compute the natural log of the right-hand side of (d+1)! >= ...

    HAAR needs 2^{2m+2} N^{2m} (2π)^{d+1} m, QAOA 2^{3n+2} (2π)^{d+1} m and
    IQP 2^{2n+2} (2π)^{d+1} m.
    """
    family = FamilyKind(family)
    if family is FamilyKind.HAAR:
        prefactor = (2 * m + 2) * LOG2 + 2 * m * math.log(N)
    elif family is FamilyKind.QAOA_P1:
        prefactor = (3 * n + 2) * LOG2
    else:
        prefactor = (2 * n + 2) * LOG2
    return prefactor + (d + 1) * math.log(2 * math.pi) + math.log(m)


def degree_inequality_holds(m: int, n: int, N: int, family: FamilyKind, d: int) -> bool:
    return float(gammaln(d + 2)) >= degree_log_requirement(m, n, N, family, d)


def closed_form_degree(m: int) -> int:
    return math.ceil(4 * math.pi * math.e * m / math.log(m)) - 1


def required_degree(m: int, n: int, N: int = 4,
                    family: FamilyKind = FamilyKind.HAAR) -> DegreeBudget:
    """
    Find the smallest degree whose factorial beats the derivative bound.

    :m (int) Gate count, at least 2
    :n (int) Qubit count
    :N (int) Local dimension of the gates
    :family (FamilyKind) The family

    Return the degree budget
    """
    if m < 2:
        raise InvalidParameterError(f'Gate count m={m} must be at least 2')
    family = FamilyKind(family)
    d = 1
    while not degree_inequality_holds(m, n, N, family, d):
        d += 1
    logging.debug(f'required degree for {family.value} m={m} n={n} N={N}: {d}')
    return DegreeBudget(m, n, N, family, d, closed_form_degree(m))


@dataclass(frozen=True)
class ErrorBound:
    """
    log2 of the bound on |p(θ) - p̃(θ)| and the two targets it is compared with.

    :log2_bound (float) The bound
    :n_target (float) -(2n+2)
    :m_target (float) -(2m+2)
    """

    log2_bound: float
    n_target: float
    m_target: float

    @property
    def meets_n_form(self) -> bool:
        return self.log2_bound <= self.n_target

    @property
    def meets_m_form(self) -> bool:
        return self.log2_bound <= self.m_target


def log2_derivative_prefactor(budget: DegreeBudget) -> float:
    """Return log2 of Σ|A_r|: N^{2m} for HAAR, 2^n for QAOA and 1 for IQP."""
    if budget.family is FamilyKind.HAAR:
        return 2 * budget.m * math.log2(budget.N)
    if budget.family is FamilyKind.QAOA_P1:
        return float(budget.n)
    return 0.0


def approximation_error_bound(budget: DegreeBudget, theta: float) -> ErrorBound:
    """
    Bound the interpolation error at θ in [0, 1].

    The (d+1)-th derivative of p is at most Σ|A_r| (2π)^{d+1}, and the node polynomial of
    d Chebyshev points of [0, 1] with the node m is at most 2^{2-2d} |θ - m|.

    :budget (DegreeBudget) The degree budget
    :theta (float) A point of [0, 1]

    Return the bound with its targets
    """
    theta = check_range('theta', theta, 0.0, 1.0)
    d = budget.d
    log2_bound = (log2_derivative_prefactor(budget)
                  + (d + 1) * math.log2(2 * math.pi)
                  - float(gammaln(d + 2)) / LOG2
                  + (2 - 2 * d)
                  + math.log2(abs(theta - budget.m)))
    return ErrorBound(log2_bound, -(2.0 * budget.n + 2), -(2.0 * budget.m + 2))


def theorem_interpolant(draw: RandomDraw, d: int, precision: Optional[int] = None,
                        outcome: Optional[Sequence[int]] = None
                        ) -> BarycentricInterpolant:
    """
    Interpolate p(θ) of a draw at d Chebyshev points of [0, 1] and at θ = m.

    :draw (RandomDraw) The draw
    :d (int) Number of nodes inside [0, 1]
    :precision (int, optional) Bits used for the barycentric weights
    :outcome (Sequence[int], optional) Outcome whose probability is interpolated, 0^n
        if unset

    Return p̃
    """
    nodes = interpolation_nodes(d, draw.m)
    values = [p_theta(draw, node, outcome) for node in nodes]
    return lagrange_interpolant(nodes, values, precision)


def empirical_error(draw: RandomDraw, interpolant: Polynomial, grid: int = 100,
                    upper: float = 1.0) -> float:
    """
    Measure the largest |p(θ) - p̃(θ)| over a uniform grid of [0, upper].

    :draw (RandomDraw) The draw
    :interpolant (Polynomial) The approximant
    :grid (int) Number of grid points
    :upper (float) Right end of the grid, at most 1

    Return the maximum gap
    """
    thetas = np.linspace(0.0, check_range('upper', upper, 0.0, 1.0), grid)
    if getattr(interpolant, 'precision', None):
        def approximant(theta):
            return float(interpolant.evaluate_extended(theta))
    else:
        approximant = interpolant
    return max(abs(p_theta(draw, theta) - float(approximant(theta))) for theta in thetas)


def empirical_error_sweep(draw: RandomDraw, degrees: Sequence[int],
                          grid: int = 100) -> List[Tuple[int, float]]:
    """
    Measure the empirical error for several degrees.

    :draw (RandomDraw) The draw
    :degrees (Sequence[int]) Degrees to try
    :grid (int) Number of grid points

    Return (d, max gap) pairs
    """
    rows = []
    for d in degrees:
        error = empirical_error(draw, theorem_interpolant(draw, d), grid)
        logging.info(f'degree {d}: empirical error {error:.3e}')
        rows.append((d, error))
    return rows
