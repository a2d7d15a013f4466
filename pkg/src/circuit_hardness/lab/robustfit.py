"""
Outlier-robust polynomial regression on Chebyshev-distributed samples of [0, Δ].

A degree-d polynomial is fitted to noisy values, a fraction η of which may be arbitrary,
then extrapolated to θ = m. The extrapolation error is certified in log space:
|p_m - P(m)| <= (9δ/4) (8m/Δ)^d.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from circuit_hardness.lab.check import InvalidParameterError, check_finite, check_range
from circuit_hardness.lab.polyapprox import EXTENDED_PRECISION_BITS, Polynomial
from circuit_hardness.lab.utils import child_rng

import mpmath

import numpy as np
from numpy.polynomial import chebyshev


DEFAULT_SAMPLE_CONSTANT = 4

IRLS_WEIGHT_FLOOR = 1e-12
IRLS_MAX_ITERATIONS = 200

# the median-of-fits fallback kicks in above this share of large residuals
LARGE_RESIDUAL_SHARE = 0.25
MEDIAN_FITS = 9
FALLBACK_KEY = 9
CIRCUIT_FAILURE_KEYS = (0, 1)

REFINEMENT_MAX_STEPS = 256

INLIER_TOLERANCE = 1e-9

MAX_CONTAMINATION = 0.25
FIT_EPSILON = 0.25
DEFAULT_ETA_PRIME = 1 / 3

FAILURE_MODES = ('per_query', 'per_circuit')

FIT_TRIAL_COLUMNS = ('seed', 'd', 'delta_window', 'delta', 'eta', 'count', 'sup_error',
                     'cert_log2_bound', 'measured_log2_error')


class UnderdeterminedFitError(Exception):
    """Simple error class to handle fits with fewer samples than coefficients."""

    pass


class DegenerateSampleError(Exception):
    """Simple error class to handle sample plans with too few distinct points."""

    pass


def log2_abs(value) -> float:
    """
    Compute log2 |value| for floats and mpmath numbers of any magnitude.

    :value (float or mpf) The value

    Return the logarithm, -inf for zero
    """
    if value == 0:
        return -math.inf
    return float(mpmath.log(abs(mpmath.mpf(value)), 2))


@dataclass(frozen=True)
class SamplePlan:
    """
    Sample points x_i of [0, Δ] such that 2x_i/Δ - 1 follow the arcsine law on [-1, 1].

    :delta (float) Right end Δ of the window, in (0, 1)
    :points (Tuple[float, ...]) The points
    :seed (int) Seed the points were drawn with
    :degree (int) Degree the plan was sized for
    :sample_constant (int) Constant c of count = ceil(c d ln(d + 2))
    """

    delta: float
    points: Tuple[float, ...]
    seed: int
    degree: int
    sample_constant: int = DEFAULT_SAMPLE_CONSTANT

    @property
    def count(self) -> int:
        return len(self.points)

    def unit_points(self) -> np.ndarray:
        return 2 * np.array(self.points) / self.delta - 1


def sample_count(d: int, sample_constant: int = DEFAULT_SAMPLE_CONSTANT) -> int:
    return math.ceil(sample_constant * d * math.log(d + 2))


def chebyshev_sample_points(d: int, delta: float,
                            sample_constant: int = DEFAULT_SAMPLE_CONSTANT,
                            seed: int = 0) -> SamplePlan:
    """
    Draw x = Δ(cos(πU) + 1)/2 for U uniform on [0, 1].

    :d (int) Degree of the polynomial to fit
    :delta (float) Window Δ, in (0, 1)
    :sample_constant (int) Constant c of the sample count
    :seed (int) Seed of the draw

    Return the sample plan
    """
    if d < 1:
        raise InvalidParameterError(f'Degree {d} must be at least 1')
    delta = check_range('delta', delta, 0.0, 1.0, low_open=True, high_open=True)
    uniforms = child_rng(seed).random(sample_count(d, sample_constant))
    points = delta * (np.cos(math.pi * uniforms) + 1) / 2
    return SamplePlan(delta, tuple(float(x) for x in points), seed, d, sample_constant)


class NoisyOracle:
    """
    Noisy access to a function of θ.

    An inlier is the exact value moved by a uniform error of [-δ, δ], an outlier is
    uniform on [0, outlier_magnitude]. Under per_query each query index fails
    independently with probability η. Under per_circuit the failure belongs to the draw
    behind the oracle: with probability η every query fails, otherwise none does.

    :evaluator (Callable) Exact value at θ, float or mpmath number
    :delta (float or mpf) Inlier noise bound δ
    :eta (float) Failure rate, in [0, 1/4)
    :seed (int) Seed of the noise
    :failure_mode (str) per_query or per_circuit
    :outlier_magnitude (float) Outliers are drawn from [0, outlier_magnitude]
    :precision (int) Bits of the returned mpmath numbers
    """

    def __init__(self, evaluator: Callable, delta=0.0, eta: float = 0.0, seed: int = 0,
                 failure_mode: str = 'per_query', outlier_magnitude: float = 1.0,
                 precision: int = EXTENDED_PRECISION_BITS):
        if failure_mode not in FAILURE_MODES:
            raise InvalidParameterError(
                f'Unknown failure mode {failure_mode}, expected one of {FAILURE_MODES}')
        if delta < 0:
            raise InvalidParameterError(f'Noise bound delta={delta} must be non-negative')
        self.evaluator = evaluator
        self.delta = delta
        self.eta = check_range('eta', eta, 0.0, MAX_CONTAMINATION, high_open=True)
        self.seed = seed
        self.failure_mode = failure_mode
        self.outlier_magnitude = check_finite('outlier_magnitude', outlier_magnitude)
        self.precision = precision
        failure_draw = child_rng(seed, *CIRCUIT_FAILURE_KEYS).random()
        self.circuit_fails = (failure_mode == 'per_circuit'
                              and bool(failure_draw < self.eta))

    def _draws(self, index: int) -> Tuple[bool, float]:
        rng = child_rng(self.seed, index)
        outlier, uniform = bool(rng.random() < self.eta), rng.random()
        if self.failure_mode == 'per_circuit':
            outlier = self.circuit_fails
        return outlier, uniform

    def is_outlier(self, index: int) -> bool:
        return self._draws(index)[0]

    def exact(self, theta: float):
        with mpmath.workprec(self.precision):
            return mpmath.mpf(self.evaluator(theta))

    def __call__(self, theta: float, index: int = 0):
        outlier, uniform = self._draws(index)
        with mpmath.workprec(self.precision):
            if outlier:
                return mpmath.mpf(self.outlier_magnitude * uniform)
            noise = mpmath.mpf(self.delta) * (2 * mpmath.mpf(uniform) - 1)
            return mpmath.mpf(self.evaluator(theta)) + noise

    def query_plan(self, plan: SamplePlan) -> List:
        """Query every point of a plan, the query index being the point position."""
        return [self(x, index) for index, x in enumerate(plan.points)]


def _irls_l1(design: np.ndarray, y: np.ndarray, floor: float) -> np.ndarray:
    """
    Minimise Σ|y - design c| by iteratively reweighted least squares.

    :design (np.ndarray) Chebyshev Vandermonde matrix
    :y (np.ndarray) Values
    :floor (float) Smallest residual used in the weights 1/|r|

    Return the coefficients
    """
    coefficients = np.linalg.lstsq(design, y, rcond=None)[0]
    for iteration in range(IRLS_MAX_ITERATIONS):
        residuals = np.abs(y - design @ coefficients)
        root_weights = 1.0 / np.sqrt(np.maximum(residuals, floor))
        updated = np.linalg.lstsq(design * root_weights[:, None], y * root_weights,
                                  rcond=None)[0]
        step = np.max(np.abs(updated - coefficients))
        coefficients = updated
        if step <= floor:
            logging.debug(f'IRLS converged after {iteration + 1} iterations')
            break
    return coefficients


def _median_of_fits(design: np.ndarray, y: np.ndarray, floor: float,
                    seed: int) -> np.ndarray:
    rng = child_rng(seed, FALLBACK_KEY)
    half = len(y) // 2
    fits = []
    for _ in range(MEDIAN_FITS):
        rows = np.sort(rng.choice(len(y), half, replace=False))
        fits.append(_irls_l1(design[rows], y[rows], floor))
    return np.median(np.array(fits), axis=0)


def _chebyshev_rows(unit_points: Sequence, d: int) -> List[List]:
    rows = []
    for t in unit_points:
        t = mpmath.mpf(t)
        row = [mpmath.mpf(1), t]
        while len(row) < d + 1:
            row.append(2 * t * row[-1] - row[-2])
        rows.append(row[:d + 1])
    return rows


def _extended_least_squares(unit_points: Sequence, values: Sequence, d: int,
                            precision: int) -> Tuple:
    """
    Solve the Chebyshev least squares problem to the given precision.

    Double precision solves on the residuals, which are kept in mpmath, refine the
    coefficients until a correction no longer halves the previous one.

    :unit_points (Sequence) Points of [-1, 1], mpmath numbers
    :values (Sequence) Values at the points
    :d (int) Degree
    :precision (int) Bits of the coefficients

    Return the d + 1 Chebyshev coefficients
    """
    with mpmath.workprec(precision):
        rows = _chebyshev_rows(unit_points, d)
        values = [mpmath.mpf(v) for v in values]
        design = np.array([[float(x) for x in row] for row in rows])
        coefficients = [mpmath.mpf(0)] * (d + 1)
        residuals, previous = values, math.inf
        for step in range(REFINEMENT_MAX_STEPS):
            largest = max(abs(r) for r in residuals)
            if largest == 0:
                break
            exponent = int(mpmath.floor(mpmath.log(largest, 2)))
            scaled = np.array([float(mpmath.ldexp(r, -exponent)) for r in residuals])
            correction = np.linalg.lstsq(design, scaled, rcond=None)[0]
            size = float(np.max(np.abs(correction)))
            if size == 0:
                break
            coefficients = [c + mpmath.ldexp(mpmath.mpf(float(x)), exponent)
                            for c, x in zip(coefficients, correction)]
            residuals = [v - mpmath.fdot(row, coefficients)
                         for v, row in zip(values, rows)]
            log2_size = math.log2(size) + exponent
            if log2_size > previous - 1:
                logging.debug(f'refinement stalled after {step + 1} steps')
                break
            previous = log2_size
        return tuple(coefficients)


def robust_fit(plan: SamplePlan, values: Sequence, d: int, delta=0.0,
               precision: Optional[int] = None) -> Polynomial:
    """
    Fit a degree-d polynomial on [0, Δ] to contaminated samples.

    The fit minimises the ℓ1 residual, falls back to the coefficient-wise median of fits
    on random half-samples when more than a quarter of the residuals are large, and is
    refined by least squares over the samples within 4δ of it.

    :plan (SamplePlan) The sample points
    :values (Sequence) Values at the points, floats or mpmath numbers
    :d (int) Degree
    :delta (float or mpf) Inlier noise bound δ
    :precision (int, optional) Bits of the refit, double precision if None

    Return the polynomial, in the Chebyshev basis of [0, Δ]
    """
    if len(values) != plan.count:
        raise InvalidParameterError(f'{len(values)} values for {plan.count} points')
    if plan.count < d + 1:
        raise UnderdeterminedFitError(
            f'{plan.count} samples cannot determine {d + 1} coefficients')
    if len(set(plan.points)) < d + 1:
        raise DegenerateSampleError(
            f'{len(set(plan.points))} distinct points for a degree {d} fit')
    interval = (0.0, plan.delta)
    unit_points = plan.unit_points()
    design = chebyshev.chebvander(unit_points, d)
    y = np.array([float(v) for v in values])
    scale = float(np.max(np.abs(y))) or 1.0
    coefficients = _irls_l1(design, y, IRLS_WEIGHT_FLOOR * scale)

    threshold = 4 * float(delta) + INLIER_TOLERANCE * scale
    large = np.abs(y - design @ coefficients) > threshold
    if np.mean(large) > LARGE_RESIDUAL_SHARE and plan.count // 2 >= d + 1:
        logging.debug(f'{np.mean(large):.2%} large residuals, taking a median of fits')
        coefficients = _median_of_fits(design, y, IRLS_WEIGHT_FLOOR * scale, plan.seed)

    inliers = np.flatnonzero(np.abs(y - design @ coefficients) <= threshold)
    if len(inliers) < d + 1:
        logging.warning(f'only {len(inliers)} inliers for degree {d}, keeping the ℓ1 fit')
        return Polynomial(tuple(coefficients), interval)
    if precision is None:
        refit = np.linalg.lstsq(design[inliers], y[inliers], rcond=None)[0]
        return Polynomial(tuple(refit), interval)
    with mpmath.workprec(precision):
        unit = [2 * mpmath.mpf(plan.points[i]) / mpmath.mpf(plan.delta) - 1
                for i in inliers]
        refit = _extended_least_squares(unit, [values[i] for i in inliers], d, precision)
    return Polynomial(refit, interval)


@dataclass(frozen=True)
class ExtrapolationCertificate:
    """
    The value of a fit at θ = m and the log2 bound of its error.

    :p_m (mpf) The extrapolated value
    :m (float) Extrapolation point
    :degree (int) Degree d of the fit
    :log2_delta_prime (float) log2 of δ' = 9δ/4
    :delta_prime_scale (float) Δ' = Δ / 8m
    :log2_amplification (float) d log2(8m / Δ)
    """

    p_m: object
    m: float
    degree: int
    log2_delta_prime: float
    delta_prime_scale: float
    log2_amplification: float

    @property
    def log2_bound(self) -> float:
        return self.log2_delta_prime + self.log2_amplification

    def covers(self, reference) -> bool:
        """Tell whether |p_m - reference| is within the certified bound."""
        with mpmath.workprec(max(EXTENDED_PRECISION_BITS, mpmath.mp.prec)):
            error = self.p_m - mpmath.mpf(reference)
        return log2_abs(error) <= self.log2_bound


def extrapolate_to_m(fit: Polynomial, m: float, delta_window: float, delta=0.0,
                     precision: int = EXTENDED_PRECISION_BITS
                     ) -> ExtrapolationCertificate:
    """
    Evaluate a fit of [0, Δ] at θ = m, through its [-1, 1] pre-image 2m/Δ - 1.

    :fit (Polynomial) A fit on [0, Δ]
    :m (float) Extrapolation point
    :delta_window (float) The window Δ
    :delta (float or mpf) Inlier noise bound δ
    :precision (int) Bits of the evaluation

    Return the value with its certificate
    """
    if fit.interval != (0.0, float(delta_window)):
        raise InvalidParameterError(
            f'Fit interval {fit.interval} is not the window [0, {delta_window}]')
    m = check_range('m', m, float(delta_window), math.inf, low_open=True)
    p_m = fit.evaluate_extended(m, precision)
    with mpmath.workprec(precision):
        delta_prime = 9 * mpmath.mpf(delta) / 4
    amplification = fit.degree * math.log2(8 * m / delta_window)
    return ExtrapolationCertificate(p_m, m, fit.degree, log2_abs(delta_prime),
                                    delta_window / (8 * m), amplification)


def coefficient_norm_check(residual_poly: Polynomial, delta_prime) -> bool:
    """
    Check Σ|a_i| <= 4^d δ' for the monomial coefficients a_i of a polynomial of [-1, 1].

    :residual_poly (Polynomial) A polynomial bounded by δ' on its interval
    :delta_prime (float or mpf) The bound δ'

    Return whether the coefficient norm is within 4^d δ'
    """
    total = math.fsum(abs(a) for a in residual_poly.monomial_coefficients())
    return log2_abs(total) <= 2 * residual_poly.degree + log2_abs(delta_prime)


@dataclass(frozen=True)
class FitTrial:
    """One synthetic fit and extrapolation, as a transcript row."""

    seed: int
    d: int
    delta_window: float
    delta: float
    eta: float
    count: int
    sup_error: float
    cert_log2_bound: float
    measured_log2_error: float

    def within_fit_contract(self, tolerance: float = INLIER_TOLERANCE) -> bool:
        return self.sup_error <= (2 + FIT_EPSILON) * max(self.delta, tolerance)

    @property
    def within_certificate(self) -> bool:
        return self.measured_log2_error <= self.cert_log2_bound

    def as_row(self) -> Tuple:
        return tuple(getattr(self, column) for column in FIT_TRIAL_COLUMNS)


def synthetic_polynomial(d: int, delta_window: float, seed: int) -> Polynomial:
    """
    Draw a degree-d polynomial of [0, Δ] with values in [0, 1].

    :d (int) Degree
    :delta_window (float) The window Δ
    :seed (int) Seed of the coefficients

    Return the polynomial
    """
    coefficients = child_rng(seed, d).uniform(-1.0, 1.0, d + 1)
    coefficients *= 0.5 / np.sum(np.abs(coefficients))
    coefficients[0] += 0.5
    return Polynomial(tuple(coefficients), (0.0, delta_window))


def sup_error(fit: Polynomial, reference: Polynomial, grid: int = 400,
              precision: int = EXTENDED_PRECISION_BITS) -> float:
    low, high = fit.interval
    thetas = np.linspace(low, high, grid)
    return max(float(abs(fit.evaluate_extended(t, precision)
                         - reference.evaluate_extended(t, precision))) for t in thetas)


def run_fit_trial(seed: int, d: int, delta_window: float, delta: float, eta: float,
                  m: float, sample_constant: int = DEFAULT_SAMPLE_CONSTANT,
                  precision: Optional[int] = None,
                  failure_mode: str = 'per_query') -> FitTrial:
    """
    Fit and extrapolate a random polynomial observed through a NoisyOracle.

    The certificate uses max(δ, round-off) so that noiseless trials stay meaningful.

    :seed (int) Seed of the trial
    :d (int) Degree
    :delta_window (float) The window Δ
    :delta (float) Inlier noise bound δ
    :eta (float) Contamination rate η
    :m (float) Extrapolation point
    :sample_constant (int) Constant c of the sample count
    :precision (int, optional) Bits of the refit
    :failure_mode (str) per_query or per_circuit

    Return the trial
    """
    truth = synthetic_polynomial(d, delta_window, seed)
    bits = precision or EXTENDED_PRECISION_BITS
    oracle = NoisyOracle(lambda theta: truth.evaluate_extended(theta, bits), delta, eta,
                         seed, failure_mode, precision=bits)
    plan = chebyshev_sample_points(d, delta_window, sample_constant, seed)
    fit = robust_fit(plan, oracle.query_plan(plan), d, delta, precision)
    roundoff = INLIER_TOLERANCE if precision is None else 2.0 ** (-precision / 2)
    certificate = extrapolate_to_m(fit, m, delta_window, max(delta, roundoff), bits)
    measured = log2_abs(certificate.p_m - truth.evaluate_extended(m, bits))
    trial = FitTrial(seed, d, delta_window, delta, eta, plan.count,
                     sup_error(fit, truth), certificate.log2_bound, measured)
    logging.debug(f'fit trial seed={seed} d={d}: sup error {trial.sup_error:.3e}')
    return trial


def success_rate(trials: Sequence[FitTrial]) -> float:
    if not trials:
        raise InvalidParameterError('No trial to compute a success rate from')
    return sum(trial.within_fit_contract() for trial in trials) / len(trials)


def meets_success_contract(trials: Sequence[FitTrial],
                           eta_prime: float = DEFAULT_ETA_PRIME) -> bool:
    """
    Tell whether the fits succeeded in at least a 1 - η' share of the trials.

    :trials (Sequence[FitTrial]) The trials
    :eta_prime (float) Allowed failure probability η' of the fitter

    Return the verdict
    """
    eta_prime = check_range('eta_prime', eta_prime, 0.0, 1.0, low_open=True,
                            high_open=True)
    return success_rate(trials) >= 1 - eta_prime
