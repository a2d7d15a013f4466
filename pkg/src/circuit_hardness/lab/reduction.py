"""
Decide whether the 0^n probability of a hard circuit is zero from a noisy average-case
oracle.

The hard circuit is interpolated to a random draw, the oracle is queried at Chebyshev
points of [0, Δ], a robust fit of the answers is extrapolated to θ = m and the value is
compared with the midpoint of the gap between 0 and 1/2^{2n}.
"""
import enum
import functools
import logging
import math
import time
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

from circuit_hardness.lab.check import InvalidParameterError, check_range
from circuit_hardness.lab.families.draws import (FamilyKind, QaoaPhaseDistribution,
                                                 RandomDraw, sample_random_draw)
from circuit_hardness.lab.families.hiding import hiding_transport
from circuit_hardness.lab.polyapprox import (EXTENDED_PRECISION_BITS, empirical_error,
                                             required_degree, theorem_interpolant)
from circuit_hardness.lab.robustfit import (DEFAULT_ETA_PRIME, DEFAULT_SAMPLE_CONSTANT,
                                            FIT_EPSILON, ExtrapolationCertificate,
                                            NoisyOracle, chebyshev_sample_points,
                                            extrapolate_to_m, log2_abs, robust_fit)
from circuit_hardness.lab.utils import child_seed, run_in_workers
from circuit_hardness.lab.worstcase.builders import (build_haar_hard_circuit,
                                                     build_iqp_hard_circuit,
                                                     build_qaoa_hard_circuit,
                                                     hard_probability_fraction)
from circuit_hardness.lab.worstcase.signs import SignFunction

import mpmath


DEFAULT_LOCAL_DIMENSION = 4
DEFAULT_DELTA_CAP = 0.25
DEFAULT_MAX_PRECISION_BITS = 8192
PRECISION_MARGIN_BITS = 64

ORACLE_KEY = 1
SAMPLE_KEY = 2

HARD_CIRCUIT_BUILDERS = {
    FamilyKind.QAOA_P1: build_qaoa_hard_circuit,
    FamilyKind.IQP: build_iqp_hard_circuit,
    FamilyKind.HAAR: build_haar_hard_circuit,
}

LEDGER_COLUMNS = ('index', 'seed', 'family', 'n', 'm', 'd', 'verdict', 'p_hat_m',
                  'cert_log2_bound', 'correct', 'wall_time')


class InfeasibleReductionError(Exception):
    """Simple error class to handle reductions needing more precision than allowed."""

    pass


class Verdict(enum.Enum):
    ZERO = 'ZERO'
    AT_LEAST_THRESHOLD = 'AT_LEAST_THRESHOLD'


@dataclass(frozen=True)
class ReductionParams:
    """
    The parameters of one reduction, derived by plan_reduction.

    δ is set so that δ' / Δ'^d = 2^{-(2n+2)}, with δ' = 9δ/4 and Δ' = Δ / 8m.

    :n (int) Qubit count
    :m (int) Gate count of the random draw
    :family (FamilyKind) The family
    :N (int) Local dimension
    :delta_window (float) Interpolation window Δ
    :d (int) Degree of the fit
    :log2_delta (float) log2 of the oracle accuracy target δ
    :eta (float) Oracle failure rate η
    :epsilon (float) Fit slack ε
    :eta_prime (float) Fit failure probability η'
    :trials (int) Repetitions
    :seed (int) Root seed
    :sample_constant (int) Constant c of the sample count
    :failure_mode (str) per_query or per_circuit
    :precision_bits (int) Working precision of the fit
    :infeasible (bool) Whether precision_bits exceeds the configured maximum
    :delta_override (float, optional) Oracle noise bound used instead of δ
    """

    n: int
    m: int
    family: FamilyKind
    N: int
    delta_window: float
    d: int
    log2_delta: float
    eta: float = 0.0
    epsilon: float = FIT_EPSILON
    eta_prime: float = DEFAULT_ETA_PRIME
    trials: int = 1
    seed: int = 0
    sample_constant: int = DEFAULT_SAMPLE_CONSTANT
    failure_mode: str = 'per_query'
    precision_bits: int = EXTENDED_PRECISION_BITS
    infeasible: bool = False
    delta_override: Optional[float] = None

    @property
    def delta(self):
        """Oracle noise bound: the override if any, else 2^log2_delta as an mpf."""
        if self.delta_override is not None:
            return self.delta_override
        with mpmath.workprec(self.precision_bits):
            return mpmath.power(2, mpmath.mpf(self.log2_delta))

    @property
    def log2_delta_prime(self) -> float:
        return math.log2(9 / 4) + self.log2_delta

    @property
    def delta_prime_scale(self) -> float:
        return self.delta_window / (8 * self.m)

    @property
    def log2_separation(self) -> float:
        """Return log2(δ' / Δ'^d), which is -(2n+2)."""
        return self.log2_delta_prime - self.d * math.log2(self.delta_prime_scale)

    def with_overrides(self, **changes) -> 'ReductionParams':
        return replace(self, **changes)


def plan_reduction(n: int, m: int, family: FamilyKind = FamilyKind.QAOA_P1,
                   delta_cap: float = DEFAULT_DELTA_CAP, eta: float = 0.0,
                   N: int = DEFAULT_LOCAL_DIMENSION, trials: int = 1, seed: int = 0,
                   sample_constant: int = DEFAULT_SAMPLE_CONSTANT,
                   failure_mode: str = 'per_query',
                   delta_override: Optional[float] = None,
                   degree: Optional[int] = None,
                   max_precision_bits: int = DEFAULT_MAX_PRECISION_BITS
                   ) -> ReductionParams:
    """
    Derive the degree, window and oracle accuracy of a reduction.

    :n (int) Qubit count, at least 1
    :m (int) Gate count, at least n
    :family (FamilyKind) The family
    :delta_cap (float) Upper bound on Δ
    :eta (float) Oracle failure rate
    :N (int) Local dimension
    :trials (int) Repetitions
    :seed (int) Root seed
    :sample_constant (int) Constant c of the sample count
    :failure_mode (str) per_query or per_circuit
    :delta_override (float, optional) Oracle noise bound used instead of δ
    :degree (int, optional) Degree used instead of the required one
    :max_precision_bits (int) Precision above which the plan is infeasible

    Return the parameters
    """
    family = FamilyKind(family)
    if n < 1 or m < n:
        raise InvalidParameterError(f'A reduction needs 1 <= n <= m, got n={n} m={m}')
    delta_cap = check_range('delta_cap', delta_cap, 0.0, 1.0, low_open=True,
                            high_open=True)
    delta_window = min(delta_cap, 1 / N)
    d = degree or required_degree(m, n, N, family).d
    log2_delta = (math.log2(4 / 9) + d * math.log2(delta_window / (8 * m))
                  - (2 * n + 2))
    precision_bits = math.ceil(-log2_delta) + PRECISION_MARGIN_BITS
    infeasible = precision_bits > max_precision_bits
    if infeasible:
        logging.warning(f'reduction n={n} m={m} needs {precision_bits} bits, '
                        f'above the maximum of {max_precision_bits}')
    logging.info(f'planned {family.value} reduction n={n} m={m}: d={d}, '
                 f'Δ={delta_window}, log2 δ={log2_delta:.2f}')
    return ReductionParams(n, m, family, N, delta_window, d, log2_delta, eta,
                           trials=trials, seed=seed, sample_constant=sample_constant,
                           failure_mode=failure_mode, precision_bits=precision_bits,
                           infeasible=infeasible, delta_override=delta_override)


def decide(p_hat_m, n: int) -> Verdict:
    """
    Compare an extrapolated value with the midpoint 2/2^{2n+2}.

    :p_hat_m (float or mpf) The extrapolated value
    :n (int) Qubit count

    Return ZERO below the midpoint, AT_LEAST_THRESHOLD from it on
    """
    if p_hat_m < mpmath.ldexp(mpmath.mpf(1), -(2 * n + 1)):
        return Verdict.ZERO
    return Verdict.AT_LEAST_THRESHOLD


@dataclass(frozen=True)
class Decision:
    """
    The outcome of a reduction.

    :verdict (Verdict) ZERO or AT_LEAST_THRESHOLD
    :p_hat_m (mpf) Extrapolated value of p(m)
    :n (int) Qubit count
    :certificate (ExtrapolationCertificate) The extrapolation certificate
    :reference (float, optional) The exact p(m) when known
    """

    verdict: Verdict
    p_hat_m: object
    n: int
    certificate: ExtrapolationCertificate
    reference: Optional[float] = None

    @property
    def threshold_low(self) -> float:
        return 2.0 ** -(2 * self.n + 2)

    @property
    def threshold_high(self) -> float:
        return 3 * 2.0 ** -(2 * self.n + 2)

    @property
    def correct(self) -> Optional[bool]:
        if self.reference is None:
            return None
        expected = Verdict.ZERO if self.reference == 0 else Verdict.AT_LEAST_THRESHOLD
        return self.verdict is expected

    @property
    def separated(self) -> bool:
        """Tell whether p_hat_m lies outside of the gap between both thresholds."""
        return not self.threshold_low <= float(self.p_hat_m) < self.threshold_high


def build_hard_draw(f: SignFunction, family: FamilyKind, m: int,
                    dist: Optional[QaoaPhaseDistribution] = None, seed: int = 0,
                    degenerate: bool = False) -> RandomDraw:
    """
    Build the hard circuit of f padded to m gates and sample a draw around it.

    :f (SignFunction) The sign function
    :family (FamilyKind) The family
    :m (int) Gate count of the draw
    :dist (QaoaPhaseDistribution, optional) Law of the QAOA Z phases
    :seed (int) Seed of the draw
    :degenerate (bool) Whether to drop the randomness, making p(θ) constant

    Return the draw
    """
    family = FamilyKind(family)
    circuit = HARD_CIRCUIT_BUILDERS[family](f, pad_to=m)
    draw = sample_random_draw(family, None, circuit, dist, seed)
    if draw.m != m:
        raise InvalidParameterError(f'Hard circuit has {draw.m} slots, expected {m}')
    return draw.without_randomness() if degenerate else draw


def prepare_draw(f: SignFunction, params: ReductionParams,
                 dist: Optional[QaoaPhaseDistribution] = None, seed: int = 0,
                 degenerate: bool = False) -> RandomDraw:
    if f.n != params.n:
        raise InvalidParameterError(f'Sign function of arity {f.n} for n={params.n}')
    return build_hard_draw(f, params.family, params.m, dist, seed, degenerate)


def oracle_for_draw(draw: RandomDraw, params: ReductionParams, seed: int = 0,
                    outcome: Optional[Sequence[int]] = None) -> NoisyOracle:
    """
    Wrap the degree-d approximant p̃ of p_θ in a NoisyOracle.

    p̃ interpolates p at d points of [0, 1] and at θ = m, so p̃(m) = p(m) and p̃ stays
    within 2^{-(2n+2)} of p on [0, 1]. It is evaluated at the precision of the plan,
    which double precision values of p could not resolve at the scale of δ.

    :draw (RandomDraw) The draw
    :params (ReductionParams) The parameters
    :seed (int) Seed of the oracle noise
    :outcome (Sequence[int], optional) Outcome of the queried probability, 0^n if unset

    Return the oracle
    """
    approximant = theorem_interpolant(draw, params.d, params.precision_bits, outcome)
    evaluator = functools.partial(approximant.evaluate_extended,
                                  precision=params.precision_bits)
    return NoisyOracle(evaluator, params.delta, params.eta, child_seed(seed, ORACLE_KEY),
                       params.failure_mode, precision=params.precision_bits)


def prepare_oracle(f: SignFunction, params: ReductionParams,
                   dist: Optional[QaoaPhaseDistribution] = None, seed: int = 0,
                   degenerate: bool = False) -> NoisyOracle:
    """
    Wrap the approximant of p_θ, for a draw around the hard circuit of f, in an oracle.

    :f (SignFunction) The sign function
    :params (ReductionParams) The parameters
    :dist (QaoaPhaseDistribution, optional) Law of the QAOA Z phases
    :seed (int) Seed of the draw and of the oracle noise
    :degenerate (bool) Whether to drop the randomness of the draw

    Return the oracle
    """
    return oracle_for_draw(prepare_draw(f, params, dist, seed, degenerate), params, seed)


def run_reduction(f: SignFunction, params: ReductionParams, oracle: NoisyOracle,
                  outcome: Optional[Sequence[int]] = None) -> Decision:
    """
    Query, fit, extrapolate and decide.

    :f (SignFunction) The sign function, giving the reference p(m)
    :params (ReductionParams) The parameters
    :oracle (NoisyOracle) Noisy access to p(θ) of a draw around the hard circuit of f
    :outcome (Sequence[int], optional) Outcome the oracle answers for, 0^n if unset

    Return the decision
    """
    if params.infeasible:
        raise InfeasibleReductionError(
            f'n={params.n} m={params.m} needs {params.precision_bits} bits of precision')
    plan = chebyshev_sample_points(params.d, params.delta_window, params.sample_constant,
                                   child_seed(oracle.seed, SAMPLE_KEY))
    values = oracle.query_plan(plan)
    fit = robust_fit(plan, values, params.d, params.delta, params.precision_bits)
    certificate = extrapolate_to_m(fit, params.m, params.delta_window, params.delta,
                                   params.precision_bits)
    verdict = decide(certificate.p_m, params.n)
    reference = float(hard_probability_fraction(f, outcome))
    logging.debug(f'p_hat_m={mpmath.nstr(certificate.p_m, 17)} verdict={verdict.value}')
    return Decision(verdict, certificate.p_m, params.n, certificate, reference)


@dataclass(frozen=True)
class TrialResult:
    """One repetition of a reduction."""

    index: int
    seed: int
    decision: Decision
    wall_time: float

    def as_row(self, params: ReductionParams) -> tuple:
        return (self.index, self.seed, params.family.value, params.n, params.m, params.d,
                self.decision.verdict.value, self.decision.p_hat_m,
                self.decision.certificate.log2_bound, self.decision.correct,
                self.wall_time)


def _run_trial(job: tuple) -> TrialResult:
    index, seed, f, params, dist, degenerate = job
    start = time.monotonic()
    oracle = prepare_oracle(f, params, dist, seed, degenerate)
    decision = run_reduction(f, params, oracle)
    return TrialResult(index, seed, decision, time.monotonic() - start)


def trial_seeds(params: ReductionParams) -> List[int]:
    return [child_seed(params.seed, index) for index in range(params.trials)]


def run_trials(f: SignFunction, params: ReductionParams,
               seeds: Optional[Sequence[int]] = None, workers: int = 1,
               dist: Optional[QaoaPhaseDistribution] = None,
               degenerate: bool = False) -> List[TrialResult]:
    """
    Repeat the reduction over independent draws.

    :f (SignFunction) The sign function
    :params (ReductionParams) The parameters
    :seeds (Sequence[int], optional) One seed per trial, derived from params if None
    :workers (int) Number of processes
    :dist (QaoaPhaseDistribution, optional) Law of the QAOA Z phases
    :degenerate (bool) Whether to drop the randomness of the draws

    Return the trials, sorted by index
    """
    seeds = trial_seeds(params) if seeds is None else list(seeds)
    jobs = [(index, seed, f, params, dist, degenerate)
            for index, seed in enumerate(seeds)]
    results = sorted(run_in_workers(_run_trial, jobs, workers), key=lambda r: r.index)
    correct = sum(bool(result.decision.correct) for result in results)
    logging.info(f'{correct}/{len(results)} correct verdicts for {params.family.value} '
                 f'n={params.n} m={params.m}')
    return results


def correct_rate(results: Sequence[TrialResult]) -> float:
    if not results:
        raise InvalidParameterError('No trial to compute a rate from')
    return sum(bool(result.decision.correct) for result in results) / len(results)


@dataclass(frozen=True)
class HidingComparison:
    """
    Decisions on the same seed for outcome z of a draw and for 0^n of its transport.

    :seed (int) Seed of the draw and of the oracle noise
    :direct (Decision) Decision from p_z of the draw
    :transported (Decision) Decision from p_0 of the transported draw
    """

    seed: int
    direct: Decision
    transported: Decision

    @property
    def agree(self) -> bool:
        return self.direct.verdict is self.transported.verdict

    @property
    def correct(self) -> bool:
        return bool(self.direct.correct and self.transported.correct)


def hiding_verdicts(f: SignFunction, params: ReductionParams, z: Sequence[int],
                    seeds: Sequence[int], dist: Optional[QaoaPhaseDistribution] = None,
                    degenerate: bool = False) -> List[HidingComparison]:
    """
    Decide p_z of each draw, and p_0 of its transport for the outcome z.

    Both oracles share their noise seed, and both decisions are checked against the exact
    p_z(C(m)) of the hard circuit.

    :f (SignFunction) The sign function
    :params (ReductionParams) The parameters
    :z (Sequence[int]) The hidden outcome
    :seeds (Sequence[int]) Seeds of the draws
    :dist (QaoaPhaseDistribution, optional) Law of the QAOA Z phases
    :degenerate (bool) Whether to drop the randomness of the draws

    Return one comparison per seed
    """
    comparisons = []
    for seed in seeds:
        draw = prepare_draw(f, params, dist, seed, degenerate)
        moved = hiding_transport(draw, z)
        direct = run_reduction(f, params, oracle_for_draw(draw, params, seed, z), z)
        oracle = oracle_for_draw(moved, params, seed)
        transported = run_reduction(f, params, oracle, z)
        comparisons.append(HidingComparison(seed, direct, transported))
    agreeing = sum(comparison.agree for comparison in comparisons)
    logging.info(f'hiding verdicts for z={tuple(z)}: {agreeing}/{len(comparisons)} agree')
    return comparisons


@dataclass(frozen=True)
class AccuracyReport:
    """
    The gap between p and its approximant over the query window, against both budgets.

    :max_gap (float) Largest observed |p(θ) - p̃(θ)|
    :log2_delta (float) log2 of the oracle accuracy δ
    :approximant_target (float) 2^{-(2n+2)}
    """

    max_gap: float
    log2_delta: float
    approximant_target: float

    @property
    def meets_delta(self) -> bool:
        return log2_abs(self.max_gap) <= self.log2_delta

    @property
    def meets_approximant_target(self) -> bool:
        return self.max_gap <= self.approximant_target


def accuracy_budget_check(params: ReductionParams, draw: RandomDraw,
                          grid: int = 100) -> AccuracyReport:
    """
    Measure |p(θ) - p̃(θ)| on a grid of the query window [0, Δ].

    :params (ReductionParams) The parameters
    :draw (RandomDraw) The instance at hand
    :grid (int) Number of grid points

    Return the report
    """
    interpolant = theorem_interpolant(draw, params.d)
    gap = empirical_error(draw, interpolant, grid, params.delta_window)
    report = AccuracyReport(gap, params.log2_delta, 2.0 ** -(2 * params.n + 2))
    logging.info(f'accuracy budget: max gap {gap:.3e}, log2 δ={params.log2_delta:.2f}')
    return report
