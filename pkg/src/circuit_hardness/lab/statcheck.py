"""Statistical checks of the perturbed families: eigenphase laws, TVD and KS tests."""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from circuit_hardness.lab.check import InvalidParameterError, check_range
from circuit_hardness.lab.circuits.gates import TWO_PI
from circuit_hardness.lab.families.draws import (FamilyKind, HaarRandomness, RandomDraw,
                                                 sample_random_draw)
from circuit_hardness.lab.utils import child_rng, child_seed

import numpy as np

import scipy.stats


DEFAULT_BINS = 64
DEFAULT_BOOTSTRAP = 100
DEFAULT_TVD_CAP = 0.2
KS_ALPHA = 0.01

TVD_REPORT_COLUMNS = ('theta', 'count', 'bins', 'tvd', 'bootstrap_lo', 'bootstrap_hi')

REFERENCE_KEY = 0
SHIFTED_KEY = 1
BOOTSTRAP_KEY = 2


class EmptySampleError(Exception):
    """Simple error class to handle statistics of sample sets without samples."""

    pass


@dataclass(frozen=True, eq=False)
class PhaseSampleSet:
    """
    Eigenphases of the random part of interpolated gates.

    :theta (float) The interpolation parameter
    :samples (np.ndarray) The phases
    :low (float) Lower end of the native range
    :high (float) Upper end of the native range
    :seed (int) Seed of the samples
    """

    theta: float
    samples: np.ndarray
    low: float
    high: float
    seed: int

    @property
    def count(self) -> int:
        return len(self.samples)


def _random_part(draw: RandomDraw) -> np.ndarray:
    """Eigenphases of the randomness of every slot: H_j for HAAR, φ_j otherwise."""
    if isinstance(draw.randomness, HaarRandomness):
        return np.concatenate([d.phases for d in draw.randomness.decompositions])
    return np.concatenate(draw.randomness.random_phases)


def phase_range(family: FamilyKind) -> Tuple[float, float]:
    if FamilyKind(family) is FamilyKind.HAAR:
        return -math.pi, math.pi
    return 0.0, TWO_PI


def eigenphase_samples(family: FamilyKind, template: RandomDraw, theta: float,
                       count: int, seed: int = 0) -> PhaseSampleSet:
    """
    Sample the eigenphases of the random part of C(θ) over fresh draws.

    Draws are sampled around the template's base circuit with seeds derived from seed,
    and their eigenphases multiplied by 1 - θ/m, so equal seeds give samples related by
    that exact factor.

    :family (FamilyKind) The family
    :template (RandomDraw) A draw giving the architecture, base circuit and phase law
    :theta (float) The interpolation parameter in [0, m]
    :count (int) Number of samples
    :seed (int) The seed

    Return the sample set
    """
    family = FamilyKind(family)
    theta = check_range('theta', theta, 0.0, template.m)
    if count < 1:
        raise InvalidParameterError(f'Sample count {count} must be positive')
    chunks, total, key = [], 0, 0
    while total < count:
        draw = sample_random_draw(family, template.architecture, template.base_circuit,
                                  template.distribution, child_seed(seed, key))
        chunk = _random_part(draw)
        chunks.append(chunk)
        total += len(chunk)
        key += 1
    samples = (1 - theta / template.m) * np.concatenate(chunks)[:count]
    low, high = phase_range(family)
    logging.debug(f'sampled {count} eigenphases at θ={theta} from {key} draws')
    return PhaseSampleSet(theta, samples, low, high, seed)


def _histogram(samples: np.ndarray, low: float, high: float, bins: int) -> np.ndarray:
    counts, _ = np.histogram(samples, bins=bins, range=(low, high))
    return counts / len(samples)


def empirical_tvd(a: PhaseSampleSet, b: PhaseSampleSet,
                  bins: int = DEFAULT_BINS) -> float:
    """
    Compute half the ℓ1 distance between the normalised histograms of two sample sets.

    The estimate is biased upwards by sampling noise, by about sqrt(bins / count).

    :a (PhaseSampleSet) First sample set
    :b (PhaseSampleSet) Second sample set, on the same range
    :bins (int) Number of uniform bins over the range

    Return a value in [0, 1]
    """
    if a.count == 0 or b.count == 0:
        raise EmptySampleError('Cannot compare sample sets without samples')
    if (a.low, a.high) != (b.low, b.high):
        raise InvalidParameterError(
            f'Sample ranges differ: [{a.low}, {a.high}] and [{b.low}, {b.high}]')
    return _tvd(a.samples, b.samples, a.low, a.high, bins)


def sampling_noise_bound(count: int, bins: int = DEFAULT_BINS) -> float:
    """Return the TVD two independent sets of count samples of one law stay below."""
    if count < 1:
        raise EmptySampleError('The noise bound needs at least one sample')
    return max(3 / math.sqrt(count), math.sqrt(bins / count))


def _tvd(a: np.ndarray, b: np.ndarray, low: float, high: float, bins: int) -> float:
    difference = _histogram(a, low, high, bins) - _histogram(b, low, high, bins)
    return float(0.5 * np.sum(np.abs(difference)))


@dataclass(frozen=True)
class TvdRow:
    theta: float
    count: int
    bins: int
    tvd: float
    bootstrap_lo: float
    bootstrap_hi: float

    def as_row(self) -> Tuple:
        return tuple(getattr(self, column) for column in TVD_REPORT_COLUMNS)


@dataclass(frozen=True)
class TvdReport:
    """
    Empirical TVD between the phases at θ and at 0, over a θ grid.

    :rows (Tuple[TvdRow, ...]) One row per θ, with 2σ bootstrap bands
    :ordering_fraction (float) Share of bootstrap replicates whose TVD is non-decreasing
    :monotone (bool) Whether consecutive rows are non-decreasing within their bands
    """

    rows: Tuple[TvdRow, ...]
    ordering_fraction: float
    monotone: bool

    def below_cap(self, cap: float = DEFAULT_TVD_CAP) -> bool:
        return all(row.tvd <= cap for row in self.rows)


def tvd_scaling_report(family: FamilyKind, template: RandomDraw, thetas: Sequence[float],
                       count: int, seed: int = 0, bins: int = DEFAULT_BINS,
                       bootstrap: int = DEFAULT_BOOTSTRAP,
                       delta_window: Optional[float] = None) -> TvdReport:
    """
    Tabulate the empirical TVD between θ and 0 for a grid of θ.

    The reference set at θ = 0 and the sets at θ use independent seeds, so the θ = 0
    row measures the sampling noise.

    :family (FamilyKind) The family
    :template (RandomDraw) The draw template
    :thetas (Sequence[float]) The grid, within [0, Δ]
    :count (int) Samples per set
    :seed (int) The seed
    :bins (int) Number of histogram bins
    :bootstrap (int) Number of bootstrap replicates
    :delta_window (float, optional) The window Δ the grid must stay in, [0, m] if None

    Return the report
    """
    upper = template.m if delta_window is None else delta_window
    for theta in thetas:
        check_range('theta', theta, 0.0, upper)
    reference = eigenphase_samples(family, template, 0.0, count,
                                   child_seed(seed, REFERENCE_KEY))
    shifted_seed = child_seed(seed, SHIFTED_KEY)
    sets = [eigenphase_samples(family, template, theta, count, shifted_seed)
            for theta in thetas]
    rng = child_rng(seed, BOOTSTRAP_KEY)
    replicates = np.empty((bootstrap, len(sets)))
    for r in range(bootstrap):
        resampled = rng.choice(reference.samples, count)
        for column, samples in enumerate(sets):
            replicates[r, column] = _tvd(rng.choice(samples.samples, count), resampled,
                                         reference.low, reference.high, bins)
    rows = []
    for column, samples in enumerate(sets):
        mean, sigma = np.mean(replicates[:, column]), np.std(replicates[:, column])
        rows.append(TvdRow(samples.theta, count, bins,
                           empirical_tvd(samples, reference, bins),
                           float(mean - 2 * sigma), float(mean + 2 * sigma)))
    ordered = np.all(np.diff(replicates, axis=1) >= 0, axis=1)
    monotone = all(later.bootstrap_hi >= earlier.bootstrap_lo
                   for earlier, later in zip(rows, rows[1:]))
    logging.info(f'TVD report over {len(rows)} values of θ: monotone={monotone}')
    return TvdReport(tuple(rows), float(np.mean(ordered)), monotone)


@dataclass(frozen=True)
class KsResult:
    """
    A one-sample Kolmogorov-Smirnov test.

    :statistic (float) The KS statistic
    :pvalue (float) Its p-value
    :critical (float) Critical value of the statistic at the chosen level
    """

    statistic: float
    pvalue: float
    critical: float

    @property
    def passes(self) -> bool:
        return self.statistic <= self.critical


def _ks(samples: np.ndarray, law: str, args: Tuple, alpha: float) -> KsResult:
    if len(samples) == 0:
        raise EmptySampleError('Cannot test an empty sample')
    alpha = check_range('alpha', alpha, 0.0, 1.0, low_open=True, high_open=True)
    statistic, pvalue = scipy.stats.kstest(samples, law, args=args)
    critical = float(scipy.stats.kstwo.ppf(1 - alpha, len(samples)))
    return KsResult(float(statistic), float(pvalue), critical)


def ks_uniform(samples: Sequence[float], low: float, high: float,
               alpha: float = KS_ALPHA) -> KsResult:
    """
    Test samples against the uniform law of [low, high].

    :samples (Sequence[float]) The samples
    :low (float) Lower end
    :high (float) Upper end
    :alpha (float) Level of the test

    Return the test result
    """
    if not high > low:
        raise InvalidParameterError(f'Empty range [{low}, {high}]')
    return _ks(np.asarray(samples, dtype=float), 'uniform', (low, high - low), alpha)


def ks_arcsine(points: Sequence[float], delta: float,
               alpha: float = KS_ALPHA) -> KsResult:
    """
    Test whether 2x/Δ - 1 follows the arcsine law of [-1, 1].

    :points (Sequence[float]) Points of [0, Δ]
    :delta (float) The window Δ
    :alpha (float) Level of the test

    Return the test result
    """
    delta = check_range('delta', delta, 0.0, math.inf, low_open=True)
    unit = 2 * np.asarray(points, dtype=float) / delta - 1
    return _ks(unit, 'arcsine', (-1.0, 2.0), alpha)


def scale_map_defect(a: PhaseSampleSet, b: PhaseSampleSet, m: float) -> float:
    """
    Measure how far b is from (1 - θ_b/m) / (1 - θ_a/m) times a, sample by sample.

    :a (PhaseSampleSet) Samples at θ_a < m
    :b (PhaseSampleSet) Samples at θ_b, drawn with the seed of a
    :m (float) Gate count

    Return the largest absolute deviation
    """
    if a.seed != b.seed or a.count != b.count:
        raise InvalidParameterError('The scale map relates sets of equal seed and size')
    ratio = (1 - b.theta / m) / (1 - a.theta / m)
    return float(np.max(np.abs(b.samples - ratio * a.samples)))
