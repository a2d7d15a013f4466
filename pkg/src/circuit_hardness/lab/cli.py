"""
Command-line driver of the lab experiments.

Each subcommand reads its settings from --config (key=value text or YAML) with the
command line winning, writes a CSV with a .prom metadata file next to it, and exits
with 0 on success, 1 on usage errors and 2 when one of its checks fails.
"""
import dataclasses
import functools
import logging
import math
import os
import sys
from typing import AnyStr, Callable, Dict, List

import circuit_hardness.lab as lab
from circuit_hardness.lab.check import InvalidParameterError
from circuit_hardness.lab.circuits.circuit import (OutcomeError, SupportError,
                                                   bits_from_index, format_bits,
                                                   parse_bits, zeros)
from circuit_hardness.lab.circuits.gates import GateError
from circuit_hardness.lab.circuits.simulator import (output_probabilities,
                                                     output_probability,
                                                     postselected_probability, simulate)
from circuit_hardness.lab.circuits.textformat import CircuitFormatError, parse_circuit
from circuit_hardness.lab.config import (Config, ConfigurationError, LedgerLockTimeout,
                                         load_config_file, merge_settings)
from circuit_hardness.lab.families.draws import (FamilyKind, LayoutMismatchError,
                                                 QaoaPhaseDistribution, p_theta)
from circuit_hardness.lab.families.hiding import UnsupportedFamilyError, hiding_transport
from circuit_hardness.lab.families.serialization import dump_draw
from circuit_hardness.lab.polyapprox import (approximation_error_bound, empirical_error,
                                             required_degree, theorem_interpolant)
from circuit_hardness.lab.reduction import (DEFAULT_LOCAL_DIMENSION, LEDGER_COLUMNS,
                                            InfeasibleReductionError,
                                            build_hard_draw, correct_rate, plan_reduction,
                                            run_trials)
from circuit_hardness.lab.robustfit import (FIT_TRIAL_COLUMNS, meets_success_contract,
                                            run_fit_trial)
from circuit_hardness.lab.schema import ValidationError, validate_manifest
from circuit_hardness.lab.statcheck import (TVD_REPORT_COLUMNS, sampling_noise_bound,
                                            tvd_scaling_report)
from circuit_hardness.lab.telemetry import RunMetadata
from circuit_hardness.lab.utils import child_seed, run_in_workers
from circuit_hardness.lab.worstcase.builders import build_iqp_hard_circuit
from circuit_hardness.lab.worstcase.gadget import (UnsupportedGateError,
                                                  hadamard_gadget_expand)
from circuit_hardness.lab.worstcase.ising import (NonIqpFormError, NotIsingRepresentable,
                                                  amplitude_as_ising_partition,
                                                  compile_to_ising, diagonal_block)
from circuit_hardness.lab.worstcase.signs import (SignFunctionError,
                                                  balanced_sign_function,
                                                  constant_sign_function,
                                                  parity_sign_function,
                                                  random_sign_function,
                                                  read_sign_function)
from circuit_hardness.lab.write_results import append_ledger, write_results

import click

import numpy as np


USAGE_ERROR = 1
ACCEPTANCE_ERROR = 2

PROBABILITY_TOLERANCE = 1e-12
CHECK_TOLERANCE = 1e-9

SIGN_FUNCTIONS = {
    'constant': lambda n, seed: constant_sign_function(n),
    'parity': lambda n, seed: parity_sign_function(n),
    'balanced': balanced_sign_function,
    'random': random_sign_function,
}

USAGE_ERRORS = (ValidationError, ConfigurationError, InvalidParameterError,
                SignFunctionError, CircuitFormatError, GateError, SupportError,
                OutcomeError, LayoutMismatchError, UnsupportedFamilyError,
                UnsupportedGateError, NonIqpFormError, InfeasibleReductionError,
                LedgerLockTimeout, OSError)


class AcceptanceError(Exception):
    """Simple error class to handle failed checks of a subcommand."""

    pass


def configure_logging(level: AnyStr = 'INFO'):
    # register root logging
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO),
                        format='%(asctime)s %(levelname)s %(message)s')


class LabGroup(click.Group):
    """A click group mapping failures to the lab exit statuses."""

    def main(self, args=None, prog_name=None, **extra):
        extra.pop('standalone_mode', None)
        try:
            status = super().main(args=args, prog_name=prog_name, standalone_mode=False,
                                  **extra)
        except click.ClickException as err:
            err.show()
            sys.exit(USAGE_ERROR)
        except click.Abort:
            sys.exit(USAGE_ERROR)
        except USAGE_ERRORS as err:
            logging.error(f'{type(err).__name__}: {err}')
            click.echo(f'Error: {err}', err=True)
            sys.exit(USAGE_ERROR)
        except AcceptanceError as err:
            logging.error(f'check failed: {err}')
            click.echo(f'Check failed: {err}', err=True)
            sys.exit(ACCEPTANCE_ERROR)
        sys.exit(status if isinstance(status, int) else 0)


def resolve_settings(command: AnyStr, config_path, options: Dict) -> Dict:
    """
    Merge the configuration file, the command line and the environment defaults.

    :command (AnyStr) The subcommand, naming the default output
    :config_path (AnyStr, optional) Path of the configuration file
    :options (Dict) Command-line values, None meaning unset

    Return the validated settings
    """
    file_settings = load_config_file(config_path) if config_path else {}
    settings = validate_manifest(merge_settings(file_settings, options))
    defaults = Config()
    settings.setdefault('seed', defaults.seed)
    settings.setdefault('delta_cap', defaults.delta_cap)
    settings.setdefault('sample_constant', defaults.sample_constant)
    settings.setdefault('output', os.path.join(defaults.output_dir, f'{command}.csv'))
    settings['max_precision_bits'] = defaults.max_precision_bits
    if 'log_level' in settings:
        logging.getLogger().setLevel(settings['log_level'])
    return settings


def _require(settings: Dict, *keys: AnyStr):
    missing = [key for key in keys if settings.get(key) is None]
    if missing:
        raise ConfigurationError(f'Missing settings: {", ".join(missing)}')


def _sign_function(settings: Dict):
    choice = settings.get('f', 'constant')
    if choice in SIGN_FUNCTIONS:
        return SIGN_FUNCTIONS[choice](settings['n'], settings['seed'])
    f = read_sign_function(choice)
    if f.n != settings['n']:
        raise InvalidParameterError(f'Sign function {choice} has arity {f.n}, '
                                    f'n={settings["n"]} requested')
    return f


def _distribution(settings: Dict):
    if settings.get('distribution') is None or settings['family'] != 'qaoa':
        return None
    return QaoaPhaseDistribution(settings['distribution'])


def _draw(settings: Dict, f=None, seed: int = None):
    _require(settings, 'family', 'n', 'm')
    return build_hard_draw(f or _sign_function(settings), FamilyKind(settings['family']),
                           settings['m'], _distribution(settings),
                           settings['seed'] if seed is None else seed,
                           settings.get('degenerate', False))


def _finish(command: AnyStr, settings: Dict, header, rows: List,
            metadata: RunMetadata = None):
    write_results(settings['output'], header, rows)
    metadata = metadata or RunMetadata(command)
    metadata.count_trials(len(rows))
    metadata.write(settings['output'])


def _int_list(ctx, param, value):
    if value is None:
        return None
    try:
        return [int(item) for item in value.split(',') if item.strip()]
    except ValueError:
        raise click.BadParameter(f'{value!r} is not a comma separated list of integers')


def common_options(func: Callable) -> Callable:
    """Add the --config, --seed and --output options shared by every subcommand."""
    func = click.option('--output', type=click.Path(), help='Results path')(func)
    func = click.option('--seed', type=int, help='Root seed, LAB_SEED by default')(func)
    func = click.option('--config', 'config_path', type=click.Path(exists=True),
                        help='key=value or YAML settings file')(func)
    return func


def draw_options(func: Callable) -> Callable:
    """Add the options describing a draw around a hard circuit."""
    func = click.option('--degenerate/--random', default=None,
                        help='Drop the randomness of the draw')(func)
    func = click.option('--distribution', type=click.Choice(['uniform', 'sk',
                                                             'erdos_renyi']))(func)
    func = click.option('--f', 'f',
                        help='constant, parity, balanced, random or a path')(func)
    func = click.option('--m', type=int, help='Gate count')(func)
    func = click.option('--n', type=int, help='Qubit count')(func)
    func = click.option('--family', type=click.Choice(['qaoa', 'haar', 'iqp']))(func)
    return func


@click.group(cls=LabGroup)
@click.option('--log-level', default=None,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR']),
              help='Logging level, LAB_LOG_LEVEL by default')
@click.version_option(lab.__version__)
def cli(log_level):
    """Desk-scale experiments on the hardness of random circuit probabilities."""
    configure_logging(log_level or Config().log_level)


@cli.command('simulate')
@common_options
@click.option('--circuit', type=click.Path(exists=True), help='Circuit text file')
@click.option('--outcome', help='Outcome bits, every outcome if unset')
def simulate_cmd(config_path, seed, output, circuit, outcome):
    """Simulate a circuit and tabulate its output probabilities."""
    settings = resolve_settings('simulate', config_path,
                                {'seed': seed, 'output': output, 'circuit': circuit,
                                 'outcome': outcome})
    _require(settings, 'circuit')
    with open(settings['circuit'], 'r') as f:
        parsed = parse_circuit(f.read())
    if settings.get('outcome'):
        bits = parse_bits(settings['outcome'])
        rows = [(format_bits(bits), output_probability(parsed, bits))]
    else:
        probabilities = output_probabilities(parsed)
        rows = [(format_bits(bits_from_index(index, parsed.n_qubits)), float(p))
                for index, p in enumerate(probabilities)]
        if abs(math.fsum(probabilities) - 1) > CHECK_TOLERANCE:
            raise AcceptanceError(f'Probabilities sum to {math.fsum(probabilities)}')
    _finish('simulate', settings, ('outcome', 'probability'), rows)


@cli.command('sample-draw')
@common_options
@draw_options
def sample_draw(config_path, seed, output, family, n, m, f, distribution, degenerate):
    """Sample a random draw around a hard circuit and save it as JSON."""
    settings = resolve_settings('sample-draw', config_path, {
        'seed': seed, 'output': output, 'family': family, 'n': n, 'm': m, 'f': f,
        'distribution': distribution, 'degenerate': degenerate})
    if settings['output'].endswith('.csv'):
        settings['output'] = settings['output'][:-len('.csv')] + '.json'
    draw = _draw(settings)
    with open(settings['output'], 'w') as handle:
        handle.write(dump_draw(draw))
    logging.info(f'wrote a {draw.family.value} draw with m={draw.m} '
                 f'to {settings["output"]}')


@cli.command('p-theta-scan')
@common_options
@draw_options
@click.option('--grid', type=int, help='Number of values of θ in [0, m]')
def p_theta_scan(config_path, seed, output, family, n, m, f, distribution, degenerate,
                 grid):
    """Tabulate p(θ) over [0, m]."""
    settings = resolve_settings('p-theta-scan', config_path, {
        'seed': seed, 'output': output, 'family': family, 'n': n, 'm': m, 'f': f,
        'distribution': distribution, 'degenerate': degenerate, 'grid': grid})
    draw = _draw(settings)
    thetas = np.linspace(0.0, draw.m, settings.get('grid', 50))
    rows = [(float(theta), p_theta(draw, float(theta))) for theta in thetas]
    out_of_range = [p for _, p in rows
                    if not -PROBABILITY_TOLERANCE <= p <= 1 + PROBABILITY_TOLERANCE]
    direct = output_probability(draw.base_circuit, zeros(draw.n_qubits))
    _finish('p-theta-scan', settings, ('theta', 'p_theta'), rows)
    if out_of_range:
        raise AcceptanceError(f'{len(out_of_range)} probabilities outside of [0, 1]')
    if abs(rows[-1][1] - direct) > PROBABILITY_TOLERANCE:
        raise AcceptanceError(
            f'p(m)={rows[-1][1]} differs from the base circuit probability {direct}')


@cli.command('polyfit-check')
@common_options
@draw_options
@click.option('--degrees', callback=_int_list, help='Comma separated degrees')
@click.option('--grid', type=int, help='Number of values of θ in [0, 1]')
def polyfit_check(config_path, seed, output, family, n, m, f, distribution, degenerate,
                  degrees, grid):
    """Compare the approximant error on [0, 1] with its analytic bound."""
    settings = resolve_settings('polyfit-check', config_path, {
        'seed': seed, 'output': output, 'family': family, 'n': n, 'm': m, 'f': f,
        'distribution': distribution, 'degenerate': degenerate, 'degrees': degrees,
        'grid': grid})
    draw = _draw(settings)
    budget = required_degree(draw.m, draw.n_qubits, draw.architecture.local_dimension,
                             draw.family)
    rows, required_error = [], None
    for d in settings.get('degrees') or [budget.d]:
        error = empirical_error(draw, theorem_interpolant(draw, d),
                                settings.get('grid', 100))
        bound = approximation_error_bound(dataclasses.replace(budget, d=d), 0.0)
        rows.append((d, error, bound.log2_bound, bound.n_target))
        if d == budget.d:
            required_error = error
    _finish('polyfit-check', settings,
            ('d', 'empirical_error', 'log2_bound', 'log2_target'), rows)
    target = 2.0 ** -(2 * draw.n_qubits + 2)
    if required_error is not None and required_error > target:
        raise AcceptanceError(
            f'Error {required_error:.3e} at the required degree {budget.d} '
            f'exceeds {target}')


@cli.command('robust-fit-trials')
@common_options
@click.option('--degrees', callback=_int_list, help='Comma separated degrees')
@click.option('--delta-cap', type=float, help='Sample window Δ')
@click.option('--delta', type=float, help='Inlier noise bound δ')
@click.option('--eta', type=float, help='Contamination rate η')
@click.option('--eta-prime', type=float, help='Allowed fit failure rate η\'')
@click.option('--m', type=int, help='Extrapolation point')
@click.option('--trials', type=int, help='Trials per degree')
@click.option('--workers', type=int, help='Worker processes')
@click.option('--sample-constant', type=int, help='Constant c of the sample count')
@click.option('--precision', type=int, help='Bits of the refit')
@click.option('--failure-mode', type=click.Choice(['per_query', 'per_circuit']))
def robust_fit_trials(config_path, seed, output, degrees, delta_cap, delta, eta,
                      eta_prime, m, trials, workers, sample_constant, precision,
                      failure_mode):
    """Run synthetic robust fits and extrapolations."""
    settings = resolve_settings('robust-fit-trials', config_path, {
        'seed': seed, 'output': output, 'degrees': degrees, 'delta_cap': delta_cap,
        'delta': delta, 'eta': eta, 'eta_prime': eta_prime, 'm': m, 'trials': trials,
        'workers': workers, 'sample_constant': sample_constant, 'precision': precision,
        'failure_mode': failure_mode})
    metadata = RunMetadata('robust-fit-trials')
    rows, failed = [], []
    for d in settings.get('degrees') or [3]:
        trial = functools.partial(
            run_fit_trial, d=d, delta_window=settings['delta_cap'],
            delta=settings.get('delta', 1e-6), eta=settings.get('eta', 0.0),
            m=settings.get('m', 8), sample_constant=settings['sample_constant'],
            precision=settings.get('precision'),
            failure_mode=settings.get('failure_mode', 'per_query'))
        seeds = [child_seed(settings['seed'], d, index)
                 for index in range(settings.get('trials', 50))]
        results = run_in_workers(trial, seeds, settings.get('workers', 1))
        rows.extend(result.as_row() for result in results)
        if not meets_success_contract(results, settings.get('eta_prime', 1 / 3)):
            failed.append(d)
    _finish('robust-fit-trials', settings, FIT_TRIAL_COLUMNS, rows, metadata)
    if failed:
        raise AcceptanceError(f'Fit success rate too low for degrees {failed}')


@cli.command('reduce')
@common_options
@draw_options
@click.option('--trials', type=int, help='Number of draws')
@click.option('--workers', type=int, help='Worker processes')
@click.option('--degree', type=int, help='Degree used instead of the required one')
@click.option('--delta', type=float, help='Oracle noise bound, planned δ if unset')
@click.option('--delta-cap', type=float, help='Upper bound on the window Δ')
@click.option('--eta', type=float, help='Oracle failure rate η')
@click.option('--eta-prime', type=float, help='Allowed rate of wrong verdicts')
@click.option('--sample-constant', type=int, help='Constant c of the sample count')
@click.option('--failure-mode', type=click.Choice(['per_query', 'per_circuit']))
@click.option('--ledger', type=click.Path(), help='CSV ledger to append to')
def reduce_cmd(config_path, seed, output, family, n, m, f, distribution, degenerate,
               trials, workers, degree, delta, delta_cap, eta, eta_prime, sample_constant,
               failure_mode, ledger):
    """Decide p(m) = 0 against p(m) >= 1/2^{2n} through a noisy average-case oracle."""
    settings = resolve_settings('reduce', config_path, {
        'seed': seed, 'output': output, 'family': family, 'n': n, 'm': m, 'f': f,
        'distribution': distribution, 'degenerate': degenerate, 'trials': trials,
        'workers': workers, 'degree': degree, 'delta': delta, 'delta_cap': delta_cap,
        'eta': eta, 'eta_prime': eta_prime, 'sample_constant': sample_constant,
        'failure_mode': failure_mode, 'ledger': ledger})
    _require(settings, 'family', 'n', 'm')
    params = plan_reduction(
        settings['n'], settings['m'], FamilyKind(settings['family']),
        settings['delta_cap'], settings.get('eta', 0.0), trials=settings.get('trials', 1),
        seed=settings['seed'], sample_constant=settings['sample_constant'],
        failure_mode=settings.get('failure_mode', 'per_query'),
        delta_override=settings.get('delta'), degree=settings.get('degree'),
        max_precision_bits=settings['max_precision_bits'])
    if params.infeasible:
        raise InfeasibleReductionError(
            f'{params.precision_bits} bits of precision needed, above '
            f'LAB_MAX_PRECISION_BITS={settings["max_precision_bits"]}')
    results = run_trials(_sign_function(settings), params, None,
                         settings.get('workers', 1), _distribution(settings),
                         settings.get('degenerate', False))
    metadata = RunMetadata('reduce')
    for result in results:
        metadata.count_verdict(result.decision.verdict.value)
    rows = [result.as_row(params) for result in results]
    _finish('reduce', settings, LEDGER_COLUMNS[:-1], [row[:-1] for row in rows], metadata)
    append_ledger(settings.get('ledger') or os.path.join(Config().output_dir,
                                                          'ledger.csv'),
                  LEDGER_COLUMNS, rows)
    rate = correct_rate(results)
    if rate < 1 - settings.get('eta_prime', 1 / 3):
        raise AcceptanceError(f'Only {rate:.2%} of the verdicts are correct')


@cli.command('hiding-check')
@common_options
@draw_options
@click.option('--z', help='Hidden outcome bits')
@click.option('--trials', type=int, help='Number of draws')
def hiding_check(config_path, seed, output, family, n, m, f, distribution, degenerate, z,
                 trials):
    """Check that p_z(C(θ)) is p_0 of the transported draw at θ = 0, m/2 and m."""
    settings = resolve_settings('hiding-check', config_path, {
        'seed': seed, 'output': output, 'family': family, 'n': n, 'm': m, 'f': f,
        'distribution': distribution, 'degenerate': degenerate, 'z': z,
        'trials': trials})
    _require(settings, 'z')
    bits = parse_bits(settings['z'])
    _require(settings, 'family', 'n', 'm')
    f, rows = _sign_function(settings), []
    for index in range(settings.get('trials', 10)):
        draw_seed = child_seed(settings['seed'], index)
        draw = _draw(settings, f, draw_seed)
        moved = hiding_transport(draw, bits)
        for theta in (0.0, draw.m / 2, float(draw.m)):
            p_z, transported = p_theta(draw, theta, bits), p_theta(moved, theta)
            rows.append((draw_seed, theta, p_z, transported, abs(p_z - transported)))
    _finish('hiding-check', settings,
            ('seed', 'theta', 'p_z', 'p_zero_transported', 'gap'), rows)
    worst = max(row[-1] for row in rows)
    if worst > PROBABILITY_TOLERANCE:
        raise AcceptanceError(f'Hiding identity violated by {worst:.3e}')


@cli.command('tvd-report')
@common_options
@draw_options
@click.option('--samples', type=int, help='Samples per set')
@click.option('--bins', type=int, help='Histogram bins')
@click.option('--grid', type=int, help='Number of values of θ in [0, Δ]')
@click.option('--delta-cap', type=float, help='Upper bound on the window Δ')
def tvd_report(config_path, seed, output, family, n, m, f, distribution, degenerate,
               samples, bins, grid, delta_cap):
    """Tabulate the TVD between the eigenphase laws at θ and at 0."""
    settings = resolve_settings('tvd-report', config_path, {
        'seed': seed, 'output': output, 'family': family, 'n': n, 'm': m, 'f': f,
        'distribution': distribution, 'degenerate': degenerate, 'samples': samples,
        'bins': bins, 'grid': grid, 'delta_cap': delta_cap})
    template = _draw(settings)
    window = min(settings['delta_cap'], 1 / DEFAULT_LOCAL_DIMENSION)
    count, bin_count = settings.get('samples', 10000), settings.get('bins', 64)
    thetas = np.linspace(0.0, window, settings.get('grid', 3))
    report = tvd_scaling_report(template.family, template, [float(t) for t in thetas],
                                count, settings['seed'], bin_count, delta_window=window)
    _finish('tvd-report', settings, TVD_REPORT_COLUMNS,
            [row.as_row() for row in report.rows])
    if not report.below_cap():
        raise AcceptanceError('TVD above the regression cap')
    noise = sampling_noise_bound(count, bin_count)
    if report.rows[0].tvd > noise:
        raise AcceptanceError(f'TVD at θ=0 is {report.rows[0].tvd:.3e} > {noise:.3e}')


@cli.command('ising-check')
@common_options
@click.option('--n', type=int, help='Qubit count')
@click.option('--f', 'f', help='constant, parity, balanced, random or a path')
@click.option('--circuit', type=click.Path(exists=True), help='IQP circuit text file')
def ising_check(config_path, seed, output, n, f, circuit):
    """Check the Ising partition form of an IQP amplitude and the Hadamard gadget."""
    settings = resolve_settings('ising-check', config_path, {
        'seed': seed, 'output': output, 'n': n, 'f': f, 'circuit': circuit})
    if settings.get('circuit'):
        with open(settings['circuit'], 'r') as handle:
            iqp = parse_circuit(handle.read())
    else:
        _require(settings, 'n')
        iqp = build_iqp_hard_circuit(_sign_function(settings))
    try:
        compile_to_ising(diagonal_block(iqp))
        representable = True
    except NotIsingRepresentable:
        representable = False
    amplitude = amplitude_as_ising_partition(iqp)
    simulated = complex(simulate(iqp).amplitudes[0])
    expansion = hadamard_gadget_expand(iqp)
    target = zeros(iqp.n_qubits)
    gadget = postselected_probability(expansion.circuit, expansion.postselect_mask,
                                      target, expansion.data_qubits)
    direct = output_probability(iqp, target)
    rows = [('ising_representable', representable),
            ('amplitude_real', amplitude.real), ('amplitude_imag', amplitude.imag),
            ('simulated_real', simulated.real), ('simulated_imag', simulated.imag),
            ('partition_gap', abs(amplitude - simulated)),
            ('gadget_probability', gadget), ('circuit_probability', direct),
            ('gadget_gap', abs(gadget - direct))]
    _finish('ising-check', settings, ('quantity', 'value'), rows)
    if max(abs(amplitude - simulated), abs(gadget - direct)) > CHECK_TOLERANCE:
        raise AcceptanceError('Partition function or gadget disagrees with simulation')


def main():
    cli(prog_name='circuit-hardness-lab')


if __name__ == '__main__':
    main()
