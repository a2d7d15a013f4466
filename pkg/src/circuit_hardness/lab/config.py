import logging
import os
import time
from typing import AnyStr, Callable, Dict, Optional

from circuit_hardness.lab.schema import validate_manifest

import yaml


class ConfigurationError(Exception):
    """Simple error class to handle unreadable or malformed configuration."""

    pass


def _envvar(name: AnyStr, default, parse: Callable, kind: AnyStr):
    var = os.environ.get(name, '').strip()
    if not var:
        return default
    try:
        return parse(var)
    except ValueError:
        logging.error(f'Failed to read {name}')
        raise ConfigurationError(f'{name}={var!r} is not {kind}')


def envvar_string(name: AnyStr, default: Optional[AnyStr] = None) -> Optional[AnyStr]:
    """Return the stripped value of an environment variable, or the default if unset."""
    return _envvar(name, default, str, 'a string')


def envvar_int(name: AnyStr, default: int) -> int:
    return _envvar(name, default, int, 'an integer')


def envvar_float(name: AnyStr, default: float) -> float:
    return _envvar(name, default, float, 'a number')


def envvar_level(name: AnyStr, default: AnyStr = 'INFO') -> AnyStr:
    """
    Read a logging level name from the environment.

    :name (AnyStr) The name of the environment variable
    :default (AnyStr) Level used when the variable is not set

    Return the upper-cased level name, or raise ConfigurationError
    """
    level = envvar_string(name, default).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigurationError(f'{name}={level!r} is not a logging level')
    return level


class Config:
    """
    Utility class to hold the defaults read from the environment.

    Values are read when the class is instantiated, so tests can patch os.environ.
    """

    def __init__(self):
        self.seed = envvar_int('LAB_SEED', 0)
        self.delta_cap = envvar_float('LAB_DELTA_CAP', 0.25)
        self.sample_constant = envvar_int('LAB_SAMPLE_CONSTANT', 4)
        self.max_precision_bits = envvar_int('LAB_MAX_PRECISION_BITS', 8192)
        self.log_level = envvar_level('LAB_LOG_LEVEL')
        self.output_dir = envvar_string('LAB_OUTPUT_DIR', '.')
        self.ledger_lock_timeout = envvar_float('LAB_LEDGER_LOCK_TIMEOUT', 60.0)


# bit strings and paths, which YAML would turn into numbers
STRING_KEYS = ('z', 'outcome', 'f', 'circuit', 'output', 'ledger')


def _parse_value(key: AnyStr, text: AnyStr):
    """Read a key=value right-hand side as YAML, so numbers and lists get typed."""
    if key in STRING_KEYS:
        return text
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def parse_key_values(text: AnyStr) -> Dict:
    """
    Parse a flat key=value configuration, # starting comments.

    :text (AnyStr) The configuration text

    Return the settings as a dictionary
    """
    settings = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigurationError(f'Line {number}: expected key=value, got {raw!r}')
        key, value = (part.strip() for part in line.split('=', 1))
        key = key.replace('-', '_')
        settings[key] = _parse_value(key, value)
    return settings


def load_config_file(path: AnyStr) -> Dict:
    """
    Load an experiment manifest, either key=value text or YAML.

    :path (AnyStr) Path of the file, YAML when ending with .yaml or .yml

    Return the validated settings
    """
    try:
        with open(path, 'r') as f:
            text = f.read()
    except OSError as err:
        raise ConfigurationError(f'Cannot read configuration {path}: {err}')
    if path.endswith(('.yaml', '.yml')):
        try:
            settings = yaml.safe_load(text) or {}
        except yaml.YAMLError as err:
            raise ConfigurationError(f'Malformed YAML in {path}: {err}')
    else:
        settings = parse_key_values(text)
    logging.info(f'loaded {len(settings)} settings from {path}')
    return validate_manifest(settings)


def merge_settings(file_settings: Dict, overrides: Dict) -> Dict:
    """
    Merge command-line overrides on top of file settings.

    :file_settings (Dict) Settings from load_config_file
    :overrides (Dict) Settings given on the command line, None meaning unset

    Return the merged settings, the command line winning
    """
    merged = dict(file_settings)
    merged.update({key: value for key, value in overrides.items() if value is not None})
    return merged


class LedgerLockTimeout(Exception):
    """Simple error class to handle a ledger held by another run for too long."""

    pass


class LedgerLock:
    """
    Exclusive lock on a CSV ledger, held while a run appends its trials.

    The lock is a <ledger>.lock file created atomically and holding the pid of its owner.
    A lock left behind by a process that no longer runs, or older than stale_after
    seconds, is broken; waiting longer than timeout raises LedgerLockTimeout.

    :ledger (AnyStr) Path of the ledger
    :poll (float) Seconds between two attempts
    :timeout (float) Seconds to wait for the lock
    :stale_after (float) Age in seconds past which a lock is abandoned

    Use as a context manager:
        with LedgerLock(ledger_path):
            append_rows
    """

    def __init__(self, ledger: AnyStr, poll: float = 0.05,
                 timeout: Optional[float] = None, stale_after: float = 600.0):
        self.ledger = os.path.abspath(ledger)
        self.lock_path = f'{self.ledger}.lock'
        self.poll = poll
        self.timeout = Config().ledger_lock_timeout if timeout is None else timeout
        self.stale_after = stale_after
        self.fd = None

    def _owner(self) -> Optional[int]:
        try:
            with open(self.lock_path) as f:
                return int(f.read().strip() or 0) or None
        except (OSError, ValueError):
            return None

    def _is_stale(self) -> bool:
        try:
            age = time.time() - os.path.getmtime(self.lock_path)
        except FileNotFoundError:
            return False
        owner = self._owner()
        if owner is not None:
            try:
                os.kill(owner, 0)
            except ProcessLookupError:
                return True
            except PermissionError:
                pass
        return age >= self.stale_after

    def __enter__(self):
        os.makedirs(os.path.dirname(self.ledger), exist_ok=True)
        started = time.monotonic()
        while True:
            try:
                self.fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                if self._is_stale():
                    logging.warning(f'breaking the stale lock {self.lock_path}')
                    try:
                        os.unlink(self.lock_path)
                    except FileNotFoundError:
                        pass
                    continue
                if time.monotonic() - started >= self.timeout:
                    raise LedgerLockTimeout(
                        f'{self.ledger} is locked by pid {self._owner()} since more '
                        f'than {self.timeout}s')
                time.sleep(self.poll)
            else:
                os.write(self.fd, str(os.getpid()).encode())
                logging.debug(f'locked {self.ledger}')
                return self

    def __exit__(self, *args: Dict):
        if self.fd is not None:
            os.close(self.fd)
            os.unlink(self.lock_path)
            self.fd = None
