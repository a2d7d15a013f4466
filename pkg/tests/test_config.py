import os
import tempfile
import unittest
from unittest import mock

from circuit_hardness.lab.config import (Config, ConfigurationError, LedgerLock,
                                         LedgerLockTimeout, envvar_float, envvar_int,
                                         envvar_level, envvar_string,
                                         load_config_file, merge_settings,
                                         parse_key_values)
from circuit_hardness.lab.schema import ValidationError


class TestEnvironment(unittest.TestCase):

    @mock.patch.dict(os.environ, {'LAB_SEED': '7', 'LAB_DELTA_CAP': '0.1',
                                  'LAB_OUTPUT_DIR': '/tmp/lab', 'LAB_LOG_LEVEL': 'debug'})
    def test_config_reads_the_environment(self):
        config = Config()
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.delta_cap, 0.1)
        self.assertEqual(config.output_dir, '/tmp/lab')
        self.assertEqual(config.log_level, 'DEBUG')
        self.assertEqual(config.max_precision_bits, 8192)
        self.assertEqual(config.ledger_lock_timeout, 60.0)

    @mock.patch.dict(os.environ, {'LAB_SEED': 'seven'})
    def test_bad_integer(self):
        with self.assertRaises(ConfigurationError):
            Config()

    @mock.patch.dict(os.environ, {'LAB_LOG_LEVEL': 'LOUD'})
    def test_bad_log_level(self):
        with self.assertRaises(ConfigurationError):
            Config()

    @mock.patch.dict(os.environ, {'LAB_OUTPUT_DIR': ' runs ', 'LAB_EMPTY': '  '})
    def test_string_values(self):
        self.assertEqual(envvar_string('LAB_OUTPUT_DIR'), 'runs')
        self.assertEqual(envvar_string('LAB_UNSET_VARIABLE', 'x'), 'x')
        self.assertEqual(envvar_string('LAB_EMPTY', 'x'), 'x')
        self.assertEqual(envvar_int('LAB_EMPTY', 3), 3)
        self.assertEqual(envvar_float('LAB_EMPTY', 0.5), 0.5)
        self.assertEqual(envvar_level('LAB_EMPTY', 'warning'), 'WARNING')


class TestConfigFiles(unittest.TestCase):

    def write(self, directory, name, text):
        path = os.path.join(directory, name)
        with open(path, 'w') as f:
            f.write(text)
        return path

    def test_key_values_are_typed(self):
        settings = parse_key_values('family = qaoa\nn=2  # qubits\neta=0.1\n'
                                    'degenerate=true\ndegrees=[2, 4]\nz=011\n')
        self.assertEqual(settings, {'family': 'qaoa', 'n': 2, 'eta': 0.1,
                                    'degenerate': True, 'degrees': [2, 4], 'z': '011'})

    def test_dashes_become_underscores(self):
        self.assertEqual(parse_key_values('delta-cap=0.2'), {'delta_cap': 0.2})

    def test_line_without_value(self):
        with self.assertRaises(ConfigurationError):
            parse_key_values('family qaoa')

    def test_load_key_value_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = self.write(directory, 'run.conf', 'family=iqp\nm=3\n')
            self.assertEqual(load_config_file(path), {'family': 'iqp', 'm': 3})

    def test_load_yaml_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = self.write(directory, 'run.yaml', 'family: haar\ntrials: 4\n')
            self.assertEqual(load_config_file(path), {'family': 'haar', 'trials': 4})

    def test_invalid_settings(self):
        with tempfile.TemporaryDirectory() as directory:
            path = self.write(directory, 'run.conf', 'eta=0.5\n')
            with self.assertRaises(ValidationError):
                load_config_file(path)

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            load_config_file('/nonexistent/run.conf')

    def test_command_line_wins(self):
        merged = merge_settings({'n': 2, 'm': 3}, {'n': 1, 'm': None, 'seed': 4})
        self.assertEqual(merged, {'n': 1, 'm': 3, 'seed': 4})


class TestLedgerLock(unittest.TestCase):

    def test_lock_sits_next_to_the_ledger(self):
        with tempfile.TemporaryDirectory() as directory:
            ledger = os.path.join(directory, 'runs', 'ledger.csv')
            with LedgerLock(ledger) as lock:
                self.assertEqual(lock.lock_path, ledger + '.lock')
                with open(lock.lock_path) as f:
                    self.assertEqual(int(f.read()), os.getpid())
            self.assertFalse(os.path.exists(ledger + '.lock'))

    def test_held_lock_times_out(self):
        with tempfile.TemporaryDirectory() as directory:
            ledger = os.path.join(directory, 'ledger.csv')
            with LedgerLock(ledger):
                with self.assertRaises(LedgerLockTimeout):
                    with LedgerLock(ledger, poll=0.01, timeout=0.05):
                        pass
            self.assertFalse(os.path.exists(ledger + '.lock'))

    def test_abandoned_lock_is_broken(self):
        with tempfile.TemporaryDirectory() as directory:
            ledger = os.path.join(directory, 'ledger.csv')
            with open(ledger + '.lock', 'w') as f:
                f.write('0')
            old = os.path.getmtime(ledger + '.lock') - 3600
            os.utime(ledger + '.lock', (old, old))
            with LedgerLock(ledger, poll=0.01, timeout=1.0, stale_after=60.0):
                pass
            self.assertFalse(os.path.exists(ledger + '.lock'))

    @mock.patch.dict(os.environ, {'LAB_LEDGER_LOCK_TIMEOUT': '2.5'})
    def test_timeout_from_the_environment(self):
        self.assertEqual(LedgerLock('ledger.csv').timeout, 2.5)
