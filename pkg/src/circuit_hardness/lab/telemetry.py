"""Per-run metadata, written as a Prometheus text file next to each results CSV."""
import logging
import os
import time
from typing import AnyStr, Dict

from prometheus_client import CollectorRegistry, Counter, Gauge, write_to_textfile


class RunMetadata:
    """
    Timestamps and counters of one subcommand run.

    :command (AnyStr) The subcommand name, used as a label
    """

    def __init__(self, command: AnyStr):
        self.command = command
        self.registry = CollectorRegistry()
        self.started = Gauge('lab_run_start_timestamp_seconds',
                             'Start time of the run', ['command'], registry=self.registry)
        self.wall_time = Gauge('lab_run_wall_time_seconds', 'Wall time of the run',
                               ['command'], registry=self.registry)
        self.trials = Counter('lab_trials', 'Trials run', ['command'],
                              registry=self.registry)
        self.verdicts = Counter('lab_verdicts', 'Verdicts reached',
                                ['command', 'verdict'], registry=self.registry)
        self.start = time.time()
        self.started.labels(command).set(self.start)

    def count_trials(self, count: int = 1):
        self.trials.labels(self.command).inc(count)

    def count_verdict(self, verdict: AnyStr):
        self.verdicts.labels(self.command, verdict).inc()

    def values(self) -> Dict:
        """Return the sample values of the registry, keyed by (name, labels)."""
        return {(sample.name, tuple(sorted(sample.labels.items()))): sample.value
                for metric in self.registry.collect() for sample in metric.samples}

    def write(self, csv_path: AnyStr) -> AnyStr:
        """
        Write the metadata next to a results CSV.

        :csv_path (AnyStr) Path of the CSV, its extension replaced by .prom

        Return the path of the metadata file
        """
        self.wall_time.labels(self.command).set(time.time() - self.start)
        path = os.path.splitext(csv_path)[0] + '.prom'
        write_to_textfile(path, self.registry)
        logging.debug(f'wrote run metadata to {path}')
        return path
