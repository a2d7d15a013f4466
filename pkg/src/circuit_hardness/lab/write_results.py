import csv
import logging
import math
import os
from typing import IO, AnyStr, Iterable, Sequence

from circuit_hardness.lab.config import LedgerLock

import mpmath


def format_value(value) -> AnyStr:
    """
    Render a value for a CSV cell.

    Floats are written with 17 significant digits, mpmath numbers as well unless they
    fall outside of the double range, in which case they become log2=<value>.

    :value (object) The value

    Return the text of the cell
    """
    if isinstance(value, bool) or value is None:
        return '' if value is None else str(value).lower()
    if isinstance(value, mpmath.mpf):
        if value != 0 and not 1e-300 < abs(value) < 1e300:
            return format_log2(float(mpmath.log(abs(value), 2)))
        value = float(value)
    if isinstance(value, float):
        return format(value, '.17g')
    return str(value)


def format_log2(value: float) -> AnyStr:
    """Render a log-space quantity as log2=<value>."""
    if math.isinf(value):
        return 'log2=-inf' if value < 0 else 'log2=inf'
    return f'log2={value:.17g}'


def write_to_csv(file: IO, header: Sequence[AnyStr], rows: Iterable[Sequence]):
    """
    Write a header and rows to a csv file.

    :file (IO) An opened file descriptor
    :header (Sequence[AnyStr]) The column names
    :rows (Iterable[Sequence]) The rows, each value formatted by format_value

    Doesn't close the file when done, be careful
    """
    writer = csv.writer(file, lineterminator='\n')
    writer.writerow(header)
    writer.writerows([format_value(value) for value in row] for row in rows)
    file.flush()


def write_results(path: AnyStr, header: Sequence[AnyStr], rows: Iterable[Sequence]):
    """
    Write a results CSV, replacing any previous file.

    :path (AnyStr) Destination path
    :header (Sequence[AnyStr]) The column names
    :rows (Iterable[Sequence]) The rows
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', newline='') as f:
        write_to_csv(f, header, rows)
    logging.info(f'wrote results to {path}')


def append_ledger(path: AnyStr, header: Sequence[AnyStr], rows: Iterable[Sequence]):
    """
    Append rows to a ledger CSV shared by concurrent runs, writing the header once.

    :path (AnyStr) Path of the ledger
    :header (Sequence[AnyStr]) The column names
    :rows (Iterable[Sequence]) The rows
    """
    with LedgerLock(path):
        fresh = not os.path.exists(path) or os.path.getsize(path) == 0
        with open(path, 'a', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            if fresh:
                writer.writerow(header)
            writer.writerows([format_value(value) for value in row] for row in rows)
    logging.info(f'appended to ledger {path}')
