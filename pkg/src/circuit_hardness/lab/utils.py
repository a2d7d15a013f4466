import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List

import numpy as np


def child_seed_sequence(seed: int, *keys: int) -> np.random.SeedSequence:
    """
    Derive an independent seed sequence for a (seed, key...) pair.

    :seed (int) The root seed of the experiment
    :keys (int) Counters such as a gate index or a trial index

    Return a numpy SeedSequence, identical for identical inputs
    """
    return np.random.SeedSequence(entropy=int(seed),
                                  spawn_key=tuple(int(k) for k in keys))


def child_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(child_seed_sequence(seed, *keys))


def child_seed(seed: int, *keys: int) -> int:
    """Return a 64-bit integer seed derived from (seed, keys)."""
    state = child_seed_sequence(seed, *keys).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def log2_or_neg_inf(value: float) -> float:
    """log2 of a non-negative number, -inf for zero."""
    if value == 0:
        return -math.inf
    return math.log2(value)


def run_in_workers(func: Callable, items: Iterable, workers: int = 1) -> List:
    """
    Map func over items, optionally with a process pool.

    :func (Callable) A picklable function of one argument
    :items (Iterable) The arguments
    :workers (int) Number of processes, 1 runs inline

    Return the results in the order of items
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logging.info(f'running {len(items)} tasks on {workers} workers')
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
