"""Wall-clock timing of the selector pipeline."""

from __future__ import annotations

import gc
import statistics
import time
from typing import Iterable

import numpy as np

from .plugin import Dataset, Strategy, bandwidth

DEFAULT_SIZES = (128, 256, 384, 512, 640, 768, 896, 1024)


def synthetic_normal(n: int, seed: int = 0) -> Dataset:
    return Dataset.of(np.random.default_rng(seed).standard_normal(n))


def warm_up() -> None:
    """Compile every kernel once so timings exclude JIT cost."""
    data = synthetic_normal(16, seed=12345)
    for s in Strategy:
        bandwidth(data, s)


def time_pipeline(data: Dataset, strategy: Strategy | str, repeats: int = 5) -> float:
    """Median wall time of ``bandwidth`` over ``repeats`` runs.

    One untimed run primes caches; the collector is paused while timing,
    as ``timeit`` does.
    """
    bandwidth(data, strategy)
    times = []
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            t0 = time.perf_counter()
            bandwidth(data, strategy)
            times.append(time.perf_counter() - t0)
    finally:
        if enabled:
            gc.enable()
    return statistics.median(times)


def run_bench(
    sizes: Iterable[int] = DEFAULT_SIZES,
    strategies: Iterable[Strategy | str] = tuple(Strategy),
    repeats: int = 5,
    seed: int = 0,
) -> list[dict]:
    warm_up()
    rows = []
    for n in sizes:
        data = synthetic_normal(n, seed)
        for s in strategies:
            s = Strategy(s)
            rows.append({"n": n, "strategy": s.value, "seconds": time_pipeline(data, s, repeats)})
    return rows
