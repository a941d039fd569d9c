"""Scaling benchmark: random symplectic+noise layers at growing mode counts.

Dense matrix products dominate, so time per layer should grow like n^3;
the report includes the fitted log-log exponent.
"""

from __future__ import annotations

import resource
import time

import numpy as np

from . import channels as ch
from .phasespace import vacuum


def _random_layer(n: int, rng: np.random.Generator) -> ch.GaussianChannel:
    s = ch.random_symplectic(n, rng)
    g = 0.01 * np.eye(2 * n)
    alpha = 0.1 * rng.standard_normal(2 * n)
    # Symplectic A with PSD G is CP by construction; assert the cheap test.
    channel = ch.channel_from_left_action(s, g, alpha, cp_certified=False)
    if not ch.is_symplectic(s.T, tol=1e-6):
        raise AssertionError("random symplectic construction drifted")
    object.__setattr__(channel, "cp_certified", True)
    return channel


def bench_one(n: int, depth: int, rng: np.random.Generator) -> float:
    """Seconds per layer for a depth-``depth`` random circuit on n modes."""
    layers = [_random_layer(n, rng) for _ in range(depth)]
    state = vacuum(n)
    t0 = time.perf_counter()
    for layer in layers:
        state = ch.apply(layer, state)
    elapsed = time.perf_counter() - t0
    if not np.all(np.isfinite(state.gamma)):
        raise AssertionError("benchmark state diverged")
    return elapsed / depth


def run_bench(mode_counts, depth: int, seed: int) -> dict:
    """Benchmark each mode count; returns timings, totals, and fit."""
    rng = np.random.default_rng(seed)
    per_layer = {}
    totals = {}
    for n in mode_counts:
        t = bench_one(n, depth, rng)
        per_layer[n] = t
        totals[n] = t * depth
    ns = np.array(sorted(per_layer))
    ts = np.array([per_layer[n] for n in ns])
    exponent = float(np.polyfit(np.log(ns), np.log(ts), 1)[0]) if len(ns) > 1 else float("nan")
    return {
        "depth": depth,
        "seed": seed,
        "seconds_per_layer": {str(n): per_layer[n] for n in sorted(per_layer)},
        "total_seconds": {str(n): totals[n] for n in sorted(totals)},
        "fitted_exponent": exponent,
        "max_rss_kb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
    }
