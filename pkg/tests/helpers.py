"""Shared path builders and brute-force reference implementations for tests."""
from __future__ import annotations

import numpy as np

from contractlab import ProcessPath


def halving_noise_path(
    horizon: int, seed, x0: float = 1.0, sd0: float = 0.5
) -> ProcessPath:
    """Mean-halving path with Gaussian residuals whose sd decays like 1/n."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=horizon)
    xs = np.empty(horizon + 1)
    ms = np.empty(horizon)
    x = float(x0)
    xs[0] = x
    for i in range(horizon):
        m = 0.5 * x
        x = m + (sd0 / (i + 1)) * z[i]
        ms[i] = m
        xs[i + 1] = x
    return ProcessPath(xs, ms)


def ar_path(horizon: int, seed, x0: float = 1.0, rho: float = 0.9, sd: float = 1.0):
    """AR(1)-style (xs, ms) pair with exact means rho * previous value."""
    rng = np.random.default_rng(seed)
    z = rng.normal(0.0, sd, size=horizon)
    xs = np.empty(horizon + 1)
    ms = np.empty(horizon)
    x = float(x0)
    xs[0] = x
    for i in range(horizon):
        m = rho * x
        x = m + z[i]
        ms[i] = m
        xs[i + 1] = x
    return xs, ms


def brute_crossings(xs, zero_tol: float = 0.0):
    """Single-pass reference: classes, crossing times, per-segment peaks."""

    def cls(v: float) -> int:
        if abs(v) <= zero_tol:
            return 0
        return 1 if v > 0 else -1

    classes = [cls(float(v)) for v in xs]
    times = [n for n in range(1, len(xs)) if classes[n] != classes[n - 1]]
    peaks = []
    for j, s in enumerate(times):
        e = times[j + 1] if j + 1 < len(times) else len(xs)
        peaks.append(max(abs(float(v)) for v in xs[s:e]))
    return classes, times, peaks
