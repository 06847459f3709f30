"""Filtered process paths: drift/residual decomposition, sign crossings, peak bounds.

A path stores, for every step, the realized value, the exact predictable
one-step conditional mean supplied by the generating model, and the residual
(their difference).  Because the means are exact, the inequalities checked
here are pathwise facts rather than statistical estimates.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .verdict import ConditionVerdict, failing, passing, vacuous

__all__ = [
    "SignClass",
    "StepRecord",
    "ProcessPath",
    "VectorProcessPath",
    "CrossingReport",
    "GrowthKernel",
    "sign_classes",
    "doob_decompose",
    "vector_doob_decompose",
    "reconstruct",
    "partial_sums",
    "zero_state_mask",
    "zero_state_means",
    "crossing_report",
    "growth_factor",
    "max_growth_factor",
    "check_segment_peak_bound",
    "kronecker_path",
]


class SignClass(IntEnum):
    MINUS = -1
    ZERO = 0
    PLUS = 1


def sign_classes(values: np.ndarray, zero_tol: float) -> np.ndarray:
    """Classify values into {-1, 0, +1}; magnitudes <= zero_tol count as zero."""
    v = np.asarray(values, dtype=float)
    out = np.sign(v).astype(np.int8)
    out[np.abs(v) <= zero_tol] = 0
    return out


@dataclass(frozen=True)
class StepRecord:
    """One transition of a scalar path: realized value, predictable mean, residual."""

    n: int
    x: float
    m: float
    eps: float


@dataclass(frozen=True, eq=False)
class ProcessPath:
    """A realized scalar trajectory with exact predictable one-step means.

    ``xs`` has length ``horizon + 1`` and carries the initial value at index 0;
    ``ms[i]`` is the conditional mean of step ``i + 1`` given the past.  The
    residuals ``eps = xs[1:] - ms`` are recomputed on construction, so the
    decomposition identity holds to the last bit by definition.
    """

    xs: np.ndarray
    ms: np.ndarray
    zero_tol: float = 0.0
    eps: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        ms = np.asarray(self.ms, dtype=float)
        if xs.ndim != 1 or ms.ndim != 1:
            raise ValueError("xs and ms must be one-dimensional")
        if len(xs) != len(ms) + 1:
            raise ValueError(
                f"length mismatch: got {len(xs)} values but {len(ms)} means "
                f"(expected one mean per step after the initial value)"
            )
        if self.zero_tol < 0:
            raise ValueError("zero_tol must be nonnegative")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ms", ms)
        object.__setattr__(self, "eps", xs[1:] - ms)

    @property
    def x0(self) -> float:
        return float(self.xs[0])

    @property
    def horizon(self) -> int:
        return len(self.ms)

    def step(self, n: int) -> StepRecord:
        """The 1-indexed step record for step ``n``."""
        if not 1 <= n <= self.horizon:
            raise IndexError(f"step {n} outside horizon 1..{self.horizon}")
        return StepRecord(n, float(self.xs[n]), float(self.ms[n - 1]), float(self.eps[n - 1]))

    def steps(self) -> Iterator[StepRecord]:
        for n in range(1, self.horizon + 1):
            yield self.step(n)

    def classes(self) -> np.ndarray:
        return sign_classes(self.xs, self.zero_tol)

    def tail_from(self, start: int) -> "ProcessPath":
        """Sub-path consisting of steps ``start..horizon`` started at x_{start-1}."""
        if not 1 <= start <= self.horizon + 1:
            raise IndexError(f"start {start} outside 1..{self.horizon + 1}")
        return ProcessPath(self.xs[start - 1 :], self.ms[start - 1 :], self.zero_tol)


@dataclass(frozen=True, eq=False)
class VectorProcessPath:
    """A realized vector trajectory with exact predictable one-step means."""

    xs: np.ndarray  # shape (horizon + 1, p)
    ms: np.ndarray  # shape (horizon, p)
    zero_tol: float = 0.0
    eps: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        ms = np.asarray(self.ms, dtype=float)
        if xs.ndim != 2 or ms.ndim != 2:
            raise ValueError("xs and ms must be two-dimensional (steps, components)")
        if xs.shape[1] != ms.shape[1]:
            raise ValueError(f"dimension mismatch: {xs.shape[1]} vs {ms.shape[1]} components")
        if xs.shape[0] != ms.shape[0] + 1:
            raise ValueError(
                f"length mismatch: got {xs.shape[0]} values but {ms.shape[0]} means"
            )
        if self.zero_tol < 0:
            raise ValueError("zero_tol must be nonnegative")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ms", ms)
        object.__setattr__(self, "eps", xs[1:] - ms)

    @property
    def p(self) -> int:
        return self.xs.shape[1]

    @property
    def horizon(self) -> int:
        return self.ms.shape[0]

    @property
    def x0(self) -> np.ndarray:
        return self.xs[0]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.xs, axis=1)

    def mean_norms(self) -> np.ndarray:
        return np.linalg.norm(self.ms, axis=1)

    def component(self, t: int) -> ProcessPath:
        """The scalar path of component ``t`` (its means stay exact conditional means)."""
        return ProcessPath(self.xs[:, t], self.ms[:, t], self.zero_tol)


def doob_decompose(
    xs: Sequence[float], ms: Sequence[float], zero_tol: float = 0.0
) -> ProcessPath:
    """Split a realized trajectory into predictable means plus residuals.

    ``ms`` must supply the conditional mean of every step after the initial
    value, so ``len(ms) == len(xs) - 1``.  Non-finite entries are rejected with
    the index of the offending value.
    """
    xs = np.asarray(xs, dtype=float)
    ms = np.asarray(ms, dtype=float)
    if xs.ndim != 1 or ms.ndim != 1:
        raise ValueError("xs and ms must be one-dimensional sequences")
    if len(ms) != len(xs) - 1:
        raise ValueError(
            f"length mismatch: {len(xs)} values require {len(xs) - 1} means, got {len(ms)}"
        )
    for name, arr in (("xs", xs), ("ms", ms)):
        bad = np.nonzero(~np.isfinite(arr))[0]
        if len(bad):
            raise ValueError(f"non-finite value in {name} at index {int(bad[0])}")
    return ProcessPath(xs, ms, zero_tol)


def vector_doob_decompose(
    xs: np.ndarray, ms: np.ndarray, zero_tol: float = 0.0
) -> VectorProcessPath:
    """Vector analogue of :func:`doob_decompose`."""
    xs = np.asarray(xs, dtype=float)
    ms = np.asarray(ms, dtype=float)
    if not (np.isfinite(xs).all() and np.isfinite(ms).all()):
        raise ValueError("non-finite value in vector path input")
    return VectorProcessPath(xs, ms, zero_tol)


def reconstruct(x0: float, ms: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Rebuild the realized values from the initial value, means and residuals."""
    ms = np.asarray(ms, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if ms.shape != eps.shape:
        raise ValueError("ms and eps must have equal length")
    return np.concatenate(([float(x0)], ms + eps))


def partial_sums(path: ProcessPath, s: int, t: int) -> Tuple[float, float]:
    """Residual sum and absolute-residual sum over steps ``s..t`` (1-indexed).

    Both sums are zero whenever ``t < s``.
    """
    if s < 1:
        raise IndexError(f"window start {s} must be >= 1")
    if t < s:
        return 0.0, 0.0
    if t > path.horizon:
        raise IndexError(f"window [{s}, {t}] outside horizon {path.horizon}")
    window = path.eps[s - 1 : t]
    return float(window.sum()), float(np.abs(window).sum())


def zero_state_mask(path: ProcessPath) -> np.ndarray:
    """Boolean mask over steps 1..horizon: True where the predecessor is zero-class."""
    return np.abs(path.xs[:-1]) <= path.zero_tol


def zero_state_means(path: ProcessPath) -> List[Tuple[int, float]]:
    """Predictable means at exactly those steps whose predecessor is zero-class."""
    mask = zero_state_mask(path)
    return [(int(i) + 1, float(path.ms[i])) for i in np.nonzero(mask)[0]]


@dataclass(frozen=True, eq=False)
class CrossingReport:
    """Sign-class sequence, crossing times, and per-segment peak magnitudes.

    A crossing is any change of sign class between consecutive indices.  The
    final segment is truncated by the horizon, so its recorded peak is a
    supremum over observed indices only.
    """

    sign_classes: np.ndarray
    crossing_times: Tuple[int, ...]
    n_t: int
    w: Tuple[float, ...]
    last_segment_open: bool


def crossing_report(path: ProcessPath) -> CrossingReport:
    cls = path.classes()
    change = np.nonzero(cls[1:] != cls[:-1])[0] + 1
    times = tuple(int(i) for i in change)
    abs_x = np.abs(path.xs)
    peaks: List[float] = []
    for j, start in enumerate(times):
        end = times[j + 1] if j + 1 < len(times) else len(path.xs)
        peaks.append(float(abs_x[start:end].max()))
    return CrossingReport(
        sign_classes=cls,
        crossing_times=times,
        n_t=len(times),
        w=tuple(peaks),
        last_segment_open=bool(times),
    )


def growth_factor(alphas: Sequence[float], t: int, k: int) -> float:
    """Product of (1 + alpha_i) over the window of the ``k`` steps ending at ``t``."""
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas < 0):
        raise ValueError("alphas must be nonnegative")
    if k < 0:
        raise ValueError("window length k must be nonnegative")
    if k > t:
        raise ValueError(f"window length {k} exceeds end index {t}")
    if t > len(alphas):
        raise IndexError(f"end index {t} outside the supplied sequence")
    if k == 0:
        return 1.0
    return float(np.prod(1.0 + alphas[t - k : t]))


def max_growth_factor(alphas: Sequence[float]) -> float:
    """Largest window product over all realized (t, k) pairs.

    All factors are >= 1, so the maximum is attained by the full product; over
    a finite horizon this is a lower bound for the untruncated supremum.
    """
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas < 0):
        raise ValueError("alphas must be nonnegative")
    return float(np.prod(1.0 + alphas))


@dataclass(frozen=True, eq=False)
class GrowthKernel:
    """Window products of one-step growth factors, with their realized maximum."""

    alphas: np.ndarray
    alpha_sum_cap: float = 1e6
    max_factor: float = field(init=False)

    def __post_init__(self) -> None:
        alphas = np.asarray(self.alphas, dtype=float)
        if np.any(alphas < 0):
            raise ValueError("alphas must be nonnegative")
        if alphas.sum() > self.alpha_sum_cap:
            raise ValueError(
                f"sum of alphas {alphas.sum():g} exceeds cap {self.alpha_sum_cap:g}"
            )
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "max_factor", max_growth_factor(alphas))

    def factor(self, t: int, k: int) -> float:
        return growth_factor(self.alphas, t, k)


def _nonexpansive_violation(
    path: ProcessPath, alphas: np.ndarray, atol: float
) -> int | None:
    """First step whose mean/value ratio leaves [0, 1 + alpha], or None."""
    prev = path.xs[:-1]
    mask = np.abs(prev) > path.zero_tol
    if not mask.any():
        return None
    ratios = path.ms[mask] / prev[mask]
    upper = 1.0 + alphas[: path.horizon][mask]
    bad = (ratios < -atol) | (ratios > upper + atol)
    if not bad.any():
        return None
    steps = np.nonzero(mask)[0] + 1
    return int(steps[np.nonzero(bad)[0][0]])


def check_segment_peak_bound(
    path: ProcessPath, alphas: Sequence[float], atol: float = 1e-12
) -> ConditionVerdict:
    """Check each crossing segment's peak against the accumulated-residual bound.

    For every observed crossing time T_j the peak |x| over the segment starting
    there must not exceed max_growth_factor * (sum of |residuals| over the
    segment + |mean at T_j when restarting from a zero state|).  Requires the
    nonexpansive ratio condition with the same ``alphas``; a ratio violation
    makes the bound inapplicable and is reported as the failure index.  The
    guarantee assumes exact zero classification (``zero_tol == 0``).
    """
    alphas = np.asarray(alphas, dtype=float)
    if len(alphas) < path.horizon:
        raise ValueError("alphas must cover the path horizon")
    bad = _nonexpansive_violation(path, alphas, atol)
    if bad is not None:
        return failing(
            bad,
            math.nan,
            f"not applicable: nonexpansive ratio condition fails at step {bad}",
        )
    lam = max_growth_factor(alphas[: path.horizon])
    report = crossing_report(path)
    if report.n_t == 0:
        return vacuous("no crossings observed; bound is vacuous")
    zero_prev = zero_state_mask(path)
    worst = math.inf
    worst_at = None
    for j, start in enumerate(report.crossing_times):
        end = (
            report.crossing_times[j + 1]
            if j + 1 < report.n_t
            else path.horizon + 1
        )
        m_abs = float(np.abs(path.eps[start - 1 : end - 1]).sum())
        u_term = abs(float(path.ms[start - 1])) if zero_prev[start - 1] else 0.0
        slack = lam * (m_abs + u_term) - report.w[j]
        if slack < worst:
            worst = slack
            worst_at = start
    if worst < -atol:
        return failing(worst_at, worst, "segment peak exceeds the residual bound")
    return passing(worst, f"{report.n_t} segments checked")


def kronecker_path(
    increments: Sequence[float], weights: Sequence[float], zero_tol: float = 0.0
) -> ProcessPath:
    """Path of weighted partial sums x_n = (y_1 + ... + y_n) / a_n.

    The predictable mean of step n is the previous partial sum divided by the
    new weight, so the mean/value ratio equals a_{n-1}/a_n wherever the
    previous value is nonzero.  Weights must be positive and nondecreasing.
    """
    ys = np.asarray(increments, dtype=float)
    ws = np.asarray(weights, dtype=float)
    if ys.shape != ws.shape or ys.ndim != 1:
        raise ValueError("increments and weights must be 1-d sequences of equal length")
    if np.any(ws <= 0):
        raise ValueError(
            f"weights must be positive (violation at index {int(np.nonzero(ws <= 0)[0][0])})"
        )
    if np.any(np.diff(ws) < 0):
        raise ValueError(
            f"weights must be nondecreasing (violation at index "
            f"{int(np.nonzero(np.diff(ws) < 0)[0][0] + 1)})"
        )
    if len(ws) and ws[-1] / ws[0] < 10:
        warnings.warn(
            "weights grow slowly (last/first < 10); the averaged path may not settle",
            stacklevel=2,
        )
    sums = np.cumsum(ys)
    xs = np.concatenate(([0.0], sums / ws))
    prev_sums = np.concatenate(([0.0], sums[:-1]))
    ms = prev_sums / ws
    return ProcessPath(xs, ms, zero_tol)
