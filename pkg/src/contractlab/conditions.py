"""Checkers for the nonexpansive / contractive drift conditions.

All checks run against model-supplied predictable means, never against means
estimated from a realization, so every verdict is an exact pathwise statement
(up to a configurable floating-point slack).  Limit statements are rendered as
tail-window criteria with explicit tolerances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .process import ProcessPath, VectorProcessPath
from .verdict import ConditionVerdict, failing, passing, vacuous

__all__ = [
    "ConditionVerdict",
    "NonexpansiveProfile",
    "ContractiveProfile",
    "NormConditionReport",
    "check_nonexpansive",
    "check_contractive",
    "check_zero_state_decay",
    "check_variance_summability",
    "check_norm_conditions",
]

DEFAULT_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class NonexpansiveProfile:
    """Per-step allowances alpha_n with a finite-sum budget."""

    alphas: np.ndarray
    alpha_sum_cap: float = 1e6

    def __post_init__(self) -> None:
        alphas = np.asarray(self.alphas, dtype=float)
        if np.any(alphas < 0):
            raise ValueError("alphas must be nonnegative")
        if not math.isfinite(self.alpha_sum_cap):
            raise ValueError("alpha_sum_cap must be finite")
        if alphas.sum() > self.alpha_sum_cap:
            raise ValueError(
                f"sum of alphas {alphas.sum():g} exceeds cap {self.alpha_sum_cap:g}"
            )
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def constant(cls, value: float, horizon: int, alpha_sum_cap: float = 1e6):
        return cls(np.full(horizon, float(value)), alpha_sum_cap)

    @classmethod
    def zero(cls, horizon: int):
        return cls(np.zeros(horizon))


@dataclass(frozen=True, eq=False)
class ContractiveProfile:
    """Per-step contraction bounds k_n in [0, 1] with a divergence target.

    The divergence of sum(1 - k_n) cannot be observed at a finite horizon, so
    the profile instead demands that the partial sum reach ``divergence_target``
    by the end of the checked path.
    """

    ks: np.ndarray
    divergence_target: float = 5.0

    def __post_init__(self) -> None:
        ks = np.asarray(self.ks, dtype=float)
        if np.any((ks < 0) | (ks > 1)):
            raise ValueError("contraction bounds must lie in [0, 1]")
        object.__setattr__(self, "ks", ks)

    @classmethod
    def constant(cls, value: float, horizon: int, divergence_target: float = 5.0):
        return cls(np.full(horizon, float(value)), divergence_target)


def _ratio_check(
    path: ProcessPath,
    upper: np.ndarray,
    lower_bounded: bool,
    atol: float,
) -> ConditionVerdict:
    prev = path.xs[:-1]
    mask = np.abs(prev) > path.zero_tol
    if not mask.any():
        return vacuous("vacuous: no steps leave the zero class")
    ratios = path.ms[mask] / prev[mask]
    up = upper[mask]
    margins = up - ratios
    if lower_bounded:
        margins = np.minimum(margins, ratios)
    worst_i = int(np.argmin(margins))
    worst = float(margins[worst_i])
    steps = np.nonzero(mask)[0] + 1
    if worst < -atol:
        bad = np.nonzero(margins < -atol)[0][0]
        return failing(
            int(steps[bad]),
            worst,
            f"ratio {float(ratios[bad]):.6g} outside bounds at step {int(steps[bad])}",
        )
    return passing(worst, f"{int(mask.sum())} nonzero-class steps checked")


def check_nonexpansive(
    path: ProcessPath, profile: NonexpansiveProfile, atol: float = DEFAULT_ATOL
) -> ConditionVerdict:
    """Mean/value ratio lies in [0, 1 + alpha_n] at every nonzero-class step."""
    if len(profile.alphas) < path.horizon:
        raise ValueError("profile does not cover the path horizon")
    return _ratio_check(path, 1.0 + profile.alphas[: path.horizon], True, atol)


def check_contractive(
    path: ProcessPath, profile: ContractiveProfile, atol: float = DEFAULT_ATOL
) -> ConditionVerdict:
    """Mean/value ratio lies in [0, k_n] and sum(1 - k_n) reaches the target."""
    if len(profile.ks) < path.horizon:
        raise ValueError("profile does not cover the path horizon")
    ks = profile.ks[: path.horizon]
    ratio_verdict = _ratio_check(path, ks, True, atol)
    if not ratio_verdict.holds:
        return ratio_verdict
    total = float(np.sum(1.0 - ks))
    if total < profile.divergence_target:
        return failing(
            path.horizon,
            total - profile.divergence_target,
            f"contraction budget {total:.6g} short of target "
            f"{profile.divergence_target:.6g} at the horizon",
        )
    return ConditionVerdict(
        True,
        None,
        ratio_verdict.worst_margin,
        ratio_verdict.detail + f"; contraction budget {total:.6g}",
    )


def check_zero_state_decay(
    path: ProcessPath,
    tail_window: Optional[int] = None,
    tol: float = 1e-6,
) -> ConditionVerdict:
    """Restart means must be small late: max |mean| over tail zero-state steps <= tol.

    Only steps whose predecessor is zero-class contribute.  Vacuously true
    when the tail contains no such steps.
    """
    horizon = path.horizon
    if tail_window is None:
        tail_window = max(1, horizon // 2)
    if tail_window > horizon:
        raise ValueError(f"tail window {tail_window} exceeds horizon {horizon}")
    start = horizon - tail_window
    mask = np.abs(path.xs[start:-1]) <= path.zero_tol
    if not mask.any():
        return vacuous("vacuous: no zero-class predecessors in the tail window")
    vals = np.abs(path.ms[start:][mask])
    worst = float(tol - vals.max())
    if worst < 0:
        steps = start + np.nonzero(mask)[0] + 1
        bad = int(steps[np.argmax(vals)])
        return failing(bad, worst, f"restart mean {vals.max():.6g} exceeds tol {tol:g}")
    return passing(worst, f"{int(mask.sum())} zero-state steps in tail window")


def check_variance_summability(
    cond_vars: Sequence[float], tail_tol: float = 1e-6
) -> ConditionVerdict:
    """Partial sums of conditional variances must have numerically settled.

    The second half of the sequence must sum to at most ``tail_tol``; the
    variances are model-declared, not estimated.
    """
    v = np.asarray(cond_vars, dtype=float)
    bad = np.nonzero(v < 0)[0]
    if len(bad):
        raise ValueError(f"negative conditional variance at index {int(bad[0])}")
    half = len(v) // 2
    tail = float(v[half:].sum())
    margin = tail_tol - tail
    if margin < 0:
        return failing(
            half + 1, margin, f"tail variance sum {tail:.6g} exceeds tol {tail_tol:g}"
        )
    return passing(margin, f"tail variance sum {tail:.6g}")


@dataclass(frozen=True)
class NormConditionReport:
    """The four norm-based verdicts for a vector path.

    ``ratio`` bounds the mean-norm over value-norm ratio per the profile,
    ``series`` checks the profile's summability or divergence budget,
    ``zero_state`` checks decay of mean norms after zero-norm states, and
    ``variance_sum`` checks summability of the componentwise variance bounds.
    """

    ratio: ConditionVerdict
    series: ConditionVerdict
    zero_state: ConditionVerdict
    variance_sum: ConditionVerdict

    @property
    def holds(self) -> bool:
        return (
            self.ratio.holds
            and self.series.holds
            and self.zero_state.holds
            and self.variance_sum.holds
        )


def check_norm_conditions(
    path: VectorProcessPath,
    profile: NonexpansiveProfile | ContractiveProfile,
    cond_var_bounds: Sequence[float],
    tail_window: Optional[int] = None,
    tol: float = 1e-6,
    var_tail_tol: float = 1e-6,
    atol: float = DEFAULT_ATOL,
) -> NormConditionReport:
    """Norm-ratio analogues of the scalar drift conditions.

    The ratio clause constrains ||mean|| / ||previous value|| (no sign
    requirement, so it strictly generalizes the scalar check even for p = 1).
    ``cond_var_bounds[n]`` must dominate the worst componentwise conditional
    residual variance at step n + 1.
    """
    horizon = path.horizon
    norms_prev = np.linalg.norm(path.xs[:-1], axis=1)
    mean_norms = np.linalg.norm(path.ms, axis=1)
    mask = norms_prev > path.zero_tol

    if isinstance(profile, ContractiveProfile):
        if len(profile.ks) < horizon:
            raise ValueError("profile does not cover the path horizon")
        upper = profile.ks[:horizon]
        total = float(np.sum(1.0 - upper))
        margin = total - profile.divergence_target
        if margin < 0:
            series = failing(
                horizon, margin, f"contraction budget {total:.6g} short of target"
            )
        else:
            series = passing(margin, f"contraction budget {total:.6g}")
    else:
        if len(profile.alphas) < horizon:
            raise ValueError("profile does not cover the path horizon")
        upper = 1.0 + profile.alphas[:horizon]
        total = float(profile.alphas[:horizon].sum())
        series = passing(
            profile.alpha_sum_cap - total, f"allowance sum {total:.6g} within cap"
        )

    if not mask.any():
        ratio = vacuous("vacuous: no steps leave the zero-norm class")
    else:
        ratios = mean_norms[mask] / norms_prev[mask]
        margins = upper[mask] - ratios
        worst = float(margins.min())
        steps = np.nonzero(mask)[0] + 1
        if worst < -atol:
            bad = np.nonzero(margins < -atol)[0][0]
            ratio = failing(
                int(steps[bad]), worst, f"norm ratio {float(ratios[bad]):.6g} too large"
            )
        else:
            ratio = passing(worst, f"{int(mask.sum())} nonzero-norm steps checked")

    if tail_window is None:
        tail_window = max(1, horizon // 2)
    if tail_window > horizon:
        raise ValueError(f"tail window {tail_window} exceeds horizon {horizon}")
    start = horizon - tail_window
    zmask = norms_prev[start:] <= path.zero_tol
    if not zmask.any():
        zero_state = vacuous("vacuous: no zero-norm predecessors in the tail window")
    else:
        vals = mean_norms[start:][zmask]
        worst = float(tol - vals.max())
        if worst < 0:
            steps = start + np.nonzero(zmask)[0] + 1
            zero_state = failing(
                int(steps[np.argmax(vals)]),
                worst,
                f"restart mean norm {vals.max():.6g} exceeds tol {tol:g}",
            )
        else:
            zero_state = passing(worst, f"{int(zmask.sum())} zero-norm steps in tail")

    variance_sum = check_variance_summability(cond_var_bounds, var_tail_tol)
    return NormConditionReport(ratio, series, zero_state, variance_sum)
