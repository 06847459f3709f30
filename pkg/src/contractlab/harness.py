"""Seeded Monte Carlo ensembles with per-path convergence classification.

Almost-sure limit statements become "at least a threshold fraction of seeds"
statements over finite horizons; the classification of each path looks only
at a tail window.  Ensembles are reproducible: child generators are split
from the root seed by spawn key, so results are independent of the order and
parallelism of execution.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "ConvergenceClass",
    "ConvergenceVerdict",
    "EnsembleConfig",
    "EnsembleStats",
    "convergence_verdict",
    "child_seed",
    "run_ensemble",
    "limit_dispersion",
]

QUANTILE_KEYS: Tuple[Tuple[str, float], ...] = (
    ("q05", 0.05),
    ("q25", 0.25),
    ("q50", 0.50),
    ("q75", 0.75),
    ("q95", 0.95),
)


class ConvergenceClass(str, Enum):
    CONVERGED_TO_ZERO = "converged_to_zero"
    FINITE_LIMIT = "finite_limit"
    DIVERGED = "diverged"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConvergenceVerdict:
    """Tail-window classification of one path.

    Precedence: zero before finite limit before divergence.  A path counts as
    converged to zero when the tail sup of |value| is within ``tol_zero``; as
    a finite limit when the tail oscillation is within ``tol_cauchy``; as
    diverged when the tail sup exceeds the divergence cap.
    """

    kind: ConvergenceClass
    tail_sup: float
    tail_oscillation: float
    final_value: float
    note: str = ""

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "tail_sup": self.tail_sup,
            "tail_oscillation": self.tail_oscillation,
            "final_value": self.final_value,
            "note": self.note,
        }


def convergence_verdict(
    tail: Sequence[float],
    tol_zero: float,
    tol_cauchy: float,
    divergence_cap: float = 1e6,
) -> ConvergenceVerdict:
    """Classify a path from its tail window of values."""
    tail = np.asarray(tail, dtype=float)
    if tail.size == 0:
        raise ValueError("tail must be nonempty")
    tail_sup = float(np.abs(tail).max())
    oscillation = float(tail.max() - tail.min())
    final = float(tail[-1])
    if tail_sup <= tol_zero:
        kind = ConvergenceClass.CONVERGED_TO_ZERO
    elif oscillation <= tol_cauchy:
        kind = ConvergenceClass.FINITE_LIMIT
    elif tail_sup > divergence_cap:
        kind = ConvergenceClass.DIVERGED
    else:
        kind = ConvergenceClass.INCONCLUSIVE
    return ConvergenceVerdict(kind, tail_sup, oscillation, final)


@dataclass(frozen=True)
class EnsembleConfig:
    """How many seeds, how long, and what counts as converged."""

    seeds: int
    root_seed: int
    horizon: int
    tail_fraction: float = 0.2
    tol_zero: float = 1e-3
    tol_cauchy: float = 1e-3
    parallelism: int = 1
    divergence_cap: float = 1e6

    def __post_init__(self) -> None:
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0 < self.tail_fraction < 1:
            raise ValueError("tail_fraction must lie in (0, 1)")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")


def child_seed(root_seed: int, index: int) -> np.random.SeedSequence:
    """The documented splitting rule: spawn key (index,) under the root entropy."""
    return np.random.SeedSequence(entropy=root_seed, spawn_key=(index,))


@dataclass(eq=False)
class EnsembleStats:
    """Aggregated per-seed verdicts plus distributional summaries.

    ``payloads`` carries whatever extras the factory returned per seed; it is
    experiment-internal and excluded from serialization.
    """

    per_seed: Tuple[ConvergenceVerdict, ...]
    fraction_by_class: Dict[str, float]
    final_abs_quantiles: Dict[str, float]
    dispersion: float
    curves: Optional[Dict[str, list]] = None
    payloads: Tuple[object, ...] = field(default=(), repr=False)

    def fraction(self, kind: ConvergenceClass) -> float:
        return self.fraction_by_class[kind.value]

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "seeds": len(self.per_seed),
            "fraction_by_class": dict(self.fraction_by_class),
            "final_abs_quantiles": dict(self.final_abs_quantiles),
            "dispersion": self.dispersion,
            "per_seed": [v.to_dict() for v in self.per_seed],
        }
        if self.curves is not None:
            out["curves"] = self.curves
        return out


def _reduce_one(values: np.ndarray, config: EnsembleConfig, grid: Optional[np.ndarray]):
    values = np.asarray(values, dtype=float)
    tail_len = max(1, int(round(len(values) * config.tail_fraction)))
    verdict = convergence_verdict(
        values[-tail_len:], config.tol_zero, config.tol_cauchy, config.divergence_cap
    )
    samples = np.abs(values[grid]) if grid is not None else None
    return verdict, float(values[-1]), samples


def run_ensemble(
    factory: Callable,
    config: EnsembleConfig,
    curve_grid: Optional[Sequence[int]] = None,
) -> EnsembleStats:
    """Run ``factory`` once per seed and aggregate tail-window verdicts.

    ``factory`` receives a :class:`numpy.random.SeedSequence` and returns the
    trajectory of values to classify, or a (values, payload) pair.  A factory
    failure on one seed is recorded as inconclusive and never aborts the rest.
    Aggregation is a fold in seed order, so results do not depend on
    ``parallelism``.
    """
    grid = None if curve_grid is None else np.asarray(curve_grid, dtype=int)

    def one(index: int):
        ss = child_seed(config.root_seed, index)
        try:
            out = factory(ss)
        except Exception as exc:  # recorded, not raised: the ensemble must finish
            return None, None, None, f"{type(exc).__name__}: {exc}"
        values, payload = out if isinstance(out, tuple) else (out, None)
        verdict, final, samples = _reduce_one(np.asarray(values, dtype=float), config, grid)
        return verdict, final, samples, payload

    if config.parallelism > 1:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            results = list(pool.map(one, range(config.seeds)))
    else:
        results = [one(i) for i in range(config.seeds)]

    verdicts = []
    finals = []
    payloads = []
    curve_rows = []
    for verdict, final, samples, payload in results:
        if verdict is None:
            verdicts.append(
                ConvergenceVerdict(
                    ConvergenceClass.INCONCLUSIVE, math.nan, math.nan, math.nan, str(payload)
                )
            )
            payloads.append(None)
            continue
        verdicts.append(verdict)
        finals.append(final)
        payloads.append(payload)
        if samples is not None:
            curve_rows.append(samples)

    counts = {kind.value: 0 for kind in ConvergenceClass}
    for v in verdicts:
        counts[v.kind.value] += 1
    fractions = {k: c / len(verdicts) for k, c in counts.items()}

    finals_arr = np.asarray(finals, dtype=float)
    if finals_arr.size:
        abs_finals = np.abs(finals_arr)
        quantiles = {k: float(np.quantile(abs_finals, q)) for k, q in QUANTILE_KEYS}
        dispersion = float(np.std(finals_arr, ddof=1)) if finals_arr.size > 1 else 0.0
    else:
        quantiles = {k: math.nan for k, _ in QUANTILE_KEYS}
        dispersion = math.nan

    curves = None
    if grid is not None and curve_rows:
        mat = np.vstack(curve_rows)
        curves = {"n": [int(i) for i in grid]}
        for key, q in QUANTILE_KEYS:
            col_vals = []
            for j in range(mat.shape[1]):
                col = mat[:, j]
                col = col[np.isfinite(col)]
                col_vals.append(float(np.quantile(col, q)) if col.size else math.nan)
            curves[key] = col_vals

    return EnsembleStats(
        per_seed=tuple(verdicts),
        fraction_by_class=fractions,
        final_abs_quantiles=quantiles,
        dispersion=dispersion,
        curves=curves,
        payloads=tuple(payloads),
    )


def limit_dispersion(finals: Sequence[float]) -> float:
    """Sample standard deviation of per-seed final values (needs >= 2 seeds)."""
    finals = np.asarray(finals, dtype=float)
    if finals.size < 2:
        raise ValueError("need at least two final values")
    return float(np.std(finals, ddof=1))
