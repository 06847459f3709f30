"""Experiment configuration: YAML parsing with aggregated validation errors.

Validation never stops at the first problem: every error is collected with a
dotted path to the offending key, and unknown keys are rejected everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import yaml

from .harness import EnsembleConfig

__all__ = ["ConfigError", "ExperimentConfig", "parse_config_text", "parse_config_file"]

KINDS = ("sa", "sa_nd", "sa_nonuniform", "kronecker", "ls", "custom_path_check")


class ConfigError(Exception):
    """Carries every validation error found in a config document."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass
class ExperimentConfig:
    kind: str
    ensemble: EnsembleConfig
    output_dir: str
    traces: bool
    plots: bool
    curve_points: int
    model: Dict[str, Any]
    assertions: Dict[str, Any]
    warnings: List[str] = dataclass_field(default_factory=list)


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


class _Checker:
    """Accumulates errors while pulling typed values out of nested dicts."""

    def __init__(self):
        self.errors: List[str] = []

    def fail(self, path: str, message: str) -> None:
        self.errors.append(f"{path}: {message}")

    def unknown_keys(self, data: Dict[str, Any], allowed: Sequence[str], path: str) -> None:
        for key in data:
            if key not in allowed:
                self.fail(f"{path}.{key}" if path else key, "unknown key")

    def subdict(
        self, data: Dict[str, Any], key: str, path: str, required: bool = False
    ) -> Optional[Dict[str, Any]]:
        prefix = f"{path}.{key}" if path else key
        if key not in data:
            if required:
                self.fail(prefix, "required group is missing")
            return None
        value = data[key]
        if not isinstance(value, dict):
            self.fail(prefix, "must be a mapping")
            return None
        return value

    def number(
        self,
        data: Dict[str, Any],
        key: str,
        path: str,
        required: bool = False,
        default: Any = None,
        minimum: Optional[float] = None,
        maximum: Optional[float] = None,
        exclusive_minimum: bool = False,
        integer: bool = False,
    ) -> Any:
        prefix = f"{path}.{key}" if path else key
        if key not in data:
            if required:
                self.fail(prefix, "required value is missing")
            return default
        value = data[key]
        if not _is_number(value) or (integer and not isinstance(value, int)):
            self.fail(prefix, f"must be {'an integer' if integer else 'a number'}")
            return default
        if minimum is not None:
            if exclusive_minimum and value <= minimum:
                self.fail(prefix, f"must be > {minimum}")
                return default
            if not exclusive_minimum and value < minimum:
                self.fail(prefix, f"must be >= {minimum}")
                return default
        if maximum is not None and value > maximum:
            self.fail(prefix, f"must be <= {maximum}")
            return default
        return value

    def choice(
        self,
        data: Dict[str, Any],
        key: str,
        path: str,
        choices: Sequence[str],
        required: bool = False,
        default: Any = None,
    ) -> Any:
        prefix = f"{path}.{key}" if path else key
        if key not in data:
            if required:
                self.fail(prefix, f"required value is missing (one of {', '.join(choices)})")
            return default
        value = data[key]
        if value not in choices:
            self.fail(prefix, f"must be one of {', '.join(choices)}")
            return default
        return value

    def boolean(
        self, data: Dict[str, Any], key: str, path: str, default: bool = False
    ) -> bool:
        prefix = f"{path}.{key}" if path else key
        if key not in data:
            return default
        value = data[key]
        if not isinstance(value, bool):
            self.fail(prefix, "must be true or false")
            return default
        return bool(value)

    def string(
        self, data: Dict[str, Any], key: str, path: str, required: bool = False, default: Any = None
    ) -> Any:
        prefix = f"{path}.{key}" if path else key
        if key not in data:
            if required:
                self.fail(prefix, "required value is missing")
            return default
        value = data[key]
        if not isinstance(value, str):
            self.fail(prefix, "must be a string")
            return default
        return value

    def number_list(
        self,
        data: Dict[str, Any],
        key: str,
        path: str,
        required: bool = False,
        min_len: int = 1,
    ) -> Optional[List[float]]:
        prefix = f"{path}.{key}" if path else key
        if key not in data:
            if required:
                self.fail(prefix, "required list is missing")
            return None
        value = data[key]
        if not isinstance(value, list) or len(value) < min_len or not all(
            _is_number(v) for v in value
        ):
            self.fail(prefix, f"must be a list of at least {min_len} numbers")
            return None
        return [float(v) for v in value]


def _validate_ensemble(ck: _Checker, data: Dict[str, Any]) -> Optional[EnsembleConfig]:
    group = ck.subdict(data, "ensemble", "", required=True)
    if group is None:
        return None
    ck.unknown_keys(
        group,
        (
            "seeds",
            "root_seed",
            "horizon",
            "tail_fraction",
            "tol_zero",
            "tol_cauchy",
            "parallelism",
            "divergence_cap",
        ),
        "ensemble",
    )
    seeds = ck.number(group, "seeds", "ensemble", required=True, minimum=1, integer=True)
    root_seed = ck.number(group, "root_seed", "ensemble", required=True, minimum=0, integer=True)
    horizon = ck.number(group, "horizon", "ensemble", required=True, minimum=1, integer=True)
    tail_fraction = ck.number(
        group, "tail_fraction", "ensemble", default=0.2, minimum=0.0, maximum=1.0, exclusive_minimum=True
    )
    if tail_fraction is not None and tail_fraction >= 1.0:
        ck.fail("ensemble.tail_fraction", "must be < 1")
        tail_fraction = 0.2
    tol_zero = ck.number(group, "tol_zero", "ensemble", default=1e-3, minimum=0.0)
    tol_cauchy = ck.number(group, "tol_cauchy", "ensemble", default=1e-3, minimum=0.0)
    parallelism = ck.number(group, "parallelism", "ensemble", default=1, minimum=1, integer=True)
    divergence_cap = ck.number(
        group, "divergence_cap", "ensemble", default=1e6, minimum=0.0, exclusive_minimum=True
    )
    if ck.errors:
        return None
    return EnsembleConfig(
        seeds=seeds,
        root_seed=root_seed,
        horizon=horizon,
        tail_fraction=tail_fraction,
        tol_zero=tol_zero,
        tol_cauchy=tol_cauchy,
        parallelism=parallelism,
        divergence_cap=divergence_cap,
    )


def _validate_schedule(ck: _Checker, data: Dict[str, Any], path: str) -> Optional[Dict[str, Any]]:
    group = ck.subdict(data, "schedule", path, required=True)
    if group is None:
        return None
    prefix = f"{path}.schedule" if path else "schedule"
    ck.unknown_keys(group, ("family", "c", "gamma", "values"), prefix)
    family = ck.choice(
        group, "family", prefix, ("inverse_n", "inverse_n_power", "explicit"), required=True
    )
    out: Dict[str, Any] = {"family": family}
    if family == "explicit":
        values = ck.number_list(group, "values", prefix, required=True)
        if values is not None and any(v < 0 for v in values):
            ck.fail(f"{prefix}.values", "step sizes must be nonnegative")
        out["values"] = values
    elif family is not None:
        out["c"] = ck.number(group, "c", prefix, default=1.0, minimum=0.0, exclusive_minimum=True)
        if family == "inverse_n_power":
            out["gamma"] = ck.number(
                group, "gamma", prefix, required=True, minimum=0.0, exclusive_minimum=True
            )
    return out


def _validate_noise(ck: _Checker, data: Dict[str, Any], path: str) -> Optional[Dict[str, Any]]:
    group = ck.subdict(data, "noise", path, required=True)
    if group is None:
        return None
    prefix = f"{path}.noise" if path else "noise"
    ck.unknown_keys(group, ("family", "sd", "half_width"), prefix)
    family = ck.choice(group, "family", prefix, ("gaussian", "uniform", "none"), required=True)
    out: Dict[str, Any] = {"family": family}
    if family == "gaussian":
        out["sd"] = ck.number(group, "sd", prefix, required=True, minimum=0.0)
    elif family == "uniform":
        out["half_width"] = ck.number(group, "half_width", prefix, required=True, minimum=0.0)
    return out


def _validate_scalar_problem(ck: _Checker, data: Dict[str, Any]) -> Optional[Dict[str, Any]]:
    group = ck.subdict(data, "problem", "", required=True)
    if group is None:
        return None
    ck.unknown_keys(group, ("family", "slope", "amplitude", "root"), "problem")
    family = ck.choice(
        group, "family", "problem", ("linear", "sine_perturbed", "sqrt_sign"), required=True
    )
    out: Dict[str, Any] = {"family": family, "root": ck.number(group, "root", "problem", default=0.0)}
    if family == "linear":
        out["slope"] = ck.number(
            group, "slope", "problem", default=1.0, minimum=0.0, exclusive_minimum=True
        )
    elif family == "sine_perturbed":
        out["slope"] = ck.number(
            group, "slope", "problem", default=1.0, minimum=0.0, exclusive_minimum=True
        )
        out["amplitude"] = ck.number(group, "amplitude", "problem", default=0.3, minimum=0.0)
        if (
            out["amplitude"] is not None
            and out["slope"] is not None
            and out["amplitude"] >= out["slope"]
        ):
            ck.fail("problem.amplitude", "must be smaller than slope to keep the map rootward")
    return out


def _validate_envelope_scalar(ck: _Checker, data: Dict[str, Any]) -> Optional[Dict[str, Any]]:
    group = ck.subdict(data, "envelope", "")
    if group is None:
        return None
    ck.unknown_keys(
        group,
        ("m", "M", "grid_min_abs", "grid_max_abs", "grid_per_decade", "ratio_cap"),
        "envelope",
    )
    m = ck.number(group, "m", "envelope", required=True, minimum=0.0, exclusive_minimum=True)
    M = ck.number(group, "M", "envelope", required=True, minimum=0.0, exclusive_minimum=True)
    if m is not None and M is not None and m > M:
        ck.fail("envelope.m", "must satisfy m <= M")
    return {
        "m": m,
        "M": M,
        "grid_min_abs": ck.number(
            group, "grid_min_abs", "envelope", default=1e-4, minimum=0.0, exclusive_minimum=True
        ),
        "grid_max_abs": ck.number(
            group, "grid_max_abs", "envelope", default=10.0, minimum=0.0, exclusive_minimum=True
        ),
        "grid_per_decade": ck.number(
            group, "grid_per_decade", "envelope", default=10_000, minimum=1, integer=True
        ),
        "ratio_cap": ck.number(
            group, "ratio_cap", "envelope", default=1e6, minimum=0.0, exclusive_minimum=True
        ),
    }


def _validate_assertions(
    ck: _Checker, data: Dict[str, Any], allowed: Dict[str, str]
) -> Dict[str, Any]:
    group = ck.subdict(data, "assertions", "")
    if group is None:
        return {}
    out: Dict[str, Any] = {}
    for key, value in group.items():
        if key not in allowed:
            ck.fail(f"assertions.{key}", "unknown assertion")
            continue
        kind = allowed[key]
        if kind == "fraction" and (not _is_number(value) or not 0 <= value <= 1):
            ck.fail(f"assertions.{key}", "must be a number in [0, 1]")
        elif kind == "number" and (not _is_number(value) or value < 0):
            ck.fail(f"assertions.{key}", "must be a nonnegative number")
        elif kind == "flag" and not isinstance(value, bool):
            ck.fail(f"assertions.{key}", "must be true or false")
        elif kind == "threshold_fraction":
            if (
                not isinstance(value, dict)
                or set(value) != {"value", "fraction"}
                or not _is_number(value.get("value"))
                or not _is_number(value.get("fraction"))
                or not 0 <= value["fraction"] <= 1
            ):
                ck.fail(f"assertions.{key}", "must be a mapping {value: number, fraction: [0,1]}")
        elif kind == "partition":
            if not isinstance(value, dict) or set(value) - {"q", "classes"}:
                ck.fail(f"assertions.{key}", "must be a mapping with keys q and/or classes")
                continue
            if "q" in value and (not isinstance(value["q"], int) or value["q"] < 0):
                ck.fail(f"assertions.{key}.q", "must be a nonnegative integer")
            if "classes" in value and (
                not isinstance(value["classes"], list)
                or not all(
                    c in ("consistent", "finite_random_limit", "inconclusive")
                    for c in value["classes"]
                )
            ):
                ck.fail(f"assertions.{key}.classes", "must list component classes")
        out[key] = value
    return out


SA_ASSERTIONS = {
    "min_fraction_converged_to_zero": "fraction",
    "max_median_final_abs": "number",
    "min_fraction_final_below": "threshold_fraction",
    "envelope_valid": "flag",
    "sandwich_zero_violations": "flag",
}

SA_ND_ASSERTIONS = {
    "min_fraction_converged_to_zero": "fraction",
    "min_fraction_final_below": "threshold_fraction",
    "envelope_valid": "flag",
    "contraction_zero_violations": "flag",
}

SA_NONUNIFORM_ASSERTIONS = {
    "min_fraction_converged_to_zero": "fraction",
    "min_fraction_final_below": "threshold_fraction",
    "truncated_nonexpansive_all_seeds": "flag",
    "truncated_mean_bound_all_seeds": "flag",
    "regularity_holds": "flag",
}

KRONECKER_ASSERTIONS = {
    "min_fraction_converged_to_zero": "fraction",
    "min_fraction_final_below": "threshold_fraction",
    "alternating_bound": "flag",
}

LS_ASSERTIONS = {
    "min_fraction_final_error_below": "threshold_fraction",
    "max_checkpoint_gap": "number",
    "partition_matches": "partition",
    "design_conditions_hold": "flag",
}

CUSTOM_ASSERTIONS = {"all_checks_hold": "flag"}


def _validate_sa(ck: _Checker, data: Dict[str, Any], nonuniform: bool):
    allowed_top = [
        "kind",
        "ensemble",
        "output",
        "assertions",
        "problem",
        "schedule",
        "noise",
        "x0",
        "envelope",
    ]
    if nonuniform:
        allowed_top += ["truncation", "regularity"]
    ck.unknown_keys(data, allowed_top, "")
    model: Dict[str, Any] = {}
    model["problem"] = _validate_scalar_problem(ck, data)
    model["schedule"] = _validate_schedule(ck, data, "")
    model["noise"] = _validate_noise(ck, data, "")
    model["x0"] = ck.number(data, "x0", "", required=True)
    model["envelope"] = _validate_envelope_scalar(ck, data)
    warnings: List[str] = []
    if nonuniform:
        trunc = ck.subdict(data, "truncation", "", required=True)
        if trunc is not None:
            ck.unknown_keys(trunc, ("delta", "tau", "kappa"), "truncation")
            delta = ck.number(
                trunc, "delta", "truncation", required=True, minimum=0.0, exclusive_minimum=True
            )
            tau = ck.number(
                trunc, "tau", "truncation", required=True, minimum=0.0, exclusive_minimum=True
            )
            kappa = trunc.get("kappa", "delta")
            if kappa != "delta" and not _is_number(kappa):
                ck.fail("truncation.kappa", 'must be a number or the string "delta"')
                kappa = "delta"
            if delta is not None and tau is not None and tau >= delta:
                warnings.append("truncation.tau >= truncation.delta: guarantees assume tau < delta")
            model["truncation"] = {"delta": delta, "tau": tau, "kappa": kappa}
        reg = ck.subdict(data, "regularity", "")
        if reg is not None:
            ck.unknown_keys(
                reg,
                ("c", "d", "pairs", "grid_min_abs", "grid_max_abs", "grid_per_decade"),
                "regularity",
            )
            pairs_raw = reg.get("pairs")
            pairs: Optional[List[List[float]]] = None
            if (
                not isinstance(pairs_raw, list)
                or not pairs_raw
                or not all(
                    isinstance(p, list) and len(p) == 2 and all(_is_number(v) for v in p)
                    for p in pairs_raw
                )
            ):
                ck.fail("regularity.pairs", "must be a list of [d1, d2] pairs")
            else:
                pairs = [[float(p[0]), float(p[1])] for p in pairs_raw]
                for p in pairs:
                    if not 0 < p[0] < p[1]:
                        ck.fail("regularity.pairs", f"invalid pair {p}")
            model["regularity"] = {
                "c": ck.number(reg, "c", "regularity", required=True, minimum=0.0),
                "d": ck.number(reg, "d", "regularity", required=True, minimum=0.0),
                "pairs": pairs,
                "grid_min_abs": ck.number(
                    reg, "grid_min_abs", "regularity", default=1e-3, minimum=0.0, exclusive_minimum=True
                ),
                "grid_max_abs": ck.number(
                    reg, "grid_max_abs", "regularity", default=10.0, minimum=0.0, exclusive_minimum=True
                ),
                "grid_per_decade": ck.number(
                    reg, "grid_per_decade", "regularity", default=2000, minimum=1, integer=True
                ),
            }
        else:
            model["regularity"] = None
    schedule = model["schedule"]
    if schedule is not None:
        family = schedule.get("family")
        if family == "inverse_n_power" and schedule.get("gamma", 0) > 1:
            warnings.append(
                "schedule: step sizes are summable (gamma > 1); the divergence "
                "requirement on their sum is unmet and convergence may stall"
            )
    assertions = _validate_assertions(
        ck, data, SA_NONUNIFORM_ASSERTIONS if nonuniform else SA_ASSERTIONS
    )
    for key in ("envelope_valid", "sandwich_zero_violations"):
        if assertions.get(key) and model.get("envelope") is None:
            ck.fail(f"assertions.{key}", "requires the envelope group")
    if nonuniform and assertions.get("regularity_holds") and model.get("regularity") is None:
        ck.fail("assertions.regularity_holds", "requires the regularity group")
    return model, assertions, warnings


def _validate_sa_nd(ck: _Checker, data: Dict[str, Any]):
    ck.unknown_keys(
        data,
        ["kind", "ensemble", "output", "assertions", "problem", "schedule", "noise", "x0", "envelope"],
        "",
    )
    model: Dict[str, Any] = {}
    problem = ck.subdict(data, "problem", "", required=True)
    if problem is not None:
        ck.unknown_keys(problem, ("family", "entries", "scale"), "problem")
        family = ck.choice(problem, "family", "problem", ("matrix", "identity"), required=True)
        if family == "matrix":
            entries = problem.get("entries")
            if (
                not isinstance(entries, list)
                or not entries
                or not all(
                    isinstance(row, list)
                    and len(row) == len(entries)
                    and all(_is_number(v) for v in row)
                    for row in entries
                )
            ):
                ck.fail("problem.entries", "must be a square matrix of numbers")
                entries = None
            model["problem"] = {"family": "matrix", "entries": entries}
        else:
            model["problem"] = {
                "family": "identity",
                "scale": ck.number(
                    problem, "scale", "problem", default=1.0, minimum=0.0, exclusive_minimum=True
                ),
            }
    model["schedule"] = _validate_schedule(ck, data, "")
    model["noise"] = _validate_noise(ck, data, "")
    model["x0"] = ck.number_list(data, "x0", "", required=True)
    env = ck.subdict(data, "envelope", "")
    if env is not None:
        ck.unknown_keys(env, ("m", "M", "directions", "radii", "grid_seed", "ratio_cap"), "envelope")
        model["envelope"] = {
            "m": ck.number(env, "m", "envelope", required=True, minimum=0.0, exclusive_minimum=True),
            "M": ck.number(env, "M", "envelope", required=True, minimum=0.0, exclusive_minimum=True),
            "directions": ck.number(env, "directions", "envelope", default=64, minimum=1, integer=True),
            "radii": ck.number_list(env, "radii", "envelope", required=False)
            or [0.01, 0.1, 1.0, 10.0],
            "grid_seed": ck.number(env, "grid_seed", "envelope", default=0, minimum=0, integer=True),
            "ratio_cap": ck.number(
                env, "ratio_cap", "envelope", default=1e6, minimum=0.0, exclusive_minimum=True
            ),
        }
    else:
        model["envelope"] = None
    if model.get("problem", {}).get("family") == "matrix":
        entries = model["problem"].get("entries")
        x0 = model.get("x0")
        if entries is not None and x0 is not None and len(entries) != len(x0):
            ck.fail("x0", f"length {len(x0)} does not match the {len(entries)}-d problem")
    warnings: List[str] = []
    schedule = model["schedule"]
    if schedule and schedule.get("family") == "inverse_n_power" and schedule.get("gamma", 0) > 1:
        warnings.append(
            "schedule: step sizes are summable (gamma > 1); the divergence "
            "requirement on their sum is unmet and convergence may stall"
        )
    assertions = _validate_assertions(ck, data, SA_ND_ASSERTIONS)
    for key in ("envelope_valid", "contraction_zero_violations"):
        if assertions.get(key) and model.get("envelope") is None:
            ck.fail(f"assertions.{key}", "requires the envelope group")
    return model, assertions, warnings


def _validate_kronecker(ck: _Checker, data: Dict[str, Any]):
    ck.unknown_keys(data, ["kind", "ensemble", "output", "assertions", "increments", "weights"], "")
    model: Dict[str, Any] = {}
    inc = ck.subdict(data, "increments", "", required=True)
    if inc is not None:
        ck.unknown_keys(inc, ("family",), "increments")
        model["increments"] = {
            "family": ck.choice(
                inc, "family", "increments", ("rademacher", "alternating"), required=True
            )
        }
    weights = ck.subdict(data, "weights", "", required=True)
    if weights is not None:
        ck.unknown_keys(weights, ("family", "gamma"), "weights")
        family = ck.choice(weights, "family", "weights", ("linear", "power"), required=True)
        out = {"family": family}
        if family == "power":
            out["gamma"] = ck.number(
                weights, "gamma", "weights", required=True, minimum=0.0, exclusive_minimum=True
            )
        model["weights"] = out
    assertions = _validate_assertions(ck, data, KRONECKER_ASSERTIONS)
    if assertions.get("alternating_bound") and model.get("weights", {}).get("family") != "linear":
        ck.fail("assertions.alternating_bound", "requires linear weights")
    return model, assertions, []


def _validate_ls(ck: _Checker, data: Dict[str, Any]):
    ck.unknown_keys(
        data,
        [
            "kind",
            "ensemble",
            "output",
            "assertions",
            "design",
            "beta",
            "sigma",
            "gweight",
            "energy_threshold",
            "partition",
            "checkpoints",
        ],
        "",
    )
    model: Dict[str, Any] = {}
    design = ck.subdict(data, "design", "", required=True)
    if design is not None:
        ck.unknown_keys(design, ("family", "jitter", "turns", "scale", "gain", "p"), "design")
        family = ck.choice(
            design,
            "family",
            "design",
            ("rotating", "geometric_one", "iid_gaussian", "feedback"),
            required=True,
        )
        out: Dict[str, Any] = {"family": family}
        if family == "rotating":
            out["jitter"] = ck.number(design, "jitter", "design", default=0.1, minimum=0.0)
            out["turns"] = ck.number(design, "turns", "design", default=0.37)
        elif family == "iid_gaussian":
            out["p"] = ck.number(design, "p", "design", default=2, minimum=1, integer=True)
            out["scale"] = ck.number(
                design, "scale", "design", default=1.0, minimum=0.0, exclusive_minimum=True
            )
        elif family == "feedback":
            out["gain"] = ck.number(design, "gain", "design", default=0.9, minimum=0.0)
        model["design"] = out
    model["beta"] = ck.number_list(data, "beta", "", required=True)
    model["sigma"] = ck.number(data, "sigma", "", required=True, minimum=0.0)
    gw = ck.subdict(data, "gweight", "")
    if gw is not None:
        ck.unknown_keys(gw, ("family",), "gweight")
        model["gweight"] = {
            "family": ck.choice(gw, "family", "gweight", ("identity", "sqrt_log"), required=True)
        }
    else:
        model["gweight"] = {"family": "identity"}
    model["energy_threshold"] = ck.number(data, "energy_threshold", "", default=10.0, minimum=0.0)
    part = ck.subdict(data, "partition", "")
    if part is not None:
        ck.unknown_keys(
            part, ("consistency_tol", "oscillation_tol", "dispersion_ratio"), "partition"
        )
        model["partition"] = {
            "consistency_tol": ck.number(
                part, "consistency_tol", "partition", default=0.05, minimum=0.0, exclusive_minimum=True
            ),
            "oscillation_tol": ck.number(
                part, "oscillation_tol", "partition", default=1e-3, minimum=0.0, exclusive_minimum=True
            ),
            "dispersion_ratio": ck.number(
                part, "dispersion_ratio", "partition", default=3.0, minimum=0.0
            ),
        }
    else:
        model["partition"] = {
            "consistency_tol": 0.05,
            "oscillation_tol": 1e-3,
            "dispersion_ratio": 3.0,
        }
    model["checkpoints"] = ck.number(data, "checkpoints", "", default=8, minimum=0, integer=True)
    design_out = model.get("design") or {}
    beta = model.get("beta")
    if beta is not None:
        expected_p = {"rotating": 2, "geometric_one": 2, "feedback": 2}.get(
            design_out.get("family"), design_out.get("p")
        )
        if expected_p is not None and len(beta) != expected_p:
            ck.fail("beta", f"length {len(beta)} does not match the {expected_p}-column design")
    assertions = _validate_assertions(ck, data, LS_ASSERTIONS)
    return model, assertions, []


def _validate_custom(ck: _Checker, data: Dict[str, Any]):
    ck.unknown_keys(data, ["kind", "ensemble", "output", "assertions", "input", "checks"], "")
    model: Dict[str, Any] = {}
    inp = ck.subdict(data, "input", "", required=True)
    if inp is not None:
        ck.unknown_keys(inp, ("path", "zero_tol"), "input")
        model["input"] = {
            "path": ck.string(inp, "path", "input", required=True),
            "zero_tol": ck.number(inp, "zero_tol", "input", default=0.0, minimum=0.0),
        }
    checks = ck.subdict(data, "checks", "", required=True)
    if checks is not None:
        ck.unknown_keys(
            checks,
            (
                "nonexpansive_alpha",
                "contractive_k",
                "divergence_target",
                "zero_state_tol",
                "segment_bound",
                "crossings",
            ),
            "checks",
        )
        model["checks"] = {
            "nonexpansive_alpha": ck.number(checks, "nonexpansive_alpha", "checks", minimum=0.0),
            "contractive_k": ck.number(checks, "contractive_k", "checks", minimum=0.0, maximum=1.0),
            "divergence_target": ck.number(
                checks, "divergence_target", "checks", default=5.0, minimum=0.0
            ),
            "zero_state_tol": ck.number(checks, "zero_state_tol", "checks", minimum=0.0),
            "segment_bound": ck.boolean(checks, "segment_bound", "checks", default=False),
            "crossings": ck.boolean(checks, "crossings", "checks", default=True),
        }
    assertions = _validate_assertions(ck, data, CUSTOM_ASSERTIONS)
    return model, assertions, []


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse and validate a YAML config, raising ConfigError with every problem found."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"config is not valid YAML: {exc}"]) from exc
    if not isinstance(data, dict):
        raise ConfigError(["config must be a mapping at the top level"])

    ck = _Checker()
    kind = ck.choice(data, "kind", "", KINDS, required=True)
    ensemble = _validate_ensemble(ck, data)

    output = ck.subdict(data, "output", "")
    out_dir = "out"
    traces = False
    plots = True
    curve_points = 200
    if output is not None:
        ck.unknown_keys(output, ("dir", "traces", "plots", "curve_points"), "output")
        out_dir = ck.string(output, "dir", "output", default="out")
        traces = ck.boolean(output, "traces", "output", default=False)
        plots = ck.boolean(output, "plots", "output", default=True)
        curve_points = ck.number(
            output, "curve_points", "output", default=200, minimum=2, integer=True
        )

    model: Dict[str, Any] = {}
    assertions: Dict[str, Any] = {}
    warnings: List[str] = []
    if kind == "sa":
        model, assertions, warnings = _validate_sa(ck, data, nonuniform=False)
    elif kind == "sa_nonuniform":
        model, assertions, warnings = _validate_sa(ck, data, nonuniform=True)
    elif kind == "sa_nd":
        model, assertions, warnings = _validate_sa_nd(ck, data)
    elif kind == "kronecker":
        model, assertions, warnings = _validate_kronecker(ck, data)
    elif kind == "ls":
        model, assertions, warnings = _validate_ls(ck, data)
    elif kind == "custom_path_check":
        model, assertions, warnings = _validate_custom(ck, data)

    if ck.errors:
        raise ConfigError(sorted(ck.errors))
    assert ensemble is not None and kind is not None
    return ExperimentConfig(
        kind=kind,
        ensemble=ensemble,
        output_dir=out_dir,
        traces=traces,
        plots=plots,
        curve_points=curve_points,
        model=model,
        assertions=assertions,
        warnings=warnings,
    )


def parse_config_file(path: str | Path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())
