import pytest

from contractlab.config import ConfigError, parse_config_text

MINIMAL_SA = """
kind: sa
problem: {family: linear, slope: 1.0}
schedule: {family: inverse_n, c: 1.0}
noise: {family: gaussian, sd: 0.1}
x0: 5.0
ensemble: {seeds: 100, root_seed: 7, horizon: 100000}
"""


class TestParseConfig:
    def test_minimal_sa_valid(self):
        cfg = parse_config_text(MINIMAL_SA)
        assert cfg.kind == "sa"
        assert cfg.ensemble.seeds == 100
        assert cfg.ensemble.horizon == 100000
        assert cfg.ensemble.tail_fraction == 0.2
        assert cfg.warnings == []
        assert cfg.output_dir == "out"

    def test_summable_schedule_warns(self):
        cfg = parse_config_text(
            MINIMAL_SA.replace(
                "schedule: {family: inverse_n, c: 1.0}",
                "schedule: {family: inverse_n_power, c: 1.0, gamma: 1.5}",
            )
        )
        assert any("summable" in w for w in cfg.warnings)

    def test_negative_horizon_lists_field(self):
        bad = MINIMAL_SA.replace("horizon: 100000", "horizon: -5")
        with pytest.raises(ConfigError) as err:
            parse_config_text(bad)
        assert any("ensemble.horizon" in e for e in err.value.errors)

    def test_all_errors_aggregated(self):
        bad = """
kind: sa
problem: {family: linear, slope: 1.0, bogus: 3}
schedule: {family: inverse_n, c: 1.0}
x0: 5.0
ensemble: {seeds: 0, root_seed: 7, horizon: -5}
"""
        with pytest.raises(ConfigError) as err:
            parse_config_text(bad)
        joined = "\n".join(err.value.errors)
        assert "problem.bogus" in joined
        assert "ensemble.seeds" in joined
        assert "ensemble.horizon" in joined
        assert "noise" in joined  # missing required group
        assert len(err.value.errors) >= 4

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text(MINIMAL_SA + "\nmystery: 1\n")
        assert any("mystery" in e for e in err.value.errors)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text(MINIMAL_SA.replace("kind: sa", "kind: frobnicate"))
        assert any("kind" in e for e in err.value.errors)

    def test_invalid_yaml(self):
        with pytest.raises(ConfigError, match="YAML"):
            parse_config_text("kind: [unclosed")

    def test_non_mapping_root(self):
        with pytest.raises(ConfigError, match="mapping"):
            parse_config_text("- a\n- b\n")

    def test_unknown_assertion_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text(MINIMAL_SA + "\nassertions: {levitate: true}\n")
        assert any("levitate" in e for e in err.value.errors)

    def test_threshold_fraction_shape(self):
        with pytest.raises(ConfigError):
            parse_config_text(
                MINIMAL_SA + "\nassertions: {min_fraction_final_below: {value: 1.0}}\n"
            )
        cfg = parse_config_text(
            MINIMAL_SA
            + "\nassertions: {min_fraction_final_below: {value: 1.0, fraction: 0.9}}\n"
        )
        assert cfg.assertions["min_fraction_final_below"]["fraction"] == 0.9

    def test_envelope_requires_consistent_bounds(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text(MINIMAL_SA + "\nenvelope: {m: 2.0, M: 1.0}\n")
        assert any("m <= M" in e for e in err.value.errors)

    def test_sandwich_assertion_requires_envelope(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text(MINIMAL_SA + "\nassertions: {sandwich_zero_violations: true}\n")
        assert any("envelope" in e for e in err.value.errors)

    def test_sine_amplitude_below_slope(self):
        bad = MINIMAL_SA.replace(
            "problem: {family: linear, slope: 1.0}",
            "problem: {family: sine_perturbed, slope: 1.0, amplitude: 1.5}",
        )
        with pytest.raises(ConfigError) as err:
            parse_config_text(bad)
        assert any("amplitude" in e for e in err.value.errors)


KRONECKER = """
kind: kronecker
increments: {family: alternating}
weights: {family: linear}
ensemble: {seeds: 3, root_seed: 1, horizon: 100}
"""


class TestOtherKinds:
    def test_kronecker_valid(self):
        cfg = parse_config_text(KRONECKER)
        assert cfg.model["weights"]["family"] == "linear"

    def test_alternating_bound_needs_linear_weights(self):
        bad = KRONECKER.replace(
            "weights: {family: linear}", "weights: {family: power, gamma: 0.5}"
        )
        with pytest.raises(ConfigError) as err:
            parse_config_text(bad + "\nassertions: {alternating_bound: true}\n")
        assert any("linear weights" in e for e in err.value.errors)

    def test_sa_nd_dimension_mismatch(self):
        bad = """
kind: sa_nd
problem: {family: matrix, entries: [[1.0, 1.0], [-1.0, 1.0]]}
schedule: {family: inverse_n, c: 1.0}
noise: {family: gaussian, sd: 0.1}
x0: [1.0, 2.0, 3.0]
ensemble: {seeds: 2, root_seed: 1, horizon: 50}
"""
        with pytest.raises(ConfigError) as err:
            parse_config_text(bad)
        assert any("does not match" in e for e in err.value.errors)

    def test_ls_beta_length_checked(self):
        bad = """
kind: ls
design: {family: rotating}
beta: [1.0, 2.0, 3.0]
sigma: 1.0
ensemble: {seeds: 2, root_seed: 1, horizon: 50}
"""
        with pytest.raises(ConfigError) as err:
            parse_config_text(bad)
        assert any("beta" in e for e in err.value.errors)

    def test_custom_valid(self):
        cfg = parse_config_text(
            """
kind: custom_path_check
input: {path: traces.csv}
checks: {nonexpansive_alpha: 0.0, segment_bound: true}
ensemble: {seeds: 1, root_seed: 1, horizon: 10}
"""
        )
        assert cfg.model["checks"]["segment_bound"] is True
        assert cfg.model["checks"]["crossings"] is True
