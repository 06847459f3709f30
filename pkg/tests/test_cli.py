import csv
import json
from pathlib import Path

import pytest

from contractlab.cli import main

SA_TEMPLATE = """
kind: sa
problem: {{family: linear, slope: 1.0}}
schedule: {{family: inverse_n, c: 1.0}}
noise: {{family: gaussian, sd: 0.1}}
x0: 2.0
envelope: {{m: 1.0, M: 1.0, grid_min_abs: 1.0e-3, grid_max_abs: 10.0, grid_per_decade: 100}}
ensemble: {{seeds: 4, root_seed: 11, horizon: 500, tol_zero: 0.1}}
assertions:
  min_fraction_converged_to_zero: 0.75
  envelope_valid: true
  sandwich_zero_violations: true
output: {{dir: {out}, traces: {traces}}}
"""


def write_config(tmp_path: Path, text: str, name: str = "config.yaml") -> Path:
    path = tmp_path / name
    path.write_text(text)
    return path


class TestCheckCommand:
    def test_valid_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SA_TEMPLATE.format(out=tmp_path / "out", traces="false"))
        assert main(["check", str(cfg)]) == 0
        assert "config OK: kind=sa" in capsys.readouterr().out

    def test_module_invocation(self, tmp_path):
        import subprocess
        import sys

        cfg = write_config(tmp_path, SA_TEMPLATE.format(out=tmp_path / "out", traces="false"))
        proc = subprocess.run(
            [sys.executable, "-m", "contractlab", "check", str(cfg)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "config OK" in proc.stdout

    def test_invalid_config_exit_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "kind: sa\nensemble: {seeds: 0}\n")
        assert main(["check", str(cfg)]) == 2
        err = capsys.readouterr().err
        assert "invalid config" in err
        assert "ensemble.seeds" in err

    def test_missing_file_exit_2(self, capsys):
        assert main(["check", "/no/such/config.yaml"]) == 2


class TestRunCommand:
    def test_run_writes_artifacts_and_passes(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, SA_TEMPLATE.format(out=out, traces="false"))
        assert main(["run", str(cfg)]) == 0
        assert (out / "summary.json").exists()
        assert (out / "summary.txt").exists()
        assert (out / "quantiles.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["exit_code"] == 0
        assert summary["kind"] == "sa"
        assert summary["ensemble"]["fraction_by_class"]["converged_to_zero"] >= 0.75

    def test_trace_schema_is_pinned(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, SA_TEMPLATE.format(out=out, traces="true"))
        assert main(["run", str(cfg)]) == 0
        with open(out / "traces.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["seed", "n", "x", "m", "eps", "u_flag"]
        assert rows[1][:3] == ["0", "0", "2.0"]
        assert rows[1][3:] == ["", "", ""]
        assert len(rows) == 1 + 4 * 501

    def test_quantiles_schema_is_pinned(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, SA_TEMPLATE.format(out=out, traces="false"))
        main(["run", str(cfg)])
        header = (out / "quantiles.csv").read_text().splitlines()[0]
        assert header == "n,q05,q25,q50,q75,q95"

    def test_misdeclared_envelope_fails_with_exit_1(self, tmp_path, capsys):
        out = tmp_path / "out"
        text = SA_TEMPLATE.format(out=out, traces="false").replace(
            "envelope: {m: 1.0, M: 1.0,", "envelope: {m: 2.0, M: 2.0,"
        )
        cfg = write_config(tmp_path, text)
        assert main(["run", str(cfg)]) == 1
        captured = capsys.readouterr()
        assert "FAIL envelope_valid" in captured.out
        assert "failed assertions" in captured.err

    def test_unwritable_output_dir_exit_2(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path, SA_TEMPLATE.format(out="/proc/contractlab_forbidden", traces="false")
        )
        assert main(["run", str(cfg)]) == 2
        assert "output directory" in capsys.readouterr().err

    def test_overrides(self, tmp_path):
        out = tmp_path / "ignored"
        real_out = tmp_path / "real"
        cfg = write_config(tmp_path, SA_TEMPLATE.format(out=out, traces="false"))
        assert (
            main(
                [
                    "run",
                    str(cfg),
                    "--seeds",
                    "2",
                    "--horizon",
                    "200",
                    "--out",
                    str(real_out),
                ]
            )
            == 0
        )
        summary = json.loads((real_out / "summary.json").read_text())
        assert summary["config"]["ensemble"]["seeds"] == 2
        assert summary["config"]["ensemble"]["horizon"] == 200
        assert not out.exists()

    def test_parallelism_env_cap(self, tmp_path, monkeypatch):
        out = tmp_path / "out"
        text = SA_TEMPLATE.format(out=out, traces="false").replace(
            "ensemble: {seeds: 4, root_seed: 11, horizon: 500, tol_zero: 0.1}",
            "ensemble: {seeds: 4, root_seed: 11, horizon: 500, tol_zero: 0.1, parallelism: 8}",
        )
        cfg = write_config(tmp_path, text)
        monkeypatch.setenv("CONTRACTLAB_PARALLELISM", "1")
        assert main(["run", str(cfg)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["ensemble"]["parallelism"] == 1

    def test_byte_identical_reruns(self, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        cfg_a = write_config(tmp_path, SA_TEMPLATE.format(out=out_a, traces="true"), "a.yaml")
        cfg_b = write_config(tmp_path, SA_TEMPLATE.format(out=out_b, traces="true"), "b.yaml")
        assert main(["run", str(cfg_a)]) == 0
        assert main(["run", str(cfg_b)]) == 0
        for name in ("quantiles.csv", "traces.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
        # summaries differ only in the echoed output dir
        sa = json.loads((out_a / "summary.json").read_text())
        sb = json.loads((out_b / "summary.json").read_text())
        sa["config"]["output_dir"] = sb["config"]["output_dir"] = ""
        assert sa == sb


KRONECKER = """
kind: kronecker
increments: {{family: rademacher}}
weights: {{family: linear}}
ensemble: {{seeds: 5, root_seed: 3, horizon: 2000, tol_zero: 0.05}}
assertions:
  min_fraction_converged_to_zero: 0.8
  alternating_bound: true
output: {{dir: {out}}}
"""

SA_ND = """
kind: sa_nd
problem: {{family: matrix, entries: [[1.0, 1.0], [-1.0, 1.0]]}}
schedule: {{family: inverse_n, c: 1.0}}
noise: {{family: gaussian, sd: 0.1}}
x0: [2.0, 1.0]
envelope: {{m: 1.0, M: 1.4142135623730951, directions: 16, radii: [0.1, 1.0, 10.0]}}
ensemble: {{seeds: 4, root_seed: 5, horizon: 2000, tol_zero: 0.1}}
assertions:
  min_fraction_final_below: {{value: 0.1, fraction: 0.75}}
  envelope_valid: true
  contraction_zero_violations: true
output: {{dir: {out}}}
"""

SA_NONUNIFORM = """
kind: sa_nonuniform
problem: {{family: sqrt_sign}}
schedule: {{family: inverse_n, c: 1.0}}
noise: {{family: gaussian, sd: 0.1}}
x0: 2.0
truncation: {{delta: 0.25, tau: 0.1, kappa: delta}}
regularity: {{c: 1.0, d: 1.0, pairs: [[0.25, 4.0]], grid_per_decade: 500}}
ensemble: {{seeds: 4, root_seed: 9, horizon: 2000, tol_zero: 0.2}}
assertions:
  min_fraction_converged_to_zero: 0.75
  truncated_nonexpansive_all_seeds: true
  truncated_mean_bound_all_seeds: true
  regularity_holds: true
output: {{dir: {out}}}
"""

LS = """
kind: ls
design: {{family: geometric_one}}
beta: [1.0, -0.5]
sigma: 0.01
gweight: {{family: identity}}
partition: {{consistency_tol: 0.05, oscillation_tol: 0.01, dispersion_ratio: 3.0}}
checkpoints: 4
ensemble: {{seeds: 12, root_seed: 21, horizon: 1000}}
assertions:
  max_checkpoint_gap: 1.0e-8
  partition_matches: {{q: 1, classes: [finite_random_limit, consistent]}}
output: {{dir: {out}}}
"""


class TestOtherKindsEndToEnd:
    def test_kronecker(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, KRONECKER.format(out=out))
        assert main(["run", str(cfg)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["report"]["alternating_bound_sup"] <= 1.0

    def test_sa_nd(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, SA_ND.format(out=out))
        assert main(["run", str(cfg)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["report"]["envelope"]["declared_valid"] is True

    def test_sa_nd_trace_header(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, SA_ND.format(out=out))
        assert main(["run", str(cfg), "--traces", "--horizon", "50"]) == 0
        header = (out / "traces.csv").read_text().splitlines()[0]
        assert header == "seed,n,x_1,x_2,m_1,m_2,eps_1,eps_2,u_flag"

    def test_sa_nonuniform(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, SA_NONUNIFORM.format(out=out))
        assert main(["run", str(cfg)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["report"]["regularity"]["holds"] is True
        assert summary["report"]["truncation"]["kappa"] == 0.25

    def test_ls(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, LS.format(out=out))
        assert main(["run", str(cfg)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["report"]["partition"]["q"] == 1
        assert summary["report"]["max_checkpoint_gap"] <= 1e-8

    def test_custom_path_check_round_trip(self, tmp_path):
        sa_out = tmp_path / "sa_out"
        sa_cfg = write_config(tmp_path, SA_TEMPLATE.format(out=sa_out, traces="true"), "sa.yaml")
        assert main(["run", str(sa_cfg)]) == 0
        custom = f"""
kind: custom_path_check
input: {{path: {sa_out / 'traces.csv'}}}
checks: {{nonexpansive_alpha: 0.0, zero_state_tol: 1.0e-9, segment_bound: true}}
ensemble: {{seeds: 1, root_seed: 1, horizon: 10, tol_zero: 0.1}}
assertions: {{all_checks_hold: true}}
output: {{dir: {tmp_path / 'custom_out'}}}
"""
        custom_cfg = write_config(tmp_path, custom, "custom.yaml")
        assert main(["run", str(custom_cfg)]) == 0
        summary = json.loads((tmp_path / "custom_out" / "summary.json").read_text())
        assert summary["report"]["paths_checked"] == 4
        assert summary["report"]["all_hold"] is True
