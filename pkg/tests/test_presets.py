import json

import numpy as np
import pytest

from shadowmd.errors import ConfigurationError
from shadowmd.presets import (
    HIST_EDGES,
    PRESETS,
    RunConfig,
    build_run_config,
    parse_config_text,
    preset_curve,
    preset_equilibrium,
    preset_quench,
    preset_variance_bench,
    preset_vqe,
    run_preset,
)


class TestRunConfig:
    def test_preset_defaults(self):
        eq = build_run_config("equilibrium")
        assert eq.total_time == 4000.0
        assert eq.initial_r == 0.735
        assert eq.theta_policy == "vqe"
        qu = build_run_config("quench")
        assert qu.total_time == 2000.0
        assert qu.initial_r == 1.0
        assert qu.theta_policy == "random"
        assert qu.trials == 5

    def test_paper_protocol_defaults(self):
        run = build_run_config("equilibrium")
        assert run.dt == 0.1
        assert run.mu == 0.1
        assert run.temperature == 70.0
        assert run.n_snapshots == 51
        assert run.k_groups == 3
        assert run.n_shots == 51
        assert run.burn_in == 250.0
        assert run.ansatz_depth == 4
        # per-step damping factors 1 - gamma*dt = 1 - zeta*dt = 0.2
        assert run.gamma * run.dt == pytest.approx(0.8)
        assert run.zeta * run.dt == pytest.approx(0.8)

    def test_unknown_preset_rejected(self):
        with pytest.raises(ConfigurationError):
            build_run_config("warp-drive")
        with pytest.raises(ConfigurationError):
            RunConfig(preset="warp-drive")

    def test_invariants(self):
        with pytest.raises(ConfigurationError):
            RunConfig(trials=0)
        with pytest.raises(ConfigurationError):
            RunConfig(theta_policy="psychic")
        with pytest.raises(ConfigurationError):
            RunConfig(estimator="guess")


class TestConfigFile:
    def test_parse_round_trip(self):
        text = (
            "# comment line\n"
            "seed = 42\n"
            "total_time = 12.5   # trailing comment\n"
            "estimator = direct\n"
            "\n"
        )
        values = parse_config_text(text)
        assert values == {"seed": 42, "total_time": 12.5, "estimator": "direct"}

    def test_unknown_key_reports_line(self):
        with pytest.raises(ConfigurationError, match=":2: unknown key"):
            parse_config_text("seed = 1\nwibble = 3\n")

    def test_bad_value_reports_line(self):
        with pytest.raises(ConfigurationError, match=":1: cannot parse"):
            parse_config_text("seed = lots\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigurationError, match="key = value"):
            parse_config_text("seed 1\n")

    def test_file_overrides_and_cli_wins(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("seed = 5\ntotal_time = 7.5\n", encoding="utf-8")
        run = build_run_config("equilibrium", str(cfg), seed=9, out="somewhere")
        assert run.seed == 9  # CLI beats file
        assert run.total_time == 7.5
        assert run.out == "somewhere"


class TestCurvePreset:
    def test_outputs_and_argmin(self, tmp_path):
        run = build_run_config("curve", out=str(tmp_path))
        outcome = preset_curve(run)
        csv = (tmp_path / "curve_energies.csv").read_text().splitlines()
        assert len(csv) - 1 == 221  # one row per grid point
        summary = json.loads((tmp_path / "curve_summary.json").read_text())
        assert abs(summary["argmin_r"] - 0.735) < 0.01
        assert summary["preset"] == "curve"
        assert not outcome.aborted

    def test_energy_tail_monotone_in_csv(self, tmp_path):
        run = build_run_config("curve", out=str(tmp_path))
        preset_curve(run)
        rows = [
            line.split(",")
            for line in (tmp_path / "curve_energies.csv").read_text().splitlines()[1:]
        ]
        rs = np.array([float(a) for a, _ in rows])
        es = np.array([float(b) for _, b in rows])
        summary = json.loads((tmp_path / "curve_summary.json").read_text())
        tail = rs > 1.5 * summary["argmin_r"]
        assert np.all(np.diff(es[tail]) > 0)


class TestVqePreset:
    def test_summary_fields(self, tmp_path):
        run = build_run_config("vqe", out=str(tmp_path))
        outcome = preset_vqe(run)
        summary = json.loads((tmp_path / "vqe_summary.json").read_text())
        assert summary["energy_gap_ha"] < 1e-4
        assert len(summary["theta"]) == 20
        assert summary["seed"] == run.seed


class TestVarianceBenchPreset:
    def test_reduced_run_shape(self, tmp_path):
        run = build_run_config("variance-bench", out=str(tmp_path))
        run = RunConfig(
            **{**run.__dict__, "bench_repetitions": 60, "bench_param_sets": 2}
        )
        outcome = preset_variance_bench(run)
        summary = json.loads(
            (tmp_path / "variance_bench_summary.json").read_text()
        )
        assert len(summary["trials"]) == 2
        assert summary["repetitions"] == 60
        assert summary["averaged_shadow_variance"] > summary["averaged_direct_variance"]
        lines = (tmp_path / "variance_bench_trials.csv").read_text().splitlines()
        assert lines[0].startswith("trial,exact_z")
        assert len(lines) == 3


def short_run(preset, tmp_path, **overrides):
    run = build_run_config(preset, out=str(tmp_path))
    merged = {**run.__dict__, **overrides}
    return RunConfig(**merged)


class TestEquilibriumPresetShort:
    def test_files_and_summary(self, tmp_path):
        run = short_run(
            "equilibrium", tmp_path, total_time=5.0, burn_in=1.0, theta_policy="random"
        )
        outcome = preset_equilibrium(run)
        for name in (
            "equilibrium_shadows_trajectory.csv",
            "equilibrium_direct_trajectory.csv",
            "equilibrium_histogram.svg",
            "equilibrium_summary.json",
        ):
            assert (tmp_path / name).exists(), name
        summary = json.loads((tmp_path / "equilibrium_summary.json").read_text())
        for key in ("preset", "seed", "total_preparations", "post_burn_in", "aborted"):
            assert key in summary
        assert set(summary["modes"]) == {"shadows", "direct"}
        csv = (tmp_path / "equilibrium_shadows_trajectory.csv").read_text().splitlines()
        assert csv[0] == (
            "step,time_fs,R_angstrom,v_angstrom_per_fs,"
            "force_ha_per_angstrom,energy_ha,preparations"
        )
        assert len(csv) - 1 == 51  # 50 steps + t=0


class TestQuenchPresetShort:
    def test_files_and_summary(self, tmp_path):
        run = short_run("quench", tmp_path, total_time=3.0, burn_in=1.0, trials=3)
        outcome = preset_quench(run)
        for t in range(3):
            assert (tmp_path / f"quench_trial{t}_trajectory.csv").exists()
        assert (tmp_path / "quench_mean_trajectory.csv").exists()
        assert (tmp_path / "quench_trajectories.svg").exists()
        summary = json.loads((tmp_path / "quench_summary.json").read_text())
        assert len(summary["trials"]) == 3
        assert summary["aborted"] == [False, False, False]
        mean_lines = (tmp_path / "quench_mean_trajectory.csv").read_text().splitlines()
        assert mean_lines[0] == "step,time_fs,mean_R_angstrom,trials_alive"
        assert len(mean_lines) - 1 == 31

    def test_thread_env_does_not_change_outputs(self, tmp_path, monkeypatch):
        run_a = short_run("quench", tmp_path / "seq", total_time=2.0, trials=3)
        monkeypatch.delenv("QCPMD_THREADS", raising=False)
        preset_quench(run_a)
        run_b = short_run("quench", tmp_path / "par", total_time=2.0, trials=3)
        monkeypatch.setenv("QCPMD_THREADS", "3")
        preset_quench(run_b)
        for name in (
            "quench_trial0_trajectory.csv",
            "quench_trial1_trajectory.csv",
            "quench_trial2_trajectory.csv",
            "quench_mean_trajectory.csv",
            "quench_summary.json",
        ):
            a = (tmp_path / "seq" / name).read_bytes()
            b = (tmp_path / "par" / name).read_bytes()
            assert a == b, name


class TestDeterministicOutputs:
    @pytest.mark.parametrize("preset", ["curve", "vqe"])
    def test_reruns_bit_identical(self, tmp_path, preset):
        run_a = build_run_config(preset, out=str(tmp_path / "a"))
        run_b = build_run_config(preset, out=str(tmp_path / "b"))
        files_a = {p.name: p for p in run_preset(run_a).files}
        files_b = {p.name: p for p in run_preset(run_b).files}
        assert files_a.keys() == files_b.keys()
        for name in files_a:
            assert files_a[name].read_bytes() == files_b[name].read_bytes(), name

    def test_equilibrium_short_rerun_bit_identical(self, tmp_path):
        for sub in ("a", "b"):
            run = short_run(
                "equilibrium",
                tmp_path / sub,
                total_time=4.0,
                burn_in=1.0,
                theta_policy="random",
            )
            preset_equilibrium(run)
        for name in (
            "equilibrium_shadows_trajectory.csv",
            "equilibrium_direct_trajectory.csv",
            "equilibrium_histogram.svg",
            "equilibrium_summary.json",
        ):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()
