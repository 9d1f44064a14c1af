import json

import pytest

from shadowmd.cli import EXIT_ABORT, EXIT_CONFIG, EXIT_OK, EXIT_TABLE, main
from shadowmd.hamiltonian import default_table_path


class TestValidate:
    def test_good_table(self, capsys):
        assert main(["validate", "--table", str(default_table_path())]) == EXIT_OK
        out = capsys.readouterr().out
        assert "221 grid points" in out
        assert "15 Pauli words" in out

    def test_broken_table(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("R_angstrom,II\n0.7,1.0\n0.5,1.0\n", encoding="utf-8")
        assert main(["validate", "--table", str(bad)]) == EXIT_TABLE
        assert "table error" in capsys.readouterr().err

    def test_missing_table(self, tmp_path, capsys):
        assert main(["validate", "--table", str(tmp_path / "no.csv")]) == EXIT_TABLE


class TestRun:
    def test_unknown_preset_is_config_error(self, capsys):
        assert main(["run", "--preset", "nonsense"]) == EXIT_CONFIG

    def test_missing_subcommand_is_config_error(self, capsys):
        assert main([]) == EXIT_CONFIG

    def test_bad_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("mystery_key = 5\n", encoding="utf-8")
        code = main(
            ["run", "--preset", "curve", "--config", str(cfg), "--out", str(tmp_path)]
        )
        assert code == EXIT_CONFIG
        assert "unknown key" in capsys.readouterr().err

    def test_curve_preset_end_to_end(self, tmp_path, capsys):
        code = main(["run", "--preset", "curve", "--out", str(tmp_path / "o")])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "curve_energies.csv" in out
        summary = json.loads((tmp_path / "o" / "curve_summary.json").read_text())
        assert summary["preset"] == "curve"

    def test_seed_override_changes_outputs(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(
            "total_time = 3.0\nburn_in = 1.0\ntheta_policy = random\n",
            encoding="utf-8",
        )
        for seed, sub in ((3, "a"), (4, "b")):
            code = main(
                [
                    "run",
                    "--preset",
                    "equilibrium",
                    "--config",
                    str(cfg),
                    "--seed",
                    str(seed),
                    "--out",
                    str(tmp_path / sub),
                ]
            )
            assert code == EXIT_OK
        a = (tmp_path / "a" / "equilibrium_shadows_trajectory.csv").read_bytes()
        b = (tmp_path / "b" / "equilibrium_shadows_trajectory.csv").read_bytes()
        assert a != b

    def test_trajectory_abort_exit_code(self, tmp_path, capsys):
        # start right at the table edge so the force stencil leaves the grid
        cfg = tmp_path / "c.cfg"
        cfg.write_text(
            "initial_r = 2.4995\ntheta_policy = random\ntotal_time = 2.0\n",
            encoding="utf-8",
        )
        code = main(
            [
                "run",
                "--preset",
                "equilibrium",
                "--config",
                str(cfg),
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == EXIT_ABORT
        summary = json.loads(
            (tmp_path / "o" / "equilibrium_summary.json").read_text()
        )
        assert any(summary["aborted"].values())

    def test_bad_thread_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("QCPMD_THREADS", "many")
        cfg = tmp_path / "c.cfg"
        cfg.write_text("total_time = 1.0\ntrials = 2\n", encoding="utf-8")
        code = main(
            [
                "run",
                "--preset",
                "quench",
                "--config",
                str(cfg),
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == EXIT_CONFIG
