import json

import pytest

from qcbound.cli import main


def run_cli(args):
    return main(args)


class TestCheckCommand:
    def test_writes_outputs_and_schema(self, tmp_path, capsys):
        out = tmp_path / "r1"
        code = run_cli(
            ["check", "--model", "B", "--qubits", "2", "--samples", "50",
             "--seed", "42", "--out", str(out)]
        )
        assert code == 0
        records = (out / "records.csv").read_text().splitlines()
        assert records[0] == "sample_seed,dq_abs,k0,b,b_prime,delta"
        assert len(records) == 51
        summary = json.loads((out / "summary.json").read_text())
        assert summary["violations_b"] == 0
        assert summary["samples_recorded"] == 50
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["master_seed"] == 42
        assert "records.csv" in manifest["outputs"]
        assert "PCG64" in manifest["rng_algorithm"]

    def test_zero_samples_is_validation_error(self, tmp_path):
        code = run_cli(["check", "--model", "B", "--samples", "0", "--out", str(tmp_path)])
        assert code == 2

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run_cli(
                ["check", "--model", "C", "--ensemble", "GOE", "--samples", "30",
                 "--seed", "7", "--out", str(out)]
            ) == 0
        assert (out1 / "records.csv").read_bytes() == (out2 / "records.csv").read_bytes()
        assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()

    def test_threads_do_not_change_bytes(self, tmp_path):
        out1, out2 = tmp_path / "t1", tmp_path / "t4"
        run_cli(["check", "--model", "B", "--samples", "30", "--seed", "3",
                 "--out", str(out1), "--threads", "1"])
        run_cli(["check", "--model", "B", "--samples", "30", "--seed", "3",
                 "--out", str(out2), "--threads", "4"])
        assert (out1 / "records.csv").read_bytes() == (out2 / "records.csv").read_bytes()

    def test_bound_violation_exits_3(self, tmp_path, monkeypatch):
        # the proved inequality cannot be violated by real runs, so fake one
        import qcbound.cli as cli_mod
        from qcbound.experiments import ScatterResult
        from qcbound.curvature import BoundRecord

        fake = ScatterResult(
            model_tag="B-N2", master_seed=0,
            records=[BoundRecord(seed=1, dq_abs=9.0, k0=-1.0, b=2.0,
                                 b_prime=0.2, delta=7.0)],
            violations_b=1, violations_b_prime=1, n_rejected=0, b=2.0, b_prime=0.2,
        )
        monkeypatch.setattr(cli_mod, "scatter_bound_test", lambda *a, **k: fake)
        code = run_cli(["check", "--model", "B", "--samples", "1",
                        "--out", str(tmp_path / "v")])
        assert code == 3

    def test_a_choice_flag_changes_b_prime(self, tmp_path):
        outs = {}
        for choice, name in (("1/2^N", "pow"), ("1/N", "lin")):
            out = tmp_path / name
            run_cli(["check", "--model", "B", "--qubits", "2", "--samples", "5",
                     "--seed", "1", "--a-choice", choice, "--out", str(out)])
            outs[name] = json.loads((out / "summary.json").read_text())["b_prime"]
        assert outs["lin"] == pytest.approx(outs["pow"] * 2.0**2 / 2.0)


class TestManifestReproduction:
    def test_manifest_config_reruns_byte_identical(self, tmp_path):
        out1 = tmp_path / "orig"
        assert run_cli(["check", "--model", "C", "--ensemble", "GUE", "--samples",
                        "40", "--seed", "13", "--out", str(out1)]) == 0
        manifest = json.loads((out1 / "manifest.json").read_text())
        cfg = manifest["config"]
        out2 = tmp_path / "redo"
        argv = ["check",
                "--model", cfg["model"]["family"],
                "--qubits", str(cfg["model"]["n_qubits"]),
                "--ensemble", cfg["model"]["ensemble"],
                "--samples", str(cfg["samples"]),
                "--a-choice", cfg["a_choice"],
                "--seed", str(manifest["master_seed"]),
                "--out", str(out2)]
        assert run_cli(argv) == 0
        assert (out1 / "records.csv").read_bytes() == (out2 / "records.csv").read_bytes()
        manifest2 = json.loads((out2 / "manifest.json").read_text())
        assert manifest2["outputs"] == manifest["outputs"]

    def test_defect_field_flags_parse(self, tmp_path):
        out = tmp_path / "d"
        code = run_cli(["sweep-defect", "--points", "2", "--d-max", "0.3",
                        "--realizations", "6", "--qubits", "6", "--h", "0.5",
                        "--J", "1.2", "--seed", "4", "--out", str(out)])
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["h"] == 0.5
        assert manifest["config"]["J"] == 1.2


class TestConfigFile:
    def test_config_supplies_values_flags_win(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "B", "samples": 10, "seed": 5}))
        out = tmp_path / "out"
        code = run_cli(["check", "--model", "B", "--samples", "20",
                        "--config", str(cfg), "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        # explicit flag (20) beats the config value (10); config seed is used
        assert summary["samples_requested"] == 20
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["master_seed"] == 5

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"no_such_option": 1}))
        code = run_cli(["check", "--model", "B", "--samples", "5",
                        "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert code == 2

    def test_missing_config_file(self, tmp_path):
        code = run_cli(["check", "--model", "B", "--samples", "5",
                        "--config", str(tmp_path / "absent.json"),
                        "--out", str(tmp_path / "o")])
        assert code == 2


class TestSweepCommands:
    def test_sweep_theta_schema(self, tmp_path):
        out = tmp_path / "sweep"
        code = run_cli(["sweep-theta", "--points", "3", "--realizations", "12",
                        "--dim", "64", "--seed", "2", "--out", str(out)])
        assert code == 0
        lines = (out / "theta_sweep.csv").read_text().splitlines()
        assert lines[0] == "theta,gamma_mean,gamma_stderr,b_mean,b_stderr,n_kept,n_trimmed"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert int(first[5]) + int(first[6]) == 12

    def test_sweep_defect_schema(self, tmp_path):
        out = tmp_path / "sweep"
        code = run_cli(["sweep-defect", "--points", "2", "--d-max", "0.5",
                        "--realizations", "6", "--qubits", "6", "--seed", "2",
                        "--out", str(out)])
        assert code == 0
        lines = (out / "defect_sweep.csv").read_text().splitlines()
        assert lines[0] == (
            "d,gamma_mean,gamma_stderr,b_mean,b_stderr,q_mean,q_stderr,n_kept,n_trimmed"
        )
        assert len(lines) == 3

    def test_sweep_defect_full_spectrum_mode(self, tmp_path):
        out = tmp_path / "sweep"
        code = run_cli(["sweep-defect", "--points", "2", "--d-max", "0.4",
                        "--realizations", "6", "--qubits", "6", "--sector", "full",
                        "--seed", "2", "--out", str(out)])
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["sector"] == "full"

    def test_sweep_theta_thread_invariance(self, tmp_path):
        outs = []
        for threads in ("1", "3"):
            out = tmp_path / f"t{threads}"
            code = run_cli(["sweep-theta", "--points", "2", "--realizations", "8",
                            "--dim", "64", "--seed", "9", "--threads", threads,
                            "--out", str(out)])
            assert code == 0
            outs.append((out / "theta_sweep.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_invalid_points(self, tmp_path):
        assert run_cli(["sweep-theta", "--points", "1", "--out", str(tmp_path)]) == 2


class TestStatsCommand:
    def test_goe_stats(self, tmp_path):
        out = tmp_path / "stats"
        code = run_cli(["stats", "--source", "GOE", "--dim", "64", "--draws", "20",
                        "--seed", "3", "--out", str(out)])
        assert code == 0
        stats = json.loads((out / "stats.json").read_text())
        assert stats["source"] == "GOE"
        assert 1.5 < stats["weibull_c"] < 2.5
        assert stats["gamma"] < 0.3

    def test_poisson_stats(self, tmp_path):
        out = tmp_path / "stats"
        code = run_cli(["stats", "--source", "PoissonDiagonal", "--dim", "64",
                        "--draws", "20", "--seed", "3", "--out", str(out)])
        assert code == 0
        stats = json.loads((out / "stats.json").read_text())
        assert stats["weibull_c"] == pytest.approx(1.0, abs=0.15)
        assert stats["gamma"] > 0.7

    def test_rotation_model_stats(self, tmp_path):
        out = tmp_path / "stats"
        code = run_cli(["stats", "--source", "D", "--theta", "1.2", "--dim", "128",
                        "--draws", "10", "--seed", "5", "--out", str(out)])
        assert code == 0
        stats = json.loads((out / "stats.json").read_text())
        assert stats["gamma"] < 0.3  # deep in the chaotic regime


class TestReportEnsembles:
    def test_prints_ratios(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code = run_cli(["report-ensembles"])
        assert code == 0
        out = capsys.readouterr().out
        assert "DQ_GOE/DQ_GUE = 0.84" in out
        assert "DQ_GOE/DQ_GSE = 0.70" in out
        assert (tmp_path / "manifest.json").exists()


class TestEnvThreads:
    def test_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QCBOUND_THREADS", "2")
        out = tmp_path / "env"
        assert run_cli(["check", "--model", "B", "--samples", "10",
                        "--seed", "1", "--out", str(out)]) == 0

    def test_env_invalid(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QCBOUND_THREADS", "soup")
        assert run_cli(["check", "--model", "B", "--samples", "10",
                        "--out", str(tmp_path)]) == 2
