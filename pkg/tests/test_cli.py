import csv
import json

import pytest

from qpv.adversaries import COMPATIBLE
from qpv.cli import EXIT_CONFIG, EXIT_OK, main
from qpv.config import ATTACK_ALIASES, PROTOCOL_ALIASES, ConfigError, ScenarioConfig, validate_config

PROTOCOL_FLAG = {v: k for k, v in PROTOCOL_ALIASES.items()}
ATTACK_FLAG = {v: k for k, v in ATTACK_ALIASES.items()}
PAIRS = [(ATTACK_FLAG[a], PROTOCOL_FLAG[p]) for a, ps in COMPATIBLE.items() for p in ps]


def run(tmp_path, *argv):
    code = main([*argv, "--out", str(tmp_path)])
    report = json.loads((tmp_path / "report.json").read_text()) if code == EXIT_OK else None
    return code, report


class TestRun:
    def test_teleport_exact(self, tmp_path):
        code, report = run(tmp_path, "run", "--protocol", "p1", "--attack", "teleport-1epr", "--mode", "exact", "--seed", "1")
        assert code == EXIT_OK
        assert report["exact"] == pytest.approx(1.0, abs=1e-12)
        assert report["branch_count"] == 16
        assert report["transcript_sample"]

    def test_local_reports_inference_error(self, tmp_path):
        code, report = run(
            tmp_path, "run", "--protocol", "p2", "--attack", "local", "--alpha", "1", "--beta", "0", "--mode", "exact"
        )
        assert code == EXIT_OK and report["inference_error"] == pytest.approx(0.25, abs=1e-12)

    def test_complex_basis_flag(self, tmp_path):
        code, report = run(
            tmp_path, "run", "--protocol", "p2", "--attack", "local",
            "--alpha", "0.9238795325112867", "--beta", "0.3826834323650898i", "--mode", "exact",
        )
        assert code == EXIT_OK and report["inference_error"] > 0.25

    def test_seed_echoed(self, tmp_path):
        code, report = run(tmp_path, "run", "--protocol", "p1", "--trials", "10")
        assert code == EXIT_OK and isinstance(report["scenario"]["seed"], int)

    def test_reproducible_rows(self, tmp_path):
        argv = ["run", "--protocol", "p2-mod", "--attack", "5epr", "--trials", "200", "--seed", "17", "--mode", "both"]
        _, a = run(tmp_path / "a", *argv)
        _, b = run(tmp_path / "b", *argv)
        for key in ("p_hat", "ci", "exact", "branch_count", "condition_rates", "transcript_sample", "scenario"):
            assert json.dumps(a[key], sort_keys=True) == json.dumps(b[key], sort_keys=True)

    def test_config_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"protocol": "p1", "attack": "intercept", "trials": 50, "seed": 3}))
        code, report = run(tmp_path, "run", "--config", str(path), "--trials", "20")
        assert code == EXIT_OK and report["trials"] == 20 and report["scenario"]["attack"] == "P1_INTERCEPT"

    @pytest.mark.parametrize("attack,protocol", PAIRS)
    def test_every_compatible_pair_runs(self, tmp_path, attack, protocol):
        code, report = run(tmp_path, "run", "--protocol", protocol, "--attack", attack, "--n", "1", "--trials", "20", "--seed", "4")
        assert code == EXIT_OK and 0.0 <= report["p_hat"] <= 1.0


class TestConfigErrors:
    def test_mismatch(self, tmp_path, capsys):
        code, _ = run(tmp_path, "run", "--protocol", "p1", "--attack", "p2oracle")
        assert code == EXIT_CONFIG
        err = capsys.readouterr().err
        assert "attack/protocol mismatch" in err and "P2ORACLE_FULL" in err and "P1" in err

    def test_position(self, tmp_path, capsys):
        code, _ = run(tmp_path, "run", "--protocol", "p1", "--attack", "intercept", "--e0-pos", "1.5")
        assert code == EXIT_CONFIG and "E0 must lie in (0,d)" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "argv",
        [
            ["--protocol", "p9"],
            ["--protocol", "p1", "--attack", "nope"],
            ["--protocol", "p1-oracle", "--attack", "oracle-2n", "--m", "3"],
            ["--protocol", "p1", "--trials", "0"],
            ["--protocol", "p2", "--attack", "local", "--alpha", "2"],
        ],
    )
    def test_rejected(self, tmp_path, argv):
        assert run(tmp_path, "run", *argv)[0] == EXIT_CONFIG

    def test_lists_every_problem(self):
        with pytest.raises(ConfigError) as info:
            validate_config(ScenarioConfig(protocol="p1", d=1.0, e0_pos=2.0, e1_pos=0.5, trials=0))
        assert len(info.value.problems) == 3


class TestSweepCommand:
    def test_hybrid_nine_rows(self, tmp_path):
        code = main(
            ["sweep", "--protocol", "p1-oracle", "--attack", "hybrid", "--n", "3", "--m", "0..8",
             "--mode", "exact", "--seed", "2", "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        with open(tmp_path / "sweep.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert [int(r["m"]) for r in rows] == list(range(9))
        assert float(rows[-1]["exact"]) == pytest.approx(1.0)

    def test_needs_a_range(self, tmp_path):
        assert main(["sweep", "--protocol", "p1", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_runtime_failure_exit_code(tmp_path, monkeypatch):
    import qpv.cli

    def boom(cfg):
        raise RuntimeError("engine fault")

    monkeypatch.setattr(qpv.cli, "run_scenario", boom)
    assert main(["run", "--protocol", "p1", "--out", str(tmp_path)]) == qpv.cli.EXIT_RUNTIME
