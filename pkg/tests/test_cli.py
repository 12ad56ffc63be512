import csv
import json

import pytest

from sicancel import config as cfgmod
from sicancel.cli import main


def run(tmp_path, *argv):
    out = tmp_path / "run"
    code = main([*argv, "--out", str(out)])
    return code, out


class TestSubcommands:
    def test_requirements(self, tmp_path, capsys):
        code, out = run(tmp_path, "requirements")
        assert code == 0
        res = json.loads((out / "requirements.json").read_text())
        assert res["carrier_req_db"] == pytest.approx(73.0, abs=0.05)
        assert res["offset_budget_db"] == pytest.approx(199.5, abs=0.05)
        assert res["offset_req_db"] == pytest.approx(46.5, abs=0.05)
        assert res["reciprocal_req_db"] == pytest.approx(78.0, abs=0.05)
        assert capsys.readouterr().out.count("\n") == 1

    def test_coverage(self, tmp_path):
        code, out = run(tmp_path, "coverage", "--stride", "6")
        assert code == 0
        with open(out / "coverage.csv") as fh:
            assert sum(1 for _ in csv.reader(fh)) == 1297
        assert (out / "config.json").exists()

    def test_cloud(self, tmp_path):
        code, out = run(tmp_path, "cloud", "--initial", "0,0,0,0,0,0,0,0")
        assert code == 0
        assert (out / "cloud.csv").exists()

    def test_tune(self, tmp_path):
        code, out = run(tmp_path, "tune", "--antenna", "0.1,0.2", "--seed", "4")
        assert code == 0
        res = json.loads((out / "tune.json").read_text())
        assert res["seed"] == 4 and len(res["codes"]) == 8

    def test_tune_strict_failure(self, tmp_path):
        code, _ = run(tmp_path, "tune", "--antenna", "0.65,0", "--strict")
        assert code == 2

    def test_tune_failure_without_strict(self, tmp_path):
        code, _ = run(tmp_path, "tune", "--antenna", "0.65,0")
        assert code == 0

    def test_montecarlo(self, tmp_path):
        code, out = run(tmp_path, "montecarlo", "--n", "5", "--seed", "7")
        assert code == 0
        summary = json.loads((out / "cdf.json").read_text())
        assert summary["seed"] == 7 and len(summary["config_hash"]) == 64

    def test_sweep(self, tmp_path):
        code, out = run(tmp_path, "sweep", "--antenna", "0.2,0.1", "--span", "2e6", "--step", "1e5")
        assert code == 0
        with open(out / "sweep.csv") as fh:
            assert sum(1 for _ in fh) == 22

    def test_sweep_unreachable(self, tmp_path):
        code, _ = run(tmp_path, "sweep", "--antenna", "0.65,0", "--selection", "deepest")
        assert code == 2

    def test_overhead(self, tmp_path):
        code, out = run(tmp_path, "overhead", "--thresholds", "40,60", "--n", "3")
        assert code == 0
        assert (out / "overhead.csv").exists() and (out / "overhead.json").exists()


class TestConfigHandling:
    def test_flags_override_file(self, tmp_path):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text('{"seed": 11, "output_dir": "ignored"}')
        code, out = run(tmp_path, "requirements", "--config", str(cfg_path), "--seed", "12")
        assert code == 0
        assert cfgmod.load(out / "config.json").seed == 12

    def test_file_value_used(self, tmp_path):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text('{"source": {"power_dbm": 20.0}}')
        _, out = run(tmp_path, "requirements", "--config", str(cfg_path))
        assert json.loads((out / "requirements.json").read_text())["carrier_req_db"] == pytest.approx(63.0)

    def test_effective_config_reloads(self, tmp_path):
        _, out = run(tmp_path, "requirements")
        text = (out / "config.json").read_text()
        assert cfgmod.dumps(cfgmod.loads(text)) == text

    def test_unknown_key(self, tmp_path, capsys):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text('{"tuner": {}}')
        code, _ = run(tmp_path, "requirements", "--config", str(cfg_path))
        assert code == 1
        assert "tuner" in capsys.readouterr().err

    def test_malformed(self, tmp_path, capsys):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text("{\n\n  oops\n}")
        code, _ = run(tmp_path, "requirements", "--config", str(cfg_path))
        assert code == 1
        assert "line 3" in capsys.readouterr().err

    def test_bad_stride(self, tmp_path):
        code, _ = run(tmp_path, "coverage", "--stride", "0")
        assert code == 1

    def test_bad_jobs(self, tmp_path):
        code, _ = run(tmp_path, "requirements", "--jobs", "0")
        assert code == 1
