import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from entanglement_aep import cli
from entanglement_aep.entropy import shannon
from entanglement_aep.smoothing import regularized_smooth_h0
from entanglement_aep.tensor_core import random_state, state_to_dict


def _run(tmp_path, cfg, *extra, text=None):
    path = tmp_path / "cfg.json"
    path.write_text(text if text is not None else json.dumps(cfg, indent=1))
    out = tmp_path / "out.txt"
    code = cli.main(["--config", str(path), "--out", str(out), *extra])
    return code, (out.read_bytes() if out.exists() else b"")


def _rows(data: bytes):
    return list(csv.DictReader(io.StringIO(data.decode())))


class TestClassicalAep:
    def test_three_quarters(self, tmp_path):
        code, data = _run(tmp_path, {"command": "classical-aep", "distribution": [0.75, 0.25],
                                     "epsilons": [0.01], "n": [200, 10, 100, 50]})
        assert code == 0
        rows = _rows(data)
        assert [int(r["n"]) for r in rows] == [10, 50, 100, 200]
        gaps = [float(r["gap"]) for r in rows]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        for r in rows:
            assert float(r["value"]) == regularized_smooth_h0([0.75, 0.25], 0.01, int(r["n"]))
            assert float(r["entropy"]) == shannon([0.75, 0.25])

    def test_format(self, tmp_path):
        _, data = _run(tmp_path, {"command": "classical-aep", "distribution": [0.75, 0.25], "epsilons": [0.01], "n": [10]})
        assert b"\r" not in data
        lines = data.decode().splitlines()
        assert lines[0] == "n,epsilon,value,entropy,gap"
        assert lines[1].split(",")[1] == "%.17g" % 0.01

    def test_dirac_and_uniform(self, tmp_path):
        _, data = _run(tmp_path, {"command": "classical-aep", "distribution": [1.0, 0.0], "epsilons": [0.1], "n": [1, 7, 30]})
        assert all(float(r["gap"]) == 0.0 for r in _rows(data))
        _, data = _run(tmp_path, {"command": "classical-aep", "distribution": [0.5, 0.5], "epsilons": [0.0], "n": [1, 7, 30]})
        assert all(float(r["gap"]) == 0.0 for r in _rows(data))

    def test_distribution_file(self, tmp_path):
        (tmp_path / "p.json").write_text("[0.6, 0.4]")
        code, data = _run(tmp_path, {"command": "classical-aep", "distribution": "p.json", "epsilons": [0.1], "n": [5]})
        assert code == 0 and len(_rows(data)) == 1


class TestQuantumAep:
    def test_ghz(self, tmp_path):
        code, data = _run(tmp_path, {"command": "quantum-aep", "state": {"ghz": {"k": 3, "r": 2}},
                                     "epsilons": [0.01], "n": [1, 2, 3, 4, 5, 6]})
        assert code == 0
        for r in _rows(data):
            assert float(r["estimate"]) == 1.0 and float(r["limit"]) == pytest.approx(1.0)
            assert abs(float(r["gap"])) <= 1e-12
            assert int(r["rank_0"]) == 2 ** int(r["n"])

    def test_product(self, tmp_path):
        state = {"dims": [2, 2, 2], "re": [0, 0, 0, 0, 0, 1, 0, 0], "im": [0] * 8}
        _, data = _run(tmp_path, {"command": "quantum-aep", "state": state, "epsilons": [0.1], "n": [1, 10]})
        for r in _rows(data):
            assert float(r["estimate"]) == 0.0 and float(r["limit"]) == 0.0 and float(r["gap"]) == 0.0

    def test_skewed_gap_shrinks(self, tmp_path):
        amps = np.zeros(8)
        amps[0], amps[7] = math.sqrt(0.9), math.sqrt(0.1)
        state = {"dims": [2, 2, 2], "re": amps.tolist(), "im": [0.0] * 8}
        _, data = _run(tmp_path, {"command": "quantum-aep", "state": state, "epsilons": [0.05], "n": [1, 20, 80, 200]})
        gaps = [float(r["gap"]) for r in _rows(data)]
        assert all(a >= b for a, b in zip(gaps, gaps[1:])) and gaps[-1] < gaps[0]

    def test_state_file(self, tmp_path, rng):
        (tmp_path / "s.json").write_text(json.dumps(state_to_dict(random_state((2, 2), rng))))
        code, data = _run(tmp_path, {"command": "quantum-aep", "state": "s.json", "theta": [0.3, 0.7],
                                     "epsilons": [0.1], "n": [1, 3]})
        assert code == 0 and list(_rows(data)[0]) == ["n", "epsilon", "rank_0", "rank_1", "estimate", "limit", "gap"]


class TestSuites:
    @pytest.mark.parametrize("command", ["axioms", "locc-check", "appendix"])
    def test_default_pass(self, tmp_path, command):
        code, data = _run(tmp_path, {"command": command, "samples": 20})
        report = json.loads(data)
        assert code == 0 and report["passed"]
        for entry in report["properties"]:
            assert set(entry) >= {"property", "anchor", "samples", "worst", "tolerance", "passed"}
            assert entry["samples"] == 20 and entry["anchor"]

    def test_deterministic_across_jobs(self, tmp_path):
        cfg = {"command": "appendix", "samples": 12, "seed": 5}
        _, a = _run(tmp_path, cfg)
        _, b = _run(tmp_path, cfg, "--jobs", "2")
        _, c = _run(tmp_path, cfg)
        assert a == b == c

    def test_seed_override(self, tmp_path):
        cfg = {"command": "axioms", "samples": 5}
        _, a = _run(tmp_path, cfg, "--seed", "1")
        _, b = _run(tmp_path, cfg, "--seed", "2")
        assert json.loads(a)["seed"] == 1 and a != b

    def test_violation_exit_code(self, tmp_path, monkeypatch):
        broken = cli.Property("broken", "always fails", "slack", 0.0, lambda rng, params: -1.0)
        monkeypatch.setitem(cli.SUITES, "axioms", (broken,))
        code, data = _run(tmp_path, {"command": "axioms", "samples": 3})
        assert code == 1 and not json.loads(data)["passed"]


class TestConfigErrors:
    def test_unnormalized_theta(self, tmp_path, capsys):
        text = '{\n  "command": "axioms",\n  "theta": [0.5, 0.6, 0.1]\n}\n'
        code, _ = _run(tmp_path, None, text=text)
        assert code == 2
        assert "cfg.json:3:" in capsys.readouterr().err

    def test_zero_samples(self, tmp_path, capsys):
        text = '{"command": "locc-check",\n "samples": 0}'
        code, _ = _run(tmp_path, None, text=text)
        assert code == 2 and "cfg.json:2:" in capsys.readouterr().err

    def test_bad_json_line(self, tmp_path, capsys):
        text = '{\n "command": "axioms",\n "samples": 3,,\n}'
        code, _ = _run(tmp_path, None, text=text)
        assert code == 2 and "cfg.json:3:" in capsys.readouterr().err

    @pytest.mark.parametrize("cfg", [
        {"command": "nope"},
        {"command": "classical-aep", "distribution": [0.5, 0.5], "epsilons": [1.0], "n": [3]},
        {"command": "classical-aep", "distribution": [0.5, 0.5], "epsilons": [0.1], "n": [0]},
        {"command": "classical-aep", "distribution": [0.5, 0.5], "epsilons": [0.1], "n": [201]},
        {"command": "classical-aep", "epsilons": [0.1], "n": [3]},
        {"command": "quantum-aep", "state": {"dims": [2, 2], "re": [1, 1, 0, 0]}, "epsilons": [0.1], "n": [1]},
        {"command": "quantum-aep", "state": {"ghz": {"k": 2, "r": 2}}, "epsilons": [0.0], "n": [1]},
        {"command": "axioms", "dims": [3]},
        {"command": "axioms", "seed": -1},
    ])
    def test_rejected(self, tmp_path, cfg):
        code, _ = _run(tmp_path, cfg)
        assert code == 2

    def test_missing_file(self, tmp_path):
        assert cli.main(["--config", str(tmp_path / "missing.json")]) == 2

    def test_bad_jobs(self, tmp_path):
        code, _ = _run(tmp_path, {"command": "axioms", "samples": 1}, "--jobs", "0")
        assert code == 2


def test_console_script(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"command": "classical-aep", "distribution": [0.5, 0.5], "epsilons": [0.1], "n": [4]}))
    res = subprocess.run([sys.executable, "-m", "entanglement_aep.cli", "--config", str(path)], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("n,epsilon,value,entropy,gap\n")
