import csv
import io
import json
import subprocess
import sys

import pytest

from formsums import __version__
from formsums.cli import main
from formsums.config import ConfigError, ExperimentConfig


def run_cli(*argv):
    buf = io.StringIO()
    code = main(list(argv), stdout=buf)
    return code, buf.getvalue()


def csv_rows(text):
    body = "".join(line + "\n" for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def header(text):
    return dict(line[2:].split(": ", 1) for line in text.splitlines() if line.startswith("# "))


class TestConfig:
    def test_json_toml_roundtrip(self, tmp_path):
        cfg = ExperimentConfig("sum", {"form": "3; 1 0 0 2", "h": "tau", "grid": [10, 20]}, {}, jobs=2).validate()
        (tmp_path / "c.json").write_text(cfg.to_json())
        (tmp_path / "c.toml").write_text(cfg.to_toml())
        for name in ("c.json", "c.toml"):
            back = ExperimentConfig.load(tmp_path / name)
            assert back == cfg and back.digest() == cfg.digest()

    def test_digest_ignores_workers_and_paths(self):
        a = ExperimentConfig("rho", {"poly": [1, 0, 1], "m": 65})
        b = ExperimentConfig("rho", {"poly": [1, 0, 1], "m": 65}, jobs=8, out="/tmp/x")
        assert a.digest() == b.digest()
        assert a.digest() != ExperimentConfig("rho", {"poly": [1, 0, 1], "m": 66}).digest()

    @pytest.mark.parametrize("data, field", [
        ({"command": "sum", "inputs": {"poly": [0, 1], "h": "tau", "grid": []}}, "inputs.grid"),
        ({"command": "sum", "inputs": {"poly": [0, 1], "h": "tau", "grid": [0]}}, "inputs.grid"),
        ({"command": "sum", "inputs": {"h": "tau", "grid": [3]}}, "inputs.form"),
        ({"command": "rho", "inputs": {"poly": [0, 1], "m": 5}, "jobs": 0}, "jobs"),
        ({"command": "rho", "inputs": {}, "color": "red"}, "color"),
        ({"command": "bound-check", "inputs": {"kind": "theorem9", "form": "2; 1 0 1", "grid": [3]}}, "inputs.kind"),
        ({"command": "frobnicate"}, "command"),
    ])
    def test_invalid(self, data, field):
        with pytest.raises(ConfigError) as exc:
            ExperimentConfig.from_dict(data).validate()
        assert exc.value.field == field

    def test_defaults_recorded(self):
        cfg = ExperimentConfig("nair-check", {"poly": [1, 0, 1], "h": "tau", "grid": [10]}).validate()
        assert cfg.thresholds == {"spread": 2.0}


class TestCommands:
    def test_rho(self):
        code, out = run_cli("rho", "--poly=1,0,1", "--m", "65")
        assert code == 0
        assert csv_rows(out)[0]["count"] == "4"

    def test_provenance_header(self):
        code, out = run_cli("disc", "--form", "2; 1 0 1")
        h = header(out)
        assert code == 0 and h["tool"] == "formsums" and h["version"] == __version__ and h["command"] == "disc"
        assert len(h["config_sha256"]) == 64

    def test_json_format(self):
        code, out = run_cli("fpd", "--poly=0,-1,0,1", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["passed"] and doc["config"]["inputs"]["poly"] == "0,-1,0,1"

    def test_reduce_then_verify(self, tmp_path):
        code, _ = run_cli("reduce", "--poly=0,-1,0,1", "--out", str(tmp_path))
        assert code == 0
        cert = tmp_path / "certificate.json"
        assert json.loads(cert.read_text())["format"] == "formsums-certificate/1"
        code, out = run_cli("verify-cert", str(cert))
        assert code == 0
        assert {r["check"] for r in csv_rows(out) if r["passed"] == "true"} == {
            "identity", "partition", "fpd_free", "budget", "discriminant"}

    def test_tampered_certificate_fails(self, tmp_path):
        run_cli("reduce", "--poly=0,1,1", "--out", str(tmp_path))
        cert = tmp_path / "certificate.json"
        doc = json.loads(cert.read_text())
        doc["leaves"].pop()
        cert.write_text(json.dumps(doc))
        code, _ = run_cli("verify-cert", str(cert))
        assert code == 1

    def test_empty_grid_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "c.toml"
        cfg.write_text('command = "sum"\n[inputs]\nform = "2; 1 0 1"\nh = "tau"\ngrid = []\n')
        code, _ = run_cli("sum", "--config", str(cfg))
        assert code == 2
        assert "inputs.grid" in capsys.readouterr().err

    def test_config_command_mismatch(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"command": "rho", "inputs": {"poly": [0, 1], "m": 5}}))
        assert run_cli("disc", "--config", str(cfg))[0] == 2

    def test_math_error_exit_3(self, tmp_path):
        code, out = run_cli("shape", "--form", "3; 0 1 0 0", "--out", str(tmp_path))
        assert code == 3
        rec = json.loads((tmp_path / "shape.error.json").read_text())
        assert rec == json.loads(out)
        assert rec["error"]["type"] == "RepeatedFactorError" and rec["error"]["command"] == "shape"

    def test_fpd_rejected_by_nair_check(self):
        code, out = run_cli("nair-check", "--poly=0,1,1", "--h", "tau", "--grid", "10")
        assert code == 3 and json.loads(out)["error"]["type"] == "FixedPrimeDivisorError"

    def test_sum_poly_and_form(self):
        code, out = run_cli("sum", "--poly=1,0,1", "--h", "tau", "--grid", "3")
        assert code == 0 and csv_rows(out)[0]["sum"] == "8"
        code, out = run_cli("sum", "--form", "2; 0 1 0", "--h", "tau", "--grid", "2")
        assert code == 0 and csv_rows(out)[0]["sum"] == "8"

    def test_failed_threshold_exit_1(self, tmp_path):
        code, _ = run_cli("nair-check", "--poly=1,0,1", "--h", "tau", "--grid", "10,1000", "--spread", "1.0001",
                          "--out", str(tmp_path))
        assert code == 1
        summary = json.loads((tmp_path / "nair-check.summary.json").read_text())
        assert summary["passed"] is False and summary["config"]["thresholds"] == {"spread": 1.0001}

    def test_csv_identical_across_jobs(self, tmp_path):
        bodies = []
        for jobs in ("1", "8"):
            d = tmp_path / jobs
            code, _ = run_cli("bound-check", "--kind", "theorem1", "--form", "3; 1 0 0 2", "--h", "tau",
                              "--grid", "50,100", "--jobs", jobs, "--out", str(d))
            assert code == 0
            bodies.append((d / "bound-check.csv").read_bytes())
        assert bodies[0] == bodies[1]

    def test_dan_check(self):
        code, out = run_cli("dan-check", "--poly=0,0,1", "--poly=1,0,1", "--p-max", "7", "--pl-max", "100")
        assert code == 0 and all(r["passed"] == "true" for r in csv_rows(out))

    def test_rhostar_primes(self):
        code, _ = run_cli("rhostar", "--form", "2; 1 0 1", "--primes", "30")
        assert code == 0

    def test_euler_product(self):
        code, out = run_cli("euler-product", "--form", "2; 1 0 1", "--h", "tau", "--grid", "10")
        assert code == 0 and csv_rows(out)[0]["E"] == "7/5"

    def test_module_entry_point(self):
        out = subprocess.run([sys.executable, "-m", "formsums", "--version"], capture_output=True, text=True)
        assert out.returncode == 0 and __version__ in out.stdout

    def test_no_command(self):
        assert main([]) == 2
