import json
import shutil
import subprocess
import sys

import pytest

from hlaskit.cli import main
from hlaskit.example import example_data_dir


def run_cli(*args):
    result = subprocess.run(
        [sys.executable, "-m", "hlaskit.cli", *args],
        capture_output=True, text=True,
    )
    return result


@pytest.fixture
def data_dir(tmp_path):
    src = example_data_dir()
    for f in src.glob("*.csv"):
        shutil.copy(f, tmp_path / f.name)
    shutil.copy(src / "prereg.yaml", tmp_path / "prereg.yaml")
    return tmp_path


class TestScore:
    def test_full_run(self, data_dir, tmp_path):
        out = tmp_path / "report"
        result = run_cli("score", "--prereg", str(data_dir / "prereg.yaml"),
                         "--data", str(data_dir), "--out", str(out))
        assert result.returncode == 0, result.stderr
        assert "HLAS 0.636" in result.stdout
        assert (out / "feature_table.csv").exists()
        assert (out / "run_manifest.json").exists()
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert manifest["toolkit_version"]
        assert any("prereg.yaml" in i["path"] for i in manifest["inputs"])

    def test_delta_flag(self, data_dir, tmp_path):
        result = run_cli("score", "--prereg", str(data_dir / "prereg.yaml"),
                         "--data", str(data_dir),
                         "--out", str(tmp_path / "r"), "--delta", "0.10")
        assert result.returncode == 0
        assert "HLAS 0.515" in result.stdout

    def test_gate_flag(self, data_dir, tmp_path):
        result = run_cli("score", "--prereg", str(data_dir / "prereg.yaml"),
                         "--data", str(data_dir),
                         "--out", str(tmp_path / "r"), "--gate", "Stairs")
        assert result.returncode == 0
        assert "gated (Stairs): 0.343" in result.stdout

    def test_rate_margin_flag(self, data_dir, tmp_path):
        # the example's rate margins all clip to 1.0, like the bandwidth
        # factors, so the substitution leaves the score unchanged
        result = run_cli("score", "--prereg", str(data_dir / "prereg.yaml"),
                         "--data", str(data_dir),
                         "--out", str(tmp_path / "r"), "--rate-margin")
        assert result.returncode == 0
        assert "HLAS 0.636" in result.stdout

    def test_broken_weights_exit_code(self, data_dir, tmp_path):
        prereg = data_dir / "prereg.yaml"
        prereg.write_text(prereg.read_text().replace(
            "Walk: 0.4", "Walk: 0.3"))
        result = run_cli("score", "--prereg", str(prereg),
                         "--data", str(data_dir),
                         "--out", str(tmp_path / "r"))
        assert result.returncode == 2
        assert "WeightSumViolation" in result.stderr

    def test_missing_data_exit_code(self, data_dir, tmp_path):
        (data_dir / "thermal.csv").unlink()
        result = run_cli("score", "--prereg", str(data_dir / "prereg.yaml"),
                         "--data", str(data_dir),
                         "--out", str(tmp_path / "r"))
        assert result.returncode == 3

    def test_strict_gates(self, data_dir, tmp_path):
        result = run_cli("score", "--prereg", str(data_dir / "prereg.yaml"),
                         "--data", str(data_dir),
                         "--out", str(tmp_path / "r"),
                         "--h-min", "0.8", "--strict-gates")
        assert result.returncode == 2
        assert "breadth_floor" in result.stdout

    def test_determinism(self, data_dir, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            run_cli("score", "--prereg", str(data_dir / "prereg.yaml"),
                    "--data", str(data_dir), "--out", str(out))
            outs.append(out)
        for rel in ("feature_table.csv", "contributions.csv", "summary.csv"):
            assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes()


class TestHee:
    def test_mask_output(self, data_dir):
        result = run_cli("hee", "--band", str(data_dir / "bands.csv"),
                         "--task", "Walk", "--joint", "ankle",
                         "--map", str(data_dir / "capability_ankle.csv"))
        assert result.returncode == 0
        assert "coverage 0.546" in result.stdout
        assert result.stdout.count("true,true,true") == 3

    def test_unknown_pair(self, data_dir):
        result = run_cli("hee", "--band", str(data_dir / "bands.csv"),
                         "--task", "Swim", "--joint", "ankle",
                         "--map", str(data_dir / "capability_ankle.csv"))
        assert result.returncode == 3

    def test_mask_file_output(self, data_dir, tmp_path):
        out = tmp_path / "mask.csv"
        run_cli("hee", "--band", str(data_dir / "bands.csv"),
                "--task", "Walk", "--joint", "ankle",
                "--map", str(data_dir / "capability_ankle.csv"),
                "--delta", "0.10", "--out", str(out))
        lines = out.read_text().splitlines()
        assert lines[0] == "q_deg,omega_rad_s,weight,torque_ok,power_ok,pass"
        assert sum(l.endswith(",true") for l in lines[1:]) == 1


class TestAnalyze:
    def test_frf_pipeline(self, tmp_path):
        log = tmp_path / "sweep.csv"
        run_cli("synth", "sweep", "--out", str(log), "--pole", "10",
                "--freqs", "2,5,10,20,40")
        out = tmp_path / "frf.csv"
        result = run_cli("analyze", "frf", str(log),
                         "--freqs", "2,5,10,20,40", "--out", str(out))
        assert result.returncode == 0
        assert "f_c = 10.0" in result.stdout
        text = out.read_text()
        assert text.startswith("# crossover_hz: ")
        assert "freq_hz,magnitude,phase_deg" in text

    def test_friction_pipeline(self, tmp_path):
        log = tmp_path / "backdrive.csv"
        run_cli("synth", "backdrive", "--out", str(log),
                "--j-ref", "0.05", "--b-visc", "0.8", "--f-coulomb", "1.2",
                "--noise", "0.01", "--seed", "3", "--duration", "10")
        result = run_cli("analyze", "friction", str(log))
        assert result.returncode == 0
        for name, value in (("j_ref", 0.05), ("b_visc", 0.8),
                            ("f_coulomb", 1.2)):
            line = next(l for l in result.stdout.splitlines()
                        if l.startswith(name))
            got = float(line.split("=")[1].split()[0])
            assert got == pytest.approx(value, rel=0.05)

    def test_thermal_pipeline(self, tmp_path):
        log = tmp_path / "duty.csv"
        run_cli("synth", "thermal", "--out", str(log), "--torque", "48",
                "--duration", "40", "--thermal-tau", "60")
        result = run_cli("analyze", "thermal", str(log))
        assert result.returncode == 0
        assert "plateau torque = 48.000 Nm" in result.stdout

    def test_qc_pipeline(self, tmp_path):
        log = tmp_path / "backdrive.csv"
        run_cli("synth", "backdrive", "--out", str(log))
        result = run_cli("analyze", "qc", str(log),
                         "--f-loaded", "8", "--f-noload", "12")
        assert result.returncode == 0
        assert "power balance: pass" in result.stdout
        assert "inflation: pass" in result.stdout


class TestValidatePrereg:
    def test_pass(self, data_dir):
        result = run_cli("validate-prereg",
                         "--prereg", str(data_dir / "prereg.yaml"),
                         "--data", str(data_dir))
        assert result.returncode == 0
        assert "binding: pass" in result.stdout

    def test_backdated_fails(self, data_dir):
        cap = data_dir / "capability_ankle.csv"
        cap.write_text(cap.read_text().replace(
            "# created_utc: 2026-08-05T10:00:00Z",
            "# created_utc: 2026-07-01T00:00:00Z",
        ))
        result = run_cli("validate-prereg",
                         "--prereg", str(data_dir / "prereg.yaml"),
                         "--data", str(data_dir))
        assert result.returncode == 2
        assert "predates" in result.stdout


class TestExample:
    def test_golden_run(self, tmp_path):
        result = run_cli("example", "--out", str(tmp_path / "out"))
        assert result.returncode == 0, result.stderr
        assert "HLAS 0.636" in result.stdout
        assert "golden tables match" in result.stdout

    def test_variants(self, tmp_path):
        result = run_cli("example", "--out", str(tmp_path / "x"),
                         "--delta", "0.10")
        assert "HLAS 0.515" in result.stdout
        result = run_cli("example", "--out", str(tmp_path / "x"),
                         "--gate", "Stairs")
        assert "HLAS 0.343" in result.stdout

    def test_runs_in_process(self, tmp_path, capsys):
        assert main(["example", "--out", str(tmp_path / "out")]) == 0


class TestAtlas:
    def test_show(self):
        result = run_cli("atlas", "show", "right_knee")
        assert result.returncode == 0
        assert "flexion_extension" in result.stdout

    def test_version(self):
        result = run_cli("--version")
        assert result.returncode == 0
