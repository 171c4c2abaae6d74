import json
import math

import pytest

from rtnkit.cli import main
from rtnkit.tables import read_table


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExpect:
    def test_symmetric_trivial(self, capsys):
        code, out, err = run_cli(
            capsys, "expect", "symmetric", "--m", "0", "--delta", "1", "--tau", "1", "--t", "1"
        )
        assert code == 0
        assert out.splitlines()[-1].endswith(",1")

    def test_symmetric_removable_point(self, capsys, tmp_path):
        out_path = tmp_path / "r.csv"
        code, _, _ = run_cli(
            capsys, "expect", "symmetric", "--m", "1", "--delta", "1", "--tau", "1",
            "--t", "1", "--out", str(out_path),
        )
        assert code == 0
        rows = read_table(out_path)
        assert rows[0]["value"] == pytest.approx(2.0 / math.e, rel=1e-14)

    def test_gaussian(self, capsys):
        code, out, _ = run_cli(
            capsys, "expect", "gaussian", "--m", "2", "--sigma", "0.5", "--format", "json"
        )
        assert code == 0
        rows = json.loads(out)
        assert rows[0]["value"] == pytest.approx(math.exp(-0.5), rel=1e-14)

    def test_invalid_parameters_exit_one(self, capsys):
        code, out, err = run_cli(
            capsys, "expect", "symmetric", "--m", "1", "--delta", "1", "--tau", "-2", "--t", "1"
        )
        assert code == 1
        assert out == ""  # no partial output
        assert "error" in err

    def test_usage_error_exit_one(self, capsys):
        code, _, err = run_cli(capsys, "expect", "symmetric", "--m", "1")
        assert code == 1

    def test_multi_source_product(self, capsys):
        code, out, _ = run_cli(
            capsys, "expect", "multi", "--m", "1", "--t", "1",
            "--source", "1:1:1", "--source", "1:1:1", "--format", "json",
        )
        assert code == 0
        rows = json.loads(out)
        single = 2.0 / math.e
        assert rows[0]["value_re"] == pytest.approx(single * single, rel=1e-12)
        assert rows[0]["value_im"] == pytest.approx(0.0, abs=1e-15)


class TestVerify:
    def test_symmetric_small_run_passes(self, capsys):
        code, out, err = run_cli(
            capsys, "verify", "symmetric", "--samples", "20000", "--seed", "3", "--workers", "2"
        )
        assert code == 0
        assert "PASS" in err
        # stdout stays machine-readable: schema comment, header, data rows
        lines = out.splitlines()
        assert lines[0].startswith("# schema=")
        assert len(lines) == 2 + 5

    def test_conditional_reports_rows(self, capsys):
        code, out, err = run_cli(
            capsys, "verify", "conditional", "--samples", "20000", "--seed", "5", "--workers", "2"
        )
        assert code == 0
        assert "infeasible" in err


class TestSweep:
    def test_sweep_writes_table(self, capsys, tmp_path):
        spec = {
            "sweep": {"parameter": "sigma", "min": 0.1, "max": 0.5, "count": 3},
            "formula": "qubit_gaussian",
            "fixed": {},
        }
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        out_path = tmp_path / "out.csv"
        code, _, _ = run_cli(capsys, "sweep", "--spec", str(spec_path), "--out", str(out_path))
        assert code == 0
        rows = read_table(out_path)
        assert len(rows) == 3 and "n1" in rows[0]

    def test_sweep_deterministic_bytes(self, capsys, tmp_path):
        spec = {
            "sweep": {"parameter": "m", "min": 0.0, "max": 2.0, "count": 4},
            "formula": "symmetric",
            "fixed": {"delta": 1.0, "tau": 1.0, "t": 1.0},
            "mc": {"samples": 5000, "seed": 9, "workers": 2},
        }
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(capsys, "sweep", "--spec", str(spec_path), "--out", str(a))[0] == 0
        assert run_cli(capsys, "sweep", "--spec", str(spec_path), "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_spec_exit_one(self, capsys, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text('{"formula": "symmetric"}')
        code, out, err = run_cli(capsys, "sweep", "--spec", str(spec_path))
        assert code == 1
        assert "sweep" in err

    def test_flag_overrides_seed(self, capsys, tmp_path):
        spec = {
            "sweep": {"parameter": "m", "min": 1.0, "max": 1.0, "count": 1},
            "formula": "symmetric",
            "fixed": {"delta": 1.0, "tau": 1.0, "t": 1.0},
            "mc": {"samples": 5000, "seed": 9},
        }
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(capsys, "sweep", "--spec", str(spec_path), "--out", str(a))
        run_cli(capsys, "sweep", "--spec", str(spec_path), "--seed", "10", "--out", str(b))
        assert a.read_bytes() != b.read_bytes()


class TestTrace:
    def test_zero_amplitude_theta_column(self, capsys, tmp_path):
        out_path = tmp_path / "t.csv"
        code, _, _ = run_cli(
            capsys, "trace", "--delta", "0", "--tau", "1", "--t", "5",
            "--seed", "4", "--out", str(out_path),
        )
        assert code == 0
        rows = read_table(out_path)
        assert all(r["theta"] == 0 for r in rows)

    def test_deterministic_bytes(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["trace", "--delta", "1", "--tau", "0.3", "--t", "10", "--seed", "12"]
        run_cli(capsys, *args, "--out", str(a))
        run_cli(capsys, *args, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_trace_structure_and_dwell_statistics(self, capsys, tmp_path):
        out_path = tmp_path / "t.csv"
        code, _, _ = run_cli(
            capsys, "trace", "--delta", "1", "--tau", "0.5", "--t", "2000",
            "--seed", "7", "--out", str(out_path),
        )
        assert code == 0
        rows = read_table(out_path)
        times = [r["time"] for r in rows]
        assert times[0] == 0 and times[-1] == 2000
        assert all(a < b for a, b in zip(times, times[1:]))
        ys = {r["y"] for r in rows}
        assert ys <= {-1, 1}
        gaps = [b - a for a, b in zip(times[1:-1], times[2:-1])]
        mean_dwell = sum(gaps) / len(gaps)
        se = 0.5 / math.sqrt(len(gaps))
        assert abs(mean_dwell - 0.5) <= 4 * se


class TestQubitAndControl:
    def test_qubit_gaussian_row(self, capsys):
        code, out, _ = run_cli(capsys, "qubit", "gaussian", "--sigma", "0.1", "--format", "json")
        assert code == 0
        row = json.loads(out)[0]
        assert row["n1"] == pytest.approx((1 - math.exp(-0.08)) / 8, rel=1e-12)

    def test_qubit_rtn_with_control(self, capsys):
        code, out, _ = run_cli(
            capsys, "qubit", "rtn", "--delta", "1", "--tau", "1", "--t", "0.3",
            "--control-n", "8", "--format", "json",
        )
        assert code == 0
        row = json.loads(out)[0]
        assert row["n0"] + 2 * row["n1"] + row["n2"] == pytest.approx(1.0, abs=1e-12)

    def test_control_waiting_row(self, capsys):
        code, out, _ = run_cli(
            capsys, "control", "waiting", "--m", "1", "--delta", "1", "--tau", "1",
            "--t", "1", "--n", "4", "--format", "json",
        )
        assert code == 0
        row = json.loads(out)[0]
        from rtnkit.analytic import cos_expectation_symmetric
        from rtnkit.model import EvaluationPoint, TelegraphSource

        segment = cos_expectation_symmetric(
            TelegraphSource.symmetric(1.0, 1.0), EvaluationPoint(1.0, 0.25)
        )
        assert row["value"] == pytest.approx(segment**4, rel=1e-12)
        assert row["error"] == pytest.approx(1 - row["value"], rel=1e-12)

    def test_control_suppression_odd_n_rejected(self, capsys):
        code, _, err = run_cli(
            capsys, "control", "suppression", "--m", "1", "--delta", "1", "--tau", "1",
            "--t", "1", "--n", "3",
        )
        assert code == 1
        assert "even" in err
