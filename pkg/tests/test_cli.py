"""CLI contract: exit codes, JSON schema round trips, CSV shape."""

import json

import pytest

from entropath.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestVerify:
    def test_worked_instance_passes(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--p", "0.5,0.5", "--slopes", "1,1", "--format", "json"
        )
        assert code == 0
        report = json.loads(out)
        assert report["schema_version"] == 1
        assert report["holds"] is True
        assert report["uk"]["terms"][0]["u"] == pytest.approx(1.22741, abs=1e-5)
        names = [c["name"] for c in report["checks"]]
        assert "condition4" in names and "hessian_psd" in names

    def test_out_of_range_parameter_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "verify", "--p", "0.5,1.2", "--slopes", "1,1")
        assert code == 2
        assert "error" in err

    def test_mixed_signs_record_branch(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--p", "0.5,0.5", "--slopes", "1,-1", "--format", "json"
        )
        assert code == 0
        report = json.loads(out)
        assert report["uk"]["terms"][0]["branch"] == "h_nonpositive"

    def test_csv_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--p", "0.5,0.5", "--slopes", "1,1", "--format", "csv"
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "instance_id,inequality,k,margin"
        assert len(lines) > 5

    def test_human_output_renders(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--p", "0.5,0.5", "--slopes", "1,1")
        assert code == 0
        assert "verify" in out

    def test_single_component(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--p", "0.5", "--format", "json")
        assert code == 0
        assert json.loads(out)["uk"] is None

    def test_t_shift(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "verify", "--p", "0.2,0.8", "--slopes", "1,-1", "--t", "0.1",
            "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["p"] == pytest.approx([0.3, 0.7])


class TestScan:
    def test_inline_flags(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "scan", "--seed", "42", "--n-range", "2,5", "--instances", "50",
            "--format", "json",
        )
        assert code == 0
        report = json.loads(out)
        assert report["certificate_count"] == 0
        assert report["config"]["seed"] == 42

    def test_config_file_and_determinism(self, capsys, tmp_path):
        cfg = {
            "seed": 7,
            "n_range": [2, 4],
            "instance_count": 40,
            "inequality_set": ["log_concavity", "condition4"],
        }
        path = tmp_path / "scan.json"
        path.write_text(json.dumps(cfg))
        code1, out1, _ = run_cli(capsys, "scan", "--config", str(path), "--format", "json")
        code2, out2, _ = run_cli(capsys, "scan", "--config", str(path), "--format", "json")
        assert code1 == code2 == 0
        assert out1 == out2

    def test_config_overrides_inline(self, capsys, tmp_path):
        path = tmp_path / "scan.json"
        path.write_text(json.dumps({"seed": 7, "instance_count": 10}))
        code, out, _ = run_cli(
            capsys, "scan", "--config", str(path), "--seed", "99", "--format", "json"
        )
        assert code == 0
        assert json.loads(out)["config"]["seed"] == 7

    def test_strict_forbids_mixing(self, capsys, tmp_path):
        path = tmp_path / "scan.json"
        path.write_text(json.dumps({"seed": 7}))
        code, _, err = run_cli(capsys, "scan", "--config", str(path), "--seed", "99", "--strict")
        assert code == 2
        assert "strict" in err

    def test_violation_exits_one(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "scan", "--seed", "1", "--family", "bernoulli", "--n-range", "1,1",
            "--instances", "25", "--checks", "renyi_concavity", "--q-grid", "2.5",
            "--format", "json",
        )
        assert code == 1
        assert json.loads(out)["certificate_count"] >= 1

    def test_missing_seed(self, capsys):
        code, _, err = run_cli(capsys, "scan", "--instances", "5")
        assert code == 2

    def test_csv_margin_dump(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "scan", "--seed", "5", "--instances", "10", "--n-range", "2,3",
            "--checks", "log_concavity,condition4", "--format", "csv",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "instance_id,inequality,k,margin"
        assert len(lines) > 20

    def test_output_file(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys,
            "scan", "--seed", "3", "--instances", "10", "--n-range", "2,3",
            "--format", "json", "--output", str(out_path),
        )
        assert code == 0
        assert out == ""
        assert json.loads(out_path.read_text())["config"]["seed"] == 3


class TestCriticalQ:
    def test_binomial2_tsallis_probe(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "critical-q", "--family", "binomial2", "--kind", "tsallis",
            "--bracket", "3.5,3.8", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["root"] == pytest.approx(3.65986, abs=1e-4)

    def test_analytic_probe(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "critical-q", "--family", "analytic", "--kind", "tsallis",
            "--bracket", "3.5,3.8", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["root"] == pytest.approx(3.65986, abs=1e-5)

    def test_scan_estimator(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "critical-q", "--family", "binomial2", "--kind", "tsallis",
            "--bracket", "3.5,3.8", "--estimator", "scan", "--seed", "3",
            "--instances", "49", "--format", "json",
        )
        assert code == 0
        report = json.loads(out)
        assert report["root"] == pytest.approx(3.65986, abs=1e-3)
        assert report["caveat"]

    def test_unknown_combination(self, capsys):
        code, _, err = run_cli(
            capsys,
            "critical-q", "--family", "binomial2", "--kind", "renyi",
            "--bracket", "1.5,2.5",
        )
        assert code == 2

    def test_no_sign_change(self, capsys):
        code, _, err = run_cli(
            capsys,
            "critical-q", "--family", "analytic", "--kind", "tsallis",
            "--bracket", "1.0,2.0",
        )
        assert code == 2


class TestHessian:
    def test_one_dimensional(self, capsys):
        code, out, _ = run_cli(capsys, "hessian", "--p", "0.5", "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["matrix"] == [[-4.0]]
        assert report["holds"] is True

    def test_boundary_rejected(self, capsys):
        code, _, err = run_cli(capsys, "hessian", "--p", "0.0,0.5")
        assert code == 2


class TestLemmaCheck:
    def test_worked_margin(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "lemma-check", "--A", "0.5", "--B", "0", "--C", "0.5",
            "--alpha", "1", "--beta", "0", "--gamma", "1", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["margin"] == pytest.approx(0.30685, abs=1e-5)

    def test_hypothesis_violation_exits_two(self, capsys):
        code, _, err = run_cli(
            capsys,
            "lemma-check", "--A", "0.9", "--B", "0.9", "--C", "0.5",
            "--alpha", "1", "--beta", "1", "--gamma", "1",
        )
        assert code == 2
        assert "B_square" in err


def test_json_reports_round_trip(capsys):
    for argv in (
        ["verify", "--p", "0.3,0.6", "--slopes", "0.5,-1", "--format", "json"],
        ["hessian", "--p", "0.4,0.6", "--format", "json"],
    ):
        code = main(argv)
        out = capsys.readouterr().out
        assert json.loads(json.dumps(json.loads(out))) == json.loads(out)
