"""Tests for the command-line entry point."""
import json

import pytest

from app.cli import build_parser, main
from app.cover.automaton import automaton_to_file
from app.cusped.ball import ball_from_file
from app.harness.regressions import freeze_regressions, write_regressions


def passing_report(D1: int = 5) -> dict:
    return {
        "status": "passed",
        "config_hash": "abc",
        "report_hash": "def",
        "constants": {"D1": D1, "cover": {"vertices": 40}},
    }


class TestParser:
    """Tests for argument parsing."""

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_repeated_overrides(self):
        args = build_parser().parse_args(
            ["verify-theorem", "--set", "geometry.seed=1", "--set", "cover.grid_size=64"]
        )
        assert args.set == ["geometry.seed=1", "cover.grid_size=64"]
        assert not args.no_cache


class TestCommands:
    """Tests for individual subcommands."""

    def test_deform(self, tmp_path):
        out = tmp_path / "rho.json"
        assert main(["deform", "--t", "1/100", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["t"] == "1/100"
        assert data["commutator_type"] == "hyperbolic"

    def test_cusped_ball(self, tmp_path):
        out = tmp_path / "ball.json"
        assert main(["cusped-ball", "--radius", "2", "--samples", "5", "--out", str(out)]) == 0
        ball = ball_from_file(out)
        assert ball.radius == 2
        assert ball.metadata["delta_hat"] >= 1

    def test_estimate_delta(self, tmp_path):
        ball_path = tmp_path / "ball.json"
        out = tmp_path / "delta.json"
        main(["cusped-ball", "--radius", "2", "--out", str(ball_path)])
        assert main(["estimate-delta", "--ball", str(ball_path), "--samples", "10", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["samples"] == 10

    def test_code_point(self, automaton, tmp_path):
        automaton_path = tmp_path / "automaton.json"
        out = tmp_path / "coding.json"
        automaton_to_file(automaton, automaton_path)
        assert main(["code-point", "--automaton", str(automaton_path), "--point", "0:1", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["coding"]["vertices"] == [0]
        assert data["decoded"]["point"] == "0:1"

    def test_bad_point_fails(self, automaton, tmp_path):
        automaton_path = tmp_path / "automaton.json"
        automaton_to_file(automaton, automaton_path)
        assert main(["code-point", "--automaton", str(automaton_path), "--point", "0:0"]) == 1

    def test_invalid_override_fails(self, tmp_path):
        code = main(["verify-theorem", "--set", "geometry.ball_radius=1", "--out", str(tmp_path / "r.json")])
        assert code == 1
        assert not (tmp_path / "r.json").exists()


class TestRegressionCommands:
    """Tests for freeze and compare."""

    def test_freeze(self, tmp_path):
        report = tmp_path / "report.json"
        out = tmp_path / "regressions.json"
        report.write_text(json.dumps(passing_report()))
        assert main(["freeze", "--report", str(report), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["constants"]["D1"] == 5

    def test_freeze_refuses_failing_report(self, tmp_path):
        report = tmp_path / "report.json"
        out = tmp_path / "regressions.json"
        report.write_text(json.dumps({**passing_report(), "status": "structural_failure"}))
        assert main(["freeze", "--report", str(report), "--out", str(out)]) == 1
        assert not out.exists()

    def test_compare(self, tmp_path):
        old, same, changed = tmp_path / "old.json", tmp_path / "same.json", tmp_path / "changed.json"
        write_regressions(freeze_regressions(passing_report()), old)
        write_regressions(freeze_regressions(passing_report()), same)
        write_regressions(freeze_regressions(passing_report(D1=6)), changed)
        assert main(["compare", str(old), str(same), "--out", str(tmp_path / "d0.json")]) == 0

        diff_path = tmp_path / "d1.json"
        assert main(["compare", str(old), str(changed), "--out", str(diff_path)]) == 1
        assert json.loads(diff_path.read_text())["D1"]["kind"] == "sampled"
