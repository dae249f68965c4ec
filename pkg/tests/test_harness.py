"""Tests for experiment configs, run reports, regression files and the negative control."""
import json
from fractions import Fraction
from pathlib import Path

import pytest

from app.cusped.lemmas import LemmaCheck
from app.db.database import store_file
from app.db.models import RunStatus
from app.harness.exceptions import ConfigError, RegressionFileError
from app.harness.experiment import (
    canonical_json,
    config_from_dict,
    load_config,
    parse_override,
    stable_hash,
)
from app.harness.pipeline import _run_perturbation
from app.harness.regressions import compare_regressions, freeze_regressions, read_json, write_regressions
from app.harness.report import RunReport, StageReport
from app.perturbation.deformation import deform
from app.perturbation.service import DeformationAttempt, PerturbationBattery
from tests.conftest import SMALL_CONFIG


def passing_report() -> dict:
    return {
        "status": "passed",
        "config_hash": "abc",
        "report_hash": "def",
        "constants": {"D1": 5, "delta_hat": 2, "cover": {"vertices": 40}},
    }


class TestConfig:
    """Tests for loading and validating experiment configs."""

    def test_defaults(self):
        config = config_from_dict({})
        assert config.geometry.ball_radius == 10
        assert config.cover.epsilon_target == "1/10"
        assert config.fixed_t is None
        assert not config.verification.expected_negative

    def test_overrides(self):
        config = config_from_dict({}, ["geometry.ball_radius=6", 'verification.F=["a", "b^-1"]'])
        assert config.geometry.ball_radius == 6
        assert config.coding_parameters().F == ("a", "B")

    def test_override_value_falls_back_to_string(self):
        assert parse_override("representation.t=-1/100") == (["representation", "t"], "-1/100")
        assert parse_override("geometry.seed=3") == (["geometry", "seed"], 3)

    def test_malformed_override(self):
        with pytest.raises(ConfigError):
            parse_override("geometry.ball_radius")

    def test_field_errors(self):
        with pytest.raises(ConfigError) as info:
            config_from_dict({"geometry": {"ball_radius": 1}})
        assert info.value.errors[0]["field"] == "geometry.ball_radius"

    def test_unknown_field(self):
        with pytest.raises(ConfigError) as info:
            config_from_dict({"geometry": {"radius": 4}})
        assert any("geometry.radius" == e["field"] for e in info.value.errors)

    def test_negative_candidate(self):
        with pytest.raises(ConfigError):
            config_from_dict({"representation": {"t_candidates": ["-1/100"]}})

    def test_bad_representation(self):
        with pytest.raises(ConfigError) as info:
            config_from_dict({"representation": {"a": [["2", "0"], ["0", "1"]]}})
        assert info.value.errors[0]["field"] == "representation"

    def test_fixed_t(self):
        config = config_from_dict({"representation": {"t": "1/400"}})
        assert config.fixed_t == Fraction(1, 400)

    def test_parameter_blocks(self, small_config):
        assert small_config.cover_parameters().enlarge_fraction == Fraction(1, 4)
        assert small_config.coding_parameters().sample_size == 40
        assert small_config.perturbation_parameters().candidates[0] == Fraction(1, 100)

    def test_hash_follows_content(self):
        assert config_from_dict(SMALL_CONFIG).config_hash == config_from_dict(SMALL_CONFIG).config_hash
        assert config_from_dict(SMALL_CONFIG).config_hash != config_from_dict(SMALL_CONFIG, ["geometry.seed=1"]).config_hash

    def test_load_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(SMALL_CONFIG))
        assert load_config(path).geometry.ball_radius == 4
        assert load_config(path, ["geometry.ball_radius=5"]).geometry.ball_radius == 5

    def test_invalid_json_reports_position(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"geometry": ')
        with pytest.raises(ConfigError) as info:
            load_config(path)
        assert info.value.errors[0]["field"] == "<json>"
        assert info.value.errors[0]["line"] == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")

    def test_shipped_reference_matches_defaults(self):
        path = Path(__file__).parents[1] / "configs" / "reference.json"
        assert load_config(path).config_hash == config_from_dict({}).config_hash


class TestCanonicalJson:
    """Tests for canonical serialization and hashing."""

    def test_sorted_and_compact(self):
        assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'

    def test_hash_ignores_key_order(self):
        assert stable_hash({"x": 1, "y": 2}) == stable_hash({"y": 2, "x": 1})
        assert len(stable_hash({})) == 64


class TestRunReport:
    """Tests for run and stage reports."""

    def test_exit_codes(self):
        assert RunStatus.PASSED.exit_code == 0
        assert RunStatus.STRUCTURAL_FAILURE.exit_code == 1
        assert RunStatus.EXPECTED_NEGATIVE.exit_code == 2
        assert RunStatus.BUDGET_EXHAUSTED.exit_code == 3

    def test_stage_status(self):
        stage = StageReport("geometry", checks=[LemmaCheck("a", "ref", checked=1)])
        assert stage.passed
        stage.checks[0].record({"x": 1})
        assert stage.failing == ["a"]
        assert not StageReport("cover", error="boom").passed

    def test_hash_ignores_environment_and_time(self):
        first = RunReport({"k": 1}, "hash", created_at="2020-01-01")
        second = RunReport({"k": 1}, "hash", created_at="2030-01-01", environment={})
        assert first.report_hash == second.report_hash

    def test_hash_follows_stages(self):
        report = RunReport({"k": 1}, "hash")
        before = report.report_hash
        report.stages.append(StageReport("geometry"))
        assert report.report_hash != before

    def test_to_dict(self):
        report = RunReport({}, "hash", status=RunStatus.EXPECTED_NEGATIVE)
        data = report.to_dict()
        assert data["exit_code"] == 2
        assert data["status"] == "expected_negative"
        assert data["report_hash"] == report.report_hash


class TestRegressions:
    """Tests for freezing and comparing regression files."""

    def test_freeze(self):
        document = freeze_regressions(passing_report())
        assert document["constants"]["D1"] == 5
        assert document["constants_hash"] == stable_hash(passing_report()["constants"])

    def test_freeze_rejects_failing_report(self):
        report = {**passing_report(), "status": "structural_failure"}
        with pytest.raises(RegressionFileError):
            freeze_regressions(report)

    def test_freeze_requires_constants(self):
        with pytest.raises(RegressionFileError):
            freeze_regressions({**passing_report(), "constants": {}})

    def test_compare_identical(self):
        document = freeze_regressions(passing_report())
        assert compare_regressions(document, document) == {}

    def test_compare_classifies_fields(self):
        old = freeze_regressions(passing_report())
        new = json.loads(json.dumps(old))
        new["constants"]["D1"] = 6
        new["constants"]["cover"]["vertices"] = 41
        diff = compare_regressions(old, new)
        assert diff["D1"] == {"old": 5, "new": 6, "kind": "sampled"}
        assert diff["cover.vertices"]["kind"] == "structural"

    def test_compare_missing_field(self):
        old = freeze_regressions(passing_report())
        new = json.loads(json.dumps(old))
        del new["constants"]["delta_hat"]
        assert set(compare_regressions(old, new)) == {"delta_hat"}

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "regressions.json"
        document = freeze_regressions(passing_report())
        write_regressions(document, path)
        assert read_json(path) == document

    def test_read_rejects_non_objects(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(RegressionFileError):
            read_json(path)
        with pytest.raises(RegressionFileError):
            read_json(tmp_path / "missing.json")


class TestNegativeControl:
    """Tests for the perturbation stage of the pipeline."""

    def _report(self, config):
        return RunReport(config.model_dump(mode="json"), config.config_hash)

    def test_elliptic_deformation_is_an_expected_negative(self, automaton, ball):
        config = config_from_dict(SMALL_CONFIG, ["representation.t=-1/100", "verification.expected_negative=true"])
        report = self._report(config)
        _run_perturbation(report, automaton, ball, config, None, expected_negative=True)
        assert report.status == RunStatus.EXPECTED_NEGATIVE
        assert report.exit_code == 2
        assert report.stage("perturbation").error is not None
        assert report.notes

    def test_elliptic_deformation_fails_a_normal_run(self, automaton, ball):
        config = config_from_dict(SMALL_CONFIG, ["representation.t=-1/100"])
        report = self._report(config)
        _run_perturbation(report, automaton, ball, config, None, expected_negative=False)
        assert report.status == RunStatus.STRUCTURAL_FAILURE

    def test_earlier_failure_is_kept(self, automaton, ball):
        config = config_from_dict(SMALL_CONFIG, ["representation.t=-1/100"])
        report = self._report(config)
        report.status = RunStatus.BUDGET_EXHAUSTED
        _run_perturbation(report, automaton, ball, config, None, expected_negative=True)
        assert report.status == RunStatus.BUDGET_EXHAUSTED

    def test_budget_status_survives_a_failed_perturbation(self, automaton, ball):
        config = config_from_dict(SMALL_CONFIG, ["representation.t=-1/100"])
        report = self._report(config)
        report.status = RunStatus.BUDGET_EXHAUSTED
        _run_perturbation(report, automaton, ball, config, None, expected_negative=False)
        assert report.status == RunStatus.BUDGET_EXHAUSTED
        assert report.exit_code == 3

    def test_exhausted_word_sweep_is_a_budget_failure(self, automaton, ball, monkeypatch):
        sweep = LemmaCheck("V2", "short words in the ball", checked=1, details={"budget_exhausted": True})
        sweep.record({"reason": "word budget exhausted", "budget": 1, "words": 2})
        attempt = DeformationAttempt(deform("1/1600"), checks=[sweep.finish()])
        battery = PerturbationBattery([attempt], chosen=attempt, error="deformation fails the combinatorics checks")
        monkeypatch.setattr("app.harness.pipeline.run_perturbation_battery", lambda *args: battery)
        config = config_from_dict(SMALL_CONFIG)
        report = self._report(config)
        _run_perturbation(report, automaton, ball, config, None, expected_negative=False)
        assert report.status == RunStatus.BUDGET_EXHAUSTED
        assert report.exit_code == 3
        assert "budget" in report.notes[-1]


class TestRunStore:
    """Tests for locating the SQLite report store."""

    def test_file_store(self, tmp_path):
        assert store_file(f"sqlite+aiosqlite:///{tmp_path}/runs.db") == tmp_path / "runs.db"

    def test_memory_store(self):
        assert store_file("sqlite+aiosqlite:///:memory:") is None
