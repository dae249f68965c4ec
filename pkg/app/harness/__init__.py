"""Experiment configuration, pipeline orchestration, reports and regression files."""
from app.harness.exceptions import ConfigError, HarnessError, RegressionFileError
from app.harness.experiment import (
    ExperimentConfig,
    apply_overrides,
    canonical_json,
    config_from_dict,
    load_config,
    stable_hash,
)
from app.harness.report import RunReport, StageReport, environment_fingerprint
from app.harness.pipeline import load_or_build_ball, run_pipeline
from app.harness.regressions import (
    compare_regressions,
    freeze_regressions,
    read_json,
    write_regressions,
)

__all__ = [
    "HarnessError",
    "ConfigError",
    "RegressionFileError",
    "ExperimentConfig",
    "apply_overrides",
    "canonical_json",
    "config_from_dict",
    "load_config",
    "stable_hash",
    "RunReport",
    "StageReport",
    "environment_fingerprint",
    "load_or_build_ball",
    "run_pipeline",
    "compare_regressions",
    "freeze_regressions",
    "read_json",
    "write_regressions",
]
