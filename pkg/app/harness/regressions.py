"""Regression files: the derived constants of a passing run, compared field by field."""
import json
import logging
from pathlib import Path
from typing import Any

from app.db.models import RunStatus
from app.harness.exceptions import RegressionFileError
from app.harness.experiment import stable_hash

logger = logging.getLogger(__name__)

REGRESSION_VERSION = 1

# Fields that depend on the sampling seed; everything else is structural.
SAMPLED_FIELDS = frozenset(
    {"delta_hat", "D", "R_track", "D0", "D1", "D2", "J", "N", "c_nest", "epsilon_prime", "epsilon", "chosen_t"}
)


def _flatten(value: Any, prefix: str = "") -> dict[str, Any]:
    if isinstance(value, dict):
        flat: dict[str, Any] = {}
        for key in sorted(value):
            flat.update(_flatten(value[key], f"{prefix}.{key}" if prefix else str(key)))
        return flat
    return {prefix: value}


def freeze_regressions(report: dict) -> dict:
    """The regression document for a report produced by ``RunReport.to_dict``."""
    if report.get("status") != RunStatus.PASSED.value:
        raise RegressionFileError(f"Only passing reports are frozen, this one is {report.get('status')}")
    constants = report.get("constants")
    if not constants:
        raise RegressionFileError("Report carries no constants block")
    return {
        "version": REGRESSION_VERSION,
        "config_hash": report["config_hash"],
        "report_hash": report.get("report_hash"),
        "constants": constants,
        "constants_hash": stable_hash(constants),
    }


def compare_regressions(old: dict, new: dict) -> dict[str, dict]:
    """Field-exact diff of two regression documents; empty when they agree."""
    first = _flatten(old.get("constants", {}))
    second = _flatten(new.get("constants", {}))
    diff = {}
    for key in sorted(first.keys() | second.keys()):
        if first.get(key, None) == second.get(key, None) and (key in first) == (key in second):
            continue
        top = key.split(".")[0]
        diff[key] = {
            "old": first.get(key),
            "new": second.get(key),
            "kind": "sampled" if top in SAMPLED_FIELDS else "structural",
        }
    if diff:
        logger.info(f"regressions differ in {len(diff)} fields")
    return diff


def write_regressions(document: dict, path: Path) -> None:
    Path(path).write_text(json.dumps(document, indent=1, sort_keys=True))


def read_json(path: Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise RegressionFileError(f"Cannot read {path}: {e}") from e
    if not isinstance(data, dict):
        raise RegressionFileError(f"{path} does not hold a JSON object")
    return data
