"""Run reports and the report hash."""
import platform
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from typing import Optional

from app.cusped.lemmas import LemmaCheck
from app.db.models import RunStatus
from app.harness.experiment import stable_hash

FINGERPRINT_PACKAGES = ("numpy", "networkx", "pydantic", "fastapi", "sqlalchemy")


def environment_fingerprint() -> dict:
    versions = {}
    for name in FINGERPRINT_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = None
    return {
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "packages": versions,
    }


@dataclass
class StageReport:
    """Checks and measurements of one pipeline stage."""

    name: str
    checks: list[LemmaCheck] = field(default_factory=list)
    measured: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)
    error: Optional[str] = None
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.error is None and all(check.passed for check in self.checks)

    @property
    def failing(self) -> list[str]:
        return [check.name for check in self.checks if not check.passed]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "error": self.error,
            "checks": [check.to_dict() for check in self.checks],
            "measured": self.measured,
            "artifacts": self.artifacts,
        }


@dataclass
class RunReport:
    config: dict
    config_hash: str
    stages: list[StageReport] = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    status: RunStatus = RunStatus.PASSED
    notes: list[str] = field(default_factory=list)
    environment: dict = field(default_factory=environment_fingerprint)
    created_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    @property
    def exit_code(self) -> int:
        return self.status.exit_code

    def stage(self, name: str) -> Optional[StageReport]:
        return next((stage for stage in self.stages if stage.name == name), None)

    def deterministic_content(self) -> dict:
        """Everything except the environment, timestamps and timings."""
        return {
            "config": self.config,
            "config_hash": self.config_hash,
            "status": self.status.value,
            "stages": [stage.to_dict() for stage in self.stages],
            "constants": self.constants,
            "notes": self.notes,
        }

    @property
    def report_hash(self) -> str:
        return stable_hash(self.deterministic_content())

    def to_dict(self) -> dict:
        return {
            **self.deterministic_content(),
            "exit_code": self.exit_code,
            "report_hash": self.report_hash,
            "environment": self.environment,
            "created_at": self.created_at,
            "timings": {stage.name: round(stage.seconds, 3) for stage in self.stages},
        }
