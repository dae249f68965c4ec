"""Database models."""
import enum
from datetime import datetime

from sqlalchemy import String, Text, Enum, DateTime, Integer
from sqlalchemy.orm import Mapped, mapped_column

from app.db.database import Base


class RunStatus(str, enum.Enum):
    """Outcome of a verification pipeline run."""
    PASSED = "passed"
    STRUCTURAL_FAILURE = "structural_failure"
    EXPECTED_NEGATIVE = "expected_negative"
    BUDGET_EXHAUSTED = "budget_exhausted"

    @property
    def exit_code(self) -> int:
        """CLI exit code for this status."""
        return {
            RunStatus.PASSED: 0,
            RunStatus.STRUCTURAL_FAILURE: 1,
            RunStatus.EXPECTED_NEGATIVE: 2,
            RunStatus.BUDGET_EXHAUSTED: 3,
        }[self]


class RunRecord(Base):
    """Stored pipeline report. Rows are only ever inserted."""
    __tablename__ = "run_records"

    id: Mapped[int] = mapped_column(primary_key=True, index=True)
    status: Mapped[RunStatus] = mapped_column(Enum(RunStatus))
    exit_code: Mapped[int] = mapped_column(Integer)
    config_hash: Mapped[str] = mapped_column(String(64), index=True)
    report_hash: Mapped[str] = mapped_column(String(64))
    report: Mapped[str] = mapped_column(Text)
    created_at: Mapped[datetime] = mapped_column(DateTime, default=datetime.utcnow)
