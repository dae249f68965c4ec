"""Run service layer: execute the pipeline off the event loop and store its report."""
import asyncio
import json
import logging
from typing import Optional

from sqlalchemy import func, select
from sqlalchemy.ext.asyncio import AsyncSession

from app.db.models import RunRecord
from app.harness.experiment import ExperimentConfig
from app.harness.pipeline import run_pipeline
from app.harness.report import RunReport

logger = logging.getLogger(__name__)


def record_from_report(report: RunReport) -> RunRecord:
    return RunRecord(
        status=report.status,
        exit_code=report.exit_code,
        config_hash=report.config_hash,
        report_hash=report.report_hash,
        report=json.dumps(report.to_dict(), default=str),
    )


async def create_run(db: AsyncSession, config: ExperimentConfig) -> RunRecord:
    """Run the pipeline in a worker thread and append its report."""
    report = await asyncio.to_thread(run_pipeline, config)
    record = record_from_report(report)
    db.add(record)
    await db.commit()
    await db.refresh(record)
    logger.info(f"run {record.id} stored: {record.status.value}")
    return record


async def list_runs(
    db: AsyncSession,
    skip: int = 0,
    limit: int = 20,
) -> tuple[list[RunRecord], int]:
    """Stored runs, newest first."""
    count_result = await db.execute(select(func.count(RunRecord.id)))
    total = count_result.scalar() or 0

    result = await db.execute(
        select(RunRecord).order_by(RunRecord.id.desc()).offset(skip).limit(limit)
    )
    return list(result.scalars().all()), total


async def get_run(db: AsyncSession, run_id: int) -> Optional[RunRecord]:
    result = await db.execute(select(RunRecord).where(RunRecord.id == run_id))
    return result.scalar_one_or_none()
