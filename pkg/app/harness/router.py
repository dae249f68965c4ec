"""Runs API router."""
from typing import Annotated

from fastapi import APIRouter, Depends, HTTPException, status
from sqlalchemy.ext.asyncio import AsyncSession

from app.db.database import get_db
from app.harness import service
from app.harness.exceptions import ConfigError
from app.harness.experiment import config_from_dict
from app.harness.schemas import RunDetail, RunListResponse, RunRequest, RunSummary


router = APIRouter()


@router.post("", response_model=RunDetail, status_code=status.HTTP_201_CREATED)
async def create_run(
    request: RunRequest,
    db: Annotated[AsyncSession, Depends(get_db)],
) -> RunDetail:
    """Run the verification pipeline and store the report."""
    try:
        config = config_from_dict(request.config, request.overrides)
    except ConfigError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail={"message": str(e), "errors": e.errors},
        )

    record = await service.create_run(db, config)
    return RunDetail.model_validate(record)


@router.get("", response_model=RunListResponse)
async def list_runs(
    db: Annotated[AsyncSession, Depends(get_db)],
    skip: int = 0,
    limit: int = 20,
) -> RunListResponse:
    """List stored runs."""
    runs, total = await service.list_runs(db, skip, limit)
    return RunListResponse(
        runs=[RunSummary.model_validate(r) for r in runs],
        total=total,
    )


@router.get("/{run_id}", response_model=RunDetail)
async def get_run(
    run_id: int,
    db: Annotated[AsyncSession, Depends(get_db)],
) -> RunDetail:
    """Get a stored run with its full report."""
    record = await service.get_run(db, run_id)

    if not record:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail="Run not found",
        )

    return RunDetail.model_validate(record)
