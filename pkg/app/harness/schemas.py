"""Pydantic schemas for the runs API."""
import json
from datetime import datetime

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.db.models import RunStatus


class RunRequest(BaseModel):
    """Schema for starting a run: a config document plus block.field=value overrides."""
    config: dict = Field(default_factory=dict)
    overrides: list[str] = Field(default_factory=list, examples=[["geometry.ball_radius=6"]])


class RunSummary(BaseModel):
    """Schema for a stored run without its report."""
    id: int
    status: RunStatus
    exit_code: int
    config_hash: str
    report_hash: str
    created_at: datetime
    model_config = ConfigDict(from_attributes=True)


class RunDetail(RunSummary):
    report: dict

    @field_validator("report", mode="before")
    @classmethod
    def parse_report(cls, value):
        if isinstance(value, str):
            return json.loads(value)
        return value


class RunListResponse(BaseModel):
    runs: list[RunSummary]
    total: int
