"""Pydantic schemas for group module."""
from typing import Optional

from pydantic import BaseModel, Field

from app.group.matrices import TransformationType


class EvaluateRequest(BaseModel):
    """Schema for evaluating a word under ρ_t."""
    word: str = Field(..., max_length=4096, examples=["a b a^-1 b^-1"])
    t: str = Field(default="0", examples=["1/100"])


class EvaluateResponse(BaseModel):
    """Schema for an evaluated word."""
    word: str
    reduced: str
    t: str
    matrix: list[list[str]]
    trace: str
    classification: TransformationType
    fixed_points: list[str]


class CosetRequest(BaseModel):
    word: str = Field(..., max_length=4096)


class CosetResponse(BaseModel):
    """Schema for a ⟨c⟩-coset decomposition g = rep · cᵏ."""
    word: str
    representative: str
    exponent: int
    in_peripheral: bool
    note: Optional[str] = None
