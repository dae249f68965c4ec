"""Pydantic schemas for boundary module."""
from pydantic import BaseModel, Field


class DistanceRequest(BaseModel):
    """Schema for the chordal distance of two points written as ``x:y``."""
    p: str = Field(..., examples=["0:1"])
    q: str = Field(..., examples=["1:3"])


class DistanceResponse(BaseModel):
    p: str
    q: str
    distance_sq: str
    distance: float


class ActRequest(BaseModel):
    """Schema for applying ρ_t(word) to a point."""
    word: str = Field(..., max_length=4096, examples=["a b"])
    point: str = Field(..., examples=["1:0"])
    t: str = Field(default="0", examples=["1/100"])


class ActResponse(BaseModel):
    word: str
    point: str
    image: str
    angle: float
