"""Truncated cusped space over F₂ with combinatorial horoballs on ⟨c⟩-cosets."""
from app.cusped.exceptions import (
    CuspedSpaceError,
    BallBudgetError,
    VertexNotInBallError,
    BallFileError,
    RegularizationError,
)
from app.cusped.vertices import (
    CayleyVertex,
    HoroVertex,
    IDENTITY_VERTEX,
    cayley_vertex,
    horo_vertex,
    horoball_cost,
)
from app.cusped.geodesics import GeodesicPath, horoball_transits, regularize
from app.cusped.ball import (
    CuspedBall,
    build_ball,
    ball_from_file,
    ball_to_file,
    norm_upper_bound,
)
from app.cusped.hyperbolicity import DeltaEstimate, estimate_delta
from app.cusped.lemmas import LemmaCheck, run_geometry_checks

__all__ = [
    "CuspedSpaceError",
    "BallBudgetError",
    "VertexNotInBallError",
    "BallFileError",
    "RegularizationError",
    "CayleyVertex",
    "HoroVertex",
    "IDENTITY_VERTEX",
    "cayley_vertex",
    "horo_vertex",
    "horoball_cost",
    "GeodesicPath",
    "horoball_transits",
    "regularize",
    "CuspedBall",
    "build_ball",
    "ball_from_file",
    "ball_to_file",
    "norm_upper_bound",
    "DeltaEstimate",
    "estimate_delta",
    "LemmaCheck",
    "run_geometry_checks",
]
