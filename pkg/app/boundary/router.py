"""Boundary API router."""
from fastapi import APIRouter, HTTPException, status

from app.boundary.exceptions import BoundaryError
from app.boundary.points import BoundaryPoint, act, chordal_dist, chordal_dist_sq
from app.boundary.schemas import ActRequest, ActResponse, DistanceRequest, DistanceResponse
from app.group.exceptions import GroupError
from app.group.matrices import to_fraction
from app.group.representation import deformed_representation
from app.group.words import format_word, parse_word


router = APIRouter()


@router.post("/distance", response_model=DistanceResponse)
async def distance(request: DistanceRequest) -> DistanceResponse:
    """Exact squared chordal distance and its float value."""
    try:
        p = BoundaryPoint.parse(request.p)
        q = BoundaryPoint.parse(request.q)
    except BoundaryError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e),
        )

    return DistanceResponse(
        p=str(p),
        q=str(q),
        distance_sq=str(chordal_dist_sq(p, q)),
        distance=chordal_dist(p, q),
    )


@router.post("/act", response_model=ActResponse)
async def act_on_point(request: ActRequest) -> ActResponse:
    """Image of a rational point under ρ_t(word)."""
    try:
        point = BoundaryPoint.parse(request.point)
        word = parse_word(request.word)
        matrix = deformed_representation(to_fraction(request.t)).evaluate(word)
    except (BoundaryError, GroupError, ValueError, ZeroDivisionError) as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e),
        )

    image = act(matrix, point)
    return ActResponse(word=format_word(word), point=str(point), image=str(image), angle=image.angle)
