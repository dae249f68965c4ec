"""Group API router."""
from fastapi import APIRouter, HTTPException, status

from app.group.exceptions import GroupError
from app.group.matrices import TransformationType, classify, format_fraction, to_fraction
from app.group.representation import deformed_representation
from app.group.schemas import CosetRequest, CosetResponse, EvaluateRequest, EvaluateResponse
from app.group.transformations import fixed_points
from app.group.words import format_word, parse_word, peripheral_coset_decompose, reduce


router = APIRouter()


@router.post("/evaluate", response_model=EvaluateResponse)
async def evaluate_word(request: EvaluateRequest) -> EvaluateResponse:
    """Evaluate a word under ρ_t and classify the result."""
    try:
        t = to_fraction(request.t)
        rep = deformed_representation(t)
        word = parse_word(request.word)
        matrix = rep.evaluate(word)
        kind = classify(matrix)
        points = [] if kind == TransformationType.IDENTITY else fixed_points(matrix)
    except (GroupError, ValueError, ZeroDivisionError) as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e),
        )

    return EvaluateResponse(
        word=format_word(word),
        reduced=format_word(reduce(word)),
        t=format_fraction(t),
        matrix=matrix.rows(),
        trace=format_fraction(matrix.trace),
        classification=kind,
        fixed_points=[str(p) for p in points],
    )


@router.post("/coset", response_model=CosetResponse)
async def coset_decomposition(request: CosetRequest) -> CosetResponse:
    """Decompose an element as rep · cᵏ with rep shortest in its coset."""
    try:
        word = parse_word(request.word)
    except GroupError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e),
        )

    rep, exponent = peripheral_coset_decompose(word)
    return CosetResponse(
        word=format_word(reduce(word)),
        representative=format_word(rep),
        exponent=exponent,
        in_peripheral=rep == "",
    )
