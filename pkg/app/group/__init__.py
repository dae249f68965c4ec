"""Free group F₂ = ⟨a, b⟩, its peripheral subgroup ⟨c⟩ and matrix representations."""
from app.group.words import (
    GroupElement,
    CosetDecomposition,
    parse_word,
    reduce,
    peripheral_coset_decompose,
)
from app.group.matrices import Matrix2, TransformationType, classify
from app.group.exceptions import (
    GroupError,
    WordParseError,
    RepresentationError,
    NotInvertibleError,
    FixedPointError,
)
from app.group.transformations import fixed_points, attracting_repelling
from app.group.representation import (
    Representation,
    PeripheralDescriptor,
    standard_representation,
    deformed_representation,
    evaluate,
)

__all__ = [
    "GroupElement",
    "CosetDecomposition",
    "parse_word",
    "reduce",
    "peripheral_coset_decompose",
    "Matrix2",
    "TransformationType",
    "classify",
    "GroupError",
    "WordParseError",
    "RepresentationError",
    "NotInvertibleError",
    "FixedPointError",
    "fixed_points",
    "attracting_repelling",
    "Representation",
    "PeripheralDescriptor",
    "standard_representation",
    "deformed_representation",
    "evaluate",
]
