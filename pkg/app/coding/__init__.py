"""Strict and generalized codings, their geometry checks and finitary coders."""
from app.coding.exceptions import (
    CoderConstructionError,
    CodingError,
    CodingFailedError,
    NestingSearchExhaustedError,
)
from app.coding.coder import (
    Coding,
    CodingKind,
    CodingRules,
    Decoded,
    Preference,
    QGSequence,
    StandardRules,
    Step,
    check_nesting,
    code_point,
    decode,
)
from app.coding.tracking import (
    detect_jumps,
    element_distance,
    hausdorff_codings,
    measure_tracking,
    same_peripheral_coset,
    verify_backtracking,
)
from app.coding.nesting import NestingCertificate, NestingVariant, verify_uniform_nesting
from app.coding.finitary import FinitaryPointCoder, search_N, truncate_to_coder
from app.coding.service import (
    CodingBattery,
    CodingParameters,
    SamplePoint,
    compute_c_nest,
    run_coding_battery,
    sample_points,
)

__all__ = [
    "CodingError",
    "CodingFailedError",
    "CoderConstructionError",
    "NestingSearchExhaustedError",
    "Coding",
    "CodingKind",
    "CodingRules",
    "Decoded",
    "Preference",
    "QGSequence",
    "StandardRules",
    "Step",
    "check_nesting",
    "code_point",
    "decode",
    "detect_jumps",
    "element_distance",
    "hausdorff_codings",
    "measure_tracking",
    "same_peripheral_coset",
    "verify_backtracking",
    "NestingCertificate",
    "NestingVariant",
    "verify_uniform_nesting",
    "FinitaryPointCoder",
    "search_N",
    "truncate_to_coder",
    "CodingBattery",
    "CodingParameters",
    "SamplePoint",
    "compute_c_nest",
    "run_coding_battery",
    "sample_points",
]
