"""Deformations ρ_t, the cusp semi-conjugacy φ_p, same-combinatorics checks and φ."""
from app.perturbation.exceptions import (
    ParabolicSemiconjugacyError,
    PerturbationError,
    SameCombinatoricsError,
)
from app.perturbation.deformation import DEFAULT_CANDIDATES, Deformation, deform
from app.perturbation.parabolic import (
    ParabolicSemiconjugacy,
    build_phi_p,
    fiber,
    phi_z,
    phi_z_inverse_arc,
)
from app.perturbation.combinatorics import (
    PerturbedCover,
    build_perturbed_cover,
    check_same_combinatorics,
    check_V_conditions,
)
from app.perturbation.rho_coding import RhoRules, rho_code_point
from app.perturbation.semiconjugacy import (
    CollapseOracle,
    FiberValue,
    PhiValue,
    Semiconjugacy,
    SemiconjugacyReport,
    compute_Phi,
    evaluate_phi,
    oracle_collapse_map,
    verify_semiconjugacy,
    write_phi_csv,
)
from app.perturbation.service import (
    DeformationAttempt,
    PerturbationBattery,
    PerturbationParameters,
    attempt_deformation,
    check_phi_p,
    run_perturbation_battery,
    select_deformation,
)

__all__ = [
    "PerturbationError",
    "ParabolicSemiconjugacyError",
    "SameCombinatoricsError",
    "DEFAULT_CANDIDATES",
    "Deformation",
    "deform",
    "ParabolicSemiconjugacy",
    "build_phi_p",
    "fiber",
    "phi_z",
    "phi_z_inverse_arc",
    "PerturbedCover",
    "build_perturbed_cover",
    "check_same_combinatorics",
    "check_V_conditions",
    "RhoRules",
    "rho_code_point",
    "CollapseOracle",
    "FiberValue",
    "PhiValue",
    "Semiconjugacy",
    "SemiconjugacyReport",
    "compute_Phi",
    "evaluate_phi",
    "oracle_collapse_map",
    "verify_semiconjugacy",
    "write_phi_csv",
    "DeformationAttempt",
    "PerturbationBattery",
    "PerturbationParameters",
    "attempt_deformation",
    "check_phi_p",
    "run_perturbation_battery",
    "select_deformation",
]
