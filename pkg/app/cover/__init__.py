"""Expanded-neighborhood cover of the circle and the coding automaton built on it."""
from app.cover.exceptions import (
    CoverError,
    ConstantsError,
    CoverConstructionError,
    CoverFileError,
    EdgeNestingError,
)
from app.cover.constants import (
    Constants,
    FundamentalArc,
    build_K_p,
    choose_epsilon,
    estimate_D,
    uniform_constant,
)
from app.cover.atoms import (
    AtomKind,
    CoverAtom,
    ParabolicShape,
    build_conical_atom,
    build_parabolic_atom,
    check_stable_intersections,
    verify_atoms,
)
from app.cover.service import (
    Cover,
    CoverParameters,
    build_cover,
    cover_from_file,
    cover_to_file,
    initial_constants,
    stabilize_and_select,
)
from app.cover.automaton import (
    Automaton,
    EdgeCertificate,
    automaton_from_file,
    automaton_to_file,
    build_automaton,
    compute_epsilon_z,
    verify_E1,
)

__all__ = [
    "CoverError",
    "ConstantsError",
    "CoverConstructionError",
    "CoverFileError",
    "EdgeNestingError",
    "Constants",
    "FundamentalArc",
    "build_K_p",
    "choose_epsilon",
    "estimate_D",
    "uniform_constant",
    "AtomKind",
    "CoverAtom",
    "ParabolicShape",
    "build_conical_atom",
    "build_parabolic_atom",
    "check_stable_intersections",
    "verify_atoms",
    "Cover",
    "CoverParameters",
    "build_cover",
    "cover_from_file",
    "cover_to_file",
    "initial_constants",
    "stabilize_and_select",
    "Automaton",
    "EdgeCertificate",
    "automaton_from_file",
    "automaton_to_file",
    "build_automaton",
    "compute_epsilon_z",
    "verify_E1",
]
