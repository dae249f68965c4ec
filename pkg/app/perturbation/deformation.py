"""The deformation family ρ_t and the classification of its commutator."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from app.group.matrices import TransformationType, classify, format_fraction, to_fraction
from app.group.representation import Representation, deformed_representation
from app.group.words import PERIPHERAL_WORD

logger = logging.getLogger(__name__)

DEFAULT_CANDIDATES = (
    Fraction(1, 100),
    Fraction(1, 400),
    Fraction(1, 1600),
    Fraction(1, 6400),
    Fraction(1, 25600),
)


@dataclass(frozen=True)
class Deformation:
    rep: Representation
    commutator: TransformationType

    @property
    def t(self) -> Fraction:
        return self.rep.t

    def to_dict(self) -> dict:
        c = self.rep.evaluate(PERIPHERAL_WORD)
        return {
            "t": format_fraction(self.t),
            "representation": self.rep.as_config(),
            "commutator": c.rows(),
            "commutator_trace": format_fraction(c.trace),
            "commutator_type": self.commutator.value,
        }


def deform(t: Union[Fraction, int, str]) -> Deformation:
    """ρ_t with the exact type of ρ_t(c)."""
    rep = deformed_representation(to_fraction(t))
    kind = classify(rep.evaluate(PERIPHERAL_WORD))
    logger.info(f"rho_t for t={rep.t}: commutator is {kind.value}")
    return Deformation(rep, kind)
