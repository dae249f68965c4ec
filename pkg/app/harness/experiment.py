"""Experiment configuration: one JSON document, overridable field by field."""
import hashlib
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Optional, Sequence

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError, field_validator

from app.coding.finitary import GENERATOR_SET
from app.coding.service import CodingParameters
from app.cover.service import CoverParameters
from app.group.exceptions import GroupError
from app.group.matrices import to_fraction
from app.group.representation import Representation
from app.group.words import parse_word
from app.harness.exceptions import ConfigError
from app.perturbation.deformation import DEFAULT_CANDIDATES
from app.perturbation.service import PerturbationParameters

logger = logging.getLogger(__name__)


def _positive_fraction(value: str) -> str:
    try:
        parsed = to_fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {value!r}") from e
    if parsed <= 0:
        raise ValueError("must be positive")
    return value


PositiveFraction = Annotated[str, AfterValidator(_positive_fraction)]


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=str)


def stable_hash(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", coerce_numbers_to_str=True)


class RepresentationBlock(_Block):
    """ρ₀ and the deformation parameters to try."""
    a: list[list[str]] = [["1", "1"], ["1", "2"]]
    b: list[list[str]] = [["1", "-1"], ["-1", "2"]]
    t_candidates: list[PositiveFraction] = Field(
        default_factory=lambda: [str(t) for t in DEFAULT_CANDIDATES], min_length=1
    )
    t: Optional[str] = Field(default=None, description="Run this deformation only, skipping selection")

    @field_validator("t")
    @classmethod
    def t_rational(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            try:
                to_fraction(value)
            except (ValueError, ZeroDivisionError) as e:
                raise ValueError(f"not a rational number: {value!r}") from e
        return value

    def representation(self) -> Representation:
        return Representation.from_config({"a": self.a, "b": self.b})


class GeometryBlock(_Block):
    ball_radius: int = Field(default=10, ge=2)
    depth_cap: Optional[int] = Field(default=None, ge=2)
    delta_sample: int = Field(default=200, gt=0)
    geometry_samples: int = Field(default=1000, gt=0)
    metric_samples: int = Field(default=10_000, gt=0)
    seed: int = 0


class CoverBlock(_Block):
    epsilon_target: PositiveFraction = "1/10"
    grid_size: int = Field(default=256, ge=8)
    label_bound: int = Field(default=64, gt=0, description="K_lab")
    code_cap: int = Field(default=64, gt=0, description="K_code")
    d_sample_size: int = Field(default=256, gt=0)
    label_length: int = Field(default=5, gt=0)
    max_power: int = Field(default=24, gt=0)
    max_level: int = Field(default=2, ge=0)
    enlarge_fraction: PositiveFraction = "1/4"


class VerificationBlock(_Block):
    sample_size: int = Field(default=1000, gt=0)
    parabolic_length: int = Field(default=3, ge=0)
    pair_count: int = Field(default=200, gt=0)
    N_max: int = Field(default=32, gt=0)
    K_max: int = Field(default=64, gt=0)
    F: list[str] = Field(default_factory=lambda: list(GENERATOR_SET))
    c_nest_sample: int = Field(default=256, gt=0)
    grid: int = Field(default=2048, ge=16)
    tol: Optional[float] = Field(default=None, gt=0)
    phi_samples: int = Field(default=50, gt=0)
    oracle_level: int = Field(default=8, ge=1)
    exponent_cap: int = Field(default=200, gt=0)
    word_limit: int = Field(default=4096, gt=0)
    expected_negative: bool = False

    @field_validator("F")
    @classmethod
    def words_parse(cls, value: list[str]) -> list[str]:
        for word in value:
            try:
                parse_word(word)
            except GroupError as e:
                raise ValueError(str(e)) from e
        return value


class ExperimentConfig(_Block):
    """Every field defaults to the shipped reference configuration."""

    representation: RepresentationBlock = Field(default_factory=RepresentationBlock)
    geometry: GeometryBlock = Field(default_factory=GeometryBlock)
    cover: CoverBlock = Field(default_factory=CoverBlock)
    verification: VerificationBlock = Field(default_factory=VerificationBlock)

    @property
    def config_hash(self) -> str:
        return stable_hash(self.model_dump(mode="json"))

    @property
    def fixed_t(self) -> Optional[Fraction]:
        t = self.representation.t
        return None if t is None else to_fraction(t)

    def cover_parameters(self) -> CoverParameters:
        return CoverParameters(
            grid_size=self.cover.grid_size,
            label_bound=self.cover.label_bound,
            label_length=self.cover.label_length,
            max_power=self.cover.max_power,
            enlarge_fraction=to_fraction(self.cover.enlarge_fraction),
            max_level=self.cover.max_level,
        )

    def coding_parameters(self) -> CodingParameters:
        v = self.verification
        return CodingParameters(
            sample_size=v.sample_size,
            parabolic_length=v.parabolic_length,
            cap=self.cover.code_cap,
            pair_count=v.pair_count,
            N_max=v.N_max,
            K_max=v.K_max,
            c_nest_sample=v.c_nest_sample,
            F=tuple(parse_word(word) for word in v.F),
            seed=self.geometry.seed,
        )

    def perturbation_parameters(self) -> PerturbationParameters:
        v = self.verification
        return PerturbationParameters(
            candidates=tuple(to_fraction(t) for t in self.representation.t_candidates),
            exponent_cap=v.exponent_cap,
            word_limit=v.word_limit,
            grid=v.grid,
            tol=v.tol,
            sample_count=v.phi_samples,
            oracle_level=v.oracle_level,
            cap=self.cover.code_cap,
            seed=self.geometry.seed,
        )


def _field_errors(error: ValidationError) -> list[dict]:
    return [
        {"field": ".".join(str(part) for part in item["loc"]) or "<root>", "message": item["msg"]}
        for item in error.errors()
    ]


def parse_override(text: str) -> tuple[list[str], Any]:
    """``block.field=value``; the value is read as JSON when it parses, else as a string."""
    path, sep, raw = text.partition("=")
    if not sep or not path.strip():
        raise ConfigError(f"Override '{text}' is not of the form block.field=value", [{"field": text, "message": "missing '='"}])
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return [part.strip() for part in path.split(".")], value


def apply_overrides(data: dict, overrides: Sequence[str]) -> dict:
    for text in overrides:
        path, value = parse_override(text)
        target = data
        for part in path[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(f"Override '{text}' descends into a non-object", [{"field": ".".join(path), "message": "not an object"}])
        target[path[-1]] = value
    return data


def config_from_dict(data: dict, overrides: Sequence[str] = ()) -> ExperimentConfig:
    data = apply_overrides(json.loads(json.dumps(data)), overrides)
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        errors = _field_errors(e)
        summary = "; ".join(f"{item['field']}: {item['message']}" for item in errors)
        raise ConfigError(f"Invalid experiment config: {summary}", errors) from e
    try:
        config.representation.representation()
    except GroupError as e:
        raise ConfigError(str(e), [{"field": "representation", "message": str(e)}]) from e
    return config


def load_config(path: Optional[Path] = None, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """The config at ``path`` (the reference config when None) with overrides applied."""
    data: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(
                f"Config {path} is not valid JSON: {e.msg} at line {e.lineno}, column {e.colno}",
                [{"field": "<json>", "message": e.msg, "line": e.lineno, "column": e.colno}],
            ) from e
        if not isinstance(data, dict):
            raise ConfigError(f"Config {path} must hold a JSON object")
    config = config_from_dict(data, overrides)
    logger.info(f"experiment config {config.config_hash[:12]} loaded ({len(overrides)} overrides)")
    return config
