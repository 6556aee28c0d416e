"""Перелічення для контрактів тензорного рушія."""

from __future__ import annotations

from enum import Enum


class VariationClass(str, Enum):
    METRIC_BUILT = "metric-built"
    MOMENTUM = "momentum"
    SMEARING = "smearing"
    FORMAL_VARIATION = "formal-variation"
    CONSTANT = "constant"
    SPECIAL = "special"


class ConstraintKind(str, Enum):
    GR_HAMILTONIAN = "gr_hamiltonian"
    GR_KINETIC = "gr_kinetic"
    MOMENTUM_CONSTRAINT = "momentum_constraint"
    KINETIC_MOD = "kinetic_mod"
    POTENTIAL_MOD = "potential_mod"
    LINEAR_MOD = "linear_mod"
    DENSITY = "density"


class SpecialKind(str, Enum):
    XI = "Xi"
    A0 = "A0"
    A1 = "A1"
    A2 = "A2"
    F0 = "F0"
    DEWITT = "G"
    DEWITT_INVERSE = "DeWittInverse"


class OrderPolicy(str, Enum):
    CANONICAL = "canonical"
    DIVERGENCE = "divergence"


class Verdict(str, Enum):
    FIRST_CLASS = "first-class"
    SECOND_CLASS = "second-class"
    INCONCLUSIVE = "inconclusive"


class OutputFormat(str, Enum):
    TEXT = "text"
    LATEX = "latex"
    JSON = "json"


class Wrt(str, Enum):
    METRIC = "g"
    MOMENTUM = "pi"


def parse_enum(enum_cls: type[Enum], raw: str) -> Enum:
    """Повертає член переліку за значенням або кидає ValueError зі списком дозволених."""
    for member in enum_cls:
        if raw == member.value:
            return member
    allowed = ", ".join(m.value for m in enum_cls)
    raise ValueError(f"Unsupported {enum_cls.__name__} '{raw}'. Allowed: {allowed}")
