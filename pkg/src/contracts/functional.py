"""Розмазані функціонали та специфікації в'язей."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from src.contracts.enums import ConstraintKind
from src.contracts.tensor import Expression, Factor, Term


@dataclass(frozen=True, slots=True)
class SmearedFunctional:
    """∫ (розмазування)·(густина) з густиною ваги один.

    Для векторного розмазування ξ^a густина має один вільний нижній індекс
    з тією ж міткою, що й слот ``smearing``.
    """

    density: Expression
    smearing: Factor | None = None
    label: str = ""

    def integrand(self) -> Expression:
        """Підінтегральний вираз; без ``smearing`` густина вже містить розмазування."""
        if self.smearing is None:
            return self.density
        return Expression.of([Term.of(1, self.smearing)]) * self.density


@dataclass(frozen=True, slots=True)
class ConstraintSpec:
    """Специфікація в'язі: тип та параметри.

    ``params`` для kinetic_mod: ``B`` (Expression), ``n``, ``m``; для
    potential_mod: ``V``; для linear_mod: ``beta``; для density: ``density``.
    """

    kind: ConstraintKind
    params: dict[str, Any] = field(default_factory=dict)
    name: str = ""

    def __hash__(self) -> int:
        return hash((self.kind, self.name))

    def display_name(self) -> str:
        return self.name or self.kind.value
