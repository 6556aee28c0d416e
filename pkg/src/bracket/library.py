"""Бібліотека іменованих в'язей (config/constraints.json)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from src.contracts.enums import ConstraintKind, parse_enum
from src.contracts.functional import ConstraintSpec
from src.shared.config_loader import load_json

log = logging.getLogger(__name__)

DEFAULT_LIBRARY = Path(__file__).resolve().parents[2] / "config" / "constraints.json"

_EXPRESSION_PARAMS = ("B", "V", "beta", "density")


def spec_from_dict(row: dict[str, Any]) -> ConstraintSpec:
    """ConstraintSpec з рядка маніфесту; вирази лишаються текстом до make_constraint.

    Raises:
        ValueError: невідомий ``kind`` (повідомлення містить дозволені значення).
    """
    kind = parse_enum(ConstraintKind, str(row.get("kind", "")))
    params: dict[str, Any] = {k: row[k] for k in _EXPRESSION_PARAMS if k in row}
    for key in ("n", "m"):
        if key in row:
            params[key] = int(row[key])
    return ConstraintSpec(kind, params, str(row.get("name", "")))


@dataclass(slots=True)
class ConstraintLibrary:
    """Іменовані специфікації та набори (suites) з маніфесту."""

    specs: dict[str, ConstraintSpec] = field(default_factory=dict)
    suites: dict[str, list[str]] = field(default_factory=dict)

    def get(self, name: str) -> ConstraintSpec:
        try:
            return self.specs[name]
        except KeyError:
            allowed = ", ".join(sorted(self.specs))
            raise ValueError(f"Unknown constraint '{name}'. Allowed: {allowed}") from None

    def resolve(self, item: str | dict[str, Any]) -> ConstraintSpec:
        """Ім'я з бібліотеки або вбудований рядок маніфесту."""
        return self.get(item) if isinstance(item, str) else spec_from_dict(item)

    def suite(self, name: str) -> list[ConstraintSpec]:
        if name not in self.suites:
            allowed = ", ".join(sorted(self.suites))
            raise ValueError(f"Unknown suite '{name}'. Allowed: {allowed}")
        return [self.get(n) for n in self.suites[name]]


def load_library(path: str | Path = DEFAULT_LIBRARY) -> ConstraintLibrary:
    data = load_json(path)
    lib = ConstraintLibrary()
    for row in data.get("constraints", []):
        spec = spec_from_dict(row)
        lib.specs[spec.name] = spec
    lib.suites = {k: list(v) for k, v in (data.get("suites") or {}).items()}
    log.debug("Loaded %d constraints from %s", len(lib.specs), Path(path).name)
    return lib
