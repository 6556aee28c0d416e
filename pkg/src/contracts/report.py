"""Звіти класифікації та вердикти замикання."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from src.contracts.enums import Verdict
from src.contracts.tensor import Expression

BucketKey = tuple[int, int, int]


@dataclass(slots=True)
class GradeBucket:
    """Комірка градуювання: (степінь π, похідний порядок, похідні на розмазуванні)."""

    momentum_power: int
    derivative_degree: int
    smearing_derivatives: int
    terms: Expression

    @property
    def key(self) -> BucketKey:
        return (self.momentum_power, self.derivative_degree, self.smearing_derivatives)

    def to_dict(self) -> dict[str, Any]:
        return {
            "momentum_power": self.momentum_power,
            "derivative_degree": self.derivative_degree,
            "smearing_derivatives": self.smearing_derivatives,
            "term_count": len(self.terms),
        }


@dataclass(slots=True)
class ReductionSite:
    """Одне місце підстановки ∇_b π^{ab} → 0."""

    term: str
    prefix: tuple[str, ...]
    open_label: str

    def to_dict(self) -> dict[str, Any]:
        return {"term": self.term, "prefix": list(self.prefix), "open_label": self.open_label}


@dataclass(slots=True)
class BracketOutcome:
    """Результат однієї дужки після класифікації та слабкої редукції."""

    name: str
    raw: Expression
    buckets: list[GradeBucket]
    kernels: dict[str, Expression]
    remainder: Expression
    log: list[ReductionSite] = field(default_factory=list)
    reconstructed: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "raw_terms": len(self.raw),
            "buckets": [b.to_dict() for b in self.buckets],
            "kernels": {k: v.to_dict() for k, v in self.kernels.items()},
            "remainder": self.remainder.to_dict(),
            "reconstructed": self.reconstructed,
            "log": [s.to_dict() for s in self.log],
        }


@dataclass(slots=True)
class ObstructionReport:
    """Вердикт замикання з сертифікатом перешкоди."""

    verdict: Verdict
    brackets: list[BracketOutcome] = field(default_factory=list)
    certificate: Expression | None = None
    certificate_bucket: BucketKey | None = None
    conditions: dict[str, Expression] = field(default_factory=dict)
    profile_hash: str = ""
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "profile_hash": self.profile_hash,
            "brackets": [b.to_dict() for b in self.brackets],
            "certificate": self.certificate.to_dict() if self.certificate is not None else None,
            "certificate_bucket": list(self.certificate_bucket)
            if self.certificate_bucket
            else None,
            "conditions": {k: v.to_dict() for k, v in self.conditions.items()},
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=False)


@dataclass(slots=True)
class LinearConditionReport:
    """Умови дивергенції та ротора для лінійного за імпульсом доданка."""

    divfree_residue: Expression
    curl_residue: Expression
    notes: list[str] = field(default_factory=list)
    profile_hash: str = ""

    @property
    def divfree_holds(self) -> bool:
        return self.divfree_residue.is_zero()

    @property
    def curl_holds(self) -> bool:
        return self.curl_residue.is_zero()

    @property
    def absorbable(self) -> bool:
        return self.divfree_holds and self.curl_holds

    def to_dict(self) -> dict[str, Any]:
        return {
            "divfree_holds": self.divfree_holds,
            "divfree_residue": self.divfree_residue.to_dict(),
            "curl_holds": self.curl_holds,
            "curl_residue": self.curl_residue.to_dict(),
            "absorbable": self.absorbable,
            "profile_hash": self.profile_hash,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)
