"""Модель тензорного виразу: Index, Factor, Term, Expression.

Вирази незмінні (frozen dataclasses), тому їх можна безпечно ділити між
потоками. Усі перевірки правил індексів виконуються в конструкторі Term.
"""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from src.contracts.errors import SignatureError, StructureError

FRESH_PREFIX = "#"


def fresh_label(used: set[str]) -> str:
    """Повертає нову мітку ``#n``, якої немає в ``used``, і додає її туди."""
    n = len(used) + 1
    while f"{FRESH_PREFIX}{n}" in used:
        n += 1
    label = f"{FRESH_PREFIX}{n}"
    used.add(label)
    return label


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(raw: str | int | Fraction) -> Fraction:
    if isinstance(raw, Fraction):
        return raw
    return Fraction(raw)


# ═══════════════════════════════════════════════════════════════════
#  Index
# ═══════════════════════════════════════════════════════════════════


@dataclass(frozen=True, slots=True, order=True)
class Index:
    """Абстрактний індекс: мітка та варіантність (``up=True`` — верхній)."""

    label: str
    up: bool

    def __str__(self) -> str:
        return ("^" if self.up else "_") + self.label

    def flipped(self) -> Index:
        return Index(self.label, not self.up)

    @classmethod
    def parse(cls, raw: str) -> Index:
        """Розбирає рядок ``^a`` / ``_a``.

        Raises:
            StructureError: якщо немає префікса варіантності або мітки.
        """
        if len(raw) < 2 or raw[0] not in "^_":
            raise StructureError(f"Bad index '{raw}'. Expected '^label' or '_label'", raw)
        return cls(raw[1:], raw[0] == "^")


def down(label: str) -> Index:
    return Index(label, False)


def up(label: str) -> Index:
    return Index(label, True)


# ═══════════════════════════════════════════════════════════════════
#  Factor
# ═══════════════════════════════════════════════════════════════════


@dataclass(frozen=True, slots=True)
class Factor:
    """Одне входження тензорного символу.

    ``derivs`` — мітки коваріантних похідних (завжди нижні), від зовнішньої
    до внутрішньої: ``derivs=("i", "j")`` означає ∇_i ∇_j X.
    """

    sym: str
    slots: tuple[Index, ...] = ()
    derivs: tuple[str, ...] = ()

    def indices(self) -> list[Index]:
        """Усі індекси фактора: спершу похідні, потім слоти."""
        return [Index(d, False) for d in self.derivs] + list(self.slots)

    def labels(self) -> list[str]:
        return list(self.derivs) + [i.label for i in self.slots]

    def relabel(self, mapping: Mapping[str, str]) -> Factor:
        if not mapping:
            return self
        return Factor(
            self.sym,
            tuple(Index(mapping.get(i.label, i.label), i.up) for i in self.slots),
            tuple(mapping.get(d, d) for d in self.derivs),
        )

    def differentiate(self, label: str) -> Factor:
        """Додає зовнішню похідну ∇_label."""
        return Factor(self.sym, self.slots, (label, *self.derivs))

    def bare(self) -> Factor:
        return Factor(self.sym, self.slots)

    def with_derivs(self, derivs: Iterable[str]) -> Factor:
        return Factor(self.sym, self.slots, tuple(derivs))

    def __str__(self) -> str:
        core = self.sym
        if self.slots:
            core += "[" + " ".join(str(i) for i in self.slots) + "]"
        for d in reversed(self.derivs):
            core = f"D(_{d}, {core})"
        return core

    def to_dict(self) -> dict[str, Any]:
        return {
            "sym": self.sym,
            "derivs": [f"_{d}" for d in self.derivs],
            "slots": [str(i) for i in self.slots],
        }

    @classmethod
    def from_dict(cls, row: Mapping[str, Any]) -> Factor:
        derivs = []
        for raw in row.get("derivs", []):
            idx = Index.parse(raw)
            if idx.up:
                raise StructureError(f"Derivative index must be down: '{raw}'", idx.label)
            derivs.append(idx.label)
        return cls(
            sym=row["sym"],
            slots=tuple(Index.parse(s) for s in row.get("slots", [])),
            derivs=tuple(derivs),
        )


# ═══════════════════════════════════════════════════════════════════
#  Term
# ═══════════════════════════════════════════════════════════════════


@dataclass(frozen=True, slots=True)
class Term:
    """Моном: раціональний коефіцієнт × добуток факторів × d^dimpow."""

    coeff: Fraction
    factors: tuple[Factor, ...] = ()
    dimpow: int = 0

    def __post_init__(self) -> None:
        seen: dict[str, list[bool]] = {}
        for f in self.factors:
            for i in f.indices():
                seen.setdefault(i.label, []).append(i.up)
        for label, ups in seen.items():
            if len(ups) > 2:
                raise StructureError(
                    f"Index '{label}' occurs {len(ups)} times in one term", label
                )
            if len(ups) == 2 and ups[0] == ups[1]:
                variance = "up" if ups[0] else "down"
                raise StructureError(
                    f"Index '{label}' is contracted with itself twice {variance}", label
                )

    @classmethod
    def of(cls, coeff: Fraction | int | str, *factors: Factor, dimpow: int = 0) -> Term:
        return cls(parse_fraction(coeff), tuple(factors), dimpow)

    def _occurrences(self) -> Counter[str]:
        return Counter(label for f in self.factors for label in f.labels())

    def free_indices(self) -> tuple[Index, ...]:
        counts = self._occurrences()
        free = [i for f in self.factors for i in f.indices() if counts[i.label] == 1]
        return tuple(sorted(free))

    def dummy_labels(self) -> set[str]:
        return {label for label, n in self._occurrences().items() if n == 2}

    def labels(self) -> set[str]:
        return set(self._occurrences())

    def is_zero(self) -> bool:
        return self.coeff == 0

    def scaled(self, c: Fraction | int) -> Term:
        return Term(self.coeff * c, self.factors, self.dimpow)

    def with_factors(self, factors: Iterable[Factor], coeff: Fraction | None = None) -> Term:
        return Term(self.coeff if coeff is None else coeff, tuple(factors), self.dimpow)

    def relabel(self, mapping: Mapping[str, str]) -> Term:
        if not mapping:
            return self
        return Term(self.coeff, tuple(f.relabel(mapping) for f in self.factors), self.dimpow)

    def freshen_dummies(self, avoid: set[str]) -> Term:
        """Перейменовує німі індекси, що перетинаються з ``avoid``."""
        clash = self.dummy_labels() & avoid
        if not clash:
            return self
        used = self.labels() | avoid
        return self.relabel({label: fresh_label(used) for label in sorted(clash)})

    def times(self, other: Term) -> Term:
        """Добуток з автоматичним перейменуванням конфліктних німих індексів."""
        right = other.freshen_dummies(self.labels())
        left = self.freshen_dummies(right.labels())
        return Term(
            left.coeff * right.coeff, left.factors + right.factors, left.dimpow + right.dimpow
        )

    def __str__(self) -> str:
        parts = [str(f) for f in self.factors] + ["dim"] * self.dimpow
        mag = abs(self.coeff)
        if not parts:
            return format_fraction(mag) if mag.denominator != 1 else str(mag.numerator)
        body = "*".join(parts)
        if mag == 1:
            return body
        return f"{format_fraction(mag) if mag.denominator != 1 else mag.numerator}*{body}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "coeff": format_fraction(self.coeff),
            "dimpow": self.dimpow,
            "factors": [f.to_dict() for f in self.factors],
        }

    @classmethod
    def from_dict(cls, row: Mapping[str, Any]) -> Term:
        return cls(
            coeff=parse_fraction(row.get("coeff", "1/1")),
            factors=tuple(Factor.from_dict(f) for f in row.get("factors", [])),
            dimpow=int(row.get("dimpow", 0)),
        )


# ═══════════════════════════════════════════════════════════════════
#  Expression
# ═══════════════════════════════════════════════════════════════════


@dataclass(frozen=True, slots=True)
class Expression:
    """Формальна сума термів зі спільною сигнатурою вільних індексів."""

    terms: tuple[Term, ...] = ()
    free: tuple[Index, ...] = field(default=())

    def __post_init__(self) -> None:
        for t in self.terms:
            if t.free_indices() != self.free:
                got = " ".join(map(str, t.free_indices())) or "(none)"
                want = " ".join(map(str, self.free)) or "(none)"
                raise SignatureError(f"Term '{t}' has free indices {got}, expected {want}")

    @classmethod
    def of(cls, terms: Iterable[Term], free: Iterable[Index] | None = None) -> Expression:
        """Створює вираз, виводячи сигнатуру з першого ненульового терма."""
        kept = tuple(t for t in terms if t.coeff != 0)
        if free is not None:
            sig = tuple(sorted(free))
        else:
            sig = kept[0].free_indices() if kept else ()
        return cls(kept, sig)

    @classmethod
    def zero(cls, free: Iterable[Index] = ()) -> Expression:
        return cls((), tuple(sorted(free)))

    @classmethod
    def scalar(cls, value: Fraction | int) -> Expression:
        return cls.of([Term.of(value)])

    @classmethod
    def from_factor(cls, factor: Factor, coeff: Fraction | int = 1) -> Expression:
        return cls.of([Term.of(coeff, factor)])

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def _join_signature(self, other: Expression) -> tuple[Index, ...]:
        if self.free == other.free:
            return self.free
        if self.is_zero() and not self.free:
            return other.free
        if other.is_zero() and not other.free:
            return self.free
        a = " ".join(map(str, self.free)) or "(none)"
        b = " ".join(map(str, other.free)) or "(none)"
        raise SignatureError(f"Cannot add expressions with free indices {a} and {b}")

    def __add__(self, other: Expression) -> Expression:
        sig = self._join_signature(other)
        return Expression(self.terms + other.terms, sig)

    def __sub__(self, other: Expression) -> Expression:
        return self + other.scale(-1)

    def __neg__(self) -> Expression:
        return self.scale(-1)

    def scale(self, c: Fraction | int) -> Expression:
        if c == 0:
            return Expression.zero(self.free)
        return Expression(tuple(t.scaled(c) for t in self.terms), self.free)

    def __mul__(self, other: Expression) -> Expression:
        """Добуток з контракцією однакових міток протилежної варіантності."""
        terms = [a.times(b) for a in self.terms for b in other.terms]
        if terms:
            return Expression.of(terms)
        free = Counter(i.label for i in (*self.free, *other.free))
        sig = [i for i in (*self.free, *other.free) if free[i.label] == 1]
        return Expression.zero(sig)

    def map_terms(self, fn: Any) -> Expression:
        """Застосовує ``fn: Term -> Iterable[Term]`` до кожного терма."""
        out: list[Term] = []
        for t in self.terms:
            out.extend(fn(t))
        return Expression.of(out, self.free)

    def relabel_free(self, mapping: Mapping[str, str]) -> Expression:
        """Перейменовує вільні індекси, уникаючи колізій з німими."""
        targets = set(mapping.values())
        terms = [t.freshen_dummies(targets).relabel(mapping) for t in self.terms]
        free = [Index(mapping.get(i.label, i.label), i.up) for i in self.free]
        return Expression.of(terms, free)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for n, t in enumerate(self.terms):
            sign = "-" if t.coeff < 0 else "+"
            body = str(t)
            if n == 0:
                out.append(f"-{body}" if sign == "-" else body)
            else:
                out.append(f"{sign} {body}")
        return " ".join(out)

    def to_dict(self) -> dict[str, Any]:
        """Схема обміну: лише ``terms``; сигнатура виводиться з термів при читанні."""
        return {"terms": [t.to_dict() for t in self.terms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_dict(cls, row: Mapping[str, Any]) -> Expression:
        terms = [Term.from_dict(t) for t in row.get("terms", [])]
        free = [Index.parse(i) for i in row["free"]] if "free" in row else None
        return cls.of(terms, free)
