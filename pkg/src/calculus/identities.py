"""Тотожності кривини: правила з config/rules.json та перша тотожність Б'янкі."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any

from src.algebra.canon import canonicalize
from src.algebra.registry import get_registry
from src.calculus.leibniz import prefix_terms
from src.calculus.matcher import find_matches
from src.contracts.errors import ResourceLimitError, SignatureError
from src.contracts.tensor import Expression, Factor, Term
from src.shared.config_loader import load_json

log = logging.getLogger(__name__)

DEFAULT_RULES = Path(__file__).resolve().parents[2] / "config" / "rules.json"
MAX_REWRITES = 100_000


@dataclass(frozen=True, slots=True)
class RewriteRule:
    """Правило lhs → rhs; lhs — один терм-шаблон."""

    name: str
    lhs: Term
    rhs: Expression
    under_prefix: bool = True

    @classmethod
    def from_dict(cls, row: dict[str, Any]) -> RewriteRule:
        lhs = Expression.from_dict(row["lhs"])
        rhs = Expression.from_dict(row["rhs"])
        if len(lhs.terms) != 1:
            raise SignatureError(f"Rule '{row.get('name', '?')}' needs a single-term lhs")
        if rhs.terms and rhs.free != lhs.free:
            raise SignatureError(f"Rule '{row.get('name', '?')}' changes the free signature")
        guard = row.get("guard", {}) or {}
        return cls(
            name=str(row.get("name", "")),
            lhs=lhs.terms[0],
            rhs=Expression(rhs.terms, lhs.free),
            under_prefix=bool(guard.get("under_prefix", True)),
        )


def load_rules(path: str | Path = DEFAULT_RULES) -> tuple[RewriteRule, ...]:
    data = load_json(path)
    rules = tuple(RewriteRule.from_dict(r) for r in data.get("rules", []))
    log.debug("Loaded %d rewrite rules from %s", len(rules), Path(path).name)
    return rules


@lru_cache(maxsize=1)
def default_rules() -> tuple[RewriteRule, ...]:
    return load_rules(DEFAULT_RULES)


def rewrite_term(term: Term, rule: RewriteRule) -> list[Term] | None:
    """Один крок переписування терма правилом або None, якщо входження немає."""
    for m in find_matches(rule.lhs, term, rule.under_prefix):
        free_map = {i.label: m.mapping[i.label] for i in rule.rhs.free}
        avoid = term.labels() | set(free_map.values())
        body = [t.freshen_dummies(avoid).relabel(free_map) for t in rule.rhs.terms]
        if m.prefix:
            body = prefix_terms(m.prefix, body)
        coeff = term.coeff * m.sign / rule.lhs.coeff
        rest = tuple(f for n, f in enumerate(term.factors) if n not in m.targets)
        return [Term(coeff * t.coeff, rest + t.factors, term.dimpow + t.dimpow) for t in body]
    return None


def _effective_labels(term: Term, fi: int, free: set[str]) -> list[str] | None:
    f = term.factors[fi]
    out = []
    for s in f.slots:
        if s.label in free:
            out.append(s.label)
            continue
        raised = None
        for n, other in enumerate(term.factors):
            if n == fi or other.sym != "ginv" or other.derivs:
                continue
            labels = [i.label for i in other.slots]
            if s.label in labels:
                rest = [x for x in labels if x != s.label]
                if rest and rest[0] in free:
                    raised = rest[0]
                break
        if raised is None:
            return None
        out.append(raised)
    return out


def first_bianchi(term: Term) -> list[Term] | None:
    """Усуває клас Riem, де найменша ефективна мітка в парі з найбільшою.

    R_{psqr} = −R_{pqrs} − R_{prsq}; застосовується лише коли всі чотири
    ефективні мітки вільні (напряму або через ginv).
    """
    counts = Counter(label for f in term.factors for label in f.labels())
    free = {label for label, n in counts.items() if n == 1}
    for fi, f in enumerate(term.factors):
        if f.sym != "Riem":
            continue
        eff = _effective_labels(term, fi, free)
        if eff is None or len(set(eff)) < 4:
            continue
        p, s = min(eff), max(eff)
        if eff[eff.index(p) ^ 1] != s:
            continue
        q, r = sorted(x for x in eff if x not in (p, s))
        for perm, sign in get_registry().group("Riem"):
            if [eff[k] for k in perm] == [p, s, q, r]:
                slots = [f.slots[k] for k in perm]
                break
        else:  # pragma: no cover - група Riem транзитивна на парах
            continue
        first = Factor("Riem", (slots[0], slots[2], slots[3], slots[1]), f.derivs)
        second = Factor("Riem", (slots[0], slots[3], slots[1], slots[2]), f.derivs)
        out = []
        for new in (first, second):
            facs = list(term.factors)
            facs[fi] = new
            out.append(Term(-sign * term.coeff, tuple(facs), term.dimpow))
        return out
    return None


def apply_identities(
    e: Expression, rules: tuple[RewriteRule, ...] | None = None
) -> Expression:
    """Застосовує правила слідів, Б'янкі та першу тотожність Б'янкі до нерухомої точки.

    Raises:
        ResourceLimitError: забагато кроків переписування.
    """
    active = default_rules() if rules is None else rules
    work = list(e.terms)
    out: list[Term] = []
    steps = 0
    while work:
        t = work.pop()
        steps += 1
        if steps > MAX_REWRITES:
            raise ResourceLimitError(f"apply_identities exceeded {MAX_REWRITES} rewrites")
        for rule in active:
            res = rewrite_term(t, rule)
            if res is not None:
                work.extend(res)
                break
        else:
            res = first_bianchi(t)
            if res is not None:
                work.extend(res)
            else:
                out.append(t)
    return canonicalize(Expression.of(out, e.free))
