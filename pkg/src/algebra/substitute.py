"""Підстановка виразу замість усіх входжень символу (з похідними через Лейбніца)."""

from __future__ import annotations

from src.algebra.canon import canonicalize
from src.algebra.registry import get_registry
from src.calculus.leibniz import prefix_terms
from src.contracts.errors import SignatureError
from src.contracts.tensor import Expression, Factor, Term


def _check_target(target: Factor, replacement: Expression) -> None:
    sym = get_registry().get(target.sym)
    if target.derivs:
        raise SignatureError(f"Substitution target '{target}' must not carry derivatives")
    if tuple(i.up for i in target.slots) != sym.variance:
        raise SignatureError(
            f"Substitution target '{target}' must use the natural variance {sym.signature()}"
        )
    labels = [i.label for i in target.slots]
    if len(set(labels)) != len(labels):
        raise SignatureError(f"Substitution target '{target}' repeats an index label")
    if replacement.terms and replacement.free != tuple(sorted(target.slots)):
        got = " ".join(map(str, replacement.free)) or "(none)"
        raise SignatureError(
            f"Replacement free indices {got} do not match target slots {sym.signature()}"
        )
    if any(f.sym == target.sym for t in replacement.terms for f in t.factors):
        raise SignatureError(f"Replacement for '{target.sym}' refers to '{target.sym}' itself")


def substitute_term(term: Term, target: Factor, replacement: Expression) -> list[Term]:
    """Замінює всі входження ``target.sym`` у терм (без канонізації)."""
    hits = [n for n, f in enumerate(term.factors) if f.sym == target.sym]
    if not hits:
        return [term]
    n = hits[0]
    occ = term.factors[n]
    mapping = {p.label: s.label for p, s in zip(target.slots, occ.slots, strict=True)}
    avoid = term.labels() | set(mapping.values())
    body = [t.freshen_dummies(avoid).relabel(mapping) for t in replacement.terms]
    if occ.derivs:
        body = prefix_terms(occ.derivs, body)
    rest = term.factors[:n] + term.factors[n + 1 :]
    out: list[Term] = []
    for b in body:
        merged = Term(term.coeff * b.coeff, rest + b.factors, term.dimpow + b.dimpow)
        out.extend(substitute_term(merged, target, replacement))
    return out


def substitute(e: Expression, target: Factor, replacement: Expression) -> Expression:
    """Підставляє ``replacement`` замість кожного входження символу ``target``.

    Args:
        e: Вираз.
        target: Шаблон символу з мітками слотів, напр. ``G[_a _b _c _d]``.
        replacement: Вираз з вільними індексами, рівними слотам шаблону.

    Raises:
        SignatureError: невідповідність сигнатур.
    """
    _check_target(target, replacement)
    out: list[Term] = []
    for t in e.terms:
        out.extend(substitute_term(t, target, replacement))
    return canonicalize(Expression.of(out, e.free))
