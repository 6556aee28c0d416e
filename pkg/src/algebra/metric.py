"""Спрощення метричних згортань: g·ginv → δ, згортання δ, сліди δ → d."""

from __future__ import annotations

import logging

from src.algebra.canon import canonicalize
from src.algebra.registry import get_registry
from src.contracts.tensor import Expression, Factor, Index, Term

log = logging.getLogger(__name__)

DEFAULT_DIM = 3


def _trace(term: Term, factors: list[Factor], dim: int | None) -> Term:
    if dim is None:
        return Term(term.coeff, tuple(factors), term.dimpow + 1)
    return Term(term.coeff * dim, tuple(factors), term.dimpow)


def _rename_except(factors: list[Factor], skip: int, old: str, new: str) -> list[Factor]:
    return [f if n == skip else f.relabel({old: new}) for n, f in enumerate(factors)]


def _step(term: Term, dim: int | None) -> Term | None | bool:
    """Один крок переписування; False — змін немає, None — терм нульовий."""
    reg = get_registry()
    facs = list(term.factors)
    for f in facs:
        if f.derivs and reg.get(f.sym).covariantly_constant:
            return None
    syms = [f.sym for f in facs]
    if "sqrtg" in syms and "isqrtg" in syms:
        facs.pop(syms.index("sqrtg"))
        facs.pop([f.sym for f in facs].index("isqrtg"))
        return term.with_factors(facs)

    for i, gf in enumerate(facs):
        if gf.sym != "g":
            continue
        for j, gi in enumerate(facs):
            if gi.sym != "ginv":
                continue
            shared = set(gf.labels()) & set(gi.labels())
            if not shared:
                continue
            rest = [f for n, f in enumerate(facs) if n not in (i, j)]
            if len(shared) == 2:
                return _trace(term, rest, dim)
            (s,) = shared
            a = next(x for x in gf.labels() if x != s)
            c = next(x for x in gi.labels() if x != s)
            return term.with_factors([*rest, Factor("delta", (Index(a, False), Index(c, True)))])

    labels_at: dict[str, list[int]] = {}
    for n, f in enumerate(facs):
        for label in f.labels():
            labels_at.setdefault(label, []).append(n)
    for n, f in enumerate(facs):
        if f.sym != "delta":
            continue
        a, b = f.slots[0].label, f.slots[1].label
        rest = facs[:n] + facs[n + 1 :]
        if a == b:
            return _trace(term, rest, dim)
        if len(labels_at[a]) == 2:
            return term.with_factors(
                [g for m, g in enumerate(_rename_except(facs, n, a, b)) if m != n]
            )
        if len(labels_at[b]) == 2:
            return term.with_factors(
                [g for m, g in enumerate(_rename_except(facs, n, b, a)) if m != n]
            )
    return False


def simplify_term(term: Term, dim: int | None = DEFAULT_DIM) -> Term | None:
    current = term
    while True:
        nxt = _step(current, dim)
        if nxt is None:
            return None
        if nxt is False:
            return current
        current = nxt


def simplify_metric(e: Expression, dim: int | None = DEFAULT_DIM) -> Expression:
    """Метрично-нормальна форма виразу.

    Args:
        e: Вхідний вираз.
        dim: Числове значення d; None залишає d символьним (dimpow).
    """
    out = []
    for t in e.terms:
        s = simplify_term(t, dim)
        if s is not None and s.coeff != 0:
            out.append(s)
    return canonicalize(Expression.of(out, e.free))
