"""Перестановка коваріантних похідних з поправками Рімана.

Конвенція: [∇_a, ∇_b] V^c = R^c_{dab} V^d, [∇_a, ∇_b] ω_c = −R^d_{cab} ω_d,
R^c_{dab} = ginv^{ce} Riem_{edab}. Вага густини поправок не дає.
"""

from __future__ import annotations

import logging

from src.algebra.canon import canonical_monomial, search_monomial, self_contracted_derivs
from src.calculus.leibniz import prefix_terms
from src.contracts.enums import OrderPolicy
from src.contracts.tensor import Expression, Factor, Index, Term, fresh_label

log = logging.getLogger(__name__)


def replace_position(f: Factor, pos: int, label: str) -> Factor:
    nd = len(f.derivs)
    if pos < nd:
        derivs = list(f.derivs)
        derivs[pos] = label
        return Factor(f.sym, f.slots, tuple(derivs))
    slots = list(f.slots)
    old = slots[pos - nd]
    slots[pos - nd] = Index(label, old.up)
    return Factor(f.sym, tuple(slots), f.derivs)


def commutator_terms(y: Factor, a: str, b: str, used: set[str]) -> list[Term]:
    """[∇_a, ∇_b] y як список термів (Riem · y з переставленим індексом)."""
    out = []
    for pos, idx in enumerate(y.indices()):
        e = fresh_label(used)
        g = fresh_label(used)
        shifted = replace_position(y, pos, e)
        if idx.up:
            ginv = Factor("ginv", (Index(idx.label, True), Index(g, True)))
            riem = Factor("Riem", (Index(g, False), Index(e, False), Index(a, False), Index(b, False)))
            out.append(Term.of(1, ginv, riem, shifted))
        else:
            ginv = Factor("ginv", (Index(e, True), Index(g, True)))
            riem = Factor(
                "Riem", (Index(g, False), Index(idx.label, False), Index(a, False), Index(b, False))
            )
            out.append(Term.of(-1, ginv, riem, shifted))
    return out


def swap_adjacent(term: Term, fi: int, j: int) -> list[Term]:
    """Міняє місцями похідні j та j+1 фактора fi; перший елемент — головний терм."""
    f = term.factors[fi]
    d = f.derivs
    a, b = d[j], d[j + 1]
    facs = list(term.factors)
    facs[fi] = f.with_derivs((*d[:j], b, a, *d[j + 2 :]))
    main = term.with_factors(facs)

    rest = term.factors[:fi] + term.factors[fi + 1 :]
    used = term.labels()
    y = f.with_derivs(d[j + 2 :])
    out = [main]
    for core in prefix_terms(d[:j], commutator_terms(y, a, b, used)):
        out.append(Term(term.coeff * core.coeff, rest + core.factors, term.dimpow))
    return out


def realize_orders(term: Term, targets: dict[int, tuple[str, ...]]) -> list[Term]:
    """Бульбашкою приводить похідні до цільових порядків, збираючи поправки."""
    out: list[Term] = []
    current = term
    for fi, target in targets.items():
        rank = {label: n for n, label in enumerate(target)}
        while True:
            d = current.factors[fi].derivs
            j = next((k for k in range(len(d) - 1) if rank[d[k]] > rank[d[k + 1]]), None)
            if j is None:
                break
            main, *corrections = swap_adjacent(current, fi, j)
            out.extend(corrections)
            current = main
    return [current, *out]


def divergence_targets(term: Term) -> dict[int, tuple[str, ...]]:
    targets = {}
    for fi, f in enumerate(term.factors):
        inner = self_contracted_derivs(term.factors, fi)
        if not inner:
            continue
        order = tuple(d for p, d in enumerate(f.derivs) if p not in inner) + tuple(
            d for p, d in enumerate(f.derivs) if p in inner
        )
        if order != f.derivs:
            targets[fi] = order
    return targets


def canonical_targets(term: Term) -> dict[int, tuple[str, ...]]:
    fixed = canonical_monomial(term.factors)
    found = search_monomial(term.factors)
    if fixed.keys == found.keys:
        return {}
    targets = {}
    for ch in found.choices:
        f = term.factors[ch.source]
        order = tuple(f.derivs[p] for p in ch.deriv_perm)
        if order != f.derivs:
            targets[ch.source] = order
    return targets


def commute_to_order(term: Term, policy: OrderPolicy = OrderPolicy.CANONICAL) -> Expression:
    """Переставляє похідні терма згідно з політикою; рівність — тензорна тотожність."""
    if policy is OrderPolicy.DIVERGENCE:
        targets = divergence_targets(term)
    else:
        targets = canonical_targets(term)
    if not targets:
        return Expression.of([term], term.free_indices())
    terms = realize_orders(term, targets)
    log.debug("commute %s: %d correction terms", policy.value, len(terms) - 1)
    return Expression.of(terms, term.free_indices())
