"""Інтегрування частинами під інтегралом з фінітними розмазуваннями."""

from __future__ import annotations

import logging

from src.algebra.canon import canonicalize
from src.algebra.grading import density_weight
from src.calculus.leibniz import prefix_terms
from src.contracts.errors import StructureError
from src.contracts.tensor import Expression, Term

log = logging.getLogger(__name__)


def strip_derivatives(term: Term, position: int) -> list[Term]:
    """Переносить усі похідні фактора ``position`` на решту терма зі знаком (−1)^k."""
    f = term.factors[position]
    k = len(f.derivs)
    if not k:
        return [term]
    rest = Term(
        term.coeff * (-1) ** k, term.factors[:position] + term.factors[position + 1 :], term.dimpow
    )
    return [
        Term(r.coeff, (f.bare(), *r.factors), r.dimpow)
        for r in prefix_terms(tuple(reversed(f.derivs)), [rest])
    ]


def integrate_by_parts(e: Expression, target: str) -> Expression:
    """Знімає похідні з усіх входжень ``target``; граничні члени відкидаються.

    Args:
        e: Підінтегральний вираз (густина ваги один).
        target: Ім'я символу, який має лишитися без похідних.

    Raises:
        StructureError: target входить у терм більше одного разу.
    """
    out: list[Term] = []
    warned = False
    for t in e.terms:
        hits = [n for n, f in enumerate(t.factors) if f.sym == target]
        if not hits:
            out.append(t)
            continue
        if len(hits) > 1:
            raise StructureError(f"'{target}' occurs {len(hits)} times in one term", target)
        if not warned and density_weight(t) != 1:
            log.warning("Non-density integrand (weight %d) in integrate_by_parts", density_weight(t))
            warned = True
        out.extend(strip_derivatives(t, hits[0]))
    return canonicalize(Expression.of(out, e.free))
