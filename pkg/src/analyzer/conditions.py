"""Коефіцієнтні умови (іменовані сертифікати) для кінетичних модифікацій.

* curvature: ∂B/∂(∇_{r1…rk} Ricci_kl) · A0_kl^{ij l1 l2} G_ijef π^ef, де k —
  найвищий порядок похідних кривини в B (R = g^{ab} Ricci_ab);
* momentum_quadratic: 2 B_abcd π^{kc} π_k^d для B без кривини.
"""

from __future__ import annotations

import logging
from fractions import Fraction

from src.algebra.canon import canonicalize
from src.algebra.metric import simplify_metric
from src.algebra.registry import get_registry
from src.algebra.substitute import substitute
from src.bracket.constraints import param_expression
from src.calculus.normal import normal_form
from src.contracts.enums import ConstraintKind, SpecialKind
from src.contracts.functional import ConstraintSpec
from src.contracts.tensor import Expression, Factor, Index, Term, down, up
from src.normalizer.parser import parse, parse_factor
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions
from src.variation.special import expand_specials

log = logging.getLogger(__name__)

CURVATURE = "Ricci"
_RICCI_TRACE = parse("ginv[^p ^q]*Ricci[_p _q]")


def ricci_form(e: Expression) -> Expression:
    """Замінює скаляр R на слід g^{ab} Ricci_ab."""
    return substitute(e, parse_factor("R"), _RICCI_TRACE)


def curvature_order(e: Expression) -> int:
    """Найвищий порядок похідних на Ricci або −1, якщо кривини немає."""
    orders = [len(f.derivs) for t in e.terms for f in t.factors if f.sym == CURVATURE]
    return max(orders, default=-1)


def partial_wrt(e: Expression, sym: str, nderivs: int, labels: tuple[str, ...]) -> Expression:
    """∂e/∂(∇_{…}sym_{…}) з вільними верхніми ``labels`` (похідні, потім слоти).

    Результат симетризовано за групою слотів символу.
    """
    group = get_registry().group(sym)
    out: list[Term] = []
    for t in e.terms:
        t = t.freshen_dummies(set(labels))
        for n, f in enumerate(t.factors):
            if f.sym != sym or len(f.derivs) != nderivs:
                continue
            rest = t.factors[:n] + t.factors[n + 1 :]
            for perm, sign in group:
                slots = [f.slots[p] for p in perm]
                deltas = [
                    Factor("delta", (down(old), up(new)))
                    for old, new in zip((*f.derivs, *(s.label for s in slots)), labels, strict=True)
                ]
                coeff = t.coeff * sign / len(group)
                out.append(Term(coeff, (*rest, *deltas), t.dimpow))
    free = [*e.free, *(Index(x, True) for x in labels)]
    return simplify_metric(Expression.of(out, free), None)


def kinetic_projection() -> Expression:
    """A0_kl^{ij l1 l2} G_ijef π^ef з вільними _k _l ^l1 ^l2 (без розгортання)."""
    return parse("A0[_k _l ^i ^j ^l1 ^l2]*G[_i _j _e _f]*pi[^e ^f]")


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def curvature_condition(
    b: Expression, conv: Conventions = DEFAULT_CONVENTIONS
) -> Expression | None:
    """Коефіцієнт при найвищій похідній кривини, згорнутий з A0·G·π; None без кривини."""
    flat = ricci_form(expand_specials(b, conv))
    order = curvature_order(flat)
    if order < 0:
        return None
    reserved = tuple(f"r{k}" for k in range(1, order + 1)) + ("k", "l")
    coeff = partial_wrt(flat, CURVATURE, order, reserved)
    projected = coeff * expand_specials(kinetic_projection(), conv)
    result = normal_form(projected, conv.dim, max_terms=conv.max_terms, max_passes=conv.max_passes)
    log.debug("curvature condition (order %d): %d terms", order, len(result))
    return result


def momentum_quadratic_condition(
    b: Expression, conv: Conventions = DEFAULT_CONVENTIONS
) -> Expression:
    """2 B_abcd π^{kc} π_k^d для B без кривини (вільні _a _b та похідні мітки B)."""
    quad = parse("pi[^k ^c]*pi[^x ^d]*g[_k _x]")
    flat = canonicalize(expand_specials(b, conv))
    result = (flat * quad).scale(Fraction(2))
    return normal_form(result, conv.dim, max_terms=conv.max_terms, max_passes=conv.max_passes)


def condition_names(b: Expression) -> list[str]:
    """Які умови застосовні до B."""
    names = {f.sym for t in b.terms for f in t.factors}
    curved = bool(names & {"R", "Ricci", "Riem", SpecialKind.A1.value, SpecialKind.A2.value})
    return ["curvature"] if curved else ["momentum_quadratic"]


def conditions_for(
    spec: ConstraintSpec, conv: Conventions = DEFAULT_CONVENTIONS
) -> dict[str, Expression]:
    """Іменовані умови для kinetic_mod; для інших типів порожньо.

    Ключі мають вигляд ``"<ім'я в'язі>:<умова>"``.
    """
    if spec.kind is not ConstraintKind.KINETIC_MOD:
        return {}
    b = param_expression(spec.params["B"], "B")
    name = spec.display_name()
    out: dict[str, Expression] = {}
    for cond in condition_names(b):
        if cond == "curvature":
            value = curvature_condition(b, conv)
            if value is not None:
                out[f"{name}:{cond}"] = value
        else:
            out[f"{name}:{cond}"] = momentum_quadratic_condition(b, conv)
    return out
