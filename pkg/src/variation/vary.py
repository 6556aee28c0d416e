"""Перша варіація виразів за метрикою та за імпульсом.

Варіація похідної розкладається рекурсивно:

    δ(∇_d Y) = ∇_d δY + Σ_up δΓ^c_{de} Y[c→e] − Σ_down δΓ^e_{dc} Y[c→e] − w δΓ^e_{ed} Y,

де w — вага густини Y, а δΓ^c_{ab} = ½ g^{ce}(∇_a δg_eb + ∇_b δg_ae − ∇_e δg_ab).
"""

from __future__ import annotations

import logging
from fractions import Fraction

from src.algebra.canon import canonicalize
from src.algebra.registry import get_registry
from src.calculus.commute import replace_position
from src.calculus.leibniz import differentiate_term
from src.contracts.enums import VariationClass
from src.contracts.errors import StructureError, UnsupportedSymbolError
from src.contracts.tensor import Expression, Factor, Term, down, fresh_label, up
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions
from src.variation.special import expand_specials

log = logging.getLogger(__name__)

HALF = Fraction(1, 2)

METRIC_VARIATION = "dg"
MOMENTUM_VARIATION = "dpi"


def delta_christoffel(c: str, a: str, b: str, used: set[str]) -> list[Term]:
    """δΓ^c_{ab} через ∇δg (``c`` — верхня мітка)."""
    e = fresh_label(used)
    ginv = Factor("ginv", (up(c), up(e)))
    return [
        Term.of(HALF, ginv, Factor(METRIC_VARIATION, (down(e), down(b)), (a,))),
        Term.of(HALF, ginv, Factor(METRIC_VARIATION, (down(a), down(e)), (b,))),
        Term.of(-HALF, ginv, Factor(METRIC_VARIATION, (down(a), down(b)), (e,))),
    ]


def _delta_ricci(k: str, l: str, used: set[str]) -> list[Term]:
    """δRicci_kl = ∇_a δΓ^a_{lk} − ∇_l δΓ^a_{ak}."""
    out: list[Term] = []
    a = fresh_label(used)
    for t in delta_christoffel(a, l, k, used):
        out.extend(differentiate_term(t, a))
    a2 = fresh_label(used)
    for t in delta_christoffel(a2, a2, k, used):
        out.extend(x.scaled(-1) for x in differentiate_term(t, l))
    return out


def _vary_base(f: Factor, used: set[str]) -> list[Term]:
    sym = get_registry().get(f.sym)
    if sym.vclass is VariationClass.FORMAL_VARIATION:
        raise StructureError(f"Second variations are not supported ('{f.sym}')", f.sym)
    if sym.vclass is VariationClass.SPECIAL:
        raise UnsupportedSymbolError(f"Special tensor '{f.sym}' must be expanded first", f.sym)
    if sym.vclass is not VariationClass.METRIC_BUILT:
        return []
    s = f.slots
    if f.sym == "g":
        return [Term.of(1, Factor(METRIC_VARIATION, s))]
    if f.sym == "ginv":
        c, d = fresh_label(used), fresh_label(used)
        return [
            Term.of(
                -1,
                Factor("ginv", (s[0], up(c))),
                Factor("ginv", (s[1], up(d))),
                Factor(METRIC_VARIATION, (down(c), down(d))),
            )
        ]
    if f.sym in ("sqrtg", "isqrtg"):
        c, d = fresh_label(used), fresh_label(used)
        sign = HALF if f.sym == "sqrtg" else -HALF
        return [
            Term.of(
                sign,
                Factor(f.sym),
                Factor("ginv", (up(c), up(d))),
                Factor(METRIC_VARIATION, (down(c), down(d))),
            )
        ]
    if f.sym == "Ricci":
        return _delta_ricci(s[0].label, s[1].label, used)
    if f.sym == "R":
        k, l, a, b = (fresh_label(used) for _ in range(4))
        out = [
            Term.of(
                -1,
                Factor("ginv", (up(k), up(a))),
                Factor("ginv", (up(l), up(b))),
                Factor(METRIC_VARIATION, (down(a), down(b))),
                Factor("Ricci", (down(k), down(l))),
            )
        ]
        trace = Factor("ginv", (up(k), up(l)))
        out.extend(Term(t.coeff, (trace, *t.factors)) for t in _delta_ricci(k, l, used))
        return out
    if f.sym == "Riem":
        a, b, c, d = (i.label for i in s)
        e, g = fresh_label(used), fresh_label(used)
        out = [
            Term.of(
                1,
                Factor(METRIC_VARIATION, (down(a), down(e))),
                Factor("ginv", (up(e), up(g))),
                Factor("Riem", (down(g), down(b), down(c), down(d))),
            )
        ]
        e2 = fresh_label(used)
        lower = Factor("g", (down(a), down(e2)))
        for t in delta_christoffel(e2, d, b, used):
            out.extend(Term(x.coeff, (lower, *x.factors)) for x in differentiate_term(t, c))
        for t in delta_christoffel(e2, c, b, used):
            out.extend(Term(-x.coeff, (lower, *x.factors)) for x in differentiate_term(t, d))
        return out
    raise UnsupportedSymbolError(f"No metric variation rule for '{f.sym}'", f.sym)


def vary_factor(f: Factor, used: set[str]) -> list[Term]:
    """δ одного фактора з похідними; ``used`` поповнюється новими мітками."""
    if not f.derivs:
        return _vary_base(f, used)
    d0 = f.derivs[0]
    inner = f.with_derivs(f.derivs[1:])
    out: list[Term] = []
    for t in vary_factor(inner, used):
        out.extend(differentiate_term(t, d0))
    for pos, idx in enumerate(inner.indices()):
        e = fresh_label(used)
        shifted = replace_position(inner, pos, e)
        if idx.up:
            gamma, sign = delta_christoffel(idx.label, d0, e, used), 1
        else:
            gamma, sign = delta_christoffel(e, d0, idx.label, used), -1
        out.extend(Term(sign * g.coeff, (*g.factors, shifted)) for g in gamma)
    w = get_registry().get(f.sym).weight
    if w:
        e = fresh_label(used)
        gamma = delta_christoffel(e, e, d0, used)
        out.extend(Term(-w * g.coeff, (*g.factors, inner)) for g in gamma)
    return out


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def vary_metric(e: Expression, conv: Conventions = DEFAULT_CONVENTIONS) -> Expression:
    """Перша варіація за метрикою, лінійна за ``dg`` та його похідними.

    Спеціальні тензори спершу розгортаються.

    Raises:
        StructureError: вираз уже містить ``dg`` чи ``dpi``.
        UnsupportedSymbolError: метричний символ без правила варіації.
    """
    expanded = expand_specials(e, conv)
    out: list[Term] = []
    for t in expanded.terms:
        used = set(t.labels())
        for n, f in enumerate(t.factors):
            rest = t.factors[:n] + t.factors[n + 1 :]
            for v in vary_factor(f, used):
                out.append(Term(t.coeff * v.coeff, rest + v.factors, t.dimpow + v.dimpow))
    result = canonicalize(Expression.of(out, e.free))
    log.debug("vary_metric: %d → %d terms", len(expanded), len(result))
    return result


def vary_momentum(e: Expression) -> Expression:
    """Перша варіація за імпульсом: кожне π (з похідними) по черзі стає ``dpi``."""
    reg = get_registry()
    out: list[Term] = []
    for t in e.terms:
        for n, f in enumerate(t.factors):
            vclass = reg.get(f.sym).vclass
            if vclass is VariationClass.FORMAL_VARIATION:
                raise StructureError(f"Second variations are not supported ('{f.sym}')", f.sym)
            if vclass is not VariationClass.MOMENTUM:
                continue
            facs = list(t.factors)
            facs[n] = Factor(MOMENTUM_VARIATION, f.slots, f.derivs)
            out.append(t.with_factors(facs))
    return canonicalize(Expression.of(out, e.free))
