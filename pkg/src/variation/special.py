"""Спеціальні тензори та їх реалізація через g, ginv, δ, Ricci.

Симетризації (ij) та антисиметризації [fg] нормовані (з 1/2).
Ξ^{lij}_{cab} = δ_a^l δ_b^{(i} δ_c^{j)} + δ_b^l δ_a^{(i} δ_c^{j)} − δ_c^l δ_a^{(i} δ_b^{j)},
так що δΓ^e_{ab} = ½ g^{ec} Ξ^{lij}_{cab} ∇_l δg_ij.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Sequence

from src.algebra.registry import get_registry
from src.algebra.substitute import substitute
from src.contracts.enums import SpecialKind
from src.contracts.errors import SignatureError, UnsupportedSymbolError
from src.contracts.tensor import Expression, Factor, Index
from src.normalizer.parser import parse, parse_factor
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions

log = logging.getLogger(__name__)

SLOTS: dict[SpecialKind, str] = {
    SpecialKind.XI: "Xi[^l ^i ^j _c _a _b]",
    SpecialKind.A0: "A0[_k _l ^i ^j ^l1 ^l2]",
    SpecialKind.A1: "A1[_a1 _k _l ^i ^j ^lp]",
    SpecialKind.A2: "A2[_a1 _a2 _k _l ^i ^j ^lp]",
    SpecialKind.F0: "F0[^h ^l1 ^i ^j ^l2 _e _f _g]",
    SpecialKind.DEWITT: "G[_a _b _c _d]",
    SpecialKind.DEWITT_INVERSE: "DeWittInverse[^a ^b ^c ^d]",
}

_XI = (
    "1/2*delta[_a ^l]*delta[_b ^i]*delta[_c ^j] + 1/2*delta[_a ^l]*delta[_b ^j]*delta[_c ^i]"
    " + 1/2*delta[_b ^l]*delta[_a ^i]*delta[_c ^j] + 1/2*delta[_b ^l]*delta[_a ^j]*delta[_c ^i]"
    " - 1/2*delta[_c ^l]*delta[_a ^i]*delta[_b ^j] - 1/2*delta[_c ^l]*delta[_a ^j]*delta[_b ^i]"
)
_A0 = (
    "ginv[^l1 ^m]*Xi[^l2 ^i ^j _m _k _l]"
    " - 1/2*ginv[^p ^q]*Xi[^l2 ^i ^j _p _q _k]*delta[_l ^l1]"
    " - 1/2*ginv[^p ^q]*Xi[^l2 ^i ^j _p _q _l]*delta[_k ^l1]"
)
_A1 = (
    "Ricci[_k _m]*ginv[^m ^n]*Xi[^lp ^i ^j _n _l _a1]"
    " + Ricci[_l _m]*ginv[^m ^n]*Xi[^lp ^i ^j _n _k _a1]"
)
_A2 = (
    "ginv[^n ^m]*D(_m, Ricci[_k _l])*Xi[^lp ^i ^j _n _a1 _a2]"
    " + D(_a1, Ricci[_k _m])*ginv[^m ^n]*Xi[^lp ^i ^j _n _l _a2]"
    " + D(_a1, Ricci[_l _m])*ginv[^m ^n]*Xi[^lp ^i ^j _n _k _a2]"
    " + D(_a2, Ricci[_k _m])*ginv[^m ^n]*Xi[^lp ^i ^j _n _l _a1]"
    " + D(_a2, Ricci[_l _m])*ginv[^m ^n]*Xi[^lp ^i ^j _n _k _a1]"
)
_F0 = (
    "1/2*ginv[^h ^p]*Xi[^l1 ^i ^j _p _e _f]*delta[_g ^l2]"
    " - 1/2*ginv[^h ^p]*Xi[^l1 ^i ^j _p _e _g]*delta[_f ^l2]"
)
_DEWITT_INVERSE = (
    "1/2*ginv[^a ^c]*ginv[^b ^d] + 1/2*ginv[^a ^d]*ginv[^b ^c] - ginv[^a ^b]*ginv[^c ^d]"
)

# від зовнішніх до внутрішніх: шаблони нижчих рівнів уже розгорнуті
EXPANSION_ORDER: tuple[SpecialKind, ...] = (
    SpecialKind.DEWITT,
    SpecialKind.DEWITT_INVERSE,
    SpecialKind.F0,
    SpecialKind.A2,
    SpecialKind.A1,
    SpecialKind.A0,
    SpecialKind.XI,
)

_CACHE: dict[tuple[SpecialKind, str, int | None], Expression] = {}
_LOCK = threading.Lock()


def _dewitt_text(conv: Conventions) -> str:
    if conv.dewitt == "literal":
        return "g[_a _c]*g[_b _d] + g[_a _d]*g[_b _c] - 1/2*g[_a _b]*g[_c _d]"
    k = conv.dewitt_trace()
    return (
        "1/2*g[_a _c]*g[_b _d] + 1/2*g[_a _d]*g[_b _c]"
        f" - {k.numerator}/{k.denominator}*g[_a _b]*g[_c _d]"
    )


def _raw_template(kind: SpecialKind, conv: Conventions) -> str:
    if kind is SpecialKind.DEWITT:
        return _dewitt_text(conv)
    if kind is SpecialKind.DEWITT_INVERSE:
        if conv.dewitt != "half":
            raise UnsupportedSymbolError(
                "DeWittInverse is defined only for the 'half' normalization", kind.value
            )
        return _DEWITT_INVERSE
    return {
        SpecialKind.XI: _XI,
        SpecialKind.A0: _A0,
        SpecialKind.A1: _A1,
        SpecialKind.A2: _A2,
        SpecialKind.F0: _F0,
    }[kind]


def template(kind: SpecialKind, conv: Conventions = DEFAULT_CONVENTIONS) -> Expression:
    """Реалізація спеціального тензора з мітками слотів з ``SLOTS`` (кешується)."""
    key = (kind, conv.dewitt, conv.dim if kind is SpecialKind.DEWITT else None)
    with _LOCK:
        cached = _CACHE.get(key)
    if cached is not None:
        return cached
    body = parse(_raw_template(kind, conv))
    if kind is not SpecialKind.XI:
        body = expand_specials(body, conv)
    with _LOCK:
        _CACHE[key] = body
    log.debug("Built template %s (%d terms)", kind.value, len(body))
    return body


def contains_specials(e: Expression) -> bool:
    names = {k.value for k in SpecialKind}
    return any(f.sym in names for t in e.terms for f in t.factors)


def expand_specials(e: Expression, conv: Conventions = DEFAULT_CONVENTIONS) -> Expression:
    """Розгортає всі спеціальні тензори виразу."""
    current = e
    for kind in EXPANSION_ORDER:
        if any(f.sym == kind.value for t in current.terms for f in t.factors):
            current = substitute(current, parse_factor(SLOTS[kind]), template(kind, conv))
    return current


def build_special(
    kind: SpecialKind, binding: Sequence[Index], conv: Conventions = DEFAULT_CONVENTIONS
) -> Expression:
    """Реалізує спеціальний тензор з довільним зв'язуванням індексів.

    Raises:
        SignatureError: кількість або варіантність індексів не відповідає символу.
    """
    sym = get_registry().get(kind.value)
    if len(binding) != sym.arity:
        raise SignatureError(
            f"{kind.value} takes {sym.arity} indices ({sym.signature()}), got {len(binding)}"
        )
    if tuple(i.up for i in binding) != sym.variance:
        raise SignatureError(f"{kind.value} expects index variance {sym.signature()}")
    return expand_specials(Expression.from_factor(Factor(kind.value, tuple(binding))), conv)
