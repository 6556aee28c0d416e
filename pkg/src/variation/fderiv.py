"""Функціональні похідні розмазаних функціоналів за g_ab та π^ab."""

from __future__ import annotations

import logging
from fractions import Fraction

from src.calculus.leibniz import prefix_terms
from src.calculus.normal import normal_form
from src.contracts.enums import Wrt
from src.contracts.errors import StructureError
from src.contracts.functional import SmearedFunctional
from src.contracts.tensor import Expression, Index, Term
from src.shared.cancel import CancelToken
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions
from src.variation.vary import METRIC_VARIATION, MOMENTUM_VARIATION, vary_metric, vary_momentum

log = logging.getLogger(__name__)

KERNEL_LABELS = ("a", "b")


def kernel_terms(varied: Expression, var_sym: str) -> list[Term]:
    """Знімає похідні з варійованого фактора: ∫ X ∇_P δ = ∫ (−1)^|P| (∇_{P⁻¹} X) δ.

    Повертає терми ядра з вільними мітками a, b на місці слотів δ.
    """
    out: list[Term] = []
    for t in varied.terms:
        hits = [n for n, f in enumerate(t.factors) if f.sym == var_sym]
        if len(hits) != 1:
            raise StructureError(f"Expected exactly one '{var_sym}' per term, got {len(hits)}", var_sym)
        n = hits[0]
        f = t.factors[n]
        rest = Term(
            t.coeff * (-1) ** len(f.derivs), t.factors[:n] + t.factors[n + 1 :], t.dimpow
        )
        i, j = (s.label for s in f.slots)
        for c in prefix_terms(tuple(reversed(f.derivs)), [rest]):
            c = c.freshen_dummies(set(KERNEL_LABELS))
            out.append(c.relabel({i: KERNEL_LABELS[0], j: KERNEL_LABELS[1]}))
    return out


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def functional_derivative(
    functional: SmearedFunctional,
    wrt: Wrt,
    conv: Conventions = DEFAULT_CONVENTIONS,
    cancel: CancelToken | None = None,
) -> Expression:
    """δF/δg_ab (вільні ^a ^b) або δF/δπ^ab (вільні _a _b), симетризовано.

    Результат у нормальній формі; похідні розмазування зберігаються.

    Raises:
        StructureError: інтегранд уже містить формальну варіацію.
        UnsupportedSymbolError: метричний символ без правила варіації.
    """
    integrand = functional.integrand()
    if wrt is Wrt.METRIC:
        varied, var_sym, kernel_up = vary_metric(integrand, conv), METRIC_VARIATION, True
    else:
        varied, var_sym, kernel_up = vary_momentum(integrand), MOMENTUM_VARIATION, False
    free = [Index(label, kernel_up) for label in KERNEL_LABELS]
    k = Expression.of(kernel_terms(varied, var_sym), free)
    a, b = KERNEL_LABELS
    sym = (k + k.relabel_free({a: b, b: a})).scale(Fraction(1, 2))
    result = normal_form(
        sym, conv.dim, max_passes=conv.max_passes, max_terms=conv.max_terms, cancel=cancel
    )
    log.debug(
        "functional_derivative %s wrt %s: %d terms",
        functional.label or "F",
        wrt.value,
        len(result),
    )
    return result
