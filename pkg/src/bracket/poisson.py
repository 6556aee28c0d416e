"""Канонічна дужка Пуассона розмазаних функціоналів.

{A, B} = ∫ (δA/δg_ab · δB/δπ^ab − δA/δπ^ab · δB/δg_ab); результат — підінтегральний
вираз, з якого похідні знято з розмазування найвищого рангу.
"""

from __future__ import annotations

import logging
from collections import Counter
from fractions import Fraction

from src.algebra.registry import get_registry
from src.bracket.constraints import make_constraint
from src.calculus.ibp import integrate_by_parts
from src.calculus.normal import normal_form
from src.contracts.enums import VariationClass, Wrt
from src.contracts.errors import LocalizationError
from src.contracts.functional import ConstraintSpec, SmearedFunctional
from src.contracts.tensor import Expression, Term
from src.shared.cancel import CancelToken, checkpoint
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions
from src.variation.fderiv import functional_derivative

log = logging.getLogger(__name__)


def _smearing_counts(term: Term) -> Counter[str]:
    reg = get_registry()
    return Counter(f.sym for f in term.factors if reg.get(f.sym).vclass is VariationClass.SMEARING)


def ibp_target(e: Expression, conv: Conventions = DEFAULT_CONVENTIONS) -> str | None:
    """Розмазування найвищого рангу, присутнє рівно раз у кожному терміні."""
    if e.is_zero():
        return None
    counts = [_smearing_counts(t) for t in e.terms]
    common = [s for s in counts[0] if all(c[s] == 1 for c in counts)]
    if not common:
        return None
    return max(common, key=conv.smearing_rank)


def integrand_normal_form(
    e: Expression, conv: Conventions = DEFAULT_CONVENTIONS, cancel: CancelToken | None = None
) -> Expression:
    """Інтегрування частинами на ціль розмазування та нормальна форма."""
    target = ibp_target(e, conv)
    body = integrate_by_parts(e, target) if target else e
    return normal_form(
        body, conv.dim, max_passes=conv.max_passes, max_terms=conv.max_terms, cancel=cancel
    )


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def poisson_bracket(
    a: SmearedFunctional,
    b: SmearedFunctional,
    conv: Conventions = DEFAULT_CONVENTIONS,
    cancel: CancelToken | None = None,
) -> Expression:
    """Підінтегральний вираз {A, B} у нормальній формі.

    Raises:
        CancelledError: токен скасування встановлено.
        ResourceLimitError: перевищено ліміти нормальної форми.
    """
    da_g = functional_derivative(a, Wrt.METRIC, conv, cancel)
    checkpoint(cancel, "poisson_bracket")
    db_p = functional_derivative(b, Wrt.MOMENTUM, conv, cancel)
    checkpoint(cancel, "poisson_bracket")
    da_p = functional_derivative(a, Wrt.MOMENTUM, conv, cancel)
    checkpoint(cancel, "poisson_bracket")
    db_g = functional_derivative(b, Wrt.METRIC, conv, cancel)
    checkpoint(cancel, "poisson_bracket")
    raw = da_g * db_p - da_p * db_g
    result = integrand_normal_form(raw, conv, cancel)
    log.info("Bracket {%s, %s}: %d terms", a.label or "A", b.label or "B", len(result))
    return result


def antisymmetrized_bracket(
    a_spec: ConstraintSpec,
    b_spec: ConstraintSpec,
    f: str = "f",
    h: str = "h",
    conv: Conventions = DEFAULT_CONVENTIONS,
    cancel: CancelToken | None = None,
) -> Expression:
    """{A(f), B(h)} − {A(h), B(f)}; для A = B результат ділиться навпіл.

    При f = h різниця тотожно нуль.
    """
    first = poisson_bracket(
        make_constraint(a_spec, f, conv), make_constraint(b_spec, h, conv), conv, cancel
    )
    second = poisson_bracket(
        make_constraint(a_spec, h, conv), make_constraint(b_spec, f, conv), conv, cancel
    )
    diff = integrand_normal_form(first - second, conv, cancel)
    if a_spec == b_spec:
        diff = diff.scale(Fraction(1, 2))
    return diff


def localize(e: Expression, which: str) -> Expression:
    """Знімає інтеграл, поклавши ``which`` дельта-функцією.

    Raises:
        LocalizationError: ``which`` відсутнє, повторюється або має похідні.
    """
    out: list[Term] = []
    for t in e.terms:
        hits = [n for n, f in enumerate(t.factors) if f.sym == which]
        if len(hits) != 1:
            raise LocalizationError(
                f"Cannot localize on '{which}': term '{t}' contains it {len(hits)} times"
            )
        n = hits[0]
        if t.factors[n].derivs:
            raise LocalizationError(
                f"Cannot localize on '{which}': derivatives remain in term '{t}'; "
                "integrate by parts first"
            )
        out.append(t.with_factors(t.factors[:n] + t.factors[n + 1 :]))
    return Expression.of(out)


def jacobi_cyclic_sum(
    a: SmearedFunctional,
    b: SmearedFunctional,
    c: SmearedFunctional,
    conv: Conventions = DEFAULT_CONVENTIONS,
    cancel: CancelToken | None = None,
) -> Expression:
    """{{A,B},C} + {{B,C},A} + {{C,A},B} у нормальній формі."""
    total = Expression.zero()
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        label = f"{{{x.label},{y.label}}}"
        inner = SmearedFunctional(poisson_bracket(x, y, conv, cancel), None, label)
        total = total + poisson_bracket(inner, z, conv, cancel)
    return integrand_normal_form(total, conv, cancel)
