"""Умови для доданка, лінійного за імпульсом: −∫ h β_ab π^ab.

* divfree: ∇_x(𝒢^{ab x y} β_ab) = 0, 𝒢 — обернена до супер-метрики DeWitt;
* curl: {F_o(f), L(h)} − {F_o(h), L(f)} ≈ 0 за модулем H_a.

Якщо обидві виконано, доданок поглинається канонічним перетворенням
π → π − δc/δg (c[g] не будується).
"""

from __future__ import annotations

import logging

from src.analyzer.reducer import reduce_weakly
from src.bracket.poisson import antisymmetrized_bracket
from src.calculus.leibniz import apply_prefix
from src.calculus.normal import normal_form
from src.contracts.enums import ConstraintKind
from src.contracts.errors import SignatureError
from src.contracts.functional import ConstraintSpec
from src.contracts.report import LinearConditionReport
from src.contracts.tensor import Expression, Index
from src.normalizer.parser import parse
from src.shared.cancel import CancelToken
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions
from src.variation.special import expand_specials

log = logging.getLogger(__name__)

GR_KINETIC = ConstraintSpec(ConstraintKind.GR_KINETIC, {}, "gr_kinetic")
ABSORBABLE_NOTE = (
    "Both conditions hold: the linear term is removable by a canonical "
    "transformation pi -> pi - dc/dg (c[g] not constructed)"
)


def normalized_beta(beta: Expression) -> Expression:
    """β з вільними _a _b.

    Raises:
        SignatureError: β не має рівно двох вільних нижніх індексів.
    """
    if len(beta.free) != 2 or any(i.up for i in beta.free):
        got = " ".join(map(str, beta.free)) or "(none)"
        raise SignatureError(f"beta must carry two free down indices, got {got}")
    x, y = (i.label for i in beta.free)
    renamed = beta.relabel_free({x: "p", y: "q"}).relabel_free({"p": "a", "q": "b"})
    terms = [t.freshen_dummies({"x", "y"}) for t in renamed.terms]
    return Expression.of(terms, renamed.free)


def divfree_residue(beta: Expression, conv: Conventions = DEFAULT_CONVENTIONS) -> Expression:
    """∇_x(𝒢^{ab x y} β_ab) у нормальній формі, вільний ^y."""
    inverse = expand_specials(parse("DeWittInverse[^a ^b ^x ^y]"), conv)
    contracted = inverse * expand_specials(normalized_beta(beta), conv)
    body = apply_prefix(("x",), contracted)
    return normal_form(body, conv.dim, max_terms=conv.max_terms, max_passes=conv.max_passes)


def curl_residue(
    beta: Expression,
    conv: Conventions = DEFAULT_CONVENTIONS,
    cancel: CancelToken | None = None,
) -> Expression:
    """Залишок антисиметризованої дужки {F_o, L} після слабкої редукції."""
    linear = ConstraintSpec(ConstraintKind.LINEAR_MOD, {"beta": normalized_beta(beta)}, "linear")
    raw = antisymmetrized_bracket(GR_KINETIC, linear, "f", "h", conv, cancel)
    return reduce_weakly(raw, conv, cancel).remainder


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def check_linear_term_conditions(
    beta: Expression,
    conv: Conventions = DEFAULT_CONVENTIONS,
    cancel: CancelToken | None = None,
) -> LinearConditionReport:
    """Перевіряє умови дивергенції та ротора для β_ab.

    Raises:
        SignatureError: β не є нижньою парою індексів.
    """
    if beta.is_zero():
        zero = Expression.zero([Index("y", True)])
        return LinearConditionReport(
            zero, Expression.zero(), ["beta = 0: conditions hold vacuously"], conv.profile_hash
        )
    report = LinearConditionReport(
        divfree_residue=divfree_residue(beta, conv),
        curl_residue=curl_residue(beta, conv, cancel),
        profile_hash=conv.profile_hash,
    )
    if report.absorbable:
        report.notes.append(ABSORBABLE_NOTE)
    log.info(
        "Linear term: divfree=%s, curl=%s", report.divfree_holds, report.curl_holds
    )
    return report
