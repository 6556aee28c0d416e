"""Нормальна форма: метрика → тотожності → канонізація → порядок похідних."""

from __future__ import annotations

import logging

from src.algebra.canon import canonicalize
from src.algebra.metric import DEFAULT_DIM, simplify_metric
from src.calculus.commute import commute_to_order
from src.calculus.identities import RewriteRule, apply_identities
from src.contracts.enums import OrderPolicy
from src.contracts.errors import ResourceLimitError
from src.contracts.tensor import Expression, Term
from src.shared.cancel import CancelToken, checkpoint

log = logging.getLogger(__name__)

DEFAULT_MAX_PASSES = 50
DEFAULT_MAX_TERMS = 200_000


def normal_form(
    e: Expression,
    dim: int | None = DEFAULT_DIM,
    *,
    policy: OrderPolicy = OrderPolicy.CANONICAL,
    max_passes: int = DEFAULT_MAX_PASSES,
    max_terms: int = DEFAULT_MAX_TERMS,
    cancel: CancelToken | None = None,
    rules: tuple[RewriteRule, ...] | None = None,
) -> Expression:
    """Доводить вираз до нерухомої точки переписувань.

    Raises:
        ResourceLimitError: перевищено ліміт проходів або термів.
        CancelledError: токен скасування встановлено.
    """
    current = e
    for n in range(max_passes):
        checkpoint(cancel, "normal_form")
        s = apply_identities(simplify_metric(current, dim), rules)
        out: list[Term] = []
        for t in s.terms:
            checkpoint(cancel, "normal_form")
            out.extend(commute_to_order(t, policy).terms)
            if len(out) > max_terms:
                raise ResourceLimitError(f"normal_form exceeded {max_terms} terms")
        nxt = canonicalize(Expression.of(out, e.free))
        log.debug("normal_form pass %d: %d terms", n + 1, len(nxt))
        if nxt == current:
            return nxt
        current = nxt
    raise ResourceLimitError(f"normal_form did not converge in {max_passes} passes")
