"""Градуювання виразу за (степінь π, похідний порядок, похідні на розмазуванні)."""

from __future__ import annotations

import logging
from collections import defaultdict

from src.algebra.grading import derivative_degree, momentum_power, smearing_derivatives
from src.contracts.report import BucketKey, GradeBucket
from src.contracts.tensor import Expression, Term

log = logging.getLogger(__name__)


def bucket_key(term: Term) -> BucketKey:
    return (momentum_power(term), derivative_degree(term), smearing_derivatives(term))


def classify(e: Expression) -> list[GradeBucket]:
    """Точне розбиття термів на комірки; порядок комірок зростаючий за ключем.

    Сума комірок дорівнює входу (терми не змінюються і не переносяться).
    """
    groups: dict[BucketKey, list[Term]] = defaultdict(list)
    for t in e.terms:
        groups[bucket_key(t)].append(t)
    buckets = [
        GradeBucket(p, d, s, Expression(tuple(terms), e.free))
        for (p, d, s), terms in sorted(groups.items())
    ]
    log.debug("classify: %d terms → %d buckets", len(e), len(buckets))
    return buckets


def merge_buckets(buckets: list[GradeBucket]) -> Expression:
    """Зворотна операція до classify (без зміни порядку термів усередині комірок)."""
    if not buckets:
        return Expression.zero()
    terms = tuple(t for b in buckets for t in b.terms.terms)
    return Expression(terms, buckets[0].terms.free)


def highest_bucket(buckets: list[GradeBucket]) -> GradeBucket | None:
    """Комірка найвищого градуса: спершу степінь π, далі похідні на розмазуванні, далі порядок."""
    nonzero = [b for b in buckets if not b.terms.is_zero()]
    if not nonzero:
        return None
    return max(
        nonzero, key=lambda b: (b.momentum_power, b.smearing_derivatives, b.derivative_degree)
    )
