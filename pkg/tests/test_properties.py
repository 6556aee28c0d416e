"""Властивості канонізації та градуювання на випадкових сумах мономів."""

from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from src.algebra.canon import canonicalize, equal
from src.algebra.registry import get_registry
from src.analyzer.classifier import classify, merge_buckets
from src.calculus.normal import normal_form
from src.contracts.tensor import Expression, Factor, Term, down
from src.normalizer.parser import parse
from src.oracle.evaluate import evaluate, relative_error

MONOMIALS = (
    "sqrtg*R",
    "sqrtg*Lambda",
    "isqrtg*pi[^a ^b]*pi[^c ^d]*g[_a _c]*g[_b _d]",
    "isqrtg*R*pi[^a ^b]*g[_a _b]*pi[^c ^d]*g[_c _d]",
    "sqrtg*Ricci[_a _b]*ginv[^a ^c]*ginv[^b ^d]*Ricci[_c _d]",
    "sqrtg*Riem[_a _b _c _d]*w[^a ^c]*w[^b ^d]",
    "sqrtg*D(_a, f)*xi[^a]",
    "sqrtg*D(_a, D(_b, R))*w[^a ^b]",
)
LABELS = ("a", "b", "c", "d")

settings.register_profile("adm", max_examples=40, deadline=None)
settings.load_profile("adm")

monomial_sums = st.lists(
    st.tuples(st.sampled_from(MONOMIALS), st.integers(min_value=-3, max_value=3)),
    min_size=1,
    max_size=5,
)


def build(pairs: list[tuple[str, int]]) -> Expression:
    total = Expression.zero()
    for text, coeff in pairs:
        total = total + parse(text).scale(coeff)
    return total


class TestCanonicalForm:
    @given(monomial_sums)
    def test_idempotent(self, pairs):
        once = canonicalize(build(pairs))
        assert canonicalize(once) == once

    @given(monomial_sums, st.permutations(LABELS))
    def test_dummy_renaming_invariant(self, pairs, perm):
        e = build(pairs)
        mapping = dict(zip(LABELS, perm, strict=True))
        renamed = Expression.of([t.relabel(mapping) for t in e.terms], e.free)
        assert equal(e, renamed)

    @given(monomial_sums)
    def test_difference_vanishes(self, pairs):
        e = build(pairs)
        assert normal_form(e - e).is_zero()

    @given(st.sampled_from(range(len(get_registry().group("Riem")))))
    def test_riemann_group_elements(self, n):
        perm, sign = get_registry().group("Riem")[n]
        slots = tuple(down(LABELS[p]) for p in perm)
        moved = Expression.of([Term.of(sign, Factor("Riem", slots))])
        assert equal(moved, parse("Riem[_a _b _c _d]"))


class TestGrading:
    @given(monomial_sums)
    def test_buckets_partition_terms(self, pairs):
        e = canonicalize(build(pairs))
        buckets = classify(e)
        assert sum(len(b.terms) for b in buckets) == len(e)
        assert len({b.key for b in buckets}) == len(buckets)
        assert equal(merge_buckets(buckets), e)


class TestNumericAgreement:
    @settings(max_examples=100)
    @given(monomial_sums)
    def test_canonical_form_evaluates_identically(self, chart, pairs):
        e = build(pairs)
        canon = canonicalize(e)
        if canon.is_zero():
            assert np.max(np.abs(evaluate(e, chart))) < 1e-9
            return
        assert relative_error(evaluate(canon, chart), evaluate(e, chart)) < 1e-9
