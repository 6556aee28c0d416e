"""Тести алгебри коваріантних похідних: Лейбніц, комутатори, інтегрування частинами."""

from __future__ import annotations

import logging

import pytest

from src.algebra.canon import equal
from src.calculus.commute import commute_to_order
from src.calculus.ibp import integrate_by_parts
from src.calculus.identities import apply_identities, default_rules
from src.calculus.leibniz import apply_prefix, leibniz_expand
from src.calculus.normal import normal_form
from src.contracts.enums import OrderPolicy
from src.contracts.errors import CancelledError, ResourceLimitError, StructureError
from src.contracts.tensor import down, up
from src.normalizer.parser import parse
from src.shared.cancel import CancelToken


class TestLeibniz:
    def test_product_rule(self):
        out = leibniz_expand("c", parse("f*xi[^a]"))
        assert out.free == (up("a"), down("c"))
        assert equal(out, parse("D(_c, f)*xi[^a] + f*D(_c, xi[^a])"))

    def test_covariantly_constant_factors_skipped(self):
        assert equal(leibniz_expand("c", parse("sqrtg*f")), parse("sqrtg*D(_c, f)"))

    def test_contracting_derivative_removes_free_index(self):
        assert apply_prefix(("a",), parse("xi[^a]")).free == ()

    def test_clash_with_free_down_index(self):
        with pytest.raises(StructureError):
            leibniz_expand("a", parse("Ricci[_a _b]"))


class TestCommute:
    def test_scalar_derivatives_commute(self):
        e = parse("D(_a, D(_b, f))*xi[^a]*eta[^b] - D(_b, D(_a, f))*xi[^a]*eta[^b]")
        assert normal_form(e).is_zero()

    def test_vector_commutator_gives_riemann(self):
        lhs = normal_form(parse("D(_c, D(_d, xi[^a])) - D(_d, D(_c, xi[^a]))"))
        rhs = normal_form(parse("ginv[^a ^e]*Riem[_e _b _c _d]*xi[^b]"))
        assert equal(lhs, rhs)

    def test_divergence_policy_moves_contracted_derivative_inward(self):
        out = commute_to_order(parse("D(_b, D(_c, pi[^a ^b]))").terms[0], OrderPolicy.DIVERGENCE)
        assert out.terms[0].factors[0].derivs == ("c", "b")
        assert len(out) == 3

    def test_already_ordered_term_untouched(self):
        term = parse("D(_c, D(_b, pi[^a ^b]))").terms[0]
        out = commute_to_order(term, OrderPolicy.DIVERGENCE)
        assert out.terms == (term,)


class TestIdentities:
    def test_rules_loaded(self):
        names = {r.name for r in default_rules()}
        assert {"riemann_trace", "ricci_trace", "contracted_bianchi"} <= names

    def test_traces(self):
        assert equal(apply_identities(parse("ginv[^a ^b]*Ricci[_a _b]")), parse("R"))
        assert equal(
            apply_identities(parse("ginv[^a ^c]*Riem[_a _b _c _d]")), parse("Ricci[_b _d]")
        )

    def test_contracted_bianchi(self):
        out = normal_form(parse("ginv[^a ^c]*D(_c, Ricci[_a _b])"))
        assert equal(out, parse("1/2*D(_b, R)"))

    def test_contracted_bianchi_under_outer_derivative(self):
        out = normal_form(parse("ginv[^a ^c]*D(_e, D(_c, Ricci[_a _b]))*xi[^e]*eta[^b]"))
        assert equal(out, normal_form(parse("1/2*D(_e, D(_b, R))*xi[^e]*eta[^b]")))

    def test_cyclic_identity_on_free_indices(self):
        e = parse("Riem[_a _b _c _d] + Riem[_a _c _d _b] + Riem[_a _d _b _c]")
        assert normal_form(e).is_zero()


class TestIntegrateByParts:
    def test_single_derivative_flips_sign(self):
        out = integrate_by_parts(parse("sqrtg*D(_a, f)*xi[^a]"), "f")
        assert equal(out, parse("- sqrtg*f*D(_a, xi[^a])"))

    def test_two_derivatives_reverse_order(self):
        out = integrate_by_parts(parse("sqrtg*D(_a, D(_b, f))*w[^a ^b]"), "f")
        assert equal(out, parse("sqrtg*f*D(_b, D(_a, w[^a ^b]))"))

    def test_repeated_target_rejected(self):
        with pytest.raises(StructureError):
            integrate_by_parts(parse("sqrtg*f*D(_a, f)*xi[^a]"), "f")

    def test_non_density_integrand_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger="src.calculus.ibp"):
            integrate_by_parts(parse("D(_a, f)*xi[^a]"), "f")
        assert any("Non-density integrand" in r.message for r in caplog.records)


class TestNormalFormLimits:
    def test_term_cap(self):
        with pytest.raises(ResourceLimitError):
            normal_form(parse("R + Lambda"), max_terms=1)

    def test_pass_cap(self):
        with pytest.raises(ResourceLimitError, match="did not converge"):
            normal_form(parse("R"), max_passes=0)

    def test_cancelled(self):
        token = CancelToken()
        token.cancel()
        with pytest.raises(CancelledError):
            normal_form(parse("R"), cancel=token)

    def test_fixed_point(self):
        e = normal_form(parse("D(_a, D(_b, xi[^c]))*g[_c _e]*ginv[^a ^b]*eta[^e]"))
        assert normal_form(e) == e
