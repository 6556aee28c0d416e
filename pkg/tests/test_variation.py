"""Тести варіацій, спеціальних тензорів та функціональних похідних."""

from __future__ import annotations

import pytest

from src.algebra.canon import equal
from src.calculus.normal import normal_form
from src.contracts.enums import SpecialKind, Wrt
from src.contracts.errors import (
    CancelledError,
    SignatureError,
    StructureError,
    UnsupportedSymbolError,
)
from src.contracts.tensor import Expression, down, up
from src.normalizer.parser import parse
from src.shared.cancel import CancelToken
from src.variation.fderiv import functional_derivative
from src.variation.special import build_special, contains_specials, expand_specials, template
from src.variation.vary import vary_metric, vary_momentum
from tests.conftest import make_conventions, make_functional


class TestVaryMetric:
    def test_volume_element(self):
        assert equal(vary_metric(parse("sqrtg")), parse("1/2*sqrtg*ginv[^a ^b]*dg[_a _b]"))

    def test_inverse_metric(self):
        assert equal(
            vary_metric(parse("ginv[^a ^b]")),
            parse("- ginv[^a ^c]*ginv[^b ^d]*dg[_c _d]"),
        )

    def test_scalar_curvature(self):
        expected = parse(
            "- ginv[^a ^c]*ginv[^b ^d]*Ricci[_c _d]*dg[_a _b]"
            " + ginv[^a ^c]*ginv[^b ^d]*D(_c, D(_d, dg[_a _b]))"
            " - ginv[^a ^b]*ginv[^c ^d]*D(_c, D(_d, dg[_a _b]))"
        )
        assert equal(normal_form(vary_metric(parse("R"))), normal_form(expected))

    def test_constants_and_smearings_do_not_vary(self):
        assert vary_metric(parse("Lambda*f")).is_zero()

    def test_second_variation_rejected(self):
        with pytest.raises(StructureError):
            vary_metric(parse("dpi[^a ^b]*g[_a _b]"))


class TestVaryMomentum:
    def test_each_momentum_replaced(self):
        out = vary_momentum(parse("pi[^a ^b]*pi[^c ^d]*g[_a _c]*g[_b _d]"))
        assert equal(out, parse("2*dpi[^a ^b]*pi[^c ^d]*g[_a _c]*g[_b _d]"))

    def test_derivatives_kept(self):
        out = vary_momentum(parse("g[_a _c]*D(_b, pi[^b ^c])"))
        assert equal(out, parse("g[_a _c]*D(_b, dpi[^b ^c])"))

    def test_second_variation_rejected(self):
        with pytest.raises(StructureError):
            vary_momentum(parse("dg[_a _b]*pi[^a ^b]"))


class TestSpecials:
    def test_dewitt_times_inverse_is_symmetric_identity(self):
        product = normal_form(expand_specials(parse("G[_a _b _c _d]*DeWittInverse[^c ^d ^e ^f]")))
        expected = parse("1/2*delta[_a ^e]*delta[_b ^f] + 1/2*delta[_a ^f]*delta[_b ^e]")
        assert equal(product, expected)

    def test_dewitt_double_trace(self):
        e = parse("G[_a _b _c _d]*ginv[^a ^b]*ginv[^c ^d]")
        assert equal(normal_form(expand_specials(e)), parse("-3/2"))
        literal = make_conventions(dewitt="literal")
        assert equal(normal_form(expand_specials(e, literal)), parse("3/2"))

    def test_xi_builds_christoffel_variation(self):
        lhs = expand_specials(parse("Xi[^l ^i ^j _c _a _b]*D(_l, dg[_i _j])"))
        rhs = parse("D(_a, dg[_b _c]) + D(_b, dg[_a _c]) - D(_c, dg[_a _b])")
        assert equal(normal_form(lhs), normal_form(rhs))

    def test_inverse_needs_half_normalization(self):
        with pytest.raises(UnsupportedSymbolError):
            template(SpecialKind.DEWITT_INVERSE, make_conventions(dewitt="literal"))

    def test_dewitt_needs_numeric_dimension(self):
        with pytest.raises(SignatureError):
            expand_specials(parse("G[_a _b _c _d]"), make_conventions(dim=None))

    def test_build_special_checks_binding(self):
        with pytest.raises(SignatureError):
            build_special(SpecialKind.DEWITT, [down("a")])
        with pytest.raises(SignatureError):
            build_special(SpecialKind.DEWITT, [up("a"), down("b"), down("c"), down("d")])
        out = build_special(SpecialKind.DEWITT, [down("p"), down("q"), down("r"), down("s")])
        assert not contains_specials(out)
        assert out.free == (down("p"), down("q"), down("r"), down("s"))


def _expanded(text: str) -> Expression:
    return normal_form(expand_specials(parse(text)))


def _same_after_expansion(lhs: str, rhs: str) -> bool:
    return equal(_expanded(lhs), _expanded(rhs))


# π з опущеними індексами записано явно через g
_PI_LOW = "g[_i _x]*g[_j _y]*pi[^x ^y]"
_TRACE = "g[_u _v]*pi[^u ^v]"
_QUADRATIC_PART = (
    "delta[_e ^n]*pi[^c ^k]*g[_k _x]*pi[^d ^x]"
    " + 1/2*pi[^c ^n]*g[_e _x]*pi[^d ^x] + 1/2*pi[^d ^n]*g[_e _x]*pi[^c ^x]"
    " - 1/2*ginv[^d ^n]*pi[^c ^k]*g[_k _x]*g[_e _y]*pi[^x ^y]"
    " - 1/2*ginv[^c ^n]*pi[^d ^k]*g[_k _x]*g[_e _y]*pi[^x ^y]"
)


class TestSpecialIdentities:
    def test_xi_contracted_with_momentum(self):
        assert _same_after_expansion(
            f"Xi[^l ^i ^j _k _a _b]*{_PI_LOW}",
            "- delta[_k ^l]*g[_a _x]*g[_b _y]*pi[^x ^y]"
            " + delta[_b ^l]*g[_a _x]*g[_k _y]*pi[^x ^y]"
            " + delta[_a ^l]*g[_b _x]*g[_k _y]*pi[^x ^y]",
        )

    def test_leading_coefficient_on_traceless_momentum(self):
        lhs = (
            f"A0[_k _l ^i ^j ^l1 ^l2]*{_PI_LOW}"
            f" - 1/2*A0[_k _l ^i ^j ^l1 ^l2]*g[_i _j]*{_TRACE}"
        )
        rhs = (
            f"1/2*{_TRACE}*ginv[^l1 ^l2]*g[_k _l]"
            f" - 1/4*{_TRACE}*delta[_k ^l1]*delta[_l ^l2]"
            f" - 1/4*{_TRACE}*delta[_l ^l1]*delta[_k ^l2]"
            " + delta[_l ^l2]*g[_k _y]*pi[^l1 ^y]"
            " + delta[_k ^l2]*g[_l _y]*pi[^l1 ^y]"
            " - ginv[^l1 ^l2]*g[_k _x]*g[_l _y]*pi[^x ^y]"
        )
        assert _same_after_expansion(lhs, rhs)

    def test_symmetrized_metric_contraction(self):
        # коефіцієнт 1 (не 2) при симетризованих членах
        lhs = (
            "1/2*Xi[^n ^i ^j _k _e _f]*g[_i _j]*ginv[^k ^c]*pi[^d ^f]"
            " + 1/2*Xi[^n ^i ^j _k _e _f]*g[_i _j]*ginv[^k ^d]*pi[^c ^f]"
        )
        rhs = (
            "delta[_e ^n]*pi[^c ^d]"
            " + 1/2*delta[_e ^c]*pi[^d ^n] + 1/2*delta[_e ^d]*pi[^c ^n]"
            " - 1/2*ginv[^n ^c]*g[_e _y]*pi[^d ^y] - 1/2*ginv[^n ^d]*g[_e _y]*pi[^c ^y]"
        )
        assert _same_after_expansion(lhs, rhs)

    def test_symmetrized_momentum_contraction(self):
        lhs = (
            f"1/2*Xi[^n ^i ^j _k _e _f]*{_PI_LOW}*ginv[^k ^c]*pi[^d ^f]"
            f" + 1/2*Xi[^n ^i ^j _k _e _f]*{_PI_LOW}*ginv[^k ^d]*pi[^c ^f]"
        )
        assert _same_after_expansion(lhs, _QUADRATIC_PART)

    def test_symmetrized_traceless_contraction(self):
        lhs = (
            f"1/2*Xi[^n ^i ^j _k _e _f]*{_PI_LOW}*ginv[^k ^c]*pi[^d ^f]"
            f" + 1/2*Xi[^n ^i ^j _k _e _f]*{_PI_LOW}*ginv[^k ^d]*pi[^c ^f]"
            f" - 1/4*{_TRACE}*Xi[^n ^i ^j _k _e _f]*g[_i _j]*ginv[^k ^c]*pi[^d ^f]"
            f" - 1/4*{_TRACE}*Xi[^n ^i ^j _k _e _f]*g[_i _j]*ginv[^k ^d]*pi[^c ^f]"
        )
        # слідова частина: метричні члени входять з +1/4
        rhs = (
            f"{_QUADRATIC_PART}"
            f" - 1/2*{_TRACE}*delta[_e ^n]*pi[^c ^d]"
            f" + 1/4*{_TRACE}*ginv[^n ^c]*g[_e _y]*pi[^d ^y]"
            f" + 1/4*{_TRACE}*ginv[^n ^d]*g[_e _y]*pi[^c ^y]"
            f" - 1/4*{_TRACE}*delta[_e ^d]*pi[^c ^n]"
            f" - 1/4*{_TRACE}*delta[_e ^c]*pi[^d ^n]"
        )
        assert _same_after_expansion(lhs, rhs)

    def test_curvature_coefficient_trace_is_minus_inverse_dewitt(self):
        assert _same_after_expansion(
            "delta[_h ^f]*ginv[^e ^g]*F0[^h ^l1 ^i ^j ^l2 _e _f _g]",
            "- DeWittInverse[^i ^j ^l1 ^l2]",
        )

    def test_curvature_coefficient_gives_riemann_variation(self):
        varied = vary_metric(parse("ginv[^h ^m]*Riem[_m _e _f _g]"))
        top = Expression.of(
            [
                t
                for t in varied.terms
                if any(f.sym == "dg" and len(f.derivs) == 2 for f in t.factors)
            ],
            varied.free,
        )
        expected = expand_specials(
            parse("- F0[^h ^l1 ^i ^j ^l2 _e _f _g]*D(_l2, D(_l1, dg[_i _j]))")
        )
        assert equal(normal_form(top), normal_form(expected))


class TestFunctionalDerivative:
    def test_volume_wrt_metric(self):
        k = functional_derivative(make_functional(density="sqrtg"), Wrt.METRIC)
        assert k.free == (up("a"), up("b"))
        assert equal(k, parse("1/2*f*sqrtg*ginv[^a ^b]"))

    def test_kinetic_wrt_momentum(self):
        F = make_functional(
            density="isqrtg*pi[^a ^b]*pi[^c ^d]*g[_a _c]*g[_b _d]", smearing="N"
        )
        k = functional_derivative(F, Wrt.MOMENTUM)
        assert k.free == (down("a"), down("b"))
        assert equal(k, parse("2*N*isqrtg*g[_a _c]*g[_b _d]*pi[^c ^d]"))

    def test_curvature_moves_derivatives_onto_smearing(self):
        k = functional_derivative(make_functional(density="sqrtg*R"), Wrt.METRIC)
        expected = parse(
            "1/2*f*sqrtg*R*ginv[^a ^b]"
            " - f*sqrtg*ginv[^a ^c]*ginv[^b ^d]*Ricci[_c _d]"
            " + sqrtg*ginv[^a ^c]*ginv[^b ^d]*D(_c, D(_d, f))"
            " - sqrtg*ginv[^a ^b]*ginv[^c ^d]*D(_c, D(_d, f))"
        )
        assert equal(k, normal_form(expected))

    def test_momentum_independent_density(self):
        k = functional_derivative(make_functional(density="sqrtg*R"), Wrt.MOMENTUM)
        assert k.is_zero()

    def test_formal_variation_in_integrand_rejected(self):
        with pytest.raises(StructureError):
            functional_derivative(make_functional(density="dg[_a _b]*pi[^a ^b]"), Wrt.MOMENTUM)

    def test_cancelled(self):
        token = CancelToken()
        token.cancel()
        with pytest.raises(CancelledError):
            functional_derivative(make_functional(density="sqrtg*R"), Wrt.METRIC, cancel=token)
