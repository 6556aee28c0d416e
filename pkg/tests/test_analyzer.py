"""Тести класифікації, слабкої редукції, зіставлення з в'язями та умов."""

from __future__ import annotations

import pytest

from src.algebra.canon import canonicalize, equal
from src.analyzer.classifier import classify, highest_bucket, merge_buckets
from src.analyzer.closure import (
    BRACKETS,
    ClosureOptions,
    closure_report,
    combined_hamiltonian,
    load_closure_spec,
    run_bracket,
    verdict_for,
)
from src.analyzer.combination import divide_by_density, match_constraint_combination
from src.analyzer.conditions import (
    condition_names,
    conditions_for,
    partial_wrt,
    ricci_form,
)
from src.analyzer.linear import check_linear_term_conditions, divfree_residue, normalized_beta
from src.analyzer.reducer import MOMENTUM_SPEC, reduce_weakly
from src.calculus.normal import normal_form
from src.contracts.enums import ConstraintKind, Verdict
from src.contracts.errors import SignatureError
from src.contracts.functional import ConstraintSpec
from src.contracts.report import BracketOutcome
from src.contracts.tensor import Expression, down, up
from src.normalizer.parser import load_expression, parse
from tests.conftest import CORPUS, write_json_file

MIXED = parse(
    "sqrtg*R*f + isqrtg*pi[^a ^b]*pi[^c ^d]*g[_a _c]*g[_b _d]*f + sqrtg*D(_a, f)*xi[^a]"
)


def make_outcome(*, remainder: str, name: str = "hamiltonian") -> BracketOutcome:
    e = parse(remainder)
    return BracketOutcome(name=name, raw=e, buckets=classify(e), kernels={}, remainder=e)


class TestClassify:
    def test_partition_keys(self):
        keys = [b.key for b in classify(MIXED)]
        assert keys == sorted(keys)
        assert set(keys) == {(0, 2, 0), (2, 0, 0), (0, 1, 1)}

    def test_merge_restores_terms(self):
        merged = merge_buckets(classify(MIXED))
        assert equal(merged, MIXED)
        assert len(merged) == len(MIXED)

    def test_highest_bucket_prefers_momentum_power(self):
        top = highest_bucket(classify(MIXED))
        assert top is not None
        assert top.momentum_power == 2

    def test_highest_bucket_then_smearing_derivatives(self):
        e = parse("sqrtg*D(_a, D(_b, R))*w[^a ^b] + sqrtg*D(_a, f)*xi[^a]")
        top = highest_bucket(classify(e))
        assert top.smearing_derivatives == 1

    def test_gauss_bonnet_momentum_powers(self):
        e = canonicalize(load_expression(CORPUS / "gb_hamiltonian.expr"))
        assert {b.momentum_power for b in classify(e)} == {0, 2, 4}

    def test_empty(self):
        assert highest_bucket([]) is None
        assert merge_buckets([]).is_zero()


class TestReduceWeakly:
    def test_bare_divergence(self):
        red = reduce_weakly(parse("xi[^a]*g[_a _c]*D(_b, pi[^b ^c])"))
        assert red.remainder.is_zero()
        assert len(red.sites) == 1
        assert red.sites[0].prefix == ()
        assert red.kernel.free == (up("a"),)
        assert equal(red.kernel, parse("-1/2*xi[^a]"))
        assert red.reconstructed

    def test_divergence_under_outer_derivative(self):
        red = reduce_weakly(parse("xi[^d]*eta[^a]*g[_a _c]*D(_d, D(_b, pi[^b ^c]))"))
        assert red.remainder.is_zero()
        assert len(red.sites[0].prefix) == 1
        expected = normal_form(
            parse("1/2*D(_d, xi[^d])*eta[^a] + 1/2*xi[^d]*D(_d, eta[^a])")
        )
        assert equal(red.kernel, expected)
        assert red.reconstructed

    def test_nothing_to_reduce(self):
        e = parse("f*sqrtg*R")
        red = reduce_weakly(e)
        assert red.sites == []
        assert red.kernel.is_zero()
        assert equal(red.remainder, e)


class TestCombination:
    def test_divide_by_scalar_density(self):
        kernel, rest = divide_by_density(
            parse("2*f*sqrtg*R + f*sqrtg*Lambda"), parse("sqrtg*R")
        )
        assert equal(kernel, parse("2*f"))
        assert equal(rest, parse("f*sqrtg*Lambda"))

    def test_momentum_kernel_named(self):
        match = match_constraint_combination(
            parse("xi[^a]*g[_a _c]*D(_b, pi[^b ^c])"), [MOMENTUM_SPEC]
        )
        assert match.matched
        assert set(match.kernels) == {"momentum_constraint"}

    def test_unmatched_remainder(self):
        e = parse("f*sqrtg*Lambda")
        match = match_constraint_combination(e, [MOMENTUM_SPEC])
        assert not match.matched
        assert match.kernels == {}
        assert equal(match.remainder, e)


class TestConditions:
    def test_keys_follow_curvature(self, library):
        assert set(conditions_for(library.get("reduced_B"))) == {"reduced_B:momentum_quadratic"}
        assert set(conditions_for(library.get("curvature_trace"))) == {
            "curvature_trace:curvature"
        }
        assert conditions_for(library.get("gr_hamiltonian")) == {}

    def test_condition_names(self):
        assert condition_names(parse("R*g[_a _b]")) == ["curvature"]
        assert condition_names(parse("C*g[_a _b]")) == ["momentum_quadratic"]

    def test_momentum_quadratic_signature(self, library):
        value = conditions_for(library.get("reduced_B"))["reduced_B:momentum_quadratic"]
        assert value.free == (down("a"), down("b"))
        assert not value.is_zero()

    def test_partial_derivative_symmetrized(self):
        out = partial_wrt(parse("Ricci[_a _b]*xi[^a]*eta[^b]"), "Ricci", 0, ("k", "l"))
        assert equal(out, parse("1/2*xi[^k]*eta[^l] + 1/2*xi[^l]*eta[^k]"))

    def test_ricci_form(self):
        assert equal(ricci_form(parse("R")), parse("ginv[^a ^b]*Ricci[_a _b]"))


class TestLinearTerm:
    def test_zero_beta_is_vacuous(self):
        report = check_linear_term_conditions(Expression.zero([down("a"), down("b")]))
        assert report.absorbable
        assert report.notes == ["beta = 0: conditions hold vacuously"]

    def test_beta_signature(self):
        with pytest.raises(SignatureError):
            normalized_beta(parse("xi[^a]"))
        assert normalized_beta(parse("Ricci[_c _d]")).free == (down("a"), down("b"))

    def test_constant_multiple_of_metric_is_divergence_free(self):
        assert divfree_residue(parse("c*g[_a _b]")).is_zero()

    def test_curvature_multiple_of_metric_is_not(self):
        residue = divfree_residue(parse("R*g[_a _b]"))
        assert equal(residue, normal_form(parse("-2*ginv[^x ^y]*D(_x, R)")))


class TestClosurePlumbing:
    def test_options_reject_unknown_bracket(self):
        with pytest.raises(ValueError, match="Allowed:"):
            ClosureOptions(brackets=("hamiltonian", "jacobi"))

    def test_combined_hamiltonian(self, library):
        spec = combined_hamiltonian([library.get("gr_kinetic"), library.get("reduced_B")])
        assert spec.kind is ConstraintKind.DENSITY
        assert spec.display_name() == "H"
        with pytest.raises(ValueError):
            combined_hamiltonian([])

    def test_mixed_bracket_needs_momentum(self, library):
        with pytest.raises(ValueError, match="momentum"):
            run_bracket("mixed", library.get("gr_kinetic"), None)

    def test_verdict_picks_highest_bucket(self):
        outcomes = [
            make_outcome(remainder="N*M*sqrtg*R"),
            make_outcome(
                remainder="N*M*isqrtg*pi[^a ^b]*pi[^c ^d]*g[_a _c]*g[_b _d]", name="mixed"
            ),
        ]
        verdict, certificate, key = verdict_for(outcomes)
        assert verdict is Verdict.SECOND_CLASS
        assert key == (2, 0, 0)
        assert equal(certificate, outcomes[1].remainder)
        assert verdict_for([]) == (Verdict.FIRST_CLASS, None, None)

    def test_kinetic_only_closes_without_momentum(self, library):
        report = closure_report([library.get("gr_kinetic")], None, options=ClosureOptions())
        assert report.verdict is Verdict.FIRST_CLASS
        assert [o.name for o in report.brackets] == ["hamiltonian"]
        assert any("skipped" in n for n in report.notes)


class TestLoadClosureSpec:
    def test_corpus_file(self, library):
        spec = load_closure_spec(CORPUS / "gr.json", library)
        assert [s.kind for s in spec.hamiltonian] == [ConstraintKind.GR_HAMILTONIAN]
        assert spec.momentum.kind is ConstraintKind.MOMENTUM_CONSTRAINT
        assert spec.brackets == BRACKETS
        assert spec.name == "gr"

    def test_selected_brackets(self, library):
        spec = load_closure_spec(CORPUS / "curvature_trace.json", library)
        assert spec.brackets == ("hamiltonian",)
        assert len(spec.hamiltonian) == 2

    def test_inline_row(self, tmp_path, library):
        path = tmp_path / "inline.json"
        write_json_file(
            path, {"hamiltonian": {"name": "vol", "kind": "density", "density": "sqrtg*R"}}
        )
        spec = load_closure_spec(path, library)
        assert spec.momentum is None
        assert spec.hamiltonian[0] == ConstraintSpec(
            ConstraintKind.DENSITY, {"density": "sqrtg*R"}, "vol"
        )
