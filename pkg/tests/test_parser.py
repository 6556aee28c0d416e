"""Тести граматики виразів та рендерингу."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest

from src.algebra.canon import equal
from src.contracts.enums import OutputFormat
from src.contracts.errors import ParseError
from src.contracts.tensor import Factor, down, up
from src.normalizer.parser import load_expression, parse, parse_factor
from src.normalizer.render import latex_label, render, to_latex
from tests.conftest import CORPUS


class TestParse:
    def test_scalar_contraction(self):
        e = parse("pi[^a ^b]*g[_a _b]")
        assert e.free == ()
        assert len(e.terms[0].factors) == 2

    def test_lowering_inserts_metrics(self):
        e = parse("pi[_a _b]")
        assert e.free == (down("a"), down("b"))
        assert sorted(f.sym for f in e.terms[0].factors) == ["g", "g", "pi"]

    def test_upper_derivative_inserts_inverse_metric(self):
        e = parse("D(^a, f)")
        assert e.free == (up("a"),)
        assert sorted(f.sym for f in e.terms[0].factors) == ["f", "ginv"]

    def test_rational_and_dim(self):
        e = parse("3/4*dim*R")
        assert e.terms[0].coeff == Fraction(3, 4)
        assert e.terms[0].dimpow == 1

    def test_signs(self):
        e = parse("- R + 2 Lambda - 1/2*Lambda")
        assert [t.coeff for t in e.terms] == [-1, 2, Fraction(-1, 2)]

    def test_parse_factor(self):
        assert parse_factor("Ricci[_a _b]") == Factor("Ricci", (down("a"), down("b")))
        with pytest.raises(ParseError):
            parse_factor("2*R")


class TestParseErrors:
    @pytest.mark.parametrize("src", ["R +", "pi[^a ^b", "D(_a R)", "1/0*R"])
    def test_syntax(self, src):
        with pytest.raises(ParseError) as exc:
            parse(src)
        assert exc.value.code == ParseError.SYNTAX

    def test_unknown_symbol_with_location(self):
        with pytest.raises(ParseError) as exc:
            parse("R + Weyl[_a _b]")
        assert exc.value.code == ParseError.UNKNOWN_SYMBOL
        assert exc.value.line == 1
        assert exc.value.column == 5

    def test_arity(self):
        with pytest.raises(ParseError) as exc:
            parse("g[_a]")
        assert exc.value.code == ParseError.ARITY
        assert "_ _" in str(exc.value)

    @pytest.mark.parametrize("src", ["g[_a _a]", "xi[^a] + f", "D(_a, dim)"])
    def test_index(self, src):
        with pytest.raises(ParseError) as exc:
            parse(src)
        assert exc.value.code == ParseError.INDEX


class TestLoad:
    def test_corpus_expression_file(self):
        e = load_expression(CORPUS / "gb_hamiltonian.expr")
        assert e.free == ()
        assert len(e) > 10

    def test_json_file(self, tmp_path):
        e = parse("sqrtg*R - 2*sqrtg*Lambda")
        p = tmp_path / "e.json"
        p.write_text(e.to_json(), encoding="utf-8")
        assert load_expression(p) == e

    def test_inline_text(self):
        assert equal(load_expression("sqrtg*R"), parse("R*sqrtg"))


class TestRender:
    def test_text_roundtrip(self):
        e = parse("1/2*sqrtg*R - Lambda*sqrtg + D(_a, f)*xi[^a]*sqrtg")
        assert equal(parse(render(e)), e)

    def test_latex_terms(self):
        assert to_latex(parse("1/2*sqrtg*R")) == r"\frac{1}{2} \sqrt{g} R"
        assert to_latex(parse("pi[^a ^b]*g[_a _b]")) == r"\pi^{a b} g_{a b}"
        assert to_latex(parse("delta[_a ^b]")) == r"\delta_{a}{}^{b}"
        assert to_latex(parse("-R")) == "-R"
        assert to_latex(parse("R").scale(0)) == "0"

    def test_latex_derivative_and_numbered_label(self):
        assert to_latex(parse("D(_c, f)*xi[^c]")) == r"\nabla_{c}f \xi^{c}"
        assert latex_label("i1") == "i_{1}"

    def test_json_format(self):
        text = render(parse("sqrtg*R"), OutputFormat.JSON)
        data = json.loads(text)
        assert list(data) == ["terms"]
        assert list(data["terms"][0]) == ["coeff", "dimpow", "factors"]
        assert data["terms"][0]["coeff"] == "1/1"
        assert list(data["terms"][0]["factors"][0]) == ["sym", "derivs", "slots"]
        assert "\n" not in text
