"""Розбір текстової мови виразів (lark, LALR).

Граматика::

    expr    := ['+'|'-'] term (('+'|'-') term)*
    term    := rational ['*'] product | rational | product
    factor  := NAME '[' index+ ']' | 'D(' index ',' factor ')' | NAME
    index   := ('^'|'_') label

Індекси не в природній варіантності символу опускаються/піднімаються
явними g/ginv, а ∇^a записується як ginv^{ax} ∇_x.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import lark
from lark.exceptions import UnexpectedInput, VisitError

from src.algebra.registry import get_registry
from src.contracts.errors import (
    AdmClosureError,
    ParseError,
    SignatureError,
    StructureError,
    UnsupportedSymbolError,
)
from src.contracts.tensor import Expression, Factor, Index, Term, fresh_label
from src.shared.config_loader import load_json

log = logging.getLogger(__name__)

GRAMMAR = r"""
    start: expr
    expr: lead (ADDOP term)*
    lead: ADDOP? term
    term: RATIONAL ("*"? product)?  -> coeff_term
        | product                   -> plain_term
    product: factor ("*" factor)*
    ?factor: NAME "[" INDEX+ "]"          -> indexed
           | "D" "(" INDEX "," factor ")" -> deriv
           | NAME                         -> scalar

    ADDOP: "+" | "-"
    RATIONAL: /\d+(\/\d+)?/
    INDEX: /[\^_][A-Za-z#][A-Za-z0-9]*/
    NAME: /[A-Za-z][A-Za-z0-9]*/

    %import common.WS
    %ignore WS
"""

DIM_NAME = "dim"

_PARSER = lark.Lark(GRAMMAR, start="start", parser="lalr", propagate_positions=True)
_LABEL_RE = re.compile(r"[\^_]([A-Za-z#][A-Za-z0-9]*)")


@dataclass(slots=True)
class _Piece:
    """Фактор разом з метриками, вставленими для зміни варіантності."""

    factor: Factor | None
    token: lark.Token
    extras: list[Factor] = field(default_factory=list)
    dimpow: int = 0


def _error(message: str, code: str, token: lark.Token) -> ParseError:
    return ParseError(message, code, getattr(token, "line", 0) or 0, getattr(token, "column", 0) or 0)


class ExpressionBuilder(lark.Transformer):
    """Будує Expression з дерева розбору."""

    def __init__(self, used: set[str]) -> None:
        super().__init__()
        self._used = used

    def _fresh(self) -> str:
        return fresh_label(self._used)

    def indexed(self, items: list) -> _Piece:
        name, *raw = items
        try:
            sym = get_registry().get(str(name))
        except UnsupportedSymbolError:
            raise _error(f"Unknown symbol '{name}'", ParseError.UNKNOWN_SYMBOL, name) from None
        if len(raw) != sym.arity:
            raise _error(
                f"'{name}' takes {sym.arity} indices ({sym.signature()}), got {len(raw)}",
                ParseError.ARITY,
                name,
            )
        slots: list[Index] = []
        extras: list[Factor] = []
        for tok, natural_up in zip(raw, sym.variance, strict=True):
            idx = Index.parse(str(tok))
            if idx.up == natural_up:
                slots.append(idx)
                continue
            x = self._fresh()
            if natural_up:
                slots.append(Index(x, True))
                extras.append(Factor("g", (idx, Index(x, False))))
            else:
                slots.append(Index(x, False))
                extras.append(Factor("ginv", (idx, Index(x, True))))
        return _Piece(Factor(sym.name, tuple(slots)), name, extras)

    def scalar(self, items: list) -> _Piece:
        (name,) = items
        if str(name) == DIM_NAME:
            return _Piece(None, name, dimpow=1)
        return self.indexed([name])

    def deriv(self, items: list) -> _Piece:
        tok, inner = items
        if inner.factor is None:
            raise _error("Cannot differentiate 'dim'", ParseError.INDEX, tok)
        idx = Index.parse(str(tok))
        if not idx.up:
            return _Piece(inner.factor.differentiate(idx.label), inner.token, inner.extras)
        x = self._fresh()
        raise_ = Factor("ginv", (idx, Index(x, True)))
        return _Piece(inner.factor.differentiate(x), inner.token, [*inner.extras, raise_])

    def product(self, items: list) -> list[_Piece]:
        return list(items)

    def _term(self, coeff: Fraction, pieces: list[_Piece], token: lark.Token) -> Term:
        factors: list[Factor] = []
        dimpow = 0
        for p in pieces:
            if p.factor is not None:
                factors.append(p.factor)
            factors.extend(p.extras)
            dimpow += p.dimpow
        try:
            return Term(coeff, tuple(factors), dimpow)
        except StructureError as exc:
            raise _error(str(exc), ParseError.INDEX, token) from None

    def coeff_term(self, items: list) -> Term:
        tok = items[0]
        pieces = items[1] if len(items) > 1 else []
        try:
            coeff = Fraction(str(tok))
        except ZeroDivisionError:
            raise _error(f"Bad rational '{tok}'", ParseError.SYNTAX, tok) from None
        return self._term(coeff, pieces, tok)

    def plain_term(self, items: list) -> Term:
        pieces = items[0]
        return self._term(Fraction(1), pieces, pieces[0].token)

    def lead(self, items: list) -> Term:
        if len(items) == 2:
            sign, term = items
            return term.scaled(-1) if str(sign) == "-" else term
        return items[0]

    def expr(self, items: list) -> Expression:
        terms = [items[0]]
        for sign, term in zip(items[1::2], items[2::2], strict=True):
            terms.append(term.scaled(-1) if str(sign) == "-" else term)
        try:
            return Expression.of(terms)
        except SignatureError as exc:
            raise ParseError(str(exc), ParseError.INDEX) from None

    def start(self, items: list) -> Expression:
        return items[0]


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def parse(src: str) -> Expression:
    """Розбирає текст виразу.

    Raises:
        ParseError: синтаксична помилка, невідомий символ, арність чи індекси;
            ``code`` розрізняє діагностику.
    """
    try:
        tree = _PARSER.parse(src)
    except UnexpectedInput as exc:
        line = max(getattr(exc, "line", 0) or 0, 0)
        column = max(getattr(exc, "column", 0) or 0, 0)
        raise ParseError("Syntax error", ParseError.SYNTAX, line, column) from None
    try:
        return ExpressionBuilder(set(_LABEL_RE.findall(src))).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, AdmClosureError):
            raise exc.orig_exc from None
        raise


def parse_factor(src: str) -> Factor:
    """Розбирає один фактор без похідних у природній варіантності (ціль підстановки)."""
    e = parse(src)
    if len(e.terms) != 1 or len(e.terms[0].factors) != 1 or e.terms[0].coeff != 1:
        raise ParseError(f"Expected a single factor, got '{src}'", ParseError.SYNTAX)
    return e.terms[0].factors[0]


def load_expression(source: str | Path) -> Expression:
    """Читає вираз з файлу (.json або текст граматики) чи з рядка."""
    p = Path(source)
    if p.suffix == ".json" and p.exists():
        return Expression.from_dict(load_json(p))
    if p.suffix in (".expr", ".txt") and p.exists():
        text = p.read_text(encoding="utf-8")
        log.debug("Parsing %s (%d chars)", p.name, len(text))
        return parse(text)
    return parse(str(source))
