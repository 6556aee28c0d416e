"""Рендеринг виразів: текст граматики, LaTeX, JSON."""

from __future__ import annotations

import re

from src.contracts.enums import OutputFormat
from src.contracts.tensor import Expression, Factor, Index, Term

LATEX_NAMES: dict[str, str] = {
    "ginv": "g",
    "pi": r"\pi",
    "dpi": r"\delta\pi",
    "dg": r"\delta g",
    "Ricci": "R",
    "Riem": "R",
    "sqrtg": r"\sqrt{g}",
    "isqrtg": r"\frac{1}{\sqrt{g}}",
    "Lambda": r"\Lambda",
    "alpha": r"\alpha",
    "delta": r"\delta",
    "xi": r"\xi",
    "eta": r"\eta",
    "zeta": r"\zeta",
    "Xi": r"\Xi",
    "A0": r"{}^{(0)}\!A",
    "A1": r"{}^{(1)}\!A",
    "A2": r"{}^{(2)}\!A",
    "F0": r"{}^{(0)}\!F",
    "DeWittInverse": r"G^{-1}",
}

_DIGITS = re.compile(r"^([A-Za-z]+)(\d+)$")


def latex_label(label: str) -> str:
    m = _DIGITS.match(label)
    if m:
        return f"{m.group(1)}_{{{m.group(2)}}}"
    return label.replace("#", r"\#")


def _latex_indices(slots: tuple[Index, ...]) -> str:
    out = ""
    group: list[str] = []
    current: bool | None = None
    for idx in slots:
        if current is not None and idx.up != current:
            out += ("^" if current else "_") + "{" + " ".join(group) + "}{}"
            group = []
        current = idx.up
        group.append(latex_label(idx.label))
    if group:
        out += ("^" if current else "_") + "{" + " ".join(group) + "}"
    return out.removesuffix("{}")


def latex_factor(f: Factor) -> str:
    core = LATEX_NAMES.get(f.sym, f.sym) + _latex_indices(f.slots)
    nablas = "".join(rf"\nabla_{{{latex_label(d)}}}" for d in f.derivs)
    return nablas + core


def latex_term(t: Term) -> str:
    mag = abs(t.coeff)
    body = " ".join(latex_factor(f) for f in t.factors)
    if t.dimpow:
        body += " d" + (f"^{{{t.dimpow}}}" if t.dimpow > 1 else "")
    if mag == 1 and body:
        return body.strip()
    num = rf"\frac{{{mag.numerator}}}{{{mag.denominator}}}" if mag.denominator != 1 else str(
        mag.numerator
    )
    return f"{num} {body}".strip()


def to_latex(e: Expression) -> str:
    if e.is_zero():
        return "0"
    parts = []
    for n, t in enumerate(e.terms):
        sign = "-" if t.coeff < 0 else "+"
        body = latex_term(t)
        if n == 0:
            parts.append(f"-{body}" if sign == "-" else body)
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def to_text(e: Expression) -> str:
    return str(e)


def to_json(e: Expression) -> str:
    return e.to_json()


def render(e: Expression, fmt: OutputFormat = OutputFormat.TEXT) -> str:
    """Рендерить вираз у вибраному форматі."""
    if fmt is OutputFormat.LATEX:
        return to_latex(e)
    if fmt is OutputFormat.JSON:
        return to_json(e)
    return to_text(e)
