"""Канонізація термів: симетрії слотів, перейменування німих індексів, порядок факторів.

Пошук жадібний і точний: на кожному кроці обирається лексикографічно
найменший ключ наступного фактора серед усіх станів-кандидатів, усі
рівні стани зберігаються. Якщо фінальні стани мають протилежні знаки,
терм тотожно нульовий.
"""

from __future__ import annotations

import itertools
import logging
import string
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any

from src.algebra.registry import get_registry
from src.contracts.tensor import Expression, Factor, Index, Term

log = logging.getLogger(__name__)

FactorKey = tuple[Any, ...]


def canonical_dummy_names(avoid: Iterable[str]) -> Iterator[str]:
    """a..z, потім a1..z1, a2..; мітки з ``avoid`` пропускаються."""
    taken = set(avoid)
    for n in itertools.count():
        suffix = "" if n == 0 else str(n)
        for ch in string.ascii_lowercase:
            name = ch + suffix
            if name not in taken:
                yield name


@dataclass(frozen=True, slots=True)
class Choice:
    """Вибір для одного фактора: звідки він узятий і як переставлені індекси."""

    source: int
    deriv_perm: tuple[int, ...]
    slot_perm: tuple[int, ...]
    sign: int


@dataclass(frozen=True, slots=True)
class Monomial:
    sign: int
    factors: tuple[Factor, ...]
    keys: tuple[FactorKey, ...]
    choices: tuple[Choice, ...]


def self_contracted_derivs(factors: tuple[Factor, ...], fi: int) -> set[int]:
    """Позиції похідних фактора ``fi``, згорнутих із цим же фактором.

    Згортання через ginv^{dx} без похідних теж враховується.
    """
    f = factors[fi]
    own = {i.label for i in f.slots}
    owners: dict[str, list[int]] = {}
    for n, other in enumerate(factors):
        for label in other.labels():
            owners.setdefault(label, []).append(n)
    out: set[int] = set()
    for pos, d in enumerate(f.derivs):
        if d in own:
            out.add(pos)
            continue
        for n in owners.get(d, []):
            partner = factors[n]
            if n == fi or partner.sym != "ginv" or partner.derivs:
                continue
            other = [i.label for i in partner.slots if i.label != d]
            if other and other[0] in own | set(f.derivs):
                out.add(pos)
    return out


def _deriv_options(factors: tuple[Factor, ...], fi: int, search: bool) -> list[tuple[int, ...]]:
    f = factors[fi]
    k = len(f.derivs)
    identity = tuple(range(k))
    if not search:
        opts = [identity]
        if k >= 2 and not f.slots:
            opts.append((*identity[:-2], k - 1, k - 2))
        return opts
    inner = self_contracted_derivs(factors, fi)
    outer = [p for p in range(k) if p not in inner]
    opts = []
    for head in itertools.permutations(outer):
        for tail in itertools.permutations(sorted(inner)):
            opts.append((*head, *tail))
    return opts


def _factor_key(
    f: Factor, derivs: tuple[str, ...], slots: tuple[Index, ...], numbering: dict[str, int],
    free: frozenset[str],
) -> tuple[FactorKey, dict[str, int]]:
    nb = numbering
    copied = False

    def code(label: str, is_up: bool) -> tuple[Any, ...]:
        nonlocal nb, copied
        if label in free:
            return (0, label, is_up)
        n = nb.get(label)
        if n is None:
            if not copied:
                nb = dict(nb)
                copied = True
            n = len(nb)
            nb[label] = n
        return (1, n, is_up)

    dcodes = tuple(code(d, False) for d in derivs)
    scodes = tuple(code(i.label, i.up) for i in slots)
    return (f.sym, len(derivs), dcodes, scodes), nb


@dataclass(slots=True)
class _State:
    remaining: tuple[int, ...]
    numbering: dict[str, int]
    sign: int
    choices: tuple[Choice, ...]
    keys: tuple[FactorKey, ...]


def _search(factors: tuple[Factor, ...], search: bool) -> Monomial:
    reg = get_registry()
    counts: dict[str, int] = {}
    for f in factors:
        for label in f.labels():
            counts[label] = counts.get(label, 0) + 1
    free = frozenset(label for label, n in counts.items() if n == 1)
    options: list[list[tuple[tuple[int, ...], tuple[int, ...], int]]] = []
    for fi, f in enumerate(factors):
        group = reg.group(f.sym)
        options.append(
            [(dp, sp, s) for dp in _deriv_options(factors, fi, search) for sp, s in group]
        )

    states = [_State(tuple(range(len(factors))), {}, 1, (), ())]
    for _ in range(len(factors)):
        best: FactorKey | None = None
        nxt: dict[tuple[Any, ...], _State] = {}
        for st in states:
            for pos, fi in enumerate(st.remaining):
                f = factors[fi]
                for dp, sp, s in options[fi]:
                    derivs = tuple(f.derivs[p] for p in dp)
                    slots = tuple(f.slots[p] for p in sp)
                    key, nb = _factor_key(f, derivs, slots, st.numbering, free)
                    if best is not None and key > best:
                        continue
                    if best is None or key < best:
                        best = key
                        nxt = {}
                    rem = st.remaining[:pos] + st.remaining[pos + 1 :]
                    sign = st.sign * s
                    ident = (rem, tuple(sorted(nb.items())), sign)
                    if ident not in nxt:
                        nxt[ident] = _State(
                            rem, nb, sign, (*st.choices, Choice(fi, dp, sp, s)),
                            (*st.keys, key),
                        )
        states = list(nxt.values())

    signs = {st.sign for st in states}
    winner = states[0]
    if len(signs) > 1:
        return Monomial(0, (), winner.keys, winner.choices)
    names = canonical_dummy_names(free)
    ordered = sorted(winner.numbering.items(), key=lambda kv: kv[1])
    rename = {label: next(names) for label, _ in ordered}
    out = []
    for ch in winner.choices:
        f = factors[ch.source]
        out.append(
            Factor(
                f.sym,
                tuple(f.slots[p] for p in ch.slot_perm),
                tuple(f.derivs[p] for p in ch.deriv_perm),
            ).relabel(rename)
        )
    return Monomial(winner.sign, tuple(out), winner.keys, winner.choices)


@lru_cache(maxsize=65536)
def canonical_monomial(factors: tuple[Factor, ...]) -> Monomial:
    return _search(factors, search=False)


@lru_cache(maxsize=16384)
def search_monomial(factors: tuple[Factor, ...]) -> Monomial:
    """Канонічна форма з вільним порядком похідних (для політики CANONICAL)."""
    return _search(factors, search=True)


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def canonicalize_term(term: Term) -> Term | None:
    """Канонічний представник терма або None, якщо терм тотожно нуль."""
    if term.coeff == 0:
        return None
    mono = canonical_monomial(term.factors)
    if mono.sign == 0:
        return None
    return Term(term.coeff * mono.sign, mono.factors, term.dimpow)


def term_sort_key(term: Term) -> tuple[Any, ...]:
    return (
        len(term.factors),
        tuple(
            (f.sym, len(f.derivs), f.derivs, tuple((i.label, i.up) for i in f.slots))
            for f in term.factors
        ),
        term.dimpow,
    )


def collect(terms: Iterable[Term], free: tuple[Index, ...]) -> Expression:
    """Зводить подібні вже канонічні терми та впорядковує результат."""
    acc: dict[tuple[tuple[Factor, ...], int], Fraction] = {}
    for t in terms:
        k = (t.factors, t.dimpow)
        acc[k] = acc.get(k, Fraction(0)) + t.coeff
    merged = [Term(c, fs, dp) for (fs, dp), c in acc.items() if c != 0]
    merged.sort(key=term_sort_key)
    return Expression.of(merged, free)


def canonicalize(e: Expression) -> Expression:
    """Канонічна форма виразу (ідемпотентна)."""
    out = []
    for t in e.terms:
        c = canonicalize_term(t)
        if c is not None:
            out.append(c)
    return collect(out, e.free)


def equal(e1: Expression, e2: Expression) -> bool:
    """True, якщо вирази рівні як тензорні многочлени."""
    if e1.free != e2.free:
        return False
    return canonicalize(e1 - e2).is_zero()
