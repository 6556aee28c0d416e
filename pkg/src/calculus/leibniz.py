"""Правило Лейбніца для ∇ над сумами та добутками."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence

from src.algebra.canon import canonicalize
from src.algebra.registry import get_registry
from src.contracts.errors import StructureError
from src.contracts.tensor import Expression, Index, Term


def differentiate_term(term: Term, label: str) -> list[Term]:
    """∇_label терма без канонізації; коваріантно сталі фактори пропускаються."""
    reg = get_registry()
    term = term.freshen_dummies({label})
    out = []
    for n, f in enumerate(term.factors):
        if reg.get(f.sym).covariantly_constant:
            continue
        facs = list(term.factors)
        facs[n] = f.differentiate(label)
        out.append(term.with_factors(facs))
    return out


def prefix_terms(prefix: Sequence[str], terms: Iterable[Term]) -> list[Term]:
    """Застосовує ∇_{prefix[0]} … ∇_{prefix[-1]}, починаючи з внутрішньої."""
    current = list(terms)
    for label in reversed(prefix):
        nxt: list[Term] = []
        for t in current:
            nxt.extend(differentiate_term(t, label))
        current = nxt
    return current


def shifted_signature(free: Iterable[Index], labels: Iterable[str]) -> tuple[Index, ...]:
    """Сигнатура після додавання нижніх індексів ``labels``.

    Raises:
        StructureError: мітка вже є вільною нижньою.
    """
    sig = list(free)
    for label in labels:
        hit = [i for i in sig if i.label == label]
        if not hit:
            sig.append(Index(label, False))
        elif hit[0].up:
            sig.remove(hit[0])
        else:
            raise StructureError(f"Derivative index '{label}' clashes with a free down index", label)
    counts = Counter(i.label for i in sig)
    return tuple(sorted(i for i in sig if counts[i.label] == 1))


def leibniz_expand(label: str, e: Expression) -> Expression:
    """∇_label e у нормальній формі (похідні лише на атомарних факторах)."""
    return apply_prefix((label,), e)


def apply_prefix(prefix: Sequence[str], e: Expression) -> Expression:
    free = shifted_signature(e.free, reversed(prefix))
    return canonicalize(Expression.of(prefix_terms(prefix, e.terms), free))
