"""Зіставлення шаблонного терма з термом-ціллю з урахуванням симетрій слотів.

Похідні шаблону зіставляються з внутрішнім суфіксом похідних цілі. Зайвий
зовнішній префікс дозволено лише одному фактору, і тільки коли інші
зіставлені фактори коваріантно сталі та без похідних.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

from src.algebra.registry import get_registry
from src.contracts.tensor import Factor, Term


@dataclass(frozen=True, slots=True)
class Match:
    """Знайдене входження: зіставлені фактори, відображення міток, знак, префікс."""

    targets: tuple[int, ...]
    mapping: dict[str, str]
    sign: int
    prefix: tuple[str, ...]


def _bind(mapping: dict[str, str], image: set[str], src: str, dst: str) -> bool:
    known = mapping.get(src)
    if known is not None:
        return known == dst
    if dst in image:
        return False
    mapping[src] = dst
    image.add(dst)
    return True


def _match_factor(
    pat: Factor, tgt: Factor, mapping: dict[str, str], allow_prefix: bool
) -> Iterator[tuple[dict[str, str], int, tuple[str, ...]]]:
    if pat.sym != tgt.sym or len(tgt.derivs) < len(pat.derivs):
        return
    extra = len(tgt.derivs) - len(pat.derivs)
    if extra and not allow_prefix:
        return
    prefix = tgt.derivs[:extra]
    inner = tgt.derivs[extra:]
    for perm, sign in get_registry().group(tgt.sym):
        slots = [tgt.slots[p] for p in perm]
        m = dict(mapping)
        image = set(m.values())
        ok = all(_bind(m, image, p, t) for p, t in zip(pat.derivs, inner, strict=True))
        if ok:
            for ps, ts in zip(pat.slots, slots, strict=True):
                if ps.up != ts.up or not _bind(m, image, ps.label, ts.label):
                    ok = False
                    break
        if ok:
            yield m, sign, prefix


def find_matches(pattern: Term, target: Term, allow_prefix: bool = True) -> Iterator[Match]:
    """Перебирає всі входження шаблону в ціль (бектрекінг)."""
    reg = get_registry()
    pats = pattern.factors

    def rec(
        k: int, used: tuple[int, ...], mapping: dict[str, str], sign: int, prefix: tuple[str, ...]
    ) -> Iterator[Match]:
        if k == len(pats):
            if prefix:
                if set(prefix) & set(mapping.values()):
                    return
                for pi, ti in enumerate(used):
                    f = target.factors[ti]
                    if len(f.derivs) > len(pats[pi].derivs):
                        continue
                    if f.derivs or not reg.get(f.sym).covariantly_constant:
                        return
            yield Match(used, mapping, sign, prefix)
            return
        for ti, tgt in enumerate(target.factors):
            if ti in used:
                continue
            for m, s, pre in _match_factor(pats[k], tgt, mapping, allow_prefix and not prefix):
                yield from rec(k + 1, (*used, ti), m, sign * s, prefix or pre)

    yield from rec(0, (), {}, 1, ())
