"""Побудова розмазаних функціоналів в'язей з ConstraintSpec.

Модифікація кінетичного члена має вигляд

    F(f) = ∫ f B^{i1…in j1…jm}_{abcd} ∇_{i1…in} π^{ab} ∇_{j1…jm} π^{cd},

де вільні мітки B фіксовані: нижні a b c d та верхні i1…in, j1…jm.
"""

from __future__ import annotations

import logging
from typing import Any

from src.algebra.canon import canonicalize
from src.algebra.metric import simplify_metric
from src.algebra.registry import get_registry
from src.contracts.enums import ConstraintKind, VariationClass
from src.contracts.errors import SignatureError, SpecInvariantError
from src.contracts.functional import ConstraintSpec, SmearedFunctional
from src.contracts.tensor import Expression, Factor, Index, Term, down, up
from src.normalizer.parser import parse
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions
from src.variation.special import expand_specials

log = logging.getLogger(__name__)

PAIR_LABELS = ("a", "b", "c", "d")

KINETIC = "G[_a _b _c _d]*pi[^a ^b]*pi[^c ^d]*isqrtg"
POTENTIAL = "sqrtg*R - 2*sqrtg*Lambda"

DEFAULT_SMEARING: dict[ConstraintKind, str] = {
    ConstraintKind.GR_HAMILTONIAN: "N",
    ConstraintKind.GR_KINETIC: "f",
    ConstraintKind.MOMENTUM_CONSTRAINT: "xi",
    ConstraintKind.KINETIC_MOD: "f",
    ConstraintKind.POTENTIAL_MOD: "f",
    ConstraintKind.LINEAR_MOD: "f",
    ConstraintKind.DENSITY: "f",
}


def derivative_labels(n: int, m: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return tuple(f"i{k}" for k in range(1, n + 1)), tuple(f"j{k}" for k in range(1, m + 1))


def param_expression(raw: Any, what: str) -> Expression:
    if isinstance(raw, Expression):
        return raw
    if isinstance(raw, str):
        return parse(raw)
    if isinstance(raw, dict):
        return Expression.from_dict(raw)
    raise SignatureError(f"Parameter '{what}' must be an expression, got {type(raw).__name__}")


def kinetic_signature(n: int, m: int) -> tuple[Index, ...]:
    ii, jj = derivative_labels(n, m)
    return tuple(sorted([*(down(x) for x in PAIR_LABELS), *(up(x) for x in ii + jj)]))


def check_kinetic_b(b: Expression, n: int, m: int, conv: Conventions = DEFAULT_CONVENTIONS) -> None:
    """Перевіряє структурні інваріанти тензора B.

    Raises:
        SignatureError: вільні індекси B не a b c d, i1…in, j1…jm.
        SpecInvariantError: δ між {ab} та {j} чи між {cd} та {i}; або порушена
            симетрія обміну при n = m.
    """
    if b.terms and b.free != kinetic_signature(n, m):
        got = " ".join(map(str, b.free)) or "(none)"
        want = " ".join(map(str, kinetic_signature(n, m)))
        raise SignatureError(f"Kinetic tensor B has free indices {got}, expected {want}")
    ii, jj = derivative_labels(n, m)
    forbidden = {(p, x) for p in "ab" for x in jj} | {(p, x) for p in "cd" for x in ii}
    flat = simplify_metric(expand_specials(b, conv), conv.dim)
    for t in flat.terms:
        for f in t.factors:
            if f.sym != "delta":
                continue
            pair = (f.slots[0].label, f.slots[1].label)
            if pair in forbidden:
                raise SpecInvariantError(
                    f"B contracts momentum pair index '{pair[0]}' with derivative index "
                    f"'{pair[1]}' of the other momentum"
                )
    if n == m and b.terms:
        swap = {"a": "c", "b": "d", "c": "a", "d": "b"}
        swap.update({i: j for i, j in zip(ii, jj, strict=True)})
        swap.update({j: i for i, j in zip(ii, jj, strict=True)})
        diff = simplify_metric(flat - flat.relabel_free(swap), conv.dim)
        if not diff.is_zero():
            raise SpecInvariantError(
                f"B violates the exchange symmetry required for n = m = {n}: residue {diff}"
            )


def smearing_for(density: Expression, name: str) -> Factor:
    """Фактор розмазування, згорнутий з вільними індексами густини."""
    sym = get_registry().get(name)
    if sym.vclass is not VariationClass.SMEARING:
        raise SignatureError(f"'{name}' is not a smearing symbol")
    if len(density.free) != sym.arity or any(i.up for i in density.free):
        raise SignatureError(
            f"Smearing '{name}' ({sym.signature()}) does not contract density indices "
            f"{' '.join(map(str, density.free)) or '(none)'}"
        )
    return Factor(name, tuple(up(i.label) for i in density.free))


def _kinetic_density(spec: ConstraintSpec, conv: Conventions) -> Expression:
    n, m = int(spec.params.get("n", 0)), int(spec.params.get("m", 0))
    b = param_expression(spec.params["B"], "B")
    check_kinetic_b(b, n, m, conv)
    ii, jj = derivative_labels(n, m)
    momenta = Term.of(
        1,
        Factor("pi", (up("a"), up("b")), ii),
        Factor("pi", (up("c"), up("d")), jj),
    )
    return expand_specials(b, conv) * Expression.of([momenta])


def constraint_density(spec: ConstraintSpec, conv: Conventions = DEFAULT_CONVENTIONS) -> Expression:
    """Густина в'язі (вага один) з розгорнутими спеціальними тензорами."""
    kind = spec.kind
    if kind in (ConstraintKind.GR_HAMILTONIAN, ConstraintKind.GR_KINETIC):
        density = parse(KINETIC)
        if kind is ConstraintKind.GR_HAMILTONIAN:
            density = density + parse(POTENTIAL).scale(conv.potential_sign)
        return canonicalize(expand_specials(density, conv))
    if kind is ConstraintKind.MOMENTUM_CONSTRAINT:
        return parse("g[_a _c]*D(_b, pi[^b ^c])").scale(conv.momentum_coefficient)
    if kind is ConstraintKind.KINETIC_MOD:
        return canonicalize(_kinetic_density(spec, conv))
    if kind is ConstraintKind.POTENTIAL_MOD:
        return canonicalize(expand_specials(param_expression(spec.params["V"], "V"), conv))
    if kind is ConstraintKind.LINEAR_MOD:
        beta = expand_specials(param_expression(spec.params["beta"], "beta"), conv)
        if len(beta.free) != 2 or any(i.up for i in beta.free):
            raise SignatureError("Linear term beta must carry two free down indices")
        x, y = (i.label for i in beta.free)
        return canonicalize((beta * Expression.from_factor(Factor("pi", (up(x), up(y))))).scale(-1))
    return canonicalize(expand_specials(param_expression(spec.params["density"], "density"), conv))


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def make_constraint(
    spec: ConstraintSpec,
    smearing: str | None = None,
    conv: Conventions = DEFAULT_CONVENTIONS,
) -> SmearedFunctional:
    """Розмазаний функціонал для специфікації.

    Args:
        spec: Тип в'язі та параметри.
        smearing: Ім'я функції розмазування; за замовчуванням залежить від типу.
        conv: Активні конвенції.

    Raises:
        SpecInvariantError: заборонене згортання у B або порушена симетрія обміну.
        SignatureError: розмазування не згортається з густиною.
    """
    density = constraint_density(spec, conv)
    name = smearing or DEFAULT_SMEARING[spec.kind]
    factor = smearing_for(density, name)
    log.debug("Constraint %s smeared with %s: %d terms", spec.display_name(), name, len(density))
    return SmearedFunctional(density, factor, f"{spec.display_name()}({name})")
