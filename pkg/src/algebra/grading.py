"""Градуювання термів за імпульсом та похідним порядком."""

from __future__ import annotations

from src.algebra.registry import get_registry
from src.contracts.enums import VariationClass
from src.contracts.tensor import Expression, Term


def momentum_power(term: Term) -> int:
    reg = get_registry()
    return sum(reg.get(f.sym).grade for f in term.factors)


def derivative_degree(term: Term) -> int:
    """Кількість ∇ (разом із похідними розмазувань) плюс власний порядок кривини."""
    reg = get_registry()
    return sum(len(f.derivs) + reg.get(f.sym).degree for f in term.factors)


def smearing_derivatives(term: Term) -> int:
    reg = get_registry()
    return sum(
        len(f.derivs) for f in term.factors if reg.get(f.sym).vclass is VariationClass.SMEARING
    )


def density_weight(term: Term) -> int:
    reg = get_registry()
    return sum(reg.get(f.sym).weight for f in term.factors)


def grades(e: Expression) -> set[tuple[int, int]]:
    """Множина пар (степінь π, похідний порядок) по всіх термах."""
    return {(momentum_power(t), derivative_degree(t)) for t in e.terms}
