"""Слабка редукція за в'яззю імпульсу ∇_b π^{ab} ≈ 0.

Похідні, згорнуті зі слотом π, переносяться найглибше (поправки Рімана
зберігаються), після чого кожен терм виду c · rest · ∇_{P}∇_b π^{bc}
відкидається. Для кожного такого місця будується ядро ξ^a при H_a:

    ξ^e = (−1)^{|P|} / k · g^{ec} ∇_{P⁻¹}(c · rest),

де k — коефіцієнт густини H_a = k g_ac ∇_b π^{bc}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from src.bracket.constraints import constraint_density
from src.bracket.poisson import integrand_normal_form
from src.calculus.leibniz import prefix_terms
from src.calculus.normal import normal_form
from src.contracts.enums import ConstraintKind, OrderPolicy
from src.contracts.functional import ConstraintSpec
from src.contracts.report import ReductionSite
from src.contracts.tensor import Expression, Factor, Index, Term, fresh_label, up
from src.shared.cancel import CancelToken, checkpoint
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions

log = logging.getLogger(__name__)

MOMENTUM_SPEC = ConstraintSpec(ConstraintKind.MOMENTUM_CONSTRAINT, {}, "momentum_constraint")
KERNEL_LABEL = "a"


@dataclass(slots=True)
class WeakReduction:
    """Залишок після редукції, ядро при H_a та журнал підстановок."""

    remainder: Expression
    kernel: Expression
    sites: list[ReductionSite] = field(default_factory=list)
    reconstructed: bool = True


def divergence_site(term: Term) -> tuple[int, str] | None:
    """(позиція π, відкрита мітка), якщо найглибша похідна π згорнута з його слотом."""
    for n, f in enumerate(term.factors):
        if f.sym != "pi" or not f.derivs:
            continue
        inner = f.derivs[-1]
        labels = [s.label for s in f.slots]
        if inner in labels:
            other = labels[1 - labels.index(inner)]
            return n, other
    return None


def site_kernel(term: Term, position: int, open_label: str, coefficient: int) -> list[Term]:
    """Терми ядра ξ^a для одного місця дивергенції."""
    f = term.factors[position]
    outer = f.derivs[:-1]
    rest = term.factors[:position] + term.factors[position + 1 :]
    used = term.labels()
    e = fresh_label(used)
    coeff = term.coeff * (-1) ** len(outer) / Fraction(coefficient)
    base = Term(coeff, (*rest, Factor("ginv", (up(e), up(open_label)))), term.dimpow)
    out = []
    for t in prefix_terms(tuple(reversed(outer)), [base]):
        t = t.freshen_dummies({KERNEL_LABEL})
        out.append(t.relabel({e: KERNEL_LABEL}))
    return out


def _normal(
    e: Expression, conv: Conventions, cancel: CancelToken | None, policy: OrderPolicy
) -> Expression:
    return normal_form(
        e,
        conv.dim,
        policy=policy,
        max_passes=conv.max_passes,
        max_terms=conv.max_terms,
        cancel=cancel,
    )


def reconstruct(kernel: Expression, conv: Conventions = DEFAULT_CONVENTIONS) -> Expression:
    """Підінтегральний вираз ξ^a · H_a для ядра."""
    density = constraint_density(MOMENTUM_SPEC, conv)
    return kernel * density.relabel_free({density.free[0].label: KERNEL_LABEL})


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def reduce_weakly(
    e: Expression,
    conv: Conventions = DEFAULT_CONVENTIONS,
    cancel: CancelToken | None = None,
) -> WeakReduction:
    """Редукує вираз за модулем ∇_b π^{ab} з префіксами похідних.

    Raises:
        ResourceLimitError: перевищено ліміти нормальної форми.
        CancelledError: токен скасування встановлено.
    """
    exposed = _normal(e, conv, cancel, OrderPolicy.DIVERGENCE)
    kept: list[Term] = []
    removed: list[Term] = []
    kernel_terms: list[Term] = []
    sites: list[ReductionSite] = []
    for t in exposed.terms:
        checkpoint(cancel, "reduce_weakly")
        hit = divergence_site(t)
        if hit is None:
            kept.append(t)
            continue
        n, other = hit
        removed.append(t)
        kernel_terms.extend(site_kernel(t, n, other, conv.momentum_coefficient))
        sites.append(ReductionSite(str(t), t.factors[n].derivs[:-1], other))
    remainder = _normal(Expression.of(kept, e.free), conv, cancel, OrderPolicy.CANONICAL)
    kernel_sig = [Index(KERNEL_LABEL, True)]
    kernel = _normal(Expression.of(kernel_terms, kernel_sig), conv, cancel, OrderPolicy.CANONICAL)
    reconstructed = True
    if removed and not e.free:
        diff = reconstruct(kernel, conv) - Expression.of(removed, e.free)
        reconstructed = integrand_normal_form(diff, conv, cancel).is_zero()
        if not reconstructed:
            log.warning("Reconstruction mismatch for momentum kernel (%d sites)", len(sites))
    log.debug("reduce_weakly: %d sites, %d terms remain", len(sites), len(remainder))
    return WeakReduction(remainder, kernel, sites, reconstructed)
