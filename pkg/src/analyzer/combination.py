"""Розклад виразу за густинами в'язей: e = Σ kernel_i · constraint_i + remainder."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

from src.analyzer.reducer import reduce_weakly
from src.bracket.constraints import constraint_density
from src.calculus.matcher import find_matches
from src.calculus.normal import normal_form
from src.contracts.enums import ConstraintKind
from src.contracts.errors import ResourceLimitError
from src.contracts.functional import ConstraintSpec
from src.contracts.report import ReductionSite
from src.contracts.tensor import Expression, Index, Term
from src.shared.cancel import CancelToken, checkpoint
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions

log = logging.getLogger(__name__)


@dataclass(slots=True)
class CombinationMatch:
    """Ядра структурних функцій за іменами в'язей та незведений залишок."""

    kernels: dict[str, Expression] = field(default_factory=dict)
    remainder: Expression = field(default_factory=Expression.zero)
    sites: list[ReductionSite] = field(default_factory=list)
    reconstructed: bool = True

    @property
    def matched(self) -> bool:
        return self.remainder.is_zero()


def lead_term(density: Expression) -> Term:
    """Найспецифічніший терм густини: найбільше факторів, далі канонічний порядок."""
    return max(density.terms, key=lambda t: (len(t.factors), -density.terms.index(t)))


def quotient_term(term: Term, lead: Term, free: tuple[Index, ...]) -> Term | None:
    """q з ``term = q · lead`` (без похідних на зіставлених факторах) або None."""
    for m in find_matches(lead, term, allow_prefix=False):
        if term.dimpow < lead.dimpow:
            continue
        rest = tuple(f for n, f in enumerate(term.factors) if n not in m.targets)
        q = Term(term.coeff * m.sign / lead.coeff, rest, term.dimpow - lead.dimpow)
        labels = {m.mapping[i.label]: i.label for i in free}
        q = q.freshen_dummies(set(labels.values()))
        return q.relabel(labels)
    return None


def divide_by_density(
    e: Expression,
    density: Expression,
    conv: Conventions = DEFAULT_CONVENTIONS,
    cancel: CancelToken | None = None,
) -> tuple[Expression, Expression]:
    """Ділення з остачею на густину без похідних: (ядро, залишок).

    Raises:
        ResourceLimitError: ділення не завершилося за ``conv.max_terms`` кроків.
    """
    lead = lead_term(density)
    kernel_sig = [Index(i.label, not i.up) for i in density.free]
    quotient: list[Term] = []
    current = e
    for _ in range(conv.max_terms):
        checkpoint(cancel, "match_constraint_combination")
        q = next(
            (q for t in current.terms if (q := quotient_term(t, lead, density.free)) is not None),
            None,
        )
        if q is None:
            kernel = normal_form(Expression.of(quotient, kernel_sig), conv.dim, cancel=cancel)
            return kernel, current
        quotient.append(q)
        product = Expression.of([q], kernel_sig) * density
        current = normal_form(current - product, conv.dim, cancel=cancel)
    raise ResourceLimitError(f"Constraint division exceeded {conv.max_terms} steps")


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def match_constraint_combination(
    e: Expression,
    against: Sequence[ConstraintSpec],
    conv: Conventions = DEFAULT_CONVENTIONS,
    cancel: CancelToken | None = None,
) -> CombinationMatch:
    """Шукає ядра kernel_i такі, що e − Σ kernel_i · constraint_i мінімальний.

    В'язь імпульсу редукується з урахуванням зовнішніх префіксів похідних;
    решта густин ділиться за провідним термом. Невдача повертається як
    ненульовий ``remainder``.
    """
    result = CombinationMatch(remainder=e)
    current = e
    for spec in against:
        if current.is_zero():
            break
        name = spec.display_name()
        if spec.kind is ConstraintKind.MOMENTUM_CONSTRAINT:
            red = reduce_weakly(current, conv, cancel)
            if red.sites:
                result.kernels[name] = red.kernel
            result.sites.extend(red.sites)
            result.reconstructed = result.reconstructed and red.reconstructed
            current = red.remainder
            continue
        density = constraint_density(spec, conv)
        kernel, current = divide_by_density(current, density, conv, cancel)
        if not kernel.is_zero():
            result.kernels[name] = kernel
            log.debug("Matched %s: kernel of %d terms", name, len(kernel))
    result.remainder = current
    log.info(
        "Constraint matching: %d kernels, %d remainder terms",
        len(result.kernels),
        len(current),
    )
    return result
