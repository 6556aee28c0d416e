"""Конвеєр замикання: дужка → класифікація → слабка редукція → вердикт.

Дужки конвеєра:

* ``hamiltonian`` — {H(N), H(M)} (антисиметризована), зіставлення з H_a;
* ``mixed`` — {H(N), H_a(ξ)}, зіставлення з H та H_a;
* ``momentum`` — {H_a(ξ), H_a(η)}, зіставлення з H_a.

Кілька компонент гамільтоніана (GR + модифікації) складаються в одну густину.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from src.analyzer.classifier import classify, highest_bucket
from src.analyzer.combination import match_constraint_combination
from src.analyzer.conditions import conditions_for
from src.bracket.constraints import constraint_density, make_constraint
from src.bracket.library import ConstraintLibrary, load_library
from src.bracket.poisson import antisymmetrized_bracket, poisson_bracket
from src.contracts.enums import ConstraintKind, Verdict
from src.contracts.errors import ResourceLimitError
from src.contracts.functional import ConstraintSpec
from src.contracts.report import BracketOutcome, ObstructionReport
from src.contracts.tensor import Expression
from src.shared.cancel import CancelToken
from src.shared.config_loader import load_json
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions
from src.shared.logger import stage

log = logging.getLogger(__name__)

BRACKETS: tuple[str, ...] = ("hamiltonian", "mixed", "momentum")
HAMILTONIAN_NAME = "H"


@dataclass(slots=True)
class ClosureOptions:
    """Параметри прогону: які дужки рахувати та імена розмазувань."""

    brackets: tuple[str, ...] = BRACKETS
    scalar_smearings: tuple[str, str] = ("N", "M")
    vector_smearings: tuple[str, str] = ("xi", "eta")
    cancel: CancelToken | None = None

    def __post_init__(self) -> None:
        unknown = [b for b in self.brackets if b not in BRACKETS]
        if unknown:
            raise ValueError(
                f"Unsupported bracket '{unknown[0]}'. Allowed: {', '.join(BRACKETS)}"
            )


@dataclass(slots=True)
class ClosureSpec:
    """Файл специфікації замикання: компоненти H, в'язь імпульсу, дужки."""

    hamiltonian: list[ConstraintSpec]
    momentum: ConstraintSpec | None = None
    brackets: tuple[str, ...] = BRACKETS
    name: str = ""


def combined_hamiltonian(
    parts: Sequence[ConstraintSpec], conv: Conventions = DEFAULT_CONVENTIONS
) -> ConstraintSpec:
    """Одна density-специфікація з сумою густин компонент."""
    if not parts:
        raise ValueError("Hamiltonian needs at least one component")
    total = Expression.zero()
    for spec in parts:
        total = total + constraint_density(spec, conv)
    return ConstraintSpec(ConstraintKind.DENSITY, {"density": total}, HAMILTONIAN_NAME)


def _outcome(
    name: str,
    raw: Expression,
    against: Sequence[ConstraintSpec],
    conv: Conventions,
    cancel: CancelToken | None,
) -> BracketOutcome:
    match = match_constraint_combination(raw, against, conv, cancel)
    return BracketOutcome(
        name=name,
        raw=raw,
        buckets=classify(raw),
        kernels=match.kernels,
        remainder=match.remainder,
        log=match.sites,
        reconstructed=match.reconstructed,
    )


def run_bracket(
    which: str,
    hamiltonian: ConstraintSpec,
    momentum: ConstraintSpec | None,
    conv: Conventions = DEFAULT_CONVENTIONS,
    options: ClosureOptions | None = None,
) -> BracketOutcome:
    """Рахує одну дужку конвеєра та зіставляє її з в'язями.

    Raises:
        ValueError: дужка потребує в'язі імпульсу, якої немає.
    """
    opts = options or ClosureOptions()
    n, m = opts.scalar_smearings
    xi, eta = opts.vector_smearings
    if which != "hamiltonian" and momentum is None:
        raise ValueError(f"Bracket '{which}' needs a momentum constraint")
    with stage(log, f"bracket:{which}"):
        if which == "hamiltonian":
            raw = antisymmetrized_bracket(hamiltonian, hamiltonian, n, m, conv, opts.cancel)
            against = [momentum] if momentum is not None else []
        elif which == "mixed":
            raw = poisson_bracket(
                make_constraint(hamiltonian, n, conv),
                make_constraint(momentum, xi, conv),
                conv,
                opts.cancel,
            )
            against = [hamiltonian, momentum]
        else:
            raw = antisymmetrized_bracket(momentum, momentum, xi, eta, conv, opts.cancel)
            against = [momentum]
        return _outcome(which, raw, against, conv, opts.cancel)


def verdict_for(outcomes: Sequence[BracketOutcome]) -> tuple[Verdict, Expression | None, Any]:
    """Вердикт і сертифікат: найвища комірка залишків усіх дужок."""
    buckets = [b for o in outcomes for b in classify(o.remainder)]
    top = highest_bucket(buckets)
    if top is None:
        return Verdict.FIRST_CLASS, None, None
    return Verdict.SECOND_CLASS, top.terms, top.key


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def closure_report(
    hamiltonian: Sequence[ConstraintSpec],
    momentum: ConstraintSpec | None = None,
    conv: Conventions = DEFAULT_CONVENTIONS,
    options: ClosureOptions | None = None,
) -> ObstructionReport:
    """Вердикт замикання для гамільтоніана (сума компонент) та в'язі імпульсу.

    Перевищення лімітів дає ``inconclusive`` з уже обчисленими дужками.

    Raises:
        CancelledError: токен скасування встановлено.
        SpecInvariantError: некоректна модифікація.
    """
    opts = options or ClosureOptions()
    h = combined_hamiltonian(hamiltonian, conv)
    report = ObstructionReport(verdict=Verdict.INCONCLUSIVE, profile_hash=conv.profile_hash)
    for spec in hamiltonian:
        report.conditions.update(conditions_for(spec, conv))
    selected = [b for b in opts.brackets if b == "hamiltonian" or momentum is not None]
    if len(selected) < len(opts.brackets):
        report.notes.append("No momentum constraint given: mixed and momentum brackets skipped")
    try:
        for which in selected:
            report.brackets.append(run_bracket(which, h, momentum, conv, opts))
    except ResourceLimitError as exc:
        log.warning("Closure inconclusive: %s", exc)
        report.notes.append(f"Resource limit: {exc}")
        return report
    report.verdict, report.certificate, report.certificate_bucket = verdict_for(report.brackets)
    if any(not o.reconstructed for o in report.brackets):
        report.notes.append("Momentum kernel reconstruction mismatch")
    log.info(
        "Closure verdict: %s (%d brackets, %d conditions)",
        report.verdict.value,
        len(report.brackets),
        len(report.conditions),
    )
    return report


def load_closure_spec(
    path: str | Path, library: ConstraintLibrary | None = None
) -> ClosureSpec:
    """Читає JSON: {"hamiltonian": [...], "momentum": ..., "brackets": [...]}.

    Елементи — імена з бібліотеки або вбудовані рядки маніфесту.
    """
    lib = library or load_library()
    data = load_json(path)
    raw_h = data.get("hamiltonian") or []
    if isinstance(raw_h, (str, dict)):
        raw_h = [raw_h]
    momentum = data.get("momentum")
    return ClosureSpec(
        hamiltonian=[lib.resolve(item) for item in raw_h],
        momentum=lib.resolve(momentum) if momentum else None,
        brackets=tuple(data.get("brackets") or BRACKETS),
        name=str(data.get("name") or Path(path).stem),
    )


def obstruction_suite(
    suite: str,
    library: ConstraintLibrary | None = None,
    conv: Conventions = DEFAULT_CONVENTIONS,
    options: ClosureOptions | None = None,
) -> dict[str, ObstructionReport]:
    """Для кожної модифікації набору: GR-гамільтоніан + модифікація, дужка {H, H}."""
    lib = library or load_library()
    base = lib.get("gr_hamiltonian")
    momentum = lib.get("momentum_constraint")
    opts = options or ClosureOptions()
    opts = ClosureOptions(("hamiltonian",), opts.scalar_smearings, opts.vector_smearings, opts.cancel)
    reports: dict[str, ObstructionReport] = {}
    for spec in lib.suite(suite):
        reports[spec.display_name()] = closure_report([base, spec], momentum, conv, opts)
    return reports
