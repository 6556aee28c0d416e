"""Командний інтерфейс adm-closure: канонізація, варіації, дужки, замикання, оракул."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np

from src.algebra.registry import register_symbols
from src.analyzer.classifier import classify
from src.analyzer.closure import (
    ClosureOptions,
    closure_report,
    load_closure_spec,
    obstruction_suite,
)
from src.analyzer.linear import check_linear_term_conditions
from src.analyzer.reducer import reduce_weakly
from src.analyzer.reporter import (
    render_latex_report,
    summarize,
    summarize_linear,
)
from src.bracket.constraints import make_constraint, smearing_for
from src.bracket.library import DEFAULT_LIBRARY, load_library
from src.bracket.poisson import antisymmetrized_bracket, localize, poisson_bracket
from src.calculus.normal import normal_form
from src.contracts.enums import ConstraintKind, OutputFormat, Verdict, Wrt, parse_enum
from src.contracts.errors import AdmClosureError, ParseError
from src.contracts.functional import ConstraintSpec, SmearedFunctional
from src.contracts.report import ObstructionReport
from src.contracts.tensor import Expression
from src.normalizer.parser import load_expression
from src.normalizer.render import render
from src.oracle.chart import ChartSpec, load_chart_spec, make_chart
from src.oracle.evaluate import evaluate, relative_error
from src.shared.conventions import Conventions, load_conventions
from src.shared.file_utils import atomic_write
from src.shared.logger import LEVELS, setup_logging
from src.variation.fderiv import functional_derivative
from src.variation.vary import vary_metric, vary_momentum

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

COMMANDS: tuple[str, ...] = (
    "canon",
    "vary",
    "fderiv",
    "bracket",
    "classify",
    "reduce",
    "closure",
    "check-linear",
    "oracle",
)


class UsageError(Exception):
    """Некоректні аргументи, що не ловить argparse (відсутній файл тощо)."""


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument(
        "--dim",
        type=int,
        default=None,
        help="Spatial dimension binding (overrides the profile). Default: from profile",
    )
    p.add_argument(
        "--format",
        default=OutputFormat.TEXT.value,
        choices=[f.value for f in OutputFormat],
        help="Output format. Default: text",
    )
    p.add_argument(
        "--profile",
        default=None,
        help="Convention profile YAML. Default: config/conventions.yaml",
    )
    p.add_argument(
        "--max-terms",
        type=int,
        default=None,
        help="Term cap for normal forms (overrides the profile).",
    )
    p.add_argument("--seed", type=int, default=None, help="Seed for numeric charts.")
    p.add_argument("--out", default=None, help="Write output to this path instead of stdout.")
    p.add_argument(
        "--log-level",
        default="INFO",
        choices=list(LEVELS),
        help="Logging level. Default: INFO",
    )
    return p


def _input(p: argparse.ArgumentParser, *, required: bool = True) -> None:
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument("--in", dest="input", default=None, help="Expression file (.expr/.json).")
    group.add_argument("--expr", default=None, help="Inline expression text.")


def build_parser() -> argparse.ArgumentParser:
    """Створює CLI-парсер з підкомандами."""
    common = _common()
    p = argparse.ArgumentParser(
        prog="adm-closure",
        description="Symbolic ADM constraint algebra: brackets, closure verdicts, obstructions",
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="{" + ",".join(COMMANDS) + "}")

    cmd = sub.add_parser("canon", parents=[common], help="Canonical normal form of an expression")
    _input(cmd)

    cmd = sub.add_parser("vary", parents=[common], help="First variation wrt g or pi")
    _input(cmd)
    cmd.add_argument("--wrt", default=Wrt.METRIC.value, choices=[w.value for w in Wrt])

    cmd = sub.add_parser("fderiv", parents=[common], help="Functional derivative kernel")
    _input(cmd)
    cmd.add_argument("--wrt", default=Wrt.METRIC.value, choices=[w.value for w in Wrt])
    cmd.add_argument(
        "--smearing",
        default=None,
        help="Smearing symbol contracted with the density (omit if already in the input).",
    )

    cmd = sub.add_parser("bracket", parents=[common], help="Poisson bracket of two constraints")
    cmd.add_argument("first", help="Constraint name from the library or an expression file")
    cmd.add_argument("second", help="Constraint name from the library or an expression file")
    cmd.add_argument("--f", dest="f", default="f", help="Smearing of the first. Default: f")
    cmd.add_argument("--h", dest="h", default="h", help="Smearing of the second. Default: h")
    cmd.add_argument(
        "--antisymmetrize",
        action="store_true",
        default=False,
        help="Compute {A(f),B(h)} - {A(h),B(f)} (halved when A = B).",
    )
    cmd.add_argument("--localize", default=None, help="Strip the integral at this smearing.")
    cmd.add_argument("--library", default=str(DEFAULT_LIBRARY), help="Constraint library JSON.")

    cmd = sub.add_parser("classify", parents=[common], help="Grade terms into buckets")
    _input(cmd)

    cmd = sub.add_parser("reduce", parents=[common], help="Weak reduction modulo H_a")
    _input(cmd)

    cmd = sub.add_parser("closure", parents=[common], help="Closure verdict for a constraint set")
    source = cmd.add_mutually_exclusive_group(required=True)
    source.add_argument("--spec", default=None, help="Closure spec JSON.")
    source.add_argument("--suite", default=None, help="Named suite from the library.")
    cmd.add_argument("--library", default=str(DEFAULT_LIBRARY), help="Constraint library JSON.")
    cmd.add_argument(
        "--brackets",
        default=None,
        help="Comma-separated subset of hamiltonian,mixed,momentum (overrides the spec).",
    )

    cmd = sub.add_parser("check-linear", parents=[common], help="Linear-term conditions for beta")
    _input(cmd)

    cmd = sub.add_parser("oracle", parents=[common], help="Evaluate an expression on a chart")
    _input(cmd)
    cmd.add_argument("--chart", default=None, help="Chart spec JSON. Default: built-in defaults")
    cmd.add_argument(
        "--against",
        default=None,
        help="Second expression; compare numerically instead of printing components.",
    )
    return p


# ═══════════════════════════════════════════════════════════════════
#  Helpers
# ═══════════════════════════════════════════════════════════════════


def _conventions(args: argparse.Namespace) -> Conventions:
    if args.profile is not None and not Path(args.profile).exists():
        raise UsageError(f"Profile not found: {args.profile}")
    conv = load_conventions(args.profile)
    if args.dim is not None:
        conv = conv.with_dim(args.dim)
    if args.max_terms is not None:
        conv = replace(conv, max_terms=args.max_terms)
    register_symbols(conv.symbols)
    print(f"profile {conv.profile_hash}", file=sys.stderr)
    return conv


def _read(source: str) -> Expression:
    path = Path(source)
    if path.suffix in (".expr", ".json", ".txt") and not path.exists():
        raise UsageError(f"Input not found: {source}")
    return load_expression(source)


def _expression(args: argparse.Namespace) -> Expression:
    return _read(args.input) if args.input is not None else load_expression(args.expr)


def _constraint(item: str, library_path: str) -> ConstraintSpec:
    if Path(item).suffix in (".expr", ".json"):
        density = _read(item)
        return ConstraintSpec(ConstraintKind.DENSITY, {"density": density}, Path(item).stem)
    return load_library(library_path).get(item)


def _emit(text: str, args: argparse.Namespace) -> None:
    if args.out:
        atomic_write(args.out, text if text.endswith("\n") else text + "\n")
        log.info("Wrote output → %s", args.out)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _fmt(args: argparse.Namespace) -> OutputFormat:
    return parse_enum(OutputFormat, args.format)


def _normal(e: Expression, conv: Conventions) -> Expression:
    return normal_form(e, conv.dim, max_terms=conv.max_terms, max_passes=conv.max_passes)


def _bucket_payload(e: Expression) -> list[dict[str, Any]]:
    return [b.to_dict() for b in classify(e)]


# ═══════════════════════════════════════════════════════════════════
#  Commands
# ═══════════════════════════════════════════════════════════════════


def cmd_canon(args: argparse.Namespace, conv: Conventions) -> int:
    e = _normal(_expression(args), conv)
    _emit(render(e, _fmt(args)), args)
    return EXIT_OK


def cmd_vary(args: argparse.Namespace, conv: Conventions) -> int:
    e = _expression(args)
    varied = vary_metric(e, conv) if args.wrt == Wrt.METRIC.value else vary_momentum(e)
    result = _normal(varied, conv)
    _emit(render(result, _fmt(args)), args)
    return EXIT_OK


def cmd_fderiv(args: argparse.Namespace, conv: Conventions) -> int:
    density = _expression(args)
    smearing = smearing_for(density, args.smearing) if args.smearing else None
    functional = SmearedFunctional(density, smearing, "F")
    kernel = functional_derivative(functional, parse_enum(Wrt, args.wrt), conv)
    _emit(render(kernel, _fmt(args)), args)
    return EXIT_OK


def cmd_bracket(args: argparse.Namespace, conv: Conventions) -> int:
    a = _constraint(args.first, args.library)
    b = _constraint(args.second, args.library)
    if args.antisymmetrize:
        result = antisymmetrized_bracket(a, b, args.f, args.h, conv)
    else:
        result = poisson_bracket(
            make_constraint(a, args.f, conv), make_constraint(b, args.h, conv), conv
        )
    if args.localize:
        result = localize(result, args.localize)
    _emit(render(result, _fmt(args)), args)
    return EXIT_OK


def cmd_classify(args: argparse.Namespace, conv: Conventions) -> int:
    e = _normal(_expression(args), conv)
    buckets = classify(e)
    if _fmt(args) is OutputFormat.JSON:
        _emit(json.dumps(_bucket_payload(e), indent=2), args)
        return EXIT_OK
    lines = [
        f"pi^{b.momentum_power} d{b.derivative_degree} s{b.smearing_derivatives}: "
        f"{len(b.terms)} terms"
        for b in buckets
    ]
    if _fmt(args) is OutputFormat.LATEX:
        lines = [
            f"% {line}\n{render(b.terms, OutputFormat.LATEX)}"
            for line, b in zip(lines, buckets, strict=True)
        ]
    _emit("\n".join(lines) or "(empty)", args)
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace, conv: Conventions) -> int:
    red = reduce_weakly(_expression(args), conv)
    fmt = _fmt(args)
    if fmt is OutputFormat.JSON:
        payload = {
            "remainder": red.remainder.to_dict(),
            "kernel": red.kernel.to_dict(),
            "sites": [s.to_dict() for s in red.sites],
            "reconstructed": red.reconstructed,
        }
        _emit(json.dumps(payload, ensure_ascii=False, indent=2), args)
        return EXIT_OK
    text = [
        f"remainder: {render(red.remainder, fmt)}",
        f"kernel:    {render(red.kernel, fmt)}",
        f"sites:     {len(red.sites)}",
    ]
    _emit("\n".join(text), args)
    return EXIT_OK


def _render_report(report: ObstructionReport, fmt: OutputFormat, title: str) -> str:
    if fmt is OutputFormat.JSON:
        return report.to_json()
    if fmt is OutputFormat.LATEX:
        return render_latex_report(report, title)
    return summarize(report, title)


def cmd_closure(args: argparse.Namespace, conv: Conventions) -> int:
    if not Path(args.library).exists():
        raise UsageError(f"Library not found: {args.library}")
    library = load_library(args.library)
    fmt = _fmt(args)
    selected = tuple(b.strip() for b in args.brackets.split(",")) if args.brackets else None
    if args.suite:
        opts = ClosureOptions(selected) if selected else None
        reports = obstruction_suite(args.suite, library, conv, opts)
        if fmt is OutputFormat.JSON:
            payload = {name: r.to_dict() for name, r in reports.items()}
            _emit(json.dumps(payload, ensure_ascii=False, indent=2), args)
        else:
            _emit("\n".join(_render_report(r, fmt, name) for name, r in reports.items()), args)
        return EXIT_OK
    if not Path(args.spec).exists():
        raise UsageError(f"Closure spec not found: {args.spec}")
    spec = load_closure_spec(args.spec, library)
    opts = ClosureOptions(selected or spec.brackets)
    report = closure_report(spec.hamiltonian, spec.momentum, conv, opts)
    _emit(_render_report(report, fmt, spec.name), args)
    if report.verdict is Verdict.INCONCLUSIVE:
        log.warning("Verdict inconclusive: %s", "; ".join(report.notes))
    return EXIT_OK


def cmd_check_linear(args: argparse.Namespace, conv: Conventions) -> int:
    report = check_linear_term_conditions(_expression(args), conv)
    text = report.to_json() if _fmt(args) is OutputFormat.JSON else summarize_linear(report)
    _emit(text, args)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace, conv: Conventions) -> int:
    if args.chart is not None and not Path(args.chart).exists():
        raise UsageError(f"Chart spec not found: {args.chart}")
    spec = load_chart_spec(args.chart) if args.chart else ChartSpec()
    if args.seed is not None:
        spec.seed = args.seed
    if args.dim is not None:
        spec.dim = args.dim
    chart = make_chart(spec)
    e = _expression(args)
    values = evaluate(e, chart, conv)
    if args.against is not None:
        other = evaluate(_read(args.against), chart, conv)
        err = relative_error(values, other)
        ok = err <= chart.tolerance
        _emit(json.dumps({"relative_error": err, "tolerance": chart.tolerance, "agree": ok}), args)
        return EXIT_OK if ok else EXIT_FAILURE
    at_point = values[(Ellipsis, *chart.point)]
    payload = {
        "free": [str(i) for i in e.free],
        "point": list(chart.point),
        "components": np.asarray(at_point).tolist(),
        "max_abs": float(np.max(np.abs(values))) if values.size else 0.0,
    }
    _emit(json.dumps(payload, indent=2), args)
    return EXIT_OK


HANDLERS = {
    "canon": cmd_canon,
    "vary": cmd_vary,
    "fderiv": cmd_fderiv,
    "bracket": cmd_bracket,
    "classify": cmd_classify,
    "reduce": cmd_reduce,
    "closure": cmd_closure,
    "check-linear": cmd_check_linear,
    "oracle": cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    """Виконує підкоманду; 0 — успіх, 1 — помилка обчислення, 2 — помилка використання."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        conv = _conventions(args)
        return HANDLERS[args.command](args, conv)
    except (UsageError, FileNotFoundError, ParseError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except AdmClosureError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAILURE
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
