"""Звітування: JSON, текстовий підсумок і LaTeX-документ (jinja2)."""

from __future__ import annotations

import logging
import re
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from src.contracts.report import LinearConditionReport, ObstructionReport
from src.normalizer.render import to_latex
from src.shared.file_utils import atomic_write

log = logging.getLogger(__name__)

TEMPLATES = Path(__file__).resolve().parent / "templates"
REPORT_TEMPLATE = "report.tex.j2"

_TEX_SPECIAL = re.compile(r"([_&%$#{}])")


def tex_escape(text: object) -> str:
    return _TEX_SPECIAL.sub(r"\\\1", str(text))


def _environment() -> Environment:
    env = Environment(
        loader=FileSystemLoader(str(TEMPLATES)),
        block_start_string=r"\BLOCK{",
        block_end_string="}",
        variable_start_string=r"\VAR{",
        variable_end_string="}",
        comment_start_string=r"\#{",
        comment_end_string="}",
        trim_blocks=True,
        lstrip_blocks=True,
        autoescape=False,
        undefined=StrictUndefined,
        keep_trailing_newline=True,
    )
    env.filters["tex"] = tex_escape
    return env


# ═══════════════════════════════════════════════════════════════════════════
#  JSON
# ═══════════════════════════════════════════════════════════════════════════


def write_report_json(report: ObstructionReport | LinearConditionReport, path: str | Path) -> None:
    atomic_write(path, report.to_json() + "\n")
    log.info("Wrote report → %s", path)


# ═══════════════════════════════════════════════════════════════════════════
#  TXT summary
# ═══════════════════════════════════════════════════════════════════════════


def summarize(report: ObstructionReport, title: str = "") -> str:
    """Текстовий підсумок для консолі."""
    lines: list[str] = []
    lines.append("=" * 60)
    lines.append(f"  Closure report{': ' + title if title else ''}")
    lines.append("=" * 60)
    lines.append(f"  Verdict:  {report.verdict.value}")
    lines.append(f"  Profile:  {report.profile_hash or '-'}")
    lines.append("")
    for b in report.brackets:
        lines.append(f"--- Bracket: {b.name} ---")
        lines.append(f"  Raw terms:        {len(b.raw)}")
        cells = ", ".join(f"{k.key}={len(k.terms)}" for k in b.buckets)
        lines.append(f"  Buckets:          {cells or '-'}")
        for name, kernel in b.kernels.items():
            lines.append(f"  Kernel [{name}]:  {kernel}")
        lines.append(f"  Remainder:        {b.remainder}")
        lines.append(f"  Reduction sites:  {len(b.log)}")
        lines.append("")
    if report.certificate is not None:
        lines.append("--- Certificate ---")
        lines.append(f"  Bucket:  {report.certificate_bucket}")
        lines.append(f"  {report.certificate}")
        lines.append("")
    for name, value in report.conditions.items():
        lines.append(f"--- Condition: {name} ---")
        lines.append(f"  {value} = 0")
        lines.append("")
    for note in report.notes:
        lines.append(f"  Note: {note}")
    lines.append("=" * 60)
    return "\n".join(lines) + "\n"


def summarize_linear(report: LinearConditionReport) -> str:
    lines = [
        f"divfree: {'holds' if report.divfree_holds else 'fails'}",
        f"  residue: {report.divfree_residue}",
        f"curl:    {'holds' if report.curl_holds else 'fails'}",
        f"  residue: {report.curl_residue}",
        *(f"note: {n}" for n in report.notes),
    ]
    return "\n".join(lines) + "\n"


# ═══════════════════════════════════════════════════════════════════════════
#  LaTeX report
# ═══════════════════════════════════════════════════════════════════════════


def render_latex_report(report: ObstructionReport, title: str = "closure") -> str:
    """LaTeX-документ з вердиктом, ядрами, залишками та умовами."""
    brackets = [
        {
            "name": b.name,
            "raw_terms": len(b.raw),
            "kernels": [(k, to_latex(v)) for k, v in b.kernels.items()],
            "remainder": "" if b.remainder.is_zero() else to_latex(b.remainder),
        }
        for b in report.brackets
    ]
    return (
        _environment()
        .get_template(REPORT_TEMPLATE)
        .render(
            title=title,
            verdict=report.verdict.value,
            profile=report.profile_hash or "-",
            brackets=brackets,
            certificate=to_latex(report.certificate) if report.certificate is not None else "",
            bucket=tuple(report.certificate_bucket) if report.certificate_bucket else "",
            conditions=[(k, to_latex(v)) for k, v in report.conditions.items()],
            notes=report.notes,
        )
    )


def write_report_latex(report: ObstructionReport, path: str | Path, title: str = "closure") -> None:
    atomic_write(path, render_latex_report(report, title))
    log.info("Wrote LaTeX report → %s", path)
