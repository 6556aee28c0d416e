"""Завантаження YAML (профіль конвенцій) та JSON (правила, бібліотека, карти)."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import yaml

log = logging.getLogger(__name__)


def _existing(path: str | Path) -> Path:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"Config not found: {p}")
    return p


def load_yaml(path: str | Path) -> dict[str, Any]:
    """Зчитує YAML файл та повертає його вміст як dict.

    Raises:
        FileNotFoundError: Якщо файл не знайдено.
    """
    p = _existing(path)
    with p.open("r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    log.debug("Loaded config %s (%d top-level keys)", p.name, len(data or {}))
    return data or {}


def load_json(path: str | Path) -> Any:
    """Зчитує JSON файл (правила переписування, маніфест в'язей, карта).

    Raises:
        FileNotFoundError: Якщо файл не знайдено.
        ValueError: Якщо JSON некоректний.
    """
    p = _existing(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"Invalid JSON in {p}: {exc}") from exc
    log.debug("Loaded json %s", p.name)
    return data
