"""Налаштування логування та таймер етапів обчислення."""

from __future__ import annotations

import logging
import sys
import time
from collections.abc import Iterator
from contextlib import contextmanager

LEVELS: tuple[str, ...] = ("DEBUG", "INFO", "WARNING", "ERROR")


def setup_logging(level: str = "INFO") -> None:
    """Налаштовує кореневий логер (stderr, лаконічний формат).

    Args:
        level: Рівень логування (DEBUG, INFO, WARNING, ERROR).

    Raises:
        ValueError: якщо рівень не зі списку LEVELS.
    """
    name = level.upper()
    if name not in LEVELS:
        raise ValueError(f"Unsupported log level '{level}'. Allowed: {', '.join(LEVELS)}")
    logging.basicConfig(
        level=getattr(logging, name),
        format="%(asctime)s | %(levelname)-7s | %(name)s | %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
        force=True,
    )


@contextmanager
def stage(logger: logging.Logger, name: str) -> Iterator[None]:
    """Логує завершення етапу конвеєра разом із тривалістю."""
    started = time.perf_counter()
    yield
    logger.info("Stage %s done in %.2fs", name, time.perf_counter() - started)
