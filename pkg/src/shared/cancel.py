"""Кооперативне скасування довгих обчислень."""

from __future__ import annotations

import threading

from src.contracts.errors import CancelledError


class CancelToken:
    """Прапорець скасування, який перевіряють між термами."""

    def __init__(self) -> None:
        self._event = threading.Event()

    def cancel(self) -> None:
        self._event.set()

    @property
    def cancelled(self) -> bool:
        return self._event.is_set()

    def check(self, where: str = "") -> None:
        """Raises:
        CancelledError: якщо токен встановлено.
        """
        if self._event.is_set():
            raise CancelledError(f"Computation cancelled{f' in {where}' if where else ''}")


def checkpoint(token: CancelToken | None, where: str = "") -> None:
    if token is not None:
        token.check(where)
