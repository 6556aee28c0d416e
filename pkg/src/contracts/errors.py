"""Ієрархія помилок предметної області.

Усі помилки успадковуються від ValueError, щоб виклики на кшталт
``except ValueError`` у CLI перехоплювали їх разом із помилками розбору
перелічень.
"""

from __future__ import annotations


class AdmClosureError(ValueError):
    """Базова помилка обчислень."""


class StructureError(AdmClosureError):
    """Порушено правила індексів (мітка тричі, конфлікт варіантності)."""

    def __init__(self, message: str, label: str = "") -> None:
        super().__init__(message)
        self.label = label


class SignatureError(AdmClosureError):
    """Не збігаються сигнатури вільних індексів, арність або вага густини."""


class UnsupportedSymbolError(AdmClosureError):
    """Символ невідомий реєстру або не має правила варіації."""

    def __init__(self, message: str, symbol: str = "") -> None:
        super().__init__(message)
        self.symbol = symbol


class ParseError(AdmClosureError):
    """Помилка розбору тексту виразу з кодом діагностики."""

    SYNTAX = "E_SYNTAX"
    UNKNOWN_SYMBOL = "E_UNKNOWN_SYMBOL"
    ARITY = "E_ARITY"
    INDEX = "E_INDEX"

    def __init__(self, message: str, code: str, line: int = 0, column: int = 0) -> None:
        location = f" at line {line}, column {column}" if line else ""
        super().__init__(f"[{code}] {message}{location}")
        self.code = code
        self.line = line
        self.column = column


class LocalizationError(AdmClosureError):
    """Локалізація неможлива: на функції розмазування лишилися похідні."""


class SpecInvariantError(AdmClosureError):
    """ConstraintSpec порушує структурний інваріант (заборонене згортання, симетрія обміну)."""


class ResourceLimitError(AdmClosureError):
    """Перевищено ліміт кількості доданків або проходів."""


class CancelledError(AdmClosureError):
    """Обчислення перервано кооперативним токеном скасування."""


class OracleError(AdmClosureError):
    """Помилка чисельного оракула (незв'язаний символ, нестабільний крок)."""
