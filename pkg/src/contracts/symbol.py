"""Опис тензорного символу та його метаданих."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from src.contracts.enums import VariationClass

# (перестановка слотів, знак): T[s] = sign * T[s∘perm]
Generator = tuple[tuple[int, ...], int]


@dataclass(frozen=True, slots=True)
class TensorSymbol:
    """Символ реєстру з природною варіантністю слотів.

    Attributes:
        name: ідентифікатор у граматиці (``pi``, ``Ricci``).
        variance: природна варіантність кожного слота (True — верхній).
        generators: породжувачі групи симетрій слотів.
        weight: вага густини (π та √g мають 1, 1/√g має −1).
        grade: степінь за імпульсом.
        degree: власний похідний порядок (кривина — 2).
        vclass: клас для правил варіації.
        covariantly_constant: ∇ цього символу тотожно нуль.
    """

    name: str
    variance: tuple[bool, ...] = ()
    generators: tuple[Generator, ...] = ()
    weight: int = 0
    grade: int = 0
    degree: int = 0
    vclass: VariationClass = VariationClass.CONSTANT
    covariantly_constant: bool = False

    @property
    def arity(self) -> int:
        return len(self.variance)

    def signature(self) -> str:
        return " ".join("^" if v else "_" for v in self.variance) or "(scalar)"

    @classmethod
    def from_dict(cls, row: dict[str, Any]) -> TensorSymbol:
        """Створює символ з конфігурації профілю.

        ``slots`` — рядок на кшталт ``"_ _ ^"``; ``symmetric``/``antisymmetric`` —
        пари позицій слотів, які переставляються.
        """
        variance = tuple(tok == "^" for tok in str(row.get("slots", "")).split())
        gens: list[Generator] = []
        for pair, sign in (
            *((p, 1) for p in row.get("symmetric", [])),
            *((p, -1) for p in row.get("antisymmetric", [])),
        ):
            perm = list(range(len(variance)))
            a, b = int(pair[0]), int(pair[1])
            perm[a], perm[b] = perm[b], perm[a]
            gens.append((tuple(perm), sign))
        return cls(
            name=str(row["name"]),
            variance=variance,
            generators=tuple(gens),
            weight=int(row.get("weight", 0)),
            grade=int(row.get("grade", 0)),
            degree=int(row.get("degree", 0)),
            vclass=VariationClass(row.get("class", VariationClass.CONSTANT.value)),
            covariantly_constant=bool(row.get("covariantly_constant", False)),
        )
