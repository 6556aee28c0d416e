"""Профіль конвенцій знаків і нормувань (config/conventions.yaml)."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Any

from src.contracts.errors import SignatureError
from src.contracts.symbol import TensorSymbol
from src.shared.config_loader import load_yaml

log = logging.getLogger(__name__)

DEWITT_NORMALIZATIONS: tuple[str, ...] = ("half", "literal")
DEFAULT_SMEARING_ORDER: tuple[str, ...] = ("f", "h", "N", "M", "xi", "eta", "zeta", "w")
DEFAULT_PROFILE = Path(__file__).resolve().parents[2] / "config" / "conventions.yaml"


@dataclass(frozen=True, slots=True)
class Conventions:
    """Активні конвенції обчислення.

    ``dewitt="half"`` означає G = ½(g g + g g) − g g/(d−1); ``literal`` —
    (g g + g g − ½ g g) без загального множника.
    """

    version: str = "1"
    dim: int | None = 3
    dewitt: str = "half"
    potential_sign: int = -1
    momentum_coefficient: int = -2
    smearing_order: tuple[str, ...] = DEFAULT_SMEARING_ORDER
    max_terms: int = 200_000
    max_passes: int = 50
    profile_hash: str = ""
    symbols: tuple[TensorSymbol, ...] = ()

    def __post_init__(self) -> None:
        if self.dewitt not in DEWITT_NORMALIZATIONS:
            raise ValueError(
                f"Unsupported dewitt normalization '{self.dewitt}'. "
                f"Allowed: {', '.join(DEWITT_NORMALIZATIONS)}"
            )
        if self.dim is not None and self.dim < 2:
            raise ValueError(f"Spatial dimension must be >= 2, got {self.dim}")

    def require_dim(self, what: str) -> int:
        if self.dim is None:
            raise SignatureError(f"{what} needs a numeric dimension binding")
        return self.dim

    def dewitt_trace(self) -> Fraction:
        """Коефіцієнт при g_ab g_cd у супер-метриці."""
        if self.dewitt == "literal":
            return Fraction(1, 2)
        return Fraction(1, self.require_dim("DeWitt supermetric") - 1)

    def with_dim(self, dim: int | None) -> Conventions:
        return replace(self, dim=dim)

    def smearing_rank(self, name: str) -> int:
        try:
            return self.smearing_order.index(name)
        except ValueError:
            return -1


DEFAULT_CONVENTIONS = Conventions()


def profile_hash(path: str | Path) -> str:
    """Перші 12 hex-символів sha256 від байтів файлу профілю."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:12]


def conventions_from_dict(data: dict[str, Any], digest: str = "") -> Conventions:
    caps = data.get("limits", {}) or {}
    dim = data.get("dim", 3)
    return Conventions(
        version=str(data.get("version", "1")),
        dim=None if dim in (None, "symbolic") else int(dim),
        dewitt=str((data.get("dewitt") or {}).get("normalization", "half")),
        potential_sign=int(data.get("potential_sign", -1)),
        momentum_coefficient=int(data.get("momentum_constraint_coefficient", -2)),
        smearing_order=tuple(data.get("smearing_order", DEFAULT_SMEARING_ORDER)),
        max_terms=int(caps.get("max_terms", 200_000)),
        max_passes=int(caps.get("max_passes", 50)),
        profile_hash=digest,
        symbols=tuple(TensorSymbol.from_dict(s) for s in data.get("symbols", []) or []),
    )


def load_conventions(path: str | Path | None = None) -> Conventions:
    """Завантажує профіль конвенцій і обчислює його хеш.

    Args:
        path: Шлях до YAML; None — профіль за замовчуванням з config/.
    """
    p = Path(path) if path is not None else DEFAULT_PROFILE
    data = load_yaml(p)
    conv = conventions_from_dict(data, profile_hash(p))
    log.info("Conventions profile %s v%s (hash %s)", p.name, conv.version, conv.profile_hash)
    return conv
