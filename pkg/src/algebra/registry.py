"""Реєстр тензорних символів і замкнені групи симетрій слотів."""

from __future__ import annotations

import logging
import threading

from src.contracts.enums import VariationClass
from src.contracts.errors import StructureError, UnsupportedSymbolError
from src.contracts.symbol import Generator, TensorSymbol

log = logging.getLogger(__name__)

_SYM = 1
_ANTI = -1


def _swap(arity: int, a: int, b: int) -> tuple[int, ...]:
    perm = list(range(arity))
    perm[a], perm[b] = perm[b], perm[a]
    return tuple(perm)


def _pairs(arity: int, *pairs: tuple[int, int], sign: int = _SYM) -> tuple[Generator, ...]:
    return tuple((_swap(arity, a, b), sign) for a, b in pairs)


_PAIR_EXCHANGE: Generator = ((2, 3, 0, 1), _SYM)

MC = VariationClass.METRIC_BUILT
SM = VariationClass.SMEARING
SP = VariationClass.SPECIAL
K = VariationClass.CONSTANT

UP, DN = True, False

BUILTINS: tuple[TensorSymbol, ...] = (
    TensorSymbol("g", (DN, DN), _pairs(2, (0, 1)), vclass=MC, covariantly_constant=True),
    TensorSymbol("ginv", (UP, UP), _pairs(2, (0, 1)), vclass=MC, covariantly_constant=True),
    TensorSymbol("delta", (DN, UP), vclass=K, covariantly_constant=True),
    TensorSymbol("sqrtg", weight=1, vclass=MC, covariantly_constant=True),
    TensorSymbol("isqrtg", weight=-1, vclass=MC, covariantly_constant=True),
    TensorSymbol(
        "pi", (UP, UP), _pairs(2, (0, 1)), weight=1, grade=1, vclass=VariationClass.MOMENTUM
    ),
    TensorSymbol("Ricci", (DN, DN), _pairs(2, (0, 1)), degree=2, vclass=MC),
    TensorSymbol(
        "Riem",
        (DN, DN, DN, DN),
        (*_pairs(4, (0, 1), (2, 3), sign=_ANTI), _PAIR_EXCHANGE),
        degree=2,
        vclass=MC,
    ),
    TensorSymbol("R", degree=2, vclass=MC),
    TensorSymbol("Lambda", vclass=K, covariantly_constant=True),
    TensorSymbol("c", vclass=K, covariantly_constant=True),
    TensorSymbol("C", vclass=K, covariantly_constant=True),
    TensorSymbol("alpha", vclass=K, covariantly_constant=True),
    TensorSymbol("f", vclass=SM),
    TensorSymbol("h", vclass=SM),
    TensorSymbol("N", vclass=SM),
    TensorSymbol("M", vclass=SM),
    TensorSymbol("xi", (UP,), vclass=SM),
    TensorSymbol("eta", (UP,), vclass=SM),
    TensorSymbol("zeta", (UP,), vclass=SM),
    TensorSymbol("w", (UP, UP), _pairs(2, (0, 1)), vclass=SM),
    TensorSymbol(
        "dg", (DN, DN), _pairs(2, (0, 1)), vclass=VariationClass.FORMAL_VARIATION
    ),
    TensorSymbol(
        "dpi",
        (UP, UP),
        _pairs(2, (0, 1)),
        weight=1,
        grade=1,
        vclass=VariationClass.FORMAL_VARIATION,
    ),
    # спеціальні тензори, розгортаються через build_special
    TensorSymbol(
        "G",
        (DN, DN, DN, DN),
        (*_pairs(4, (0, 1), (2, 3)), _PAIR_EXCHANGE),
        vclass=SP,
        covariantly_constant=True,
    ),
    TensorSymbol(
        "DeWittInverse",
        (UP, UP, UP, UP),
        (*_pairs(4, (0, 1), (2, 3)), _PAIR_EXCHANGE),
        vclass=SP,
        covariantly_constant=True,
    ),
    TensorSymbol(
        "Xi", (UP, UP, UP, DN, DN, DN), _pairs(6, (1, 2), (4, 5)), vclass=SP,
        covariantly_constant=True,
    ),
    TensorSymbol(
        "A0", (DN, DN, UP, UP, UP, UP), _pairs(6, (0, 1), (2, 3)), vclass=SP,
        covariantly_constant=True,
    ),
    TensorSymbol("A1", (DN, DN, DN, UP, UP, UP), _pairs(6, (1, 2), (3, 4)), degree=2, vclass=SP),
    TensorSymbol(
        "A2", (DN, DN, DN, DN, UP, UP, UP), _pairs(7, (0, 1), (2, 3), (4, 5)), degree=3,
        vclass=SP,
    ),
    TensorSymbol(
        "F0",
        (UP, UP, UP, UP, UP, DN, DN, DN),
        (*_pairs(8, (2, 3)), *_pairs(8, (6, 7), sign=_ANTI)),
        vclass=SP,
        covariantly_constant=True,
    ),
)


def close_group(symbol: TensorSymbol) -> tuple[Generator, ...]:
    """Замикає породжувачі в групу (BFS по композиціях), тотожність перша.

    Raises:
        StructureError: породжувач не є перестановкою, змішує варіантності
            або одна перестановка отримує два різні знаки.
    """
    arity = symbol.arity
    for perm, sign in symbol.generators:
        if sorted(perm) != list(range(arity)) or sign not in (_SYM, _ANTI):
            raise StructureError(f"Bad symmetry generator {perm} for '{symbol.name}'")
        if any(symbol.variance[k] != symbol.variance[perm[k]] for k in range(arity)):
            raise StructureError(f"Generator {perm} of '{symbol.name}' mixes slot variance")
    identity = tuple(range(arity))
    elements: dict[tuple[int, ...], int] = {identity: _SYM}
    order = [identity]
    queue = [identity]
    while queue:
        p = queue.pop(0)
        s = elements[p]
        for q, t in symbol.generators:
            r = tuple(p[q[k]] for k in range(arity))
            if r in elements:
                if elements[r] != s * t:
                    raise StructureError(
                        f"Symmetry of '{symbol.name}' is inconsistent: {r} has both signs"
                    )
                continue
            elements[r] = s * t
            order.append(r)
            queue.append(r)
    return tuple((p, elements[p]) for p in order)


class SymbolRegistry:
    """Потокобезпечний реєстр символів із кешем груп."""

    def __init__(self, symbols: tuple[TensorSymbol, ...] = BUILTINS) -> None:
        self._lock = threading.Lock()
        self._symbols: dict[str, TensorSymbol] = {}
        self._groups: dict[str, tuple[Generator, ...]] = {}
        for sym in symbols:
            self.register(sym)

    def register(self, symbol: TensorSymbol) -> TensorSymbol:
        """Реєструє символ; повторна реєстрація того ж означення — no-op.

        Raises:
            StructureError: символ з таким ім'ям уже має інше означення.
        """
        with self._lock:
            known = self._symbols.get(symbol.name)
            if known is not None:
                if known != symbol:
                    raise StructureError(
                        f"Symbol '{symbol.name}' already registered with a different definition",
                        symbol.name,
                    )
                return known
            group = close_group(symbol)
            self._symbols[symbol.name] = symbol
            self._groups[symbol.name] = group
        log.debug("Registered symbol %s (%s, |group|=%d)", symbol.name, symbol.signature(), len(group))
        return symbol

    def get(self, name: str) -> TensorSymbol:
        try:
            return self._symbols[name]
        except KeyError:
            raise UnsupportedSymbolError(f"Unknown symbol '{name}'", name) from None

    def group(self, name: str) -> tuple[Generator, ...]:
        self.get(name)
        return self._groups[name]

    def __contains__(self, name: object) -> bool:
        return name in self._symbols

    def names(self) -> list[str]:
        return sorted(self._symbols)


_REGISTRY: SymbolRegistry | None = None
_REGISTRY_LOCK = threading.Lock()


def get_registry() -> SymbolRegistry:
    """Глобальний реєстр з вбудованими символами."""
    global _REGISTRY
    with _REGISTRY_LOCK:
        if _REGISTRY is None:
            _REGISTRY = SymbolRegistry()
        return _REGISTRY


def register_symbols(symbols: tuple[TensorSymbol, ...] | list[TensorSymbol]) -> None:
    reg = get_registry()
    for sym in symbols:
        reg.register(sym)
