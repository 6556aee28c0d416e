"""Числова оцінка виразів на карті: символи Крістофеля, Рімана, вкладені ∇.

Фактор ∇_{d1}…∇_{dk} T зберігається масивом з осями (d1, …, dk, слоти, сітка);
терм згортається через ``np.einsum`` за мітками індексів.
"""

from __future__ import annotations

import logging
import string

import numpy as np

from src.algebra.registry import get_registry
from src.contracts.enums import VariationClass
from src.contracts.errors import OracleError
from src.contracts.tensor import Expression, Term
from src.oracle.chart import STENCILS, Chart
from src.shared.conventions import DEFAULT_CONVENTIONS, Conventions
from src.variation.special import contains_specials, expand_specials

log = logging.getLogger(__name__)

# мітки осей слотів у einsum; c та e зарезервовані
_SLOT_LETTERS = "ijklmnopqrstuvwxyz"
_TERM_LETTERS = string.ascii_letters


def finite_difference(arr: np.ndarray, axis: int, h: float, stencil: int) -> np.ndarray:
    """Центральна різниця вздовж періодичної осі."""
    out = np.zeros_like(arr)
    for s, w in STENCILS[stencil]:
        out += w * (np.roll(arr, -s, axis=axis) - np.roll(arr, s, axis=axis))
    return out / h


class Evaluator:
    """Кешує геометрію та масиви факторів однієї карти."""

    def __init__(self, chart: Chart, conv: Conventions = DEFAULT_CONVENTIONS) -> None:
        self.chart = chart
        self.conv = conv.with_dim(chart.dim)
        self._cache: dict[tuple[str, int], np.ndarray] = {}
        self._geometry: dict[str, np.ndarray] = {}

    # ── похідні ──────────────────────────────────────────────────────

    def partial(self, arr: np.ndarray) -> np.ndarray:
        """∂_c масиву; нова вісь c перша."""
        d = self.chart.dim
        first = arr.ndim - d
        return np.stack(
            [
                finite_difference(arr, first + c, self.chart.spacing, self.chart.stencil)
                for c in range(d)
            ]
        )

    def covariant(self, arr: np.ndarray, variance: tuple[bool, ...], weight: int) -> np.ndarray:
        """∇_c тензорної густини ваги ``weight``; нова нижня вісь c перша."""
        gam = self.christoffel()
        out = self.partial(arr)
        slots = _SLOT_LETTERS[: len(variance)]
        for pos, is_up in enumerate(variance):
            src = slots[:pos] + "e" + slots[pos + 1 :]
            if is_up:
                out = out + np.einsum(f"{slots[pos]}ce...,{src}...->c{slots}...", gam, arr)
            else:
                out = out - np.einsum(f"ec{slots[pos]}...,{src}...->c{slots}...", gam, arr)
        if weight:
            trace = np.einsum("ece...->c...", gam)
            out = out - weight * np.einsum(f"c...,{slots}...->c{slots}...", trace, arr)
        return out

    # ── геометрія ────────────────────────────────────────────────────

    def metric_jet(self) -> tuple[np.ndarray, np.ndarray]:
        """(∂_c g_ab, ∂_c ∂_d g_ab): точні для тригонометричної моделі, інакше різниці."""
        if self.chart.metric_jet is not None:
            return self.chart.metric_jet
        dg = self.partial(self.chart.metric)
        return dg, self.partial(dg)

    def inverse_metric(self) -> np.ndarray:
        if "ginv" not in self._geometry:
            g = np.moveaxis(self.chart.metric, (0, 1), (-2, -1))
            self._geometry["ginv"] = np.moveaxis(np.linalg.inv(g), (-2, -1), (0, 1))
        return self._geometry["ginv"]

    def christoffel(self) -> np.ndarray:
        """Γ[a, b, c] = Γ^a_{bc}."""
        if "gamma" not in self._geometry:
            dg, _ = self.metric_jet()
            low = 0.5 * (
                np.einsum("deb...->edb...", dg)
                + np.einsum("bed...->edb...", dg)
                - dg
            )
            self._geometry["gamma_low"] = low
            self._geometry["gamma"] = np.einsum("ae...,edb...->adb...", self.inverse_metric(), low)
        return self._geometry["gamma"]

    def riemann_up(self) -> np.ndarray:
        """R[a, b, c, d] = R^a_{bcd}, [∇_c, ∇_d] V^a = R^a_{bcd} V^b."""
        if "riemann_up" not in self._geometry:
            gam = self.christoffel()
            low = self._geometry["gamma_low"]
            dg, ddg = self.metric_jet()
            ginv = self.inverse_metric()
            dginv = -np.einsum("ap...,cpq...,qe...->cae...", ginv, dg, ginv)
            dlow = 0.5 * (
                np.einsum("cdeb...->cedb...", ddg)
                + np.einsum("cbed...->cedb...", ddg)
                - np.einsum("cedb...->cedb...", ddg)
            )
            dgam = np.einsum("cae...,edb...->cadb...", dginv, low) + np.einsum(
                "ae...,cedb...->cadb...", ginv, dlow
            )
            self._geometry["riemann_up"] = (
                np.einsum("cadb...->abcd...", dgam)
                - np.einsum("dacb...->abcd...", dgam)
                + np.einsum("ace...,edb...->abcd...", gam, gam)
                - np.einsum("ade...,ecb...->abcd...", gam, gam)
            )
        return self._geometry["riemann_up"]

    def _base(self, name: str) -> np.ndarray:
        chart = self.chart
        d = chart.dim
        if name == "g":
            return chart.metric
        if name == "ginv":
            return self.inverse_metric()
        if name == "delta":
            return np.broadcast_to(np.eye(d).reshape(d, d, *([1] * d)), (d, d, *chart.grid_shape))
        if name in ("sqrtg", "isqrtg"):
            det = np.linalg.det(np.moveaxis(chart.metric, (0, 1), (-2, -1)))
            return np.sqrt(det) if name == "sqrtg" else 1.0 / np.sqrt(det)
        if name == "pi":
            return chart.momentum
        if name == "Riem":
            return np.einsum("ae...,ebcd...->abcd...", chart.metric, self.riemann_up())
        if name == "Ricci":
            return np.einsum("ckcl...->kl...", self.riemann_up())
        if name == "R":
            return np.einsum("kl...,ckcl...->...", self.inverse_metric(), self.riemann_up())
        if name in chart.formal:
            return chart.formal[name]
        if name in chart.smearings:
            return chart.smearings[name]
        if name in chart.constants:
            return np.full(chart.grid_shape, chart.constants[name])
        raise OracleError(f"Symbol '{name}' has no numeric binding on this chart")

    def factor_array(self, name: str, nderivs: int) -> np.ndarray:
        key = (name, nderivs)
        if key in self._cache:
            return self._cache[key]
        sym = get_registry().get(name)
        if sym.vclass is VariationClass.SPECIAL:
            raise OracleError(f"Special tensor '{name}' must be expanded before evaluation")
        if nderivs == 0:
            arr = self._base(name)
        else:
            inner = self.factor_array(name, nderivs - 1)
            variance = (False,) * (nderivs - 1) + sym.variance
            arr = self.covariant(inner, variance, sym.weight)
        self._cache[key] = arr
        return arr

    # ── вирази ───────────────────────────────────────────────────────

    def term(self, t: Term) -> np.ndarray:
        letters: dict[str, str] = {}

        def code(label: str) -> str:
            if label not in letters:
                if len(letters) == len(_TERM_LETTERS):
                    raise OracleError(f"Term '{t}' has too many distinct indices")
                letters[label] = _TERM_LETTERS[len(letters)]
            return letters[label]

        operands: list[np.ndarray] = []
        subscripts: list[str] = []
        for f in t.factors:
            operands.append(self.factor_array(f.sym, len(f.derivs)))
            subscripts.append("".join(code(x) for x in (*f.derivs, *(i.label for i in f.slots))))
        out = "".join(code(i.label) for i in t.free_indices())
        scale = float(t.coeff) * float(self.chart.dim) ** t.dimpow
        if not operands:
            return np.full(self.chart.grid_shape, scale)
        spec = ",".join(s + "..." for s in subscripts) + "->" + out + "..."
        return scale * np.einsum(spec, *operands, optimize=True)

    def expression(self, e: Expression) -> np.ndarray:
        if contains_specials(e):
            e = expand_specials(e, self.conv)
        shape = (self.chart.dim,) * len(e.free) + self.chart.grid_shape
        total = np.zeros(shape)
        for t in e.terms:
            total = total + self.term(t)
        return total


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def evaluate(e: Expression, chart: Chart, conv: Conventions = DEFAULT_CONVENTIONS) -> np.ndarray:
    """Компоненти виразу в усіх вузлах: осі вільних індексів (у порядку ``e.free``), потім сітка.

    Raises:
        OracleError: символ без числової прив'язки.
    """
    return Evaluator(chart, conv).expression(e)


def evaluate_at(e: Expression, chart: Chart, conv: Conventions = DEFAULT_CONVENTIONS) -> np.ndarray:
    """Компоненти виразу в точці оцінки карти."""
    values = evaluate(e, chart, conv)
    return values[(Ellipsis, *chart.point)]


def relative_error(actual: np.ndarray, expected: np.ndarray, floor: float = 1e-12) -> float:
    """max|actual − expected| / max(max|expected|, floor)."""
    scale = max(float(np.max(np.abs(expected))), floor)
    return float(np.max(np.abs(actual - expected))) / scale
