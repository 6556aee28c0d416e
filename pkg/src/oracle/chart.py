"""Числові карти: періодичний бокс, тригонометрична метрика, поля π та розмазування.

Метрика g_ab = δ_ab + amplitude · Σ_k (a_k cos k·x + b_k sin k·x) з seeded
коефіцієнтами; додатна визначеність перевіряється в кожному вузлі (rejection
sampling). Для тригонометричної моделі зберігаються точні ∂g та ∂∂g.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from src.contracts.errors import OracleError
from src.shared.config_loader import load_json
from src.shared.seed import init_seed

log = logging.getLogger(__name__)

BOX_LENGTH = 2 * np.pi
STENCIL_ORDERS: tuple[int, ...] = (2, 4)
# (зсув, вага) центральної різниці: f' ≈ Σ w (f(x+sh) − f(x−sh)) / h
STENCILS: dict[int, tuple[tuple[int, float], ...]] = {
    2: ((1, 0.5),),
    4: ((1, 2.0 / 3.0), (2, -1.0 / 12.0)),
}
SCALAR_SMEARINGS = ("f", "h", "N", "M")
VECTOR_SMEARINGS = ("xi", "eta", "zeta")
CONSTANTS = ("Lambda", "c", "C", "alpha")


@dataclass(slots=True)
class ChartSpec:
    """Параметри побудови карти (файл JSON або аргументи CLI)."""

    dim: int = 3
    points: int = 16
    seed: int = 0
    amplitude: float = 0.05
    max_wavenumber: int = 1
    stencil: int = 4
    transverse: bool = False
    tolerance: float = 1e-5
    max_tries: int = 20

    def __post_init__(self) -> None:
        if self.stencil not in STENCIL_ORDERS:
            allowed = ", ".join(map(str, STENCIL_ORDERS))
            raise ValueError(f"Unsupported stencil order {self.stencil}. Allowed: {allowed}")
        if self.dim < 2:
            raise ValueError(f"Chart dimension must be >= 2, got {self.dim}")
        if self.points < 2 * self.stencil + 1:
            raise OracleError(
                f"Stencil of order {self.stencil} needs at least {2 * self.stencil + 1} points "
                f"per axis, got {self.points}"
            )

    @classmethod
    def from_dict(cls, row: dict[str, Any]) -> ChartSpec:
        known = {k: row[k] for k in cls.__dataclass_fields__ if k in row}
        return cls(**known)


@dataclass(slots=True)
class TrigField:
    """Σ_m (A_m cos(k_m·x) + B_m sin(k_m·x)) покомпонентно з точними похідними."""

    modes: np.ndarray  # (M, d) цілі хвильові вектори
    cos: np.ndarray  # (M, *components)
    sin: np.ndarray  # (M, *components)

    @property
    def components(self) -> tuple[int, ...]:
        return tuple(self.cos.shape[1:])

    def _combine(self, weights: np.ndarray, basis: np.ndarray) -> np.ndarray:
        flat = weights.reshape(weights.shape[0], -1)
        out = np.tensordot(flat, basis, axes=(0, 0))
        return out.reshape(*self.components, *basis.shape[1:])

    def _phases(self, x: np.ndarray) -> np.ndarray:
        return np.tensordot(self.modes.astype(float), x, axes=(1, 0))

    def value(self, x: np.ndarray) -> np.ndarray:
        ph = self._phases(x)
        return self._combine(self.cos, np.cos(ph)) + self._combine(self.sin, np.sin(ph))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """∂_c компонент; вісь похідної перша."""
        ph = self._phases(x)
        out = []
        for c in range(self.modes.shape[1]):
            k = self.modes[:, c].reshape(-1, *([1] * len(self.components)))
            out.append(
                self._combine(-k * self.cos, np.sin(ph)) + self._combine(k * self.sin, np.cos(ph))
            )
        return np.stack(out)

    def hessian(self, x: np.ndarray) -> np.ndarray:
        """∂_c ∂_e компонент; осі похідних перші."""
        ph = self._phases(x)
        d = self.modes.shape[1]
        shape = (-1, *([1] * len(self.components)))
        out = np.empty((d, d, *self.components, *x.shape[1:]))
        for c, e in itertools.product(range(d), repeat=2):
            kk = (self.modes[:, c] * self.modes[:, e]).reshape(shape)
            out[c, e] = -self._combine(kk * self.cos, np.cos(ph)) - self._combine(
                kk * self.sin, np.sin(ph)
            )
        return out


@dataclass(slots=True)
class Chart:
    """Поля на регулярній періодичній сітці; осі сітки йдуть останніми."""

    dim: int
    points: int
    metric: np.ndarray
    momentum: np.ndarray
    smearings: dict[str, np.ndarray] = field(default_factory=dict)
    constants: dict[str, float] = field(default_factory=dict)
    formal: dict[str, np.ndarray] = field(default_factory=dict)
    stencil: int = 4
    point: tuple[int, ...] = ()
    metric_jet: tuple[np.ndarray, np.ndarray] | None = None
    tolerance: float = 1e-5

    @property
    def spacing(self) -> float:
        return BOX_LENGTH / self.points

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def discrete(self) -> Chart:
        """Та сама карта без точних похідних метрики (лише скінченні різниці)."""
        return replace(self, metric_jet=None)

    def with_metric(self, metric: np.ndarray) -> Chart:
        return replace(self, metric=metric, metric_jet=None)

    def with_momentum(self, momentum: np.ndarray) -> Chart:
        return replace(self, momentum=momentum)

    def bind(self, name: str, values: np.ndarray) -> Chart:
        """Прив'язує формальну варіацію (dg, dpi) або розмазування."""
        if name in ("dg", "dpi"):
            return replace(self, formal={**self.formal, name: values})
        return replace(self, smearings={**self.smearings, name: values})


def coordinates(dim: int, points: int) -> np.ndarray:
    axis = np.arange(points) * (BOX_LENGTH / points)
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"))


def wavevectors(dim: int, kmax: int) -> np.ndarray:
    """Хвильові вектори з компонентами в [−kmax, kmax], по одному з пари ±k."""
    out = []
    for k in itertools.product(range(-kmax, kmax + 1), repeat=dim):
        if any(k) and k > tuple(-x for x in k):
            out.append(k)
    return np.array(out, dtype=int)


def random_field(
    rng: np.random.Generator, modes: np.ndarray, components: tuple[int, ...], scale: float
) -> TrigField:
    shape = (len(modes), *components)
    a = rng.uniform(-scale, scale, shape)
    b = rng.uniform(-scale, scale, shape)
    if len(components) == 2:
        a = 0.5 * (a + np.swapaxes(a, 1, 2))
        b = 0.5 * (b + np.swapaxes(b, 1, 2))
    return TrigField(modes, a, b)


def is_positive_definite(metric: np.ndarray) -> bool:
    d = metric.shape[0]
    stacked = np.moveaxis(metric, (0, 1), (-2, -1)).reshape(-1, d, d)
    return bool(np.linalg.eigvalsh(stacked).min() > 0)


def modified_wavenumbers(points: int, stencil: int) -> np.ndarray:
    """Власні значення оператора різниці (діленого на i) для кожного k сітки."""
    h = BOX_LENGTH / points
    k = np.fft.fftfreq(points, d=1.0 / points)
    return sum(2 * w * np.sin(s * k * h) for s, w in STENCILS[stencil]) / h


def transverse_projection(momentum: np.ndarray, stencil: int) -> np.ndarray:
    """Проєкція π^{ab} → P π P у просторі Фур'є з модифікованими хвильовими числами.

    Дискретна дивергенція результату обнуляється з точністю до округлення.
    """
    d = momentum.shape[0]
    points = momentum.shape[-1]
    kt = modified_wavenumbers(points, stencil)
    grids = np.meshgrid(*([kt] * d), indexing="ij")
    kvec = np.stack(grids)
    k2 = np.sum(kvec**2, axis=0)
    safe = np.where(k2 > 0, k2, 1.0)
    proj = np.eye(d).reshape(d, d, *([1] * d)) - np.where(
        k2 > 0, np.einsum("a...,b...->ab...", kvec, kvec) / safe, 0.0
    )
    axes = tuple(range(2, 2 + d))
    hat = np.fft.fftn(momentum, axes=axes)
    hat = np.einsum("ac...,cd...,db...->ab...", proj, hat, proj)
    return np.real(np.fft.ifftn(hat, axes=axes))


# ═══════════════════════════════════════════════════════════════════
#  Public API
# ═══════════════════════════════════════════════════════════════════


def make_chart(spec: ChartSpec) -> Chart:
    """Будує карту за специфікацією (детерміновано для заданого seed).

    Raises:
        OracleError: метрика не стала додатно визначеною за ``max_tries`` спроб
            або поперечна проєкція запитана на неплоскій карті.
    """
    if spec.transverse and spec.amplitude != 0:
        raise OracleError("Transverse momentum projection is only available on flat charts")
    rng = init_seed(spec.seed)
    x = coordinates(spec.dim, spec.points)
    modes = wavevectors(spec.dim, spec.max_wavenumber)
    eye = np.eye(spec.dim).reshape(spec.dim, spec.dim, *([1] * spec.dim))
    for attempt in range(1, spec.max_tries + 1):
        model = random_field(rng, modes, (spec.dim, spec.dim), spec.amplitude)
        metric = eye + model.value(x)
        if is_positive_definite(metric):
            break
        log.debug("Chart attempt %d rejected: metric not positive definite", attempt)
    else:
        raise OracleError(f"No positive-definite metric after {spec.max_tries} attempts")
    jet = (model.gradient(x), model.hessian(x))
    momentum = random_field(rng, modes, (spec.dim, spec.dim), 1.0).value(x)
    if spec.transverse:
        momentum = transverse_projection(momentum, spec.stencil)
    smearings: dict[str, np.ndarray] = {}
    for name in SCALAR_SMEARINGS:
        smearings[name] = 1.0 + random_field(rng, modes, (), 0.5).value(x)
    for name in VECTOR_SMEARINGS:
        smearings[name] = random_field(rng, modes, (spec.dim,), 0.5).value(x)
    smearings["w"] = random_field(rng, modes, (spec.dim, spec.dim), 0.5).value(x)
    constants = {name: float(rng.uniform(0.5, 1.5)) for name in CONSTANTS}
    point = tuple(int(rng.integers(0, spec.points)) for _ in range(spec.dim))
    log.info(
        "Chart d=%d, %d^%d points, stencil %d, seed %d",
        spec.dim,
        spec.points,
        spec.dim,
        spec.stencil,
        spec.seed,
    )
    return Chart(
        dim=spec.dim,
        points=spec.points,
        metric=metric,
        momentum=momentum,
        smearings=smearings,
        constants=constants,
        stencil=spec.stencil,
        point=point,
        metric_jet=jet,
        tolerance=spec.tolerance,
    )


def make_bump(
    chart: Chart,
    rng: np.random.Generator,
    *,
    radius: float = 1.5,
    symmetric_pair: bool = True,
) -> np.ndarray:
    """Гладке збурення з компактним носієм навколо точки оцінки."""
    x = coordinates(chart.dim, chart.points)
    center = np.array(chart.point, dtype=float) * chart.spacing
    delta = (x - center.reshape(-1, *([1] * chart.dim)) + np.pi) % BOX_LENGTH - np.pi
    r2 = np.sum(delta**2, axis=0) / radius**2
    profile = np.where(r2 < 1, np.exp(-1.0 / np.where(r2 < 1, 1 - r2, 1.0)), 0.0)
    if not symmetric_pair:
        return profile
    amp = rng.uniform(-1, 1, (chart.dim, chart.dim))
    amp = 0.5 * (amp + amp.T)
    return amp.reshape(chart.dim, chart.dim, *([1] * chart.dim)) * profile


def load_chart_spec(path: str | Path) -> ChartSpec:
    return ChartSpec.from_dict(load_json(path))
