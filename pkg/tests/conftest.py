"""Фікстури для тестів."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import pytest

from src.bracket.library import ConstraintLibrary, load_library
from src.contracts.enums import ConstraintKind
from src.contracts.functional import ConstraintSpec, SmearedFunctional
from src.contracts.tensor import Factor
from src.normalizer.parser import parse
from src.oracle.chart import Chart, ChartSpec, make_chart
from src.shared.conventions import DEFAULT_SMEARING_ORDER, Conventions

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"

_COMPONENT_MARKERS_BY_FILE: dict[str, tuple[str, ...]] = {
    "test_algebra.py": ("component_algebra",),
    "test_analyzer.py": ("component_analyzer", "component_bracket"),
    "test_bracket.py": ("component_bracket", "component_variation"),
    "test_calculus.py": ("component_calculus", "component_algebra"),
    "test_cli_and_reporter.py": ("component_analyzer", "component_normalizer"),
    "test_closure.py": ("component_analyzer", "component_bracket"),
    "test_contracts.py": ("component_contracts",),
    "test_oracle.py": ("component_oracle", "component_variation"),
    "test_parser.py": ("component_contracts", "component_normalizer"),
    "test_properties.py": ("component_algebra", "component_calculus"),
    "test_shared_utils.py": ("component_shared",),
    "test_variation.py": ("component_variation", "component_calculus"),
}

_TYPE_MARKERS_BY_FILE: dict[str, tuple[str, ...]] = {
    "test_algebra.py": ("type_unit", "type_identity"),
    "test_analyzer.py": ("type_unit",),
    "test_bracket.py": ("type_unit", "type_identity"),
    "test_calculus.py": ("type_unit", "type_identity"),
    "test_cli_and_reporter.py": ("type_cli", "type_unit"),
    "test_closure.py": ("type_integration",),
    "test_contracts.py": ("type_contract", "type_unit"),
    "test_oracle.py": ("type_integration",),
    "test_parser.py": ("type_unit",),
    "test_properties.py": ("type_property",),
    "test_shared_utils.py": ("type_unit",),
    "test_variation.py": ("type_unit", "type_identity"),
}

_SPECIAL_MARKERS_BY_FILE: dict[str, tuple[str, ...]] = {
    "test_closure.py": ("slow",),
}

_PRIORITY_MARKERS = {"priority_p0", "priority_p1", "priority_p2", "priority_p3"}


def _item_file_name(item: pytest.Item) -> str:
    path = getattr(item, "path", None)
    if path is not None:
        return path.name
    return Path(str(item.fspath)).name


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    del config
    for item in items:
        file_name = _item_file_name(item)

        for marker in _COMPONENT_MARKERS_BY_FILE.get(file_name, ()):
            item.add_marker(marker)
        for marker in _TYPE_MARKERS_BY_FILE.get(file_name, ()):
            item.add_marker(marker)
        for marker in _SPECIAL_MARKERS_BY_FILE.get(file_name, ()):
            item.add_marker(marker)

        marker_names = {mark.name for mark in item.iter_markers()}
        if marker_names.intersection(_PRIORITY_MARKERS):
            continue

        if "slow" in marker_names:
            item.add_marker("priority_p3")
            continue
        if marker_names.intersection({"type_identity", "type_integration", "type_contract"}):
            item.add_marker("priority_p1")
            continue

        item.add_marker("priority_p2")


def make_conventions(
    *,
    dim: int | None = 3,
    dewitt: str = "half",
    potential_sign: int = -1,
    momentum_coefficient: int = -2,
    smearing_order: tuple[str, ...] = DEFAULT_SMEARING_ORDER,
    max_terms: int = 200_000,
    max_passes: int = 50,
    profile_hash: str = "test",
) -> Conventions:
    return Conventions(
        dim=dim,
        dewitt=dewitt,
        potential_sign=potential_sign,
        momentum_coefficient=momentum_coefficient,
        smearing_order=smearing_order,
        max_terms=max_terms,
        max_passes=max_passes,
        profile_hash=profile_hash,
    )


def make_kinetic_spec(
    *,
    b: str = "C*g[_a _b]*g[_c _d]*isqrtg",
    n: int = 0,
    m: int = 0,
    name: str = "kinetic",
) -> ConstraintSpec:
    return ConstraintSpec(ConstraintKind.KINETIC_MOD, {"B": b, "n": n, "m": m}, name)


def make_density_spec(*, density: str, name: str = "density") -> ConstraintSpec:
    return ConstraintSpec(ConstraintKind.DENSITY, {"density": density}, name)


def make_functional(
    *,
    density: str,
    smearing: str | None = "f",
    label: str = "F",
) -> SmearedFunctional:
    factor = Factor(smearing) if smearing is not None else None
    return SmearedFunctional(parse(density), factor, label)


def make_chart_spec(
    *,
    dim: int = 3,
    points: int = 16,
    seed: int = 7,
    amplitude: float = 0.05,
    max_wavenumber: int = 1,
    stencil: int = 4,
    transverse: bool = False,
    tolerance: float = 1e-5,
) -> ChartSpec:
    return ChartSpec(
        dim=dim,
        points=points,
        seed=seed,
        amplitude=amplitude,
        max_wavenumber=max_wavenumber,
        stencil=stencil,
        transverse=transverse,
        tolerance=tolerance,
    )


def write_json_file(path: Path, payload: Any) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def conv() -> Conventions:
    return make_conventions()


@pytest.fixture(scope="session")
def library() -> ConstraintLibrary:
    return load_library()


@pytest.fixture(scope="session")
def chart() -> Chart:
    return make_chart(make_chart_spec())


@pytest.fixture(scope="session")
def flat_chart() -> Chart:
    return make_chart(make_chart_spec(amplitude=0.0))
