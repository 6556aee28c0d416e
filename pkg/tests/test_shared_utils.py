"""Тести shared-утиліт: логування, конфіги, конвенції, seed, запис, скасування."""

from __future__ import annotations

import json
import logging
from fractions import Fraction

import pytest

from src.contracts.errors import CancelledError, SignatureError
from src.shared.cancel import CancelToken, checkpoint
from src.shared.config_loader import load_json, load_yaml
from src.shared.conventions import (
    DEFAULT_PROFILE,
    conventions_from_dict,
    load_conventions,
    profile_hash,
)
from src.shared.file_utils import atomic_write
from src.shared.logger import setup_logging, stage
from src.shared.seed import init_seed
from tests.conftest import make_conventions


def test_init_seed_is_deterministic():
    rng1 = init_seed(123)
    rng2 = init_seed(123)
    assert list(rng1.integers(0, 1000, 5)) == list(rng2.integers(0, 1000, 5))

    assert list(init_seed(124).integers(0, 1000, 5)) != list(init_seed(123).integers(0, 1000, 5))


def test_setup_logging_rejects_unknown_level():
    with pytest.raises(ValueError, match="Allowed: DEBUG, INFO, WARNING, ERROR"):
        setup_logging("TRACE")


def test_stage_logs_duration(caplog):
    logger = logging.getLogger("tests.stage")
    with caplog.at_level(logging.INFO, logger="tests.stage"), stage(logger, "demo"):
        pass
    assert any("Stage demo done" in r.message for r in caplog.records)


def test_load_json_and_yaml_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_yaml(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ValueError, match="Invalid JSON"):
        load_json(bad)
    empty = tmp_path / "empty.yaml"
    empty.write_text("", encoding="utf-8")
    assert load_yaml(empty) == {}


def test_atomic_write_creates_parents_and_leaves_no_temp(tmp_path):
    target = tmp_path / "nested" / "out.json"
    atomic_write(target, json.dumps({"verdict": "first-class"}))
    assert json.loads(target.read_text(encoding="utf-8")) == {"verdict": "first-class"}
    atomic_write(target, "second\n")
    assert target.read_text(encoding="utf-8") == "second\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.json"]


def test_cancel_token_checkpoint():
    token = CancelToken()
    checkpoint(token, "loop")
    checkpoint(None, "loop")
    token.cancel()
    assert token.cancelled
    with pytest.raises(CancelledError, match="in loop"):
        checkpoint(token, "loop")


class TestConventions:
    def test_default_profile_matches_builtin_defaults(self):
        conv = load_conventions()
        assert conv.dim == 3
        assert conv.dewitt == "half"
        assert conv.potential_sign == -1
        assert conv.momentum_coefficient == -2
        assert conv.profile_hash == profile_hash(DEFAULT_PROFILE)
        assert len(conv.profile_hash) == 12

    def test_hash_changes_with_profile_bytes(self, tmp_path):
        p = tmp_path / "conv.yaml"
        p.write_text("dim: 3\n", encoding="utf-8")
        first = profile_hash(p)
        p.write_text("dim: 4\n", encoding="utf-8")
        assert profile_hash(p) != first
        assert load_conventions(p).dim == 4

    def test_symbolic_dimension(self):
        conv = conventions_from_dict({"dim": "symbolic"})
        assert conv.dim is None
        with pytest.raises(SignatureError):
            conv.dewitt_trace()

    def test_dewitt_trace_coefficient(self):
        assert make_conventions(dim=3).dewitt_trace() == Fraction(1, 2)
        assert make_conventions(dim=4).dewitt_trace() == Fraction(1, 3)
        assert make_conventions(dewitt="literal").dewitt_trace() == Fraction(1, 2)

    def test_invalid_normalization_lists_allowed(self):
        with pytest.raises(ValueError, match="Allowed: half, literal"):
            make_conventions(dewitt="bogus")

    def test_smearing_rank_orders_vectors_above_scalars(self):
        conv = make_conventions()
        assert conv.smearing_rank("xi") > conv.smearing_rank("N")
        assert conv.smearing_rank("unknown") == -1

    def test_profile_symbols_parsed(self):
        conv = conventions_from_dict(
            {"symbols": [{"name": "S", "slots": "_ _", "symmetric": [[0, 1]]}]}
        )
        assert conv.symbols[0].name == "S"
        assert conv.symbols[0].arity == 2
