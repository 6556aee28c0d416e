"""Ініціалізація seed для відтворюваних чисельних перевірок."""

from __future__ import annotations

import logging

import numpy as np

log = logging.getLogger(__name__)


def init_seed(seed: int) -> np.random.Generator:
    """Повертає генератор numpy, засіяний ``seed``.

    Глобальний стан ``random`` не змінюється: оракул бере випадковість
    лише з цього генератора.
    """
    rng = np.random.default_rng(seed)
    log.info("Random seed initialised: %d", seed)
    return rng
