"""Exactly uniform sampling of partition systems from a seeded generator."""

import logging
from typing import Dict, FrozenSet, Iterable

import numpy as np

from src.core.exceptions import InvalidInputError
from src.core.rationals import all_strings
from src.partition.combinadics import split_from_rank
from src.partition.partition_system import PartitionSystem, system_from_splits
from src.schedule.level_schedule import LevelSchedule, split_count

logger = logging.getLogger(__name__)

_INT64_LIMIT = 1 << 63


def uniform_below(rng: np.random.Generator, bound: int) -> int:
    """A uniform integer in [0, bound), exact for arbitrarily large bounds."""
    if bound < 1:
        raise InvalidInputError(f"Bound must be positive, got {bound}")
    if bound < _INT64_LIMIT:
        return int(rng.integers(0, bound))
    # Rejection over the smallest power of two covering the bound.
    bits = (bound - 1).bit_length()
    mask = (1 << bits) - 1
    while True:
        candidate = int.from_bytes(rng.bytes((bits + 7) // 8), "big") & mask
        if candidate < bound:
            return candidate


def sample_splits(
    rng: np.random.Generator, taus: Iterable[str], gap: int
) -> Dict[str, FrozenSet[str]]:
    """One independent uniform equal split per tau, drawn in the given order."""
    choices = split_count(gap)
    return {tau: split_from_rank(tau, uniform_below(rng, choices), gap) for tau in taus}


def sample_uniform(schedule: LevelSchedule, height: int, seed: int) -> PartitionSystem:
    """Draw a height-h system uniformly from B_h.

    Args:
        schedule: The level schedule
        height: Height h <= N
        seed: 64-bit seed; equal seeds give equal systems

    Returns:
        A valid partition system, each node's split uniform and independent
    """
    if not 0 <= height <= schedule.n_max:
        raise InvalidInputError(f"Height {height} is outside 0..N={schedule.n_max}")
    rng = np.random.default_rng(seed)
    level_splits = [
        sample_splits(rng, all_strings(schedule.levels[n]), schedule.gap(n))
        for n in range(height)
    ]
    system = system_from_splits(schedule, level_splits)
    logger.debug(f"Sampled height-{height} system on {schedule.schedule_id} (seed {seed})")
    return system
