"""Seeded generation of complement trees: the full tree minus a small open set."""

import logging
from fractions import Fraction

import numpy as np

from src.core.exceptions import InvalidInputError
from src.core.rationals import RationalLike, parse_rational
from src.schedule.level_schedule import LevelSchedule
from src.trees.finite_tree import MAX_TOP_LEVEL, FiniteTree

logger = logging.getLogger(__name__)


def generate_complement_tree(
    schedule: LevelSchedule, budget: RationalLike, seed: int
) -> FiniteTree:
    """Remove a seeded random set of leaves of total measure <= budget.

    Args:
        schedule: Schedule whose top level l_N fixes the tree depth
        budget: Exact dyadic or rational measure budget in [0, 1)
        seed: 64-bit seed; equal seeds give equal trees

    Returns:
        The prefix-closure of the surviving leaves, of measure >= 1 - budget
    """
    budget = parse_rational(budget)
    if budget < 0 or budget >= 1:
        raise InvalidInputError(f"Budget must lie in [0, 1), got {budget}")
    top_level = schedule.top_level
    if top_level > MAX_TOP_LEVEL:
        raise InvalidInputError(
            f"Top level {top_level} exceeds the supported maximum {MAX_TOP_LEVEL}"
        )

    total = 1 << top_level
    removed_count = int(budget * total)  # floor keeps the removed mass <= budget
    rng = np.random.default_rng(seed)
    removed = rng.choice(total, size=removed_count, replace=False) if removed_count else []
    removed_set = {int(index) for index in removed}

    leaves = frozenset(
        format(index, f"0{top_level}b") if top_level else ""
        for index in range(total)
        if index not in removed_set
    )
    tree = FiniteTree(top_level, leaves)
    logger.info(
        f"Generated complement tree at level {top_level}: removed {removed_count} "
        f"of {total} leaves (budget {budget}, seed {seed})"
    )
    return tree


def removal_measure(tree: FiniteTree) -> Fraction:
    """Measure of the leaves missing from the full tree."""
    return 1 - tree.measure()
