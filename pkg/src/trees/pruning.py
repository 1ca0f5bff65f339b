"""Density pruning, the two-extension check and the density horizon."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from src.core.exceptions import InvalidInputError
from src.schedule.level_schedule import LevelSchedule
from src.trees.finite_tree import FiniteTree

logger = logging.getLogger(__name__)


def _check_compatible(tree: FiniteTree, schedule: LevelSchedule) -> None:
    if tree.top_level != schedule.top_level:
        raise InvalidInputError(
            f"Tree top level {tree.top_level} differs from schedule top level "
            f"l_N={schedule.top_level}"
        )


def _dense_enough(count: int, level: int, top_level: int, threshold: Fraction) -> bool:
    # count * 2^level / 2^top_level > p/q, cross-multiplied
    return count * threshold.denominator << level > threshold.numerator << top_level


def prune_to_density(tree: FiniteTree, schedule: LevelSchedule) -> FiniteTree:
    """Remove every node at a level l_n with density <= q_n, until stable.

    Args:
        tree: Tree whose top level equals l_N
        schedule: Schedule supplying the levels and thresholds

    Returns:
        The pruned tree (possibly empty); every surviving level-l_n node has
        conditional density > q_n
    """
    _check_compatible(tree, schedule)
    current = tree
    passes = 0
    while True:
        passes += 1
        changed = False
        # Deepest level first: removals only lower the densities of ancestors.
        for n in reversed(range(schedule.n_max + 1)):
            level = schedule.levels[n]
            threshold = schedule.densities[n]
            sparse = [
                node
                for node, count in current.counts_at(level).items()
                if not _dense_enough(count, level, current.top_level, threshold)
            ]
            if sparse:
                current = current.without_nodes(sparse, level)
                changed = True
        if not changed:
            break

    logger.info(
        f"Pruned tree from {len(tree.leaves)} to {len(current.leaves)} leaves "
        f"in {passes} passes"
    )
    return current


@dataclass(frozen=True)
class TwoExtensionResult:
    """Outcome of the two-extension check with the first offending node, if any."""

    holds: bool
    witness: Optional[str] = None
    level_index: Optional[int] = None
    extension_count: Optional[int] = None

    def __bool__(self) -> bool:
        return self.holds


def check_two_extension(
    tree: FiniteTree, schedule: LevelSchedule, depth: Optional[int] = None
) -> TwoExtensionResult:
    """Check that each node at l_n has at least two extensions at l_{n+1}.

    Args:
        tree: The tree to check
        schedule: Schedule supplying the levels
        depth: Check levels n < depth only (default: all levels within the tree)

    Returns:
        TwoExtensionResult; on failure the witness is the first node found,
        scanning levels upward and nodes lexicographically
    """
    limit = schedule.levels_within(tree.top_level)
    if depth is not None:
        if depth > limit:
            raise InvalidInputError(
                f"Depth {depth} needs level l_{depth} beyond the tree's top level"
            )
        limit = depth
    for n in range(limit):
        level = schedule.levels[n]
        next_level = schedule.levels[n + 1]
        for node in tree.nodes_at(level):
            extensions = tree.extensions(node, next_level)
            if len(extensions) < 2:
                return TwoExtensionResult(False, node, n, len(extensions))
    return TwoExtensionResult(True)


def find_density_level(tree: FiniteTree, schedule: LevelSchedule) -> Optional[int]:
    """Least k0 such that every node at every level l_n, n in [k0, N], has density > q_n.

    Returns None when level N itself fails, and 0 for the empty tree.
    """
    _check_compatible(tree, schedule)
    for n in reversed(range(schedule.n_max + 1)):
        level = schedule.levels[n]
        threshold = schedule.densities[n]
        for count in tree.counts_at(level).values():
            if not _dense_enough(count, level, tree.top_level, threshold):
                return n + 1 if n < schedule.n_max else None
    return 0
