"""The failure horizon n0 of a named partition system on a tree."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.core.exceptions import InvalidInputError
from src.partition.naming import name_to_system
from src.partition.partition_system import PartitionSystem
from src.schedule.level_schedule import LevelSchedule
from src.trees.finite_tree import FiniteTree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelFailure:
    """A node whose class sigma_tau * i has no survivor below it."""

    n: int
    tau: str
    sigma: str
    class_bit: int

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "tau": self.tau, "sigma": self.sigma, "class_bit": self.class_bit}


@dataclass
class HorizonResult:
    n0: Optional[int]
    tree_height: int
    failures: List[LevelFailure] = field(default_factory=list)
    start: Optional[Tuple[str, str]] = None

    @property
    def failing_levels(self) -> List[int]:
        return sorted({failure.n for failure in self.failures})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n0": self.n0,
            "tree_height": self.tree_height,
            "failing_levels": self.failing_levels,
            "failures": [failure.to_dict() for failure in self.failures],
            "start": {"sigma": self.start[0], "tau": self.start[1]} if self.start else None,
        }


def tree_height(tree: FiniteTree, schedule: LevelSchedule) -> int:
    """The index N' with l_{N'} equal to the tree's top level."""
    index = schedule.level_index(tree.top_level)
    if index is None:
        raise InvalidInputError(
            f"Tree top level {tree.top_level} is not a level of {schedule.schedule_id}"
        )
    return index


def level_failures(system: PartitionSystem, tree: FiniteTree, n: int) -> List[LevelFailure]:
    """Every (tau, i) at level l_n with [tau] & tree & D_{sigma_tau * i} empty."""
    schedule = system.schedule
    next_level = schedule.levels[n + 1]
    failures = []
    for tau in tree.nodes_at(schedule.levels[n]):
        sigma = system.class_of(tau)
        extensions = tree.extensions(tau, next_level)
        for bit in (0, 1):
            members = system.members(sigma + str(bit))
            if not any(node in members for node in extensions):
                failures.append(LevelFailure(n, tau, sigma, bit))
    return failures


def start_point(system: PartitionSystem, tree: FiniteTree, n0: int) -> Tuple[str, str]:
    """(sigma0, tau0): the leftmost tree node at l_{n0} and its class."""
    nodes = tree.nodes_at(system.schedule.levels[n0])
    if not nodes:
        raise InvalidInputError("The empty tree has no start point")
    tau0 = nodes[0]
    return system.class_of(tau0), tau0


def horizon_for_system(system: PartitionSystem, tree: FiniteTree) -> HorizonResult:
    """Least n0 with no failure at any level n in [n0, N'), N' the tree's height."""
    height = tree_height(tree, system.schedule)
    if system.height < height:
        raise InvalidInputError(
            f"System height {system.height} is below the tree height {height}"
        )
    failures = []
    for n in range(height):
        failures.extend(level_failures(system, tree, n))

    result = HorizonResult(n0=None, tree_height=height, failures=failures)
    last_failing = max(result.failing_levels, default=-1)
    if height == 0 or last_failing < height - 1:
        result.n0 = last_failing + 1
        if not tree.is_empty:
            result.start = start_point(system, tree, result.n0)
    return result


def find_n0(name_bits: str, tree: FiniteTree, schedule: LevelSchedule) -> HorizonResult:
    """Name a system with `name_bits` and locate its failure horizon on `tree`.

    Args:
        name_bits: Name long enough for the tree's height
        tree: Tree whose top level is a schedule level l_{N'}
        schedule: The level schedule

    Returns:
        HorizonResult; n0 is None when level N'-1 itself fails
    """
    height = tree_height(tree, schedule)
    system = name_to_system(name_bits, schedule, height=height)
    result = horizon_for_system(system, tree)
    logger.info(f"Failure horizon n0={result.n0} over tree height {height}")
    return result
