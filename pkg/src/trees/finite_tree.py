"""Finite prefix-closed binary trees with exact measure accounting."""

import logging
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional

from src.core.exceptions import InvalidInputError
from src.core.rationals import all_strings, check_bits

logger = logging.getLogger(__name__)

# Trees are materialized leaf by leaf, so the top level stays desk-sized.
MAX_TOP_LEVEL = 22


@dataclass(frozen=True)
class FiniteTree:
    """A tree given by its leaf set at `top_level`; interior nodes are the prefixes.

    The empty tree has no leaves and no nodes, not even the root.
    """

    top_level: int
    leaves: FrozenSet[str]

    def __post_init__(self):
        if self.top_level < 0:
            raise InvalidInputError(f"Top level must be non-negative, got {self.top_level}")
        leaves = frozenset(self.leaves)
        for leaf in leaves:
            check_bits(leaf, "leaf")
            if len(leaf) != self.top_level:
                raise InvalidInputError(
                    f"Leaf '{leaf}' has length {len(leaf)}, expected {self.top_level}"
                )
        object.__setattr__(self, "leaves", leaves)
        object.__setattr__(self, "_sorted", tuple(sorted(leaves)))

    @classmethod
    def full(cls, top_level: int) -> "FiniteTree":
        """The tree containing every string up to `top_level`."""
        if top_level > MAX_TOP_LEVEL:
            raise InvalidInputError(
                f"Top level {top_level} exceeds the supported maximum {MAX_TOP_LEVEL}"
            )
        return cls(top_level, frozenset(all_strings(top_level)))

    @classmethod
    def empty(cls, top_level: int) -> "FiniteTree":
        return cls(top_level, frozenset())

    @classmethod
    def from_leaves(cls, top_level: int, leaves: Iterable[str]) -> "FiniteTree":
        return cls(top_level, frozenset(leaves))

    @property
    def is_empty(self) -> bool:
        return not self.leaves

    @property
    def sorted_leaves(self) -> List[str]:
        return list(self._sorted)

    def measure(self) -> Fraction:
        """|leaves| * 2^{-L}."""
        return Fraction(len(self.leaves), 1 << self.top_level)

    def _check_length(self, length: int) -> None:
        if not 0 <= length <= self.top_level:
            raise InvalidInputError(
                f"Length {length} is outside the tree's range 0..{self.top_level}"
            )

    def leaf_count(self, node: str) -> int:
        """Number of leaves extending `node`."""
        self._check_length(len(node))
        # Leaves extending node form one contiguous run in sorted order.
        start = bisect_left(self._sorted, node)
        end = bisect_left(self._sorted, node + "2")
        return end - start

    def contains(self, node: str) -> bool:
        """True iff `node` is a prefix of some leaf."""
        if len(node) > self.top_level:
            return False
        return self.leaf_count(node) > 0

    def nodes_at(self, level: int) -> List[str]:
        """All tree nodes of the given length, lexicographically."""
        self._check_length(level)
        return sorted({leaf[:level] for leaf in self.leaves})

    def counts_at(self, level: int) -> Dict[str, int]:
        """Leaf counts below every node of the given length."""
        self._check_length(level)
        return dict(Counter(leaf[:level] for leaf in self.leaves))

    def extensions(self, node: str, level: int) -> List[str]:
        """Tree nodes of length `level` extending `node`, lexicographically."""
        self._check_length(level)
        if level < len(node):
            raise InvalidInputError(f"Level {level} is shorter than node '{node}'")
        start = bisect_left(self._sorted, node)
        end = bisect_left(self._sorted, node + "2")
        found: List[str] = []
        for leaf in self._sorted[start:end]:
            prefix = leaf[:level]
            if not found or found[-1] != prefix:
                found.append(prefix)
        return found

    def leftmost_extension(self, node: str, level: int) -> Optional[str]:
        found = self.extensions(node, level)
        return found[0] if found else None

    def rightmost_extension(self, node: str, level: int) -> Optional[str]:
        found = self.extensions(node, level)
        return found[-1] if found else None

    def without_nodes(self, nodes: Iterable[str], level: int) -> "FiniteTree":
        """Remove the given nodes of one length together with all their extensions."""
        removed = set(nodes)
        if not removed:
            return self
        return FiniteTree(
            self.top_level,
            frozenset(leaf for leaf in self.leaves if leaf[:level] not in removed),
        )

    def to_text(self) -> str:
        """Tree file format: "L=<top_level>" then one sorted leaf per line."""
        return "\n".join([f"L={self.top_level}"] + list(self._sorted)) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FiniteTree":
        body = text[:-1] if text.endswith("\n") else text
        lines = body.split("\n")
        header = lines[0].strip()
        if not header.startswith("L="):
            raise InvalidInputError(f"Tree file must start with 'L=<top_level>', got '{header}'")
        try:
            top_level = int(header[2:])
        except ValueError:
            raise InvalidInputError(f"Invalid top level in tree header '{header}'")
        leaves = lines[1:]
        if leaves != sorted(set(leaves)):
            raise InvalidInputError("Tree file leaves must be sorted and distinct")
        return cls(top_level, frozenset(leaves))


def conditional_density(tree: FiniteTree, node: str) -> Fraction:
    """mu_sigma = 2^{|sigma|} * (leaves extending sigma) * 2^{-L}; 0 off the tree.

    Args:
        tree: The finite tree
        node: Binary string no longer than the tree's top level

    Returns:
        Exact conditional density of the tree below `node`
    """
    check_bits(node, "node")
    if len(node) > tree.top_level:
        raise InvalidInputError(
            f"Node '{node}' is longer than the tree's top level {tree.top_level}"
        )
    return Fraction(tree.leaf_count(node) << len(node), 1 << tree.top_level)


def read_tree(path: str) -> FiniteTree:
    with open(path, "r", encoding="utf-8") as f:
        tree = FiniteTree.from_text(f.read())
    logger.info(f"Loaded tree with {len(tree.leaves)} leaves at level {tree.top_level} from {path}")
    return tree


def write_tree(tree: FiniteTree, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(tree.to_text())
    logger.info(f"Saved tree with {len(tree.leaves)} leaves to {path}")
