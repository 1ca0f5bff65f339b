"""Combinatorial number system: colexicographic ranking of k-subsets."""

from math import comb
from typing import FrozenSet, Iterable, Tuple

from src.core.exceptions import InvalidInputError


def rank_subset(elements: Iterable[int]) -> int:
    """Colex rank of a set of distinct non-negative integers: sum of C(c_i, i+1)."""
    ordered = sorted(elements)
    if len(set(ordered)) != len(ordered) or (ordered and ordered[0] < 0):
        raise InvalidInputError(f"Not a set of non-negative integers: {ordered}")
    return sum(comb(c, i + 1) for i, c in enumerate(ordered))


def unrank_subset(rank: int, n: int, k: int) -> Tuple[int, ...]:
    """The k-subset of range(n) with the given colex rank, in increasing order.

    Rank 0 is {0, ..., k-1}.
    """
    if not 0 <= k <= n:
        raise InvalidInputError(f"Subset size {k} is outside 0..{n}")
    if not 0 <= rank < comb(n, k):
        raise InvalidInputError(f"Rank {rank} is outside 0..C({n},{k})-1")
    elements = []
    candidate = n
    for size in range(k, 0, -1):
        candidate -= 1
        while comb(candidate, size) > rank:
            candidate -= 1
        elements.append(candidate)
        rank -= comb(candidate, size)
    return tuple(reversed(elements))


def split_from_rank(tau: str, rank: int, gap: int) -> FrozenSet[str]:
    """The half of tau's 2**gap extensions with the given colex rank.

    Extension tau + w is element int(w, 2) of the ground set.
    """
    chosen = unrank_subset(rank, 1 << gap, 1 << (gap - 1))
    return frozenset(tau + format(index, f"0{gap}b") for index in chosen)


def rank_of_split(tau: str, chosen: Iterable[str], gap: int) -> int:
    """Inverse of split_from_rank."""
    indices = []
    for extension in chosen:
        if len(extension) != len(tau) + gap or not extension.startswith(tau):
            raise InvalidInputError(f"'{extension}' is not a {gap}-bit extension of '{tau}'")
        indices.append(int(extension[len(tau):], 2))
    if len(indices) != 1 << (gap - 1):
        raise InvalidInputError(
            f"A split of '{tau}' needs {1 << (gap - 1)} extensions, got {len(indices)}"
        )
    return rank_subset(indices)
