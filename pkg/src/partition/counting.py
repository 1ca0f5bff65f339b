"""Exact cardinalities |B_h| and exhaustive enumeration of small system families."""

import logging
from itertools import combinations, product
from math import prod
from typing import Iterator, List

from src.core.exceptions import InvalidInputError
from src.core.rationals import all_strings
from src.partition.partition_system import PartitionSystem, trivial_system
from src.schedule.level_schedule import LevelSchedule, split_count

logger = logging.getLogger(__name__)

DEFAULT_MAX_COUNT_DIGITS = 100000

# Exhaustive enumeration is only offered for families up to this size.
MAX_ENUMERATION = 1 << 20

# log10(2) as a rational, for digit estimates from bit counts
_LOG10_2_NUM, _LOG10_2_DEN = 30103, 100000


def _check_height(schedule: LevelSchedule, height: int) -> None:
    if not 0 <= height <= schedule.n_max:
        raise InvalidInputError(f"Height {height} is outside 0..N={schedule.n_max}")


def estimated_count_bits(schedule: LevelSchedule, height: int) -> int:
    """Upper estimate of log2 |B_h| without forming the count.

    C(2^m, 2^{m-1}) < 2^{2^m}, so each level contributes at most 2^{l_{n+1}} bits;
    small gaps use the exact bit length of the binomial.
    """
    _check_height(schedule, height)
    bits = 0
    for n in range(height):
        gap = schedule.gap(n)
        per_node = split_count(gap).bit_length() if gap <= 16 else 1 << gap
        bits += per_node << schedule.levels[n]
    return bits


def count_systems(
    schedule: LevelSchedule,
    height: int,
    max_digits: int = DEFAULT_MAX_COUNT_DIGITS,
) -> int:
    """|B_h| = prod_{n<h} C(2^{m_n}, 2^{m_n - 1})^{2^{l_n}}.

    Args:
        schedule: The level schedule
        height: Height h <= N
        max_digits: Refuse counts estimated to exceed this many decimal digits

    Returns:
        The exact number of height-h l-partition systems
    """
    _check_height(schedule, height)
    estimated_digits = estimated_count_bits(schedule, height) * _LOG10_2_NUM // _LOG10_2_DEN
    if estimated_digits > max_digits:
        raise InvalidInputError(
            f"|B_{height}| has about {estimated_digits} decimal digits, "
            f"over the configured bound of {max_digits}"
        )
    count = prod(
        split_count(schedule.gap(n)) ** (1 << schedule.levels[n]) for n in range(height)
    )
    logger.debug(f"|B_{height}| on {schedule.schedule_id} = {count}")
    return count


def _level_choices(tau: str, gap: int) -> List[frozenset]:
    extensions = [tau + word for word in all_strings(gap)]
    return [frozenset(chosen) for chosen in combinations(extensions, 1 << (gap - 1))]


def enumerate_systems(schedule: LevelSchedule, height: int) -> Iterator[PartitionSystem]:
    """Yield every height-h system, one per combination of per-node splits.

    Only offered for families of at most MAX_ENUMERATION systems.
    """
    total = count_systems(schedule, height)
    if total > MAX_ENUMERATION:
        raise InvalidInputError(
            f"Refusing to enumerate {total} systems (limit {MAX_ENUMERATION})"
        )

    def extend_all(system: PartitionSystem) -> Iterator[PartitionSystem]:
        if system.height == height:
            yield system
            return
        n = system.height
        taus = list(all_strings(schedule.levels[n]))
        per_tau = [_level_choices(tau, schedule.gap(n)) for tau in taus]
        for choice in product(*per_tau):
            yield from extend_all(system.extend(dict(zip(taus, choice))))

    yield from extend_all(trivial_system(schedule))
