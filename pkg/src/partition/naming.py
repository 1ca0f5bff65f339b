"""The naming f: finite bit strings name partition systems by mixed-radix unranking."""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from src.core.exceptions import InvalidInputError
from src.core.rationals import all_strings, check_bits, format_rational
from src.partition.combinadics import split_from_rank
from src.partition.partition_system import PartitionSystem, system_from_splits
from src.schedule.level_schedule import LevelSchedule, level_split_count, split_count

logger = logging.getLogger(__name__)

# Exhaustive distortion measurement walks all 2^{u_h} names.
MAX_EXHAUSTIVE_NAME_BITS = 20

# Below this many digits plain repeated divmod is faster than splitting.
_SPLIT_THRESHOLD = 64


def _mixed_radix_digits(value: int, radix: int, count: int) -> List[int]:
    """`count` base-`radix` digits of value, least significant first."""
    if count <= _SPLIT_THRESHOLD:
        digits = []
        for _ in range(count):
            value, digit = divmod(value, radix)
            digits.append(digit)
        return digits
    low_count = count // 2
    high, low = divmod(value, radix ** low_count)
    return _mixed_radix_digits(low, radix, low_count) + _mixed_radix_digits(
        high, radix, count - low_count
    )


def name_height(bits: str, schedule: LevelSchedule) -> int:
    """Largest h <= min(N, naming horizon) with u_h <= |bits|."""
    check_bits(bits, "name")
    if schedule.naming_horizon < 1:
        raise InvalidInputError(
            f"Schedule {schedule.schedule_id} names no system above height 0"
        )
    if len(bits) < schedule.naming_lengths[1]:
        raise InvalidInputError(
            f"Name has {len(bits)} bits, fewer than u_1={schedule.naming_lengths[1]}"
        )
    top = min(schedule.n_max, schedule.naming_horizon)
    return max(h for h in range(top + 1) if schedule.naming_lengths[h] <= len(bits))


def name_to_ranks(
    bits: str, schedule: LevelSchedule, height: Optional[int] = None
) -> List[Tuple[int, ...]]:
    """Per-level split ranks named by `bits`, one rank per tau in lex order.

    Level n reads bits[u_n:u_{n+1}] as an integer (most significant bit first),
    reduces it modulo E_n and splits the residue into base-C(2^{m_n}, 2^{m_n-1})
    digits, the first tau taking the least significant digit.
    """
    available = name_height(bits, schedule)
    if height is None:
        height = available
    elif not 0 <= height <= available:
        raise InvalidInputError(
            f"Name of {len(bits)} bits reaches height {available}, not {height}"
        )
    ranks = []
    lengths = schedule.naming_lengths
    for n in range(height):
        segment = bits[lengths[n]:lengths[n + 1]]
        gap = schedule.gap(n)
        value = int(segment, 2) % level_split_count(schedule.levels[n], gap)
        ranks.append(tuple(_mixed_radix_digits(value, split_count(gap), 1 << schedule.levels[n])))
    return ranks


def name_to_system(
    bits: str, schedule: LevelSchedule, height: Optional[int] = None
) -> PartitionSystem:
    """f(bits): the system named by a finite string.

    Args:
        bits: Name bits; at least u_1 of them
        schedule: Schedule supplying l_n, m_n and u_n
        height: Requested height (default: the largest h with u_h <= |bits|)

    Returns:
        A valid height-h partition system; extending `bits` to u_{h+1} bits
        yields an extension of it
    """
    level_splits = []
    for n, ranks in enumerate(name_to_ranks(bits, schedule, height)):
        gap = schedule.gap(n)
        taus = all_strings(schedule.levels[n])
        level_splits.append(
            {tau: split_from_rank(tau, rank, gap) for tau, rank in zip(taus, ranks)}
        )
    return system_from_splits(schedule, level_splits)


@dataclass(frozen=True)
class NamingDistortion:
    """How unevenly the length-u_h names cover B_h."""

    height: int
    min_names: int
    max_names: int
    bound: Optional[Fraction]
    method: str

    @property
    def ratio(self) -> Optional[Fraction]:
        if self.min_names == 0:
            return None
        return Fraction(self.max_names, self.min_names)

    @property
    def within_bound(self) -> Optional[bool]:
        if self.bound is None or self.ratio is None:
            return None
        return self.ratio <= self.bound

    def to_dict(self) -> Dict[str, Any]:
        return {
            "height": self.height,
            "min_names": self.min_names,
            "max_names": self.max_names,
            "ratio": format_rational(self.ratio) if self.ratio is not None else None,
            "bound": format_rational(self.bound) if self.bound is not None else None,
            "within_bound": self.within_bound,
            "method": self.method,
        }


def distortion_bound(slack: int, height: int) -> Optional[Fraction]:
    """((1 + 2^{-c}) / (1 - 2^{-c}))^h; undefined for c = 0."""
    if slack == 0:
        return None
    step = 1 << slack
    return Fraction(step + 1, step - 1) ** height


def naming_distortion(
    schedule: LevelSchedule, height: int, exhaustive: Optional[bool] = None
) -> NamingDistortion:
    """Least and greatest number of length-u_h names per height-h system.

    Args:
        schedule: Schedule supplying the naming lengths
        height: Height h within the naming horizon
        exhaustive: Walk all 2^{u_h} names (default: only when u_h is small);
            otherwise the per-level floor/ceiling counts are multiplied

    Returns:
        NamingDistortion with the exact extremes and the slack bound
    """
    if not 0 <= height <= min(schedule.n_max, schedule.naming_horizon):
        raise InvalidInputError(f"Height {height} is beyond the naming horizon")
    lengths = schedule.naming_lengths
    if exhaustive is None:
        exhaustive = lengths[height] <= MAX_EXHAUSTIVE_NAME_BITS
    bound = distortion_bound(schedule.naming_slack, height)

    if height == 0:
        return NamingDistortion(0, 1, 1, bound, "trivial")

    if exhaustive:
        if lengths[height] > MAX_EXHAUSTIVE_NAME_BITS:
            raise InvalidInputError(
                f"u_{height}={lengths[height]} bits is too long to walk exhaustively"
            )
        hits = Counter(
            tuple(name_to_ranks(name, schedule, height))
            for name in all_strings(lengths[height])
        )
        systems = 1
        for n in range(height):
            systems *= level_split_count(schedule.levels[n], schedule.gap(n))
        low = min(hits.values()) if len(hits) == systems else 0
        result = NamingDistortion(height, low, max(hits.values()), bound, "exhaustive")
    else:
        low = high = 1
        for n in range(height):
            words = 1 << (lengths[n + 1] - lengths[n])
            residues = level_split_count(schedule.levels[n], schedule.gap(n))
            low *= words // residues
            high *= -(-words // residues)
        result = NamingDistortion(height, low, high, bound, "per-level")

    logger.info(
        f"Naming distortion at height {height}: {result.min_names}..{result.max_names} "
        f"names per system ({result.method})"
    )
    return result
