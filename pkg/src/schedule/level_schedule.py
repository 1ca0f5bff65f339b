"""Level schedules: the sequences l_n, m_n, q_n and u_n governing every level."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.core.exceptions import InvalidInputError
from src.core.rationals import (
    RationalLike,
    ceil_log2,
    format_rational,
    parse_rational,
)

logger = logging.getLogger(__name__)

SCHEDULE_KINDS = ("exponential", "nlogn", "scaled_nlogn", "custom")
DENSITY_KINDS = ("inverse_square", "custom")

DEFAULT_NAMING_SLACK = 2

# Naming lengths are only materialized while one level's naming word stays
# below 2**NAMING_LEVEL_CAP bits, i.e. while l_{n+1} <= NAMING_LEVEL_CAP.
NAMING_LEVEL_CAP = 20

CLAMPED_Q0 = Fraction(1, 2)


def split_count(gap: int) -> int:
    """Ways to split one node's 2**gap extensions into two equal halves."""
    return comb(1 << gap, 1 << (gap - 1))


def level_split_count(level: int, gap: int) -> int:
    """E_n: ways to split every string of length `level` independently."""
    return split_count(gap) ** (1 << level)


@dataclass(frozen=True)
class LevelSchedule:
    """A finite schedule l_0..l_N with densities q_0..q_N.

    Gaps m_n and naming lengths u_n are derived. Naming lengths stop at the
    naming horizon: the largest height whose naming word is still small
    enough to materialize (see NAMING_LEVEL_CAP).
    """

    kind: str
    levels: Tuple[int, ...]
    densities: Tuple[Fraction, ...]
    naming_slack: int = DEFAULT_NAMING_SLACK
    naming_lengths: Tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self):
        levels = tuple(int(v) for v in self.levels)
        densities = tuple(parse_rational(q) for q in self.densities)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "densities", densities)

        if len(levels) < 2:
            raise InvalidInputError("A schedule needs at least two levels (n_max >= 1)")
        if levels[0] != 0:
            raise InvalidInputError(f"l_0 must be 0, got {levels[0]}")
        for n in range(len(levels) - 1):
            if levels[n + 1] <= levels[n]:
                raise InvalidInputError(
                    f"Levels must be strictly increasing: l_{n}={levels[n]}, "
                    f"l_{n + 1}={levels[n + 1]}"
                )
        if len(densities) != len(levels):
            raise InvalidInputError(
                f"Expected {len(levels)} densities, got {len(densities)}"
            )
        for n, q in enumerate(densities):
            if not 0 < q < 1:
                raise InvalidInputError(f"q_{n} = {q} is outside (0, 1)")
        if self.naming_slack < 0:
            raise InvalidInputError("Naming slack must be non-negative")

        object.__setattr__(self, "naming_lengths", self._compute_naming_lengths())

    def _compute_naming_lengths(self) -> Tuple[int, ...]:
        lengths = [0]
        for n, gap in enumerate(self.gaps):
            if self.levels[n + 1] > NAMING_LEVEL_CAP:
                logger.info(
                    f"Naming horizon truncated at height {n}: "
                    f"l_{n + 1}={self.levels[n + 1]} exceeds the naming cap"
                )
                break
            bits = ceil_log2(level_split_count(self.levels[n], gap))
            lengths.append(lengths[-1] + bits + self.naming_slack)
        return tuple(lengths)

    @property
    def n_max(self) -> int:
        """N, the index of the last level."""
        return len(self.levels) - 1

    @property
    def gaps(self) -> Tuple[int, ...]:
        """m_n = l_{n+1} - l_n for n < N."""
        return tuple(
            self.levels[n + 1] - self.levels[n] for n in range(len(self.levels) - 1)
        )

    @property
    def top_level(self) -> int:
        return self.levels[-1]

    @property
    def naming_horizon(self) -> int:
        """Largest height h for which u_h is available."""
        return len(self.naming_lengths) - 1

    @property
    def schedule_id(self) -> str:
        """Canonical identifier used in system file headers."""
        return f"{self.kind}/{','.join(str(v) for v in self.levels)}"

    def gap(self, n: int) -> int:
        if not 0 <= n < self.n_max:
            raise InvalidInputError(f"m_{n} is undefined for N={self.n_max}")
        return self.levels[n + 1] - self.levels[n]

    def level_index(self, length: int) -> Optional[int]:
        """Return n with l_n == length, or None if length is not a level."""
        try:
            return self.levels.index(length)
        except ValueError:
            return None

    def naming_length(self, height: int) -> int:
        if not 0 <= height <= self.naming_horizon:
            raise InvalidInputError(
                f"u_{height} is beyond the naming horizon ({self.naming_horizon})"
            )
        return self.naming_lengths[height]

    def naming_length_or_none(self, height: int) -> Optional[int]:
        if 0 <= height <= self.naming_horizon:
            return self.naming_lengths[height]
        return None

    def levels_within(self, top_level: int) -> int:
        """Largest n with l_n <= top_level."""
        index = 0
        for n, level in enumerate(self.levels):
            if level <= top_level:
                index = n
        return index

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to the schedule JSON object."""
        return {
            "kind": self.kind,
            "levels": list(self.levels),
            "densities": [format_rational(q) for q in self.densities],
            "naming_lengths": list(self.naming_lengths),
            "naming_slack": self.naming_slack,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LevelSchedule":
        try:
            schedule = cls(
                kind=data.get("kind", "custom"),
                levels=tuple(data["levels"]),
                densities=tuple(parse_rational(q) for q in data["densities"]),
                naming_slack=int(data.get("naming_slack", DEFAULT_NAMING_SLACK)),
            )
        except KeyError as e:
            raise InvalidInputError(f"Schedule object is missing field {str(e)}")
        stored = data.get("naming_lengths")
        if stored is not None and tuple(stored) != schedule.naming_lengths:
            raise InvalidInputError(
                "Stored naming lengths do not match the schedule's derived ones"
            )
        return schedule


def _nlogn_levels(n_max: int, scale: int) -> List[int]:
    # l_1 = 1 since ceil(log2 1) = 0 would collapse l_0 and l_1.
    levels = [0, 1]
    for n in range(2, n_max + 1):
        levels.append(scale * n * ceil_log2(n))
    return levels


def make_schedule(
    kind: str,
    n_max: int,
    density_kind: str = "inverse_square",
    scale: Optional[int] = None,
    custom_levels: Optional[Sequence[int]] = None,
    custom_densities: Optional[Sequence[RationalLike]] = None,
    naming_slack: int = DEFAULT_NAMING_SLACK,
) -> LevelSchedule:
    """Build a schedule of the given kind with levels l_0..l_{n_max}.

    Args:
        kind: One of exponential, nlogn, scaled_nlogn, custom
        n_max: Index N of the last level (at least 1)
        density_kind: inverse_square or custom
        scale: Constant c for scaled_nlogn
        custom_levels: Levels for the custom kind
        custom_densities: Densities for the custom density kind
        naming_slack: Extra naming bits per level (c in u_{n+1} - u_n)

    Returns:
        A fully populated LevelSchedule
    """
    if n_max < 1:
        raise InvalidInputError(f"n_max must be at least 1, got {n_max}")

    if kind == "exponential":
        levels = [0] + [1 << n for n in range(1, n_max + 1)]
    elif kind == "nlogn":
        levels = _nlogn_levels(n_max, 1)
    elif kind == "scaled_nlogn":
        if scale is None or scale < 1:
            raise InvalidInputError("scaled_nlogn needs a positive integer scale c")
        levels = _nlogn_levels(n_max, scale)
    elif kind == "custom":
        if custom_levels is None:
            raise InvalidInputError("The custom schedule kind needs a level sequence")
        levels = [int(v) for v in custom_levels]
        if len(levels) != n_max + 1:
            raise InvalidInputError(
                f"Custom levels have {len(levels)} entries, expected n_max+1={n_max + 1}"
            )
    else:
        raise InvalidInputError(
            f"Unknown schedule kind '{kind}' (expected one of {', '.join(SCHEDULE_KINDS)})"
        )

    if density_kind == "inverse_square":
        densities = [CLAMPED_Q0] + [
            Fraction(1, (n + 1) ** 2) for n in range(1, n_max + 1)
        ]
    elif density_kind == "custom":
        if custom_densities is None:
            raise InvalidInputError("The custom density kind needs a density sequence")
        densities = [parse_rational(q) for q in custom_densities]
    else:
        raise InvalidInputError(
            f"Unknown density kind '{density_kind}' (expected one of {', '.join(DENSITY_KINDS)})"
        )

    schedule = LevelSchedule(
        kind=kind if kind != "scaled_nlogn" else f"scaled_nlogn({scale})",
        levels=tuple(levels),
        densities=tuple(densities),
        naming_slack=naming_slack,
    )
    logger.info(
        f"Built {schedule.kind} schedule with N={schedule.n_max}, "
        f"top level {schedule.top_level}, naming horizon {schedule.naming_horizon}"
    )
    return schedule
