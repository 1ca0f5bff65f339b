"""Convergence and threshold analysis of level schedules on a finite horizon."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional

from src.core.certified import compare_with_log2_multiple
from src.core.exceptions import InvalidInputError
from src.core.rationals import format_rational
from src.schedule.level_schedule import LevelSchedule

logger = logging.getLogger(__name__)

GAP_LOG_COEFFICIENT = 5
EXACT_POWER_LIMIT = 1 << 16


def exceeds_log2_multiple(value: Fraction, coeff: int, n: int) -> bool:
    """Decide value > coeff * log2(n) exactly.

    For n == 0 the logarithm is -infinity and the comparison holds.
    """
    if coeff < 0:
        raise InvalidInputError("coeff must be non-negative")
    value = Fraction(value)
    if n == 0:
        return True
    if n == 1 or coeff == 0:
        return value > 0
    if value <= 0:
        return False
    width = n.bit_length()
    # width - 1 <= log2 n < width, with equality on the left for powers of two
    if value >= coeff * width:
        return True
    if value <= coeff * (width - 1):
        return False
    if value.numerator <= EXACT_POWER_LIMIT and coeff * value.denominator <= EXACT_POWER_LIMIT:
        # value = a/b > coeff*log2 n  <=>  2**a > n**(coeff*b)
        return (1 << value.numerator) > n ** (coeff * value.denominator)
    return compare_with_log2_multiple(value, coeff, n)


def density_exponent(schedule: LevelSchedule, n: int) -> Fraction:
    """q_n**2 * 2**m_n, the exponent in the per-node failure bound."""
    q = schedule.densities[n]
    return q * q * (1 << schedule.gap(n))


def level_bound_holds(schedule: LevelSchedule, n: int) -> bool:
    """q_n^2 2^{m_n} > l_n + 1 + n, i.e. 2^{l_n+1} 2^{-q_n^2 2^{m_n}} < 2^{-n}."""
    return density_exponent(schedule, n) > schedule.levels[n] + 1 + n


def relaxed_bound_holds(schedule: LevelSchedule, n: int) -> bool:
    """q_n^2 2^{m_n} > l_n + 1 + 2 log2 n (per-level mass below 1/n^2)."""
    slack = density_exponent(schedule, n) - (schedule.levels[n] + 1)
    return exceeds_log2_multiple(slack, 2, n)


def gap_log_holds(schedule: LevelSchedule, n: int) -> bool:
    """m_n > 5 log2 n."""
    return exceeds_log2_multiple(Fraction(schedule.gap(n)), GAP_LOG_COEFFICIENT, n)


def _holds_from(flags: List[bool]) -> Optional[int]:
    """Least i with flags[j] true for every j >= i; None if the last flag fails."""
    if not flags or not flags[-1]:
        return None
    index = len(flags)
    while index > 0 and flags[index - 1]:
        index -= 1
    return index


@dataclass(frozen=True)
class ConvergenceRow:
    """One level of a convergence report. Conditions are None at n = N."""

    n: int
    level: int
    gap: Optional[int]
    density: Fraction
    gap_sum: Fraction
    density_sum: Fraction
    level_bound: Optional[bool]
    relaxed_bound: Optional[bool]
    gap_log_bound: Optional[bool]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "ell_n": self.level,
            "m_n": self.gap,
            "q_n": format_rational(self.density),
            "sum_2_pow_neg_m": format_rational(self.gap_sum),
            "sum_q": format_rational(self.density_sum),
            "level_bound": self.level_bound,
            "relaxed_bound": self.relaxed_bound,
            "gap_exceeds_5log": self.gap_log_bound,
        }


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-level rows plus the indices from which each condition keeps holding."""

    schedule: LevelSchedule
    rows: List[ConvergenceRow]

    def _flags(self, attr: str) -> List[bool]:
        return [bool(getattr(row, attr)) for row in self.rows[:-1]]

    @property
    def level_bound_first(self) -> Optional[int]:
        for row in self.rows[:-1]:
            if row.level_bound:
                return row.n
        return None

    @property
    def level_bound_holds_from(self) -> Optional[int]:
        return _holds_from(self._flags("level_bound"))

    @property
    def relaxed_bound_holds_from(self) -> Optional[int]:
        return _holds_from(self._flags("relaxed_bound"))

    @property
    def gap_log_holds_from(self) -> Optional[int]:
        return _holds_from(self._flags("gap_log_bound"))

    @property
    def gap_log_holding_levels(self) -> List[int]:
        return [row.n for row in self.rows[:-1] if row.gap_log_bound]

    @property
    def gap_sum(self) -> Fraction:
        return self.rows[-1].gap_sum

    @property
    def density_sum(self) -> Fraction:
        return self.rows[-1].density_sum

    def summary(self) -> Dict[str, Any]:
        return {
            "n_max": self.schedule.n_max,
            "level_bound_first": self.level_bound_first,
            "level_bound_holds_from": self.level_bound_holds_from,
            "relaxed_bound_holds_from": self.relaxed_bound_holds_from,
            "gap_log_holds_from": self.gap_log_holds_from,
            "gap_log_holding_count": len(self.gap_log_holding_levels),
            "sum_2_pow_neg_m": format_rational(self.gap_sum),
            "sum_q": format_rational(self.density_sum),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schedule": self.schedule.to_dict(),
            "summary": self.summary(),
            "rows": [row.to_dict() for row in self.rows],
        }


def convergence_report(schedule: LevelSchedule) -> ConvergenceReport:
    """Evaluate partial sums and threshold conditions for every n <= N.

    Args:
        schedule: The schedule to analyze

    Returns:
        ConvergenceReport with exact partial sums and Boolean conditions
    """
    rows: List[ConvergenceRow] = []
    gap_sum = Fraction(0)
    density_sum = Fraction(0)
    for n in range(schedule.n_max + 1):
        density_sum += schedule.densities[n]
        if n < schedule.n_max:
            gap = schedule.gap(n)
            gap_sum += Fraction(1, 1 << gap)
            row = ConvergenceRow(
                n=n,
                level=schedule.levels[n],
                gap=gap,
                density=schedule.densities[n],
                gap_sum=gap_sum,
                density_sum=density_sum,
                level_bound=level_bound_holds(schedule, n),
                relaxed_bound=relaxed_bound_holds(schedule, n),
                gap_log_bound=gap_log_holds(schedule, n),
            )
        else:
            row = ConvergenceRow(
                n=n,
                level=schedule.levels[n],
                gap=None,
                density=schedule.densities[n],
                gap_sum=gap_sum,
                density_sum=density_sum,
                level_bound=None,
                relaxed_bound=None,
                gap_log_bound=None,
            )
        rows.append(row)

    report = ConvergenceReport(schedule=schedule, rows=rows)
    logger.info(
        f"Convergence report for {schedule.kind}: level bound first holds at "
        f"{report.level_bound_first}, gap-log holds from {report.gap_log_holds_from}"
    )
    return report


def two_extension_summable(schedule: LevelSchedule) -> Dict[str, Any]:
    """Partial sum of 2^{-m_n} and whether every gap leaves room for two extensions."""
    total = sum((Fraction(1, 1 << gap) for gap in schedule.gaps), Fraction(0))
    return {
        "partial_sum": total,
        "bounded": all(Fraction(1, 1 << gap) <= Fraction(1, 2) for gap in schedule.gaps),
    }


def oracle_use_table(schedule: LevelSchedule) -> List[Dict[str, Any]]:
    """Use bounds of the reduction: r output bits read l_r bits of y and u_r of x."""
    return [
        {
            "n": n,
            "payload_bits": schedule.levels[n],
            "name_bits": schedule.naming_length_or_none(n),
        }
        for n in range(schedule.n_max + 1)
    ]
