"""Bound tables combining the schedule thresholds, exact level sums and Monte Carlo."""

import csv
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from src.core.rationals import format_rational
from src.mltest.bounds import (
    LevelFailureBound,
    format_power_of_two,
    level_failure_bound,
    union_bound_log2,
    summability_check,
)
from src.mltest.monte_carlo import mc_failure_estimate, mc_row
from src.schedule.convergence import ConvergenceReport, convergence_report
from src.schedule.level_schedule import LevelSchedule
from src.trees.finite_tree import FiniteTree
from src.trees.pruning import find_density_level

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "n",
    "ell_n",
    "m_n",
    "q_n",
    "sum_exact",
    "paper_bound",
    "satisfied",
    "mc_estimate",
    "mc_stderr",
    "trials",
    "seed",
)


@dataclass
class BoundsTable:
    schedule: LevelSchedule
    convergence: ConvergenceReport
    rows: List[Dict[str, Any]]
    level_bounds: List[LevelFailureBound]
    density_level: Optional[int]

    @property
    def first_satisfied(self) -> Optional[int]:
        for row in self.rows:
            if row["satisfied"]:
                return row["n"]
        return None

    def summability(self) -> Optional[Dict[str, Any]]:
        if not self.level_bounds:
            return None
        start = self.density_level if self.density_level is not None else self.schedule.n_max
        return summability_check(self.level_bounds, start)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schedule": self.schedule.to_dict(),
            "first_satisfied": self.first_satisfied,
            "convergence": self.convergence.summary(),
            "density_level": self.density_level,
            "summability": self.summability(),
            "rows": self.rows,
        }

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
            writer.writeheader()
            for row in self.rows:
                writer.writerow({key: "" if row[key] is None else row[key] for key in CSV_COLUMNS})
        logger.info(f"Saved bounds table with {len(self.rows)} rows to {path}")


def bounds_table(
    schedule: LevelSchedule,
    tree: Optional[FiniteTree] = None,
    trials: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> BoundsTable:
    """One row per level n < N.

    `satisfied` is the threshold 2^{l_n+1} 2^{-q_n^2 2^{m_n}} < 2^{-n}. Tree
    columns (sum_exact and the Monte Carlo estimate) are filled only for levels
    the tree reaches.

    Args:
        schedule: The level schedule
        tree: Optional tree for the exact sums and sampling
        trials: Monte Carlo trials per level (0 skips sampling)
        seed: 64-bit seed shared by every level's sampler
        workers: Monte Carlo worker processes

    Returns:
        BoundsTable
    """
    report = convergence_report(schedule)
    rows: List[Dict[str, Any]] = []
    level_bounds: List[LevelFailureBound] = []
    for conv in report.rows[:-1]:
        n = conv.n
        row: Dict[str, Any] = {
            "n": n,
            "ell_n": conv.level,
            "m_n": conv.gap,
            "q_n": format_rational(conv.density),
            "satisfied": conv.level_bound,
            "relaxed_bound": conv.relaxed_bound,
            "gap_exceeds_5log": conv.gap_log_bound,
            "sum_exact": None,
            "paper_bound": None,
            "sum_within_bound": None,
        }
        mc = None
        if tree is not None and schedule.levels[n + 1] <= tree.top_level:
            bound = level_failure_bound(tree, schedule, n)
            level_bounds.append(bound)
            summary = bound.to_dict()
            row["sum_exact"] = summary["sum_exact"]
            row["paper_bound"] = summary["paper_bound"]
            row["sum_within_bound"] = bound.satisfied
            if trials > 0:
                mc = mc_failure_estimate(tree, schedule, n, trials, seed, workers=workers)
        else:
            row["paper_bound"] = format_power_of_two(union_bound_log2(schedule, n))
        row.update(mc_row(mc))
        rows.append(row)

    density_level = None
    if tree is not None and tree.top_level == schedule.top_level:
        density_level = find_density_level(tree, schedule)
    table = BoundsTable(schedule, report, rows, level_bounds, density_level)
    logger.info(
        f"Bounds table for {schedule.kind}: {len(rows)} rows, first satisfied row "
        f"{table.first_satisfied}"
    )
    return table

