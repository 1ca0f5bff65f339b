"""Tests for bounds tables."""

import csv
import os

from src.mltest.tables import CSV_COLUMNS, bounds_table
from src.schedule.level_schedule import make_schedule
from src.trees.finite_tree import FiniteTree


class TestBoundsTable:
    """Test class for bounds_table."""

    def test_exponential_first_satisfied(self, exponential_schedule):
        table = bounds_table(exponential_schedule)
        assert table.first_satisfied == 4
        assert [row["n"] for row in table.rows] == list(range(8))
        assert [row["satisfied"] for row in table.rows] == [False] * 4 + [True] * 4
        assert table.rows[0]["paper_bound"] == "1/1"
        assert table.rows[7]["paper_bound"].startswith("2^-")
        assert table.summability() is None

    def test_tree_columns(self, small_schedule):
        table = bounds_table(small_schedule, tree=FiniteTree.full(4), trials=100, seed=9)
        for row in table.rows:
            assert row["sum_exact"] == "0/1"
            assert row["sum_within_bound"] is True
            assert row["mc_estimate"] == 0.0
            assert row["trials"] == 100
        assert table.density_level == 0
        assert table.summability()["holds"] is True

    def test_shallow_tree_leaves_columns_empty(self, small_schedule):
        table = bounds_table(small_schedule, tree=FiniteTree.full(2))
        assert table.rows[0]["sum_exact"] == "0/1"
        assert table.rows[1]["sum_exact"] is None
        assert table.rows[1]["mc_estimate"] is None
        assert table.density_level is None

    def test_to_dict(self, exponential_schedule):
        summary = bounds_table(exponential_schedule).to_dict()
        assert set(summary) == {
            "schedule",
            "first_satisfied",
            "convergence",
            "density_level",
            "summability",
            "rows",
        }

    def test_write_csv(self, temp_dir, small_schedule):
        path = os.path.join(temp_dir, "bounds.csv")
        bounds_table(small_schedule, tree=FiniteTree.full(4)).write_csv(path)
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert len(rows) == 3
        assert rows[1][CSV_COLUMNS.index("mc_estimate")] == ""
        assert rows[2][CSV_COLUMNS.index("sum_exact")] == "0/1"

    def test_csv_header_names_the_bound(self):
        assert CSV_COLUMNS[5] == "paper_bound"
        assert CSV_COLUMNS.index("sum_exact") < CSV_COLUMNS.index("paper_bound") < CSV_COLUMNS.index("satisfied")


class TestScheduleAdjudication:
    """The gap and relaxed conditions as a bounds table reports them over n <= 2000."""

    def test_nlogn_gap_condition_fails_at_the_end(self):
        summary = bounds_table(make_schedule("nlogn", 2000)).to_dict()
        assert summary["convergence"]["gap_log_holds_from"] is None
        assert summary["rows"][-1]["n"] == 1999
        assert summary["rows"][-1]["gap_exceeds_5log"] is False
        assert summary["rows"][1024]["gap_exceeds_5log"] is True

    def test_scaled_nlogn_conditions_hold_from_reported_index(self):
        summary = bounds_table(make_schedule("scaled_nlogn", 2000, scale=6)).to_dict()
        convergence = summary["convergence"]
        assert convergence["gap_log_holds_from"] <= 2
        assert convergence["relaxed_bound_holds_from"] == 16
        assert all(row["gap_exceeds_5log"] for row in summary["rows"][2:])
        assert all(row["relaxed_bound"] for row in summary["rows"][16:])
        assert summary["rows"][-1]["sum_exact"] is None
