"""Tests for exact failure probabilities and the bound chain."""

from fractions import Fraction
from itertools import combinations
from math import ceil

import pytest

from src.core.certified import at_most_exp_neg, e_enclosure, exp_neg_upper
from src.core.exceptions import InvalidInputError, PreconditionOutOfRegime
from src.core.rationals import all_strings
from src.mltest.bounds import (
    FailureQuery,
    bound_check_at_node,
    failure_prob_at_node,
    format_power_of_two,
    level_failure_bound,
    min_survivors,
    node_checks_at_level,
    power2_chain_holds,
    summability_check,
)
from src.mltest.hypergeometric import hypergeom_lower_tail, hypergeom_pmf, hypergeom_zero_prob
from src.schedule.level_schedule import make_schedule
from src.trees.finite_tree import FiniteTree

DOMINANCE_DENSITIES = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 9), Fraction(1, 16))


def _one_level(gap, density="1/4"):
    return make_schedule(
        "custom",
        1,
        density_kind="custom",
        custom_levels=(0, gap),
        custom_densities=(density, density),
    )


def _tree_with_survivors(gap, survivors):
    return FiniteTree.from_leaves(gap, list(all_strings(gap))[:survivors])


class TestHypergeometric:
    """Test class for the exact hypergeometric law."""

    @pytest.mark.parametrize(
        "population, successes, draws, expected",
        [(4, 2, 2, Fraction(1, 6)), (8, 0, 3, Fraction(1)), (2, 1, 1, Fraction(1, 2)), (4, 3, 2, Fraction(0))],
    )
    def test_zero_prob(self, population, successes, draws, expected):
        assert hypergeom_zero_prob(population, successes, draws) == expected

    def test_pmf_sums_to_one(self):
        assert sum(hypergeom_pmf(10, 4, 5, k) for k in range(6)) == 1
        assert hypergeom_pmf(10, 4, 5, 0) == hypergeom_zero_prob(10, 4, 5)
        assert hypergeom_lower_tail(10, 4, 5, 5) == 1

    def test_parameter_checks(self):
        with pytest.raises(InvalidInputError):
            hypergeom_zero_prob(4, 5, 2)
        with pytest.raises(InvalidInputError):
            hypergeom_zero_prob(4, 2, 5)
        with pytest.raises(InvalidInputError):
            hypergeom_pmf(-1, 0, 0, 0)


class TestFailureProbAtNode:
    """Test class for failure_prob_at_node."""

    @pytest.mark.parametrize("gap", [1, 2, 3])
    def test_matches_brute_force(self, gap):
        population = 1 << gap
        schedule = _one_level(gap)
        for survivors in range(1, population + 1):
            alive = set(range(survivors))
            halves = list(combinations(range(population), population // 2))
            misses = sum(1 for half in halves if not alive & set(half))
            query = FailureQuery(_tree_with_survivors(gap, survivors), schedule, 0, "")
            assert failure_prob_at_node(query) == Fraction(misses, len(halves))
            assert failure_prob_at_node(FailureQuery(query.tree, schedule, 0, "", 1)) == Fraction(
                misses, len(halves)
            )

    @pytest.mark.parametrize("gap", [1, 2, 3])
    def test_class_one_misses_when_class_zero_holds_all(self, gap):
        population = 1 << gap
        schedule = _one_level(gap)
        halves = list(combinations(range(population), population // 2))
        for survivors in range(1, population + 1):
            alive = set(range(survivors))
            held = sum(1 for half in halves if alive <= set(half))
            tree = _tree_with_survivors(gap, survivors)
            assert failure_prob_at_node(FailureQuery(tree, schedule, 0, "", 1)) == Fraction(held, len(halves))

    @pytest.mark.parametrize("survivors, expected", [(4, Fraction(0)), (1, Fraction(1, 2)), (2, Fraction(1, 6))])
    def test_both_classes_on_one_node(self, survivors, expected):
        schedule = _one_level(2)
        tree = _tree_with_survivors(2, survivors)
        for class_bit in (0, 1):
            assert failure_prob_at_node(FailureQuery(tree, schedule, 0, "", class_bit)) == expected

    def test_examples(self):
        schedule = _one_level(2)
        assert failure_prob_at_node(FailureQuery(FiniteTree.full(2), schedule, 0, "")) == 0
        assert failure_prob_at_node(FailureQuery(_tree_with_survivors(2, 1), schedule, 0, "")) == Fraction(1, 2)
        assert failure_prob_at_node(FailureQuery(_tree_with_survivors(2, 2), schedule, 0, "")) == Fraction(1, 6)

    def test_query_validation(self, small_schedule):
        tree = FiniteTree.from_leaves(4, ["0000"])
        with pytest.raises(InvalidInputError):
            FailureQuery(tree, small_schedule, 0, "", 2)
        with pytest.raises(InvalidInputError):
            FailureQuery(tree, small_schedule, 1, "0")
        with pytest.raises(InvalidInputError):
            FailureQuery(tree, small_schedule, 1, "11")
        with pytest.raises(InvalidInputError):
            FailureQuery(tree, small_schedule, 2, "0000")


class TestBoundCheck:
    """Test class for bound_check_at_node and the bound chain."""

    def test_worked_example(self):
        schedule = _one_level(4, "1/4")
        check = bound_check_at_node(FailureQuery(_tree_with_survivors(4, 5), schedule, 0, ""))
        assert check.exact == Fraction(1, 78)
        assert check.exponent == 1
        assert check.hoeffding_ok and check.power2_ok
        assert check.to_dict()["power2_bound"] == "1/2"

    def test_out_of_regime(self):
        schedule = _one_level(4, "1/4")
        with pytest.raises(PreconditionOutOfRegime):
            bound_check_at_node(FailureQuery(_tree_with_survivors(4, 4), schedule, 0, ""))
        assert min_survivors(schedule, 0) == 5

    def test_node_checks_record_out_of_regime(self, small_schedule):
        tree = FiniteTree.from_leaves(4, ["0000", "0101", "1010", "1011", "1100", "1101", "1110"])
        checks = node_checks_at_level(tree, small_schedule, 1)
        # q_1 = 1/4: one survivor is density 1/4, not above it
        assert [check is None for check in checks] == [True, True, False, False]

    def test_dominance_grid(self):
        for gap in range(2, 11):
            population = 1 << gap
            for q in DOMINANCE_DENSITIES:
                exponent = q * q * population
                for survivors in range(ceil(q * population), population + 1):
                    exact = hypergeom_zero_prob(population, survivors, population // 2)
                    assert at_most_exp_neg(exact, exponent), (gap, q, survivors)
                    assert exact * (1 << int(exponent)) <= 1

    def test_chain_identity(self):
        for gap in range(2, 11):
            for q in DOMINANCE_DENSITIES:
                assert power2_chain_holds(q, gap)
        low, high = e_enclosure()
        assert 2 < low <= high < 3

    def test_chain_rejects_parameters(self):
        with pytest.raises(InvalidInputError):
            power2_chain_holds(Fraction(1), 3)

    def test_certified_upper_bound(self):
        assert exp_neg_upper(Fraction(1)) > Fraction(367879, 1000000)
        assert not at_most_exp_neg(Fraction(37, 100), Fraction(1))
        assert at_most_exp_neg(Fraction(36, 100), Fraction(1))


class TestLevelFailureBound:
    """Test class for level_failure_bound."""

    def test_full_tree_sums_to_zero(self, small_schedule):
        for n in range(2):
            bound = level_failure_bound(FiniteTree.full(4), small_schedule, n)
            assert bound.sum_exact == 0
            assert bound.satisfied

    def test_two_survivors(self, small_schedule):
        tree = FiniteTree.from_leaves(
            4, [leaf for leaf in all_strings(4) if leaf not in ("0000", "0001")]
        )
        bound = level_failure_bound(tree, small_schedule, 1)
        assert bound.sum_exact == Fraction(1, 3)
        assert bound.union_bound_log2 == 3
        assert bound.satisfied
        assert not bound.threshold_ok
        assert bound.violations == []
        assert bound.to_dict()["paper_bound"] == "8/1"

    def test_low_density_is_listed(self, small_schedule):
        tree = FiniteTree.from_leaves(
            4, [leaf for leaf in all_strings(4) if leaf not in ("0001", "0010", "0011")]
        )
        bound = level_failure_bound(tree, small_schedule, 1)
        assert bound.sum_exact == 1
        assert bound.violations == [{"tau": "00", "density": "1/4"}]

    def test_threshold_flag(self):
        schedule = make_schedule("exponential", 2)
        bound = level_failure_bound(FiniteTree.full(8), schedule, 1)
        # q_1^2 2^{m_1} = 1/4 is far below l_1 + 2
        assert bound.threshold_ok is False
        assert bound.sum_exact == 0

    def test_level_beyond_tree(self, small_schedule):
        with pytest.raises(InvalidInputError):
            level_failure_bound(FiniteTree.full(2), small_schedule, 1)

    def test_pinned_two_branch_tree(self, small_schedule):
        # q = (1/2, 1/4, 1/9); "00" and "01" keep one leaf each
        tree = FiniteTree.from_leaves(4, ["0000", "0100"])
        first = level_failure_bound(tree, small_schedule, 0).to_dict()
        assert (first["sum_exact"], first["paper_bound"], first["satisfied"]) == ("1/3", "1/1", True)
        second = level_failure_bound(tree, small_schedule, 1).to_dict()
        assert (second["sum_exact"], second["paper_bound"], second["satisfied"]) == ("2/1", "8/1", True)

    def test_summability(self, small_schedule):
        bounds = [level_failure_bound(FiniteTree.full(4), small_schedule, n) for n in range(2)]
        result = summability_check(bounds, 0)
        assert result["holds"]
        assert result["sum_2_pow_neg_n"] == "3/2"
        assert summability_check(bounds, 5)["holds"] is None


class TestFormatPowerOfTwo:
    def test_literal_and_exponent_forms(self):
        assert format_power_of_two(-3) == "1/8"
        assert format_power_of_two(2) == "4/1"
        assert format_power_of_two(-5000) == "2^-5000"
