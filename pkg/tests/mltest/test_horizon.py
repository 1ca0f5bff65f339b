"""Tests for the failure horizon n0."""

import numpy as np
import pytest

from src.codec.partition_codec import decode, encode
from src.core.exceptions import CodingFailure, InvalidInputError
from src.mltest.horizon import find_n0, horizon_for_system, level_failures, tree_height
from src.partition.naming import name_to_system
from src.partition.partition_system import trivial_system
from src.trees.finite_tree import FiniteTree
from src.trees.pruning import prune_to_density


def _random_name(seed, length):
    bits = np.random.default_rng(seed).integers(0, 2, size=length)
    return "".join(str(bit) for bit in bits)


def _check_horizon(name, tree, schedule):
    result = find_n0(name, tree, schedule)
    assert result.n0 == 3
    assert result.failing_levels == [2]
    sigma0, tau0 = result.start
    assert tau0 == "000000"

    system = name_to_system(name, schedule, height=4)
    for bit in "01":
        y_prefix, _ = encode(bit, system, tree, sigma0=sigma0, tau0=tau0)
        assert decode(system, y_prefix, sigma0=sigma0, tau0=tau0) == bit

    # One level earlier, node 0000 keeps a single extension, so one class misses the tree.
    early_sigma = system.class_of("0000")
    outcomes = []
    for bit in "01":
        try:
            encode(bit + "0", system, tree, sigma0=early_sigma, tau0="0000")
            outcomes.append(True)
        except CodingFailure as failure:
            assert failure.step == 0
            outcomes.append(False)
    assert sorted(outcomes) == [False, True]


class TestTreeHeight:
    def test_levels(self, sparse_tree, sparse_tree_schedule, small_schedule):
        assert tree_height(sparse_tree, sparse_tree_schedule) == 4
        assert tree_height(FiniteTree.full(2), small_schedule) == 1
        with pytest.raises(InvalidInputError):
            tree_height(FiniteTree.full(3), small_schedule)


class TestFindN0:
    """Test class for find_n0."""

    def test_full_tree(self, tiny_schedule, full_tiny_tree):
        result = find_n0("0" * 7, full_tiny_tree, tiny_schedule)
        assert result.n0 == 0
        assert result.failures == []
        assert result.start == ("", "")

    def test_sparse_tree_is_already_pruned(self, sparse_tree, sparse_tree_schedule):
        assert prune_to_density(sparse_tree, sparse_tree_schedule) == sparse_tree

    def test_pinned_zero_name(self, sparse_tree, sparse_tree_schedule):
        # Every split takes extensions 00 and 01, so node 0000 loses class 1.
        result = find_n0("0" * 230, sparse_tree, sparse_tree_schedule)
        assert result.n0 == 3
        assert [(f.n, f.tau, f.sigma, f.class_bit) for f in result.failures] == [(2, "0000", "00", 1)]
        assert result.start == ("000", "000000")

    @pytest.mark.parametrize("seed", range(20))
    def test_sampled_names(self, sparse_tree, sparse_tree_schedule, seed):
        _check_horizon(_random_name(seed, 230), sparse_tree, sparse_tree_schedule)

    @pytest.mark.slow
    def test_thousand_names(self, sparse_tree, sparse_tree_schedule):
        for seed in range(1000):
            _check_horizon(_random_name([seed, 1], 230), sparse_tree, sparse_tree_schedule)

    def test_last_level_fails(self, tiny_schedule):
        result = find_n0("0" * 7, FiniteTree.from_leaves(2, ["00"]), tiny_schedule)
        assert result.n0 is None
        assert result.start is None
        assert result.failing_levels == [0, 1]
        assert result.to_dict()["start"] is None

    def test_name_too_short(self, sparse_tree, sparse_tree_schedule):
        with pytest.raises(InvalidInputError):
            find_n0("0" * 100, sparse_tree, sparse_tree_schedule)

    def test_to_dict(self, sparse_tree, sparse_tree_schedule):
        summary = find_n0("1" * 230, sparse_tree, sparse_tree_schedule).to_dict()
        assert summary["n0"] == 3
        assert summary["tree_height"] == 4
        assert summary["start"]["tau"] == "000000"
        assert {failure["tau"] for failure in summary["failures"]} == {"0000"}


class TestHorizonForSystem:
    def test_height_zero(self, tiny_schedule):
        result = horizon_for_system(trivial_system(tiny_schedule), FiniteTree.from_leaves(0, [""]))
        assert (result.n0, result.tree_height, result.start) == (0, 0, ("", ""))

    def test_system_too_low(self, zero_named_system, tiny_schedule):
        with pytest.raises(InvalidInputError):
            horizon_for_system(zero_named_system.restrict(1), FiniteTree.full(2))

    def test_level_failures_name_the_class(self, zero_named_system):
        failures = level_failures(zero_named_system, FiniteTree.from_leaves(2, ["00", "01"]), 0)
        assert [failure.to_dict() for failure in failures] == [
            {"n": 0, "tau": "", "sigma": "", "class_bit": 1}
        ]
