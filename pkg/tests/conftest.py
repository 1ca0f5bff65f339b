"""Pytest configuration for the pa-random-join-lab tests."""

import tempfile

import pytest

from src.partition.naming import name_to_system
from src.schedule.level_schedule import make_schedule
from src.trees.finite_tree import FiniteTree


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield tmpdir


@pytest.fixture
def tiny_schedule():
    """Levels (0, 1, 2): one bit per level, |B_2| = 8."""
    return make_schedule("custom", 2, custom_levels=(0, 1, 2))


@pytest.fixture
def small_schedule():
    """Levels (0, 2, 4): two bits per level, |B_2| = 7776."""
    return make_schedule("custom", 2, custom_levels=(0, 2, 4))


@pytest.fixture
def exponential_schedule():
    """l_n = 2^n, q_n = 1/(n+1)^2 up to N = 8."""
    return make_schedule("exponential", 8)


@pytest.fixture
def full_tiny_tree():
    return FiniteTree.full(2)


@pytest.fixture
def zero_named_system(tiny_schedule):
    """f(0000000) on (0, 1, 2): D_0={0}, D_1={1}, D_00={00}, D_01={01}, D_10={10}, D_11={11}."""
    return name_to_system("0" * 7, tiny_schedule)


@pytest.fixture
def sparse_tree_schedule():
    """Levels (0, 2, 4, 6, 8) with every density 1/8."""
    return make_schedule(
        "custom",
        4,
        density_kind="custom",
        custom_levels=(0, 2, 4, 6, 8),
        custom_densities=("1/8",) * 5,
    )


@pytest.fixture
def sparse_tree():
    """The full level-8 tree without the leaves 000001xx, 000010xx and 000011xx.

    Node 0000 at level 4 keeps a single extension at level 6, so every
    system fails somewhere at level 2 and nowhere above it.
    """
    removed = {"000001", "000010", "000011"}
    return FiniteTree.from_leaves(
        8, (leaf for leaf in FiniteTree.full(8).leaves if leaf[:6] not in removed)
    )
