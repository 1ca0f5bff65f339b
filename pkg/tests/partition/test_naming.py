"""Tests for counting, naming and sampling partition systems."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.exceptions import InvalidInputError
from src.core.rationals import all_strings
from src.partition.combinadics import split_from_rank
from src.partition.counting import count_systems, enumerate_systems, estimated_count_bits
from src.partition.naming import (
    distortion_bound,
    name_height,
    name_to_ranks,
    name_to_system,
    naming_distortion,
)
from src.partition.sampling import sample_uniform, uniform_below
from src.partition.validation import validate
from src.schedule.level_schedule import make_schedule


class TestCounting:
    """Test class for count_systems and enumerate_systems."""

    def test_counts(self, tiny_schedule, small_schedule):
        assert count_systems(tiny_schedule, 0) == 1
        assert count_systems(tiny_schedule, 1) == 2
        assert count_systems(tiny_schedule, 2) == 8
        assert count_systems(small_schedule, 2) == 7776

    def test_enumeration_matches_count_tiny(self, tiny_schedule):
        systems = list(enumerate_systems(tiny_schedule, 2))
        assert len(systems) == 8
        assert len({system.fingerprint() for system in systems}) == 8
        assert all(validate(system) for system in systems)

    def test_enumeration_matches_count_small(self, small_schedule):
        fingerprints = {system.fingerprint() for system in enumerate_systems(small_schedule, 2)}
        assert len(fingerprints) == count_systems(small_schedule, 2)

    def test_digit_bound(self, exponential_schedule):
        assert estimated_count_bits(exponential_schedule, 8) > 10 ** 6
        with pytest.raises(InvalidInputError):
            count_systems(exponential_schedule, 8)
        with pytest.raises(InvalidInputError):
            count_systems(exponential_schedule, 3, max_digits=10)

    def test_refuses_large_enumeration(self, exponential_schedule):
        with pytest.raises(InvalidInputError):
            next(enumerate_systems(exponential_schedule, 3))

    def test_height_range(self, tiny_schedule):
        with pytest.raises(InvalidInputError):
            count_systems(tiny_schedule, 3)


class TestNaming:
    """Test class for the naming f."""

    def test_zero_name_is_the_example_system(self, tiny_schedule, zero_named_system):
        assert validate(zero_named_system)
        assert zero_named_system.height == 2

    def test_name_height(self, tiny_schedule):
        assert name_height("000", tiny_schedule) == 1
        assert name_height("000000", tiny_schedule) == 1
        assert name_height("0000000", tiny_schedule) == 2
        assert name_height("0" * 100, tiny_schedule) == 2
        with pytest.raises(InvalidInputError):
            name_height("00", tiny_schedule)
        with pytest.raises(InvalidInputError):
            name_height("0012", tiny_schedule)

    def test_first_segment_is_read_modulo(self, tiny_schedule):
        # "001" and "011" both reduce to 1 modulo E_0 = 2
        for name in ("001", "011"):
            system = name_to_system(name, tiny_schedule)
            assert system.members("0") == frozenset(["1"])

    def test_first_tau_takes_the_least_significant_digit(self, tiny_schedule):
        system = name_to_system("000" + "0001", tiny_schedule)
        assert system.members("00") == frozenset(["01"])
        assert system.members("10") == frozenset(["10"])
        assert name_to_ranks("000" + "0001", tiny_schedule) == [(0,), (1, 0)]

    def test_explicit_height(self, tiny_schedule):
        assert name_to_system("0" * 7, tiny_schedule, height=1).height == 1
        with pytest.raises(InvalidInputError):
            name_to_system("0" * 6, tiny_schedule, height=2)

    def test_surjective_and_prefix_monotone_tiny(self, tiny_schedule):
        named = set()
        for name in all_strings(7):
            system = name_to_system(name, tiny_schedule)
            assert system.extends(name_to_system(name[:3], tiny_schedule))
            named.add(system.fingerprint())
        everything = {system.fingerprint() for system in enumerate_systems(tiny_schedule, 2)}
        assert named == everything

    @settings(max_examples=50, deadline=None)
    @given(st.text(alphabet="01", min_size=18, max_size=40))
    def test_prefix_monotone_small(self, bits):
        schedule = make_schedule("custom", 2, custom_levels=(0, 2, 4))
        full = name_to_system(bits, schedule)
        assert full.extends(name_to_system(bits[:5], schedule))
        assert validate(full)

    def test_horizon_limits_naming(self):
        schedule = make_schedule("custom", 2, custom_levels=(0, 21, 22))
        with pytest.raises(InvalidInputError):
            name_height("0" * 64, schedule)


class TestNamingDistortion:
    """Test class for naming_distortion."""

    def test_tiny_is_exact(self, tiny_schedule):
        result = naming_distortion(tiny_schedule, 2)
        assert (result.min_names, result.max_names, result.method) == (16, 16, "exhaustive")
        assert result.ratio == 1

    def test_small_height_one(self, small_schedule):
        result = naming_distortion(small_schedule, 1)
        assert (result.min_names, result.max_names) == (5, 6)
        assert result.bound == Fraction(5, 3)
        assert result.within_bound

    def test_small_exhaustive_matches_per_level(self, small_schedule):
        exhaustive = naming_distortion(small_schedule, 2, exhaustive=True)
        per_level = naming_distortion(small_schedule, 2, exhaustive=False)
        assert (exhaustive.min_names, exhaustive.max_names) == (30, 42)
        assert (per_level.min_names, per_level.max_names) == (30, 42)
        assert exhaustive.ratio == Fraction(7, 5)
        assert exhaustive.to_dict()["bound"] == "25/9"

    def test_height_zero(self, tiny_schedule):
        assert naming_distortion(tiny_schedule, 0).method == "trivial"

    def test_bound_undefined_without_slack(self):
        assert distortion_bound(0, 3) is None
        assert distortion_bound(1, 2) == Fraction(9)

    def test_exhaustive_refused_for_long_names(self, sparse_tree_schedule):
        with pytest.raises(InvalidInputError):
            naming_distortion(sparse_tree_schedule, 3, exhaustive=True)
        assert naming_distortion(sparse_tree_schedule, 3).method == "per-level"


class TestSampling:
    """Test class for uniform sampling."""

    def test_deterministic(self, small_schedule):
        first = sample_uniform(small_schedule, 2, seed=5)
        assert sample_uniform(small_schedule, 2, seed=5) == first
        assert validate(first)

    def test_reaches_every_tiny_system(self, tiny_schedule):
        seen = {sample_uniform(tiny_schedule, 2, seed).fingerprint() for seed in range(400)}
        assert len(seen) == 8

    def test_uniform_below_large_bound(self):
        rng = np.random.default_rng(1)
        bound = (1 << 80) + 7
        draws = [uniform_below(rng, bound) for _ in range(50)]
        assert all(0 <= value < bound for value in draws)
        assert len(set(draws)) == 50

    def test_uniform_below_rejects_empty_range(self):
        with pytest.raises(InvalidInputError):
            uniform_below(np.random.default_rng(0), 0)

    def test_height_range(self, tiny_schedule):
        with pytest.raises(InvalidInputError):
            sample_uniform(tiny_schedule, 3, seed=0)

    def test_splits_follow_the_seeded_stream(self, small_schedule):
        # one rank in 0..5 per tau, level by level, taus in lexicographic order
        rng = np.random.default_rng(5)
        ranks = {tau: int(rng.integers(0, 6)) for tau in ["", "00", "01", "10", "11"]}
        system = sample_uniform(small_schedule, 2, seed=5)
        for tau, rank in ranks.items():
            assert system.split_at(tau) == split_from_rank(tau, rank, 2)

    def test_height_one_frequencies(self, tiny_schedule):
        seeds = 10_000
        hits = sum(
            1 for seed in range(seeds) if sample_uniform(tiny_schedule, 1, seed).members("0") == frozenset({"0"})
        )
        sigma = (0.25 / seeds) ** 0.5
        assert abs(hits / seeds - 0.5) <= 3 * sigma
