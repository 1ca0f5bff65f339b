"""Tests for the partition codec."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.codec.partition_codec import PartitionCodec, decode, encode
from src.core.exceptions import CodingFailure, InvalidInputError
from src.core.rationals import all_strings
from src.partition.counting import enumerate_systems
from src.partition.sampling import sample_uniform
from src.schedule.level_schedule import make_schedule
from src.trees.finite_tree import FiniteTree


def _all_trees(top_level):
    strings = list(all_strings(top_level))
    for mask in range(1, 1 << len(strings)):
        yield FiniteTree.from_leaves(
            top_level, (leaf for i, leaf in enumerate(strings) if mask >> i & 1)
        )


def _assert_roundtrip_or_failure(z_bits, system, tree):
    try:
        y_prefix, trace = encode(z_bits, system, tree)
    except CodingFailure as failure:
        assert 0 <= failure.step < len(z_bits)
        assert failure.class_bit == int(z_bits[failure.step])
        return False
    assert decode(system, y_prefix) == z_bits
    assert all(step.candidate_count >= 1 for step in trace.steps)
    return True


class TestEncode:
    """Test class for encode."""

    def test_example(self, zero_named_system, full_tiny_tree):
        y_prefix, trace = encode("10", zero_named_system, full_tiny_tree)
        assert y_prefix == "10"
        assert [(step.k, step.sigma, step.tau, step.class_bit) for step in trace.steps] == [
            (1, "1", "1", 1),
            (2, "10", "10", 0),
        ]

    def test_empty_payload(self, zero_named_system, full_tiny_tree):
        y_prefix, trace = encode("", zero_named_system, full_tiny_tree)
        assert y_prefix == ""
        assert trace.steps == []
        assert trace.output == ""

    def test_failure_is_reported(self, zero_named_system):
        tree = FiniteTree.from_leaves(2, ["00", "01"])
        with pytest.raises(CodingFailure) as excinfo:
            encode("1", zero_named_system, tree)
        failure = excinfo.value
        assert (failure.step, failure.class_bit) == (0, 1)
        assert failure.to_dict() == {
            "step": 0,
            "class_bit": 1,
            "sigma": "",
            "tau": "",
            "level": 0,
        }

    def test_oracle_use(self, zero_named_system, full_tiny_tree):
        _, trace = encode("01", zero_named_system, full_tiny_tree)
        assert trace.oracle_use.to_dict() == {"name_bits": 7, "payload_bits": 2}

    def test_start_point(self, zero_named_system, full_tiny_tree):
        y_prefix, trace = encode("1", zero_named_system, full_tiny_tree, sigma0="1", tau0="1")
        assert y_prefix == "11"
        assert trace.to_dict()["start"] == {"sigma": "1", "tau": "1"}
        assert trace.oracle_use.payload_bits == 2
        assert decode(zero_named_system, "11", sigma0="1", tau0="1") == "1"

    @pytest.mark.parametrize(
        "sigma0, tau0",
        [("1", "0"), ("1", "10"), ("111", "1"), ("", "0")],
    )
    def test_bad_start(self, zero_named_system, full_tiny_tree, sigma0, tau0):
        with pytest.raises(InvalidInputError):
            encode("", zero_named_system, full_tiny_tree, sigma0=sigma0, tau0=tau0)

    def test_payload_too_long(self, zero_named_system, full_tiny_tree):
        with pytest.raises(InvalidInputError):
            encode("101", zero_named_system, full_tiny_tree)

    def test_tree_too_shallow(self, zero_named_system):
        with pytest.raises(InvalidInputError):
            encode("10", zero_named_system, FiniteTree.full(1))


class TestDecode:
    """Test class for decode."""

    def test_example(self, zero_named_system):
        assert decode(zero_named_system, "10") == "10"
        assert decode(zero_named_system, "") == ""

    def test_malformed_length_names_the_levels(self, small_schedule):
        system = sample_uniform(small_schedule, 2, seed=0)
        with pytest.raises(InvalidInputError, match=r"\[0, 2, 4\]"):
            decode(system, "101")

    def test_prefix_must_extend_start(self, zero_named_system):
        with pytest.raises(InvalidInputError):
            decode(zero_named_system, "01", sigma0="1", tau0="1")


class TestRoundTrip:
    """Round trips through the codec class and the exhaustive oracle."""

    def test_codec_class(self, zero_named_system, full_tiny_tree):
        codec = PartitionCodec(zero_named_system, full_tiny_tree)
        assert codec.get_codec_name() == "partition"
        y_prefix, recovered, _ = codec.roundtrip("11")
        assert (y_prefix, recovered) == ("11", "11")

    def test_exhaustive_tiny(self, tiny_schedule):
        systems = list(enumerate_systems(tiny_schedule, 2))
        successes = failures = 0
        for tree in _all_trees(2):
            for system in systems:
                for z_bits in all_strings(2):
                    if _assert_roundtrip_or_failure(z_bits, system, tree):
                        successes += 1
                    else:
                        failures += 1
        assert successes + failures == 15 * 8 * 4
        assert successes > 0 and failures > 0

    def test_full_tree_never_fails(self, tiny_schedule, full_tiny_tree):
        for system in enumerate_systems(tiny_schedule, 2):
            for z_bits in all_strings(2):
                assert _assert_roundtrip_or_failure(z_bits, system, full_tiny_tree)

    @settings(max_examples=100, deadline=None)
    @given(
        mask=st.integers(min_value=1, max_value=(1 << 16) - 1),
        seed=st.integers(min_value=0, max_value=(1 << 64) - 1),
        z_bits=st.text(alphabet="01", min_size=0, max_size=2),
    )
    def test_sampled_small(self, mask, seed, z_bits):
        schedule = make_schedule("custom", 2, custom_levels=(0, 2, 4))
        tree = FiniteTree.from_leaves(
            4, (leaf for i, leaf in enumerate(all_strings(4)) if mask >> i & 1)
        )
        _assert_roundtrip_or_failure(z_bits, sample_uniform(schedule, 2, seed), tree)

    @pytest.mark.slow
    def test_every_tree_small(self, small_schedule):
        systems = [sample_uniform(small_schedule, 2, seed) for seed in range(3)]
        for tree in _all_trees(4):
            for system in systems:
                for z_bits in all_strings(2):
                    _assert_roundtrip_or_failure(z_bits, system, tree)
