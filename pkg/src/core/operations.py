"""Core operations for the PA random join lab.

This module provides a unified interface for all operations that can be performed
by both the CLI and MCP server implementations.
"""

import logging
from typing import Any, Callable, Dict, Optional, Sequence

from src.codec.base_codec import BaseCodec
from src.codec.kg_codec import KuceraGacsCodec
from src.codec.partition_codec import PartitionCodec
from src.core.exceptions import CodingFailure, InvalidInputError
from src.core.rationals import all_strings, format_rational, int_to_digits, parse_rational
from src.mltest.bounds import level_failure_bound
from src.mltest.horizon import find_n0, horizon_for_system, tree_height
from src.mltest.monte_carlo import mc_failure_estimate
from src.mltest.tables import bounds_table
from src.partition.counting import DEFAULT_MAX_COUNT_DIGITS, count_systems
from src.partition.naming import name_height, name_to_system, naming_distortion
from src.partition.partition_system import (
    PartitionSystem,
    parity_system,
    read_system,
    system_summary,
    write_system,
)
from src.partition.sampling import sample_uniform
from src.partition.validation import validate
from src.schedule.convergence import (
    convergence_report,
    oracle_use_table,
    two_extension_summable,
)
from src.schedule.level_schedule import LevelSchedule, make_schedule
from src.trees.finite_tree import MAX_TOP_LEVEL, FiniteTree, read_tree, write_tree
from src.trees.generator import generate_complement_tree, removal_measure
from src.trees.pruning import check_two_extension, find_density_level, prune_to_density

logger = logging.getLogger(__name__)

# Largest height whose 2^h payloads the parity demonstration walks.
PARITY_DEMO_MAX_LEVEL = 16


def _tree_summary(tree: FiniteTree, schedule: LevelSchedule) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        "top_level": tree.top_level,
        "leaf_count": len(tree.leaves),
        "measure": format_rational(tree.measure()),
        "empty": tree.is_empty,
    }
    two_extension = check_two_extension(tree, schedule)
    summary["two_extension"] = {
        "holds": two_extension.holds,
        "witness": two_extension.witness,
        "level_index": two_extension.level_index,
    }
    if tree.top_level == schedule.top_level:
        summary["density_level"] = find_density_level(tree, schedule)
    return summary


class LabOperations:
    """Core operations for the lab.

    This class provides methods for all the experiments that can be run,
    independent of the interface (CLI or MCP server).
    """

    def __init__(
        self,
        output_dir: str = "reports",
        naming_slack: int = 2,
        max_count_digits: int = DEFAULT_MAX_COUNT_DIGITS,
        workers: int = 1,
        progress: bool = False,
    ):
        """Initialize the operations manager.

        Args:
            output_dir: Directory where reports are written by default
            naming_slack: Extra naming bits per level
            max_count_digits: Refuse |B_h| counts longer than this
            workers: Worker processes for Monte Carlo runs
            progress: Show progress bars on long runs
        """
        self.output_dir = output_dir
        self.naming_slack = naming_slack
        self.max_count_digits = max_count_digits
        self.workers = workers
        self.progress = progress

        # Map of codec names to factories taking (system, tree, schedule, sigma0, tau0)
        self.codecs: Dict[str, Callable[..., BaseCodec]] = {
            "partition": lambda system, tree, schedule, sigma0, tau0: PartitionCodec(
                system, tree, sigma0, tau0
            ),
            "kg": lambda system, tree, schedule, sigma0, tau0: KuceraGacsCodec(tree, schedule),
        }

    # ------------------------------------------------------------------
    # Inputs

    def build_schedule(
        self,
        kind: str = "exponential",
        n_max: int = 4,
        levels: Optional[Sequence[int]] = None,
        densities: Optional[Sequence[str]] = None,
        scale: Optional[int] = None,
    ) -> LevelSchedule:
        """Build a schedule; custom levels fix n_max, custom densities switch the density kind."""
        if levels is not None:
            kind = "custom"
            n_max = len(levels) - 1
        return make_schedule(
            kind,
            n_max,
            density_kind="custom" if densities is not None else "inverse_square",
            scale=scale,
            custom_levels=levels,
            custom_densities=densities,
            naming_slack=self.naming_slack,
        )

    def load_tree(
        self,
        schedule: LevelSchedule,
        path: Optional[str] = None,
        budget: Optional[str] = None,
        seed: int = 0,
        prune: bool = False,
    ) -> FiniteTree:
        """Tree from a file, a seeded generator, or the full tree at l_N."""
        if path:
            tree = read_tree(path)
        elif budget is not None:
            tree = generate_complement_tree(schedule, parse_rational(budget), seed)
        else:
            if schedule.top_level > MAX_TOP_LEVEL:
                raise InvalidInputError(
                    f"The full tree at l_N={schedule.top_level} is too large; "
                    f"use a schedule with l_N <= {MAX_TOP_LEVEL} or pass a tree file"
                )
            tree = FiniteTree.full(schedule.top_level)
        if prune:
            tree = prune_to_density(tree, schedule)
        return tree

    def zero_name(self, schedule: LevelSchedule, height: int) -> str:
        return "0" * schedule.naming_length(height)

    def load_system(
        self,
        schedule: LevelSchedule,
        height: Optional[int] = None,
        path: Optional[str] = None,
        name: Optional[str] = None,
        seed: Optional[int] = None,
    ) -> PartitionSystem:
        """System from a file, a name, a seeded sampler, or the all-zero name."""
        if path:
            system = read_system(path, schedule)
            check = validate(system)
            if not check:
                raise InvalidInputError(
                    f"System file {path} is not a valid partition system: "
                    f"{check.clause} at sigma={check.sigma!r}, tau={check.tau!r}"
                )
            if height is not None and height < system.height:
                system = system.restrict(height)
            return system
        if name is not None:
            return name_to_system(name, schedule, height=height)
        if seed is not None:
            return sample_uniform(schedule, schedule.n_max if height is None else height, seed)
        if height is None:
            height = min(schedule.n_max, schedule.naming_horizon)
        return name_to_system(self.zero_name(schedule, height), schedule, height=height)

    def make_codec(
        self,
        codec: str,
        system: Optional[PartitionSystem],
        tree: FiniteTree,
        schedule: LevelSchedule,
        sigma0: str = "",
        tau0: str = "",
    ) -> BaseCodec:
        if codec not in self.codecs:
            raise InvalidInputError(
                f"Unknown codec '{codec}' (expected one of {', '.join(sorted(self.codecs))})"
            )
        return self.codecs[codec](system, tree, schedule, sigma0, tau0)

    # ------------------------------------------------------------------
    # Schedule

    def schedule_report(self, schedule: LevelSchedule) -> Dict[str, Any]:
        """Convergence report, two-extension summability and use bounds."""
        summable = two_extension_summable(schedule)
        return {
            "schedule": schedule.to_dict(),
            "convergence": convergence_report(schedule).to_dict(),
            "two_extension_summable": {
                "partial_sum": format_rational(summable["partial_sum"]),
                "bounded": summable["bounded"],
            },
        }

    def oracle_use(self, schedule: LevelSchedule) -> Dict[str, Any]:
        return {"schedule": schedule.to_dict(), "rows": oracle_use_table(schedule)}

    # ------------------------------------------------------------------
    # Trees

    def tree_gen(
        self, schedule: LevelSchedule, budget: str, seed: int, save: Optional[str] = None
    ) -> Dict[str, Any]:
        """Generate a complement tree and describe it."""
        tree = generate_complement_tree(schedule, parse_rational(budget), seed)
        if save:
            write_tree(tree, save)
        result = _tree_summary(tree, schedule)
        result.update(
            {
                "budget": format_rational(parse_rational(budget)),
                "seed": seed,
                "removed_measure": format_rational(removal_measure(tree)),
                "saved_to": save,
            }
        )
        return result

    def tree_prune(
        self, tree: FiniteTree, schedule: LevelSchedule, save: Optional[str] = None
    ) -> Dict[str, Any]:
        """Prune to density and check the measure-loss guarantee."""
        pruned = prune_to_density(tree, schedule)
        if save:
            write_tree(pruned, save)
        loss = tree.measure() - pruned.measure()
        allowance = sum(schedule.densities[:-1], parse_rational(0))
        return {
            "before": _tree_summary(tree, schedule),
            "after": _tree_summary(pruned, schedule),
            "measure_loss": format_rational(loss),
            "loss_allowance": format_rational(allowance),
            "loss_within_allowance": loss <= allowance,
            "saved_to": save,
        }

    # ------------------------------------------------------------------
    # Partition systems

    def _system_result(self, system: PartitionSystem) -> Dict[str, Any]:
        check = validate(system)
        result: Dict[str, Any] = {
            "system": system_summary(system),
            "validation": check.to_dict(),
        }
        try:
            result["count"] = int_to_digits(
                count_systems(system.schedule, system.height, self.max_count_digits)
            )
        except InvalidInputError as e:
            logger.warning(f"Skipping |B_h|: {str(e)}")
            result["count"] = None
        return result

    def ps_sample(
        self, schedule: LevelSchedule, height: int, seed: int, save: Optional[str] = None
    ) -> Dict[str, Any]:
        """Sample a system uniformly from B_h."""
        system = sample_uniform(schedule, height, seed)
        if save:
            write_system(system, save)
        result = self._system_result(system)
        result.update({"seed": seed, "saved_to": save})
        return result

    def ps_name(
        self,
        schedule: LevelSchedule,
        name: str,
        height: Optional[int] = None,
        save: Optional[str] = None,
    ) -> Dict[str, Any]:
        """Materialize f(name) and measure the naming distortion at its height."""
        system = name_to_system(name, schedule, height=height)
        if save:
            write_system(system, save)
        result = self._system_result(system)
        result.update(
            {
                "name": name,
                "name_height": name_height(name, schedule),
                "distortion": naming_distortion(schedule, system.height).to_dict(),
                "saved_to": save,
            }
        )
        return result

    # ------------------------------------------------------------------
    # Coding

    def resolve_start(
        self,
        system: PartitionSystem,
        tree: FiniteTree,
        sigma0: str = "",
        tau0: str = "",
        auto_start: bool = False,
    ) -> Dict[str, str]:
        """The start point, taken from the failure horizon when auto_start is set."""
        if not auto_start:
            return {"sigma0": sigma0, "tau0": tau0}
        horizon = horizon_for_system(system, tree)
        if horizon.start is None:
            raise InvalidInputError(
                f"No failure-free start: the last level fails (failing levels "
                f"{horizon.failing_levels})"
            )
        return {"sigma0": horizon.start[0], "tau0": horizon.start[1]}

    def encode(
        self,
        codec: str,
        z_bits: str,
        system: Optional[PartitionSystem],
        tree: FiniteTree,
        schedule: LevelSchedule,
        sigma0: str = "",
        tau0: str = "",
    ) -> Dict[str, Any]:
        """Encode z; a CodingFailure propagates to the caller."""
        y_prefix, trace = self.make_codec(codec, system, tree, schedule, sigma0, tau0).encode(
            z_bits
        )
        return {"z": z_bits, "y": y_prefix, "trace": trace.to_dict()}

    def decode(
        self,
        codec: str,
        y_prefix: str,
        system: Optional[PartitionSystem],
        tree: Optional[FiniteTree],
        schedule: LevelSchedule,
        sigma0: str = "",
        tau0: str = "",
    ) -> Dict[str, Any]:
        z_bits = self.make_codec(codec, system, tree, schedule, sigma0, tau0).decode(y_prefix)
        return {"y": y_prefix, "z": z_bits}

    def roundtrip(
        self,
        codec: str,
        z_bits: str,
        system: Optional[PartitionSystem],
        tree: FiniteTree,
        schedule: LevelSchedule,
        sigma0: str = "",
        tau0: str = "",
    ) -> Dict[str, Any]:
        """Encode then decode; match tells whether the payload came back."""
        y_prefix, recovered, trace = self.make_codec(
            codec, system, tree, schedule, sigma0, tau0
        ).roundtrip(z_bits)
        return {
            "z": z_bits,
            "y": y_prefix,
            "recovered": recovered,
            "match": recovered == z_bits,
            "trace": trace.to_dict(),
        }

    def parity_demo(self, schedule: LevelSchedule, height: int) -> Dict[str, Any]:
        """Exhibit the failure event with the parity system on its even-parity tree.

        The tree keeps exactly the strings whose every new segment has an even
        number of ones, so class 1 never meets it: every payload with a 1 fails.
        """
        if not 1 <= height <= schedule.n_max:
            raise InvalidInputError(f"Height must lie in 1..N={schedule.n_max}, got {height}")
        if schedule.levels[height] > PARITY_DEMO_MAX_LEVEL:
            raise InvalidInputError(
                f"l_{height}={schedule.levels[height]} exceeds {PARITY_DEMO_MAX_LEVEL}"
            )
        system = parity_system(schedule, height)
        leaves = [
            leaf
            for leaf in all_strings(schedule.levels[height])
            if all(
                leaf[schedule.levels[n]: schedule.levels[n + 1]].count("1") % 2 == 0
                for n in range(height)
            )
        ]
        tree = FiniteTree.from_leaves(schedule.levels[height], leaves)
        outcomes = []
        for z_bits in all_strings(height):
            try:
                y_prefix, _ = self.make_codec("partition", system, tree, schedule).encode(z_bits)
                outcomes.append({"z": z_bits, "y": y_prefix, "failure": None})
            except CodingFailure as e:
                outcomes.append({"z": z_bits, "y": None, "failure": e.to_dict()})
        return {
            "height": height,
            "validation": validate(system).to_dict(),
            "tree_measure": format_rational(tree.measure()),
            "outcomes": outcomes,
            "failures": sum(1 for outcome in outcomes if outcome["failure"]),
        }

    # ------------------------------------------------------------------
    # Failure tests

    def bounds_table(
        self,
        schedule: LevelSchedule,
        tree: Optional[FiniteTree] = None,
        trials: int = 0,
        seed: int = 0,
        csv_path: Optional[str] = None,
    ) -> Dict[str, Any]:
        table = bounds_table(schedule, tree, trials=trials, seed=seed, workers=self.workers)
        if csv_path:
            table.write_csv(csv_path)
        return table.to_dict()

    def level_bound(self, tree: FiniteTree, schedule: LevelSchedule, n: int) -> Dict[str, Any]:
        return level_failure_bound(tree, schedule, n).to_dict()

    def mc(
        self, tree: FiniteTree, schedule: LevelSchedule, n: int, trials: int, seed: int
    ) -> Dict[str, Any]:
        result = mc_failure_estimate(
            tree, schedule, n, trials, seed, workers=self.workers, progress=self.progress
        )
        return {
            "mc": result.to_dict(),
            "bound": level_failure_bound(tree, schedule, n).to_dict(),
        }

    def find_n0(
        self,
        tree: FiniteTree,
        schedule: LevelSchedule,
        name: Optional[str] = None,
        z_bits: Optional[str] = None,
    ) -> Dict[str, Any]:
        """Failure horizon of f(name) on the tree; optionally encode z from its start."""
        height = tree_height(tree, schedule)
        if name is None:
            name = self.zero_name(schedule, height)
        horizon = find_n0(name, tree, schedule)
        result: Dict[str, Any] = {"name": name, "horizon": horizon.to_dict()}
        if z_bits is not None and horizon.start is not None:
            system = name_to_system(name, schedule, height=height)
            sigma0, tau0 = horizon.start
            result["encode"] = self.encode("partition", z_bits, system, tree, schedule, sigma0, tau0)
        return result
