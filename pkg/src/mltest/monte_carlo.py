"""Seeded Monte Carlo estimates of the level failure event."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from src.core.exceptions import InvalidInputError
from src.core.rationals import format_rational
from src.mltest.bounds import FailureQuery, failure_prob_at_node
from src.partition.combinadics import unrank_subset
from src.partition.sampling import uniform_below
from src.schedule.level_schedule import LevelSchedule, split_count
from src.trees.finite_tree import FiniteTree

logger = logging.getLogger(__name__)

# Trials per worker task.
CHUNK_SIZE = 2048


@dataclass(frozen=True)
class _TrialPlan:
    """What one trial needs: the survivor indices below each level-n node."""

    seed: int
    gap: int
    survivors: Tuple[FrozenSet[int], ...]


def _run_trial(plan: _TrialPlan, trial: int) -> Tuple[bool, bool]:
    """One uniform split per node; returns (class 0 failed somewhere, class 1 failed somewhere)."""
    rng = np.random.default_rng([plan.seed, trial])
    size = 1 << plan.gap
    half = size >> 1
    choices = split_count(plan.gap)
    zero_failed = one_failed = False
    for survivors in plan.survivors:
        chosen = set(unrank_subset(uniform_below(rng, choices), size, half))
        if not chosen & survivors:
            zero_failed = True
        if survivors <= chosen:
            one_failed = True
    return zero_failed, one_failed


def _run_chunk(plan: _TrialPlan, start: int, stop: int) -> Tuple[int, int, int]:
    hits = zero_hits = one_hits = 0
    for trial in range(start, stop):
        zero_failed, one_failed = _run_trial(plan, trial)
        hits += zero_failed or one_failed
        zero_hits += zero_failed
        one_hits += one_failed
    return hits, zero_hits, one_hits


@dataclass(frozen=True)
class MonteCarloResult:
    n: int
    trials: int
    seed: int
    hits: int
    class_hits: Tuple[int, int]
    exact: Fraction
    exact_per_class: Fraction

    @property
    def estimate(self) -> float:
        return self.hits / self.trials

    @property
    def stderr(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.trials)

    def class_estimate(self, class_bit: int) -> float:
        return self.class_hits[class_bit] / self.trials

    def class_stderr(self, class_bit: int) -> float:
        p = self.class_estimate(class_bit)
        return math.sqrt(p * (1 - p) / self.trials)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "hits": self.hits,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "class_hits": list(self.class_hits),
            "exact": format_rational(self.exact),
            "exact_per_class": format_rational(self.exact_per_class),
        }


def exact_failure_probabilities(
    tree: FiniteTree, schedule: LevelSchedule, n: int
) -> Tuple[Fraction, Fraction]:
    """(P(some class fails at level n), P(class 0 fails at some node)).

    Nodes split independently; the two classes of one node never fail together
    when the node has a survivor.
    """
    none_failed = Fraction(1)
    zero_never = Fraction(1)
    for tau in tree.nodes_at(schedule.levels[n]):
        p = failure_prob_at_node(FailureQuery(tree, schedule, n, tau))
        none_failed *= 1 - 2 * p
        zero_never *= 1 - p
    return 1 - none_failed, 1 - zero_never


def _chunks(trials: int) -> List[Tuple[int, int]]:
    return [(start, min(start + CHUNK_SIZE, trials)) for start in range(0, trials, CHUNK_SIZE)]


def mc_failure_estimate(
    tree: FiniteTree,
    schedule: LevelSchedule,
    n: int,
    trials: int,
    seed: int,
    workers: int = 1,
    progress: bool = False,
) -> MonteCarloResult:
    """Estimate the probability that a uniform system fails at some level-n node.

    Trial t draws from default_rng([seed, t]) alone, so serial and parallel
    runs with the same seed count identical hits.

    Args:
        tree: Tree reaching level l_{n+1}
        schedule: The level schedule
        n: Level index, n < N
        trials: Number of sampled systems, at least 1
        seed: 64-bit seed
        workers: Worker processes (1 runs in-process)
        progress: Show a progress bar

    Returns:
        MonteCarloResult with the hit counts and the exact values they estimate
    """
    if trials < 1:
        raise InvalidInputError(f"Need at least one trial, got {trials}")
    if workers < 1:
        raise InvalidInputError(f"Need at least one worker, got {workers}")
    if not 0 <= n < schedule.n_max:
        raise InvalidInputError(f"Level index {n} is outside 0..N-1={schedule.n_max - 1}")
    if schedule.levels[n + 1] > tree.top_level:
        raise InvalidInputError(f"Level l_{n + 1} is beyond the tree's top level")

    gap = schedule.gap(n)
    level = schedule.levels[n]
    next_level = schedule.levels[n + 1]
    survivors = tuple(
        frozenset(int(node[level:], 2) for node in tree.extensions(tau, next_level))
        for tau in tree.nodes_at(level)
    )
    plan = _TrialPlan(seed=seed, gap=gap, survivors=survivors)
    chunks = _chunks(trials)

    totals: Sequence[Tuple[int, int, int]]
    if workers == 1:
        totals = [
            _run_chunk(plan, start, stop)
            for start, stop in tqdm(chunks, desc="mc", disable=not progress)
        ]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, plan, start, stop) for start, stop in chunks]
            totals = [future.result() for future in tqdm(futures, desc="mc", disable=not progress)]

    hits = sum(total[0] for total in totals)
    zero_hits = sum(total[1] for total in totals)
    one_hits = sum(total[2] for total in totals)
    exact, exact_per_class = exact_failure_probabilities(tree, schedule, n)
    result = MonteCarloResult(
        n=n,
        trials=trials,
        seed=seed,
        hits=hits,
        class_hits=(zero_hits, one_hits),
        exact=exact,
        exact_per_class=exact_per_class,
    )
    logger.info(
        f"Monte Carlo at level {n}: {hits}/{trials} trials failed "
        f"(estimate {result.estimate:.6f}, exact {float(exact):.6f})"
    )
    return result


def mc_row(result: Optional[MonteCarloResult]) -> Dict[str, Any]:
    """The Monte Carlo columns of a bounds-table row."""
    if result is None:
        return {"mc_estimate": None, "mc_stderr": None, "trials": None, "seed": None}
    return {
        "mc_estimate": result.estimate,
        "mc_stderr": result.stderr,
        "trials": result.trials,
        "seed": result.seed,
    }
