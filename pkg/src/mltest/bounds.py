"""Per-node failure probabilities, their bound chain, and level sums G_n."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Any, Dict, List, Optional, Sequence

from src.core.certified import at_most_exp_neg, e_enclosure, exp_neg_upper
from src.core.exceptions import InvalidInputError, PreconditionOutOfRegime
from src.core.rationals import format_rational, int_to_digits
from src.mltest.hypergeometric import hypergeom_pmf, hypergeom_zero_prob
from src.schedule.convergence import density_exponent, level_bound_holds
from src.schedule.level_schedule import LevelSchedule
from src.trees.finite_tree import FiniteTree, conditional_density

logger = logging.getLogger(__name__)

# Bounds 2^{-k} with k above this are reported by exponent only.
MAX_LITERAL_BOUND_BITS = 4096


def format_power_of_two(exponent: int) -> str:
    """2^exponent as "p/q", or as "2^exponent" when too long to spell out."""
    if abs(exponent) > MAX_LITERAL_BOUND_BITS:
        return f"2^{int_to_digits(exponent)}"
    return format_rational(Fraction(2) ** exponent)


def union_bound_log2(schedule: LevelSchedule, n: int) -> int:
    """log2 of 2^{l_n+1} 2^{-floor(q_n^2 2^{m_n})}, the conservative per-level bound."""
    return schedule.levels[n] + 1 - floor(density_exponent(schedule, n))


@dataclass(frozen=True)
class FailureQuery:
    """A tree node tau at level l_n and a class index i."""

    tree: FiniteTree
    schedule: LevelSchedule
    n: int
    tau: str
    class_bit: int = 0

    def __post_init__(self):
        schedule = self.schedule
        if not 0 <= self.n < schedule.n_max:
            raise InvalidInputError(f"Level index {self.n} is outside 0..N-1={schedule.n_max - 1}")
        if self.class_bit not in (0, 1):
            raise InvalidInputError(f"Class index must be 0 or 1, got {self.class_bit}")
        if len(self.tau) != schedule.levels[self.n]:
            raise InvalidInputError(
                f"Node '{self.tau}' does not have length l_{self.n}={schedule.levels[self.n]}"
            )
        if schedule.levels[self.n + 1] > self.tree.top_level:
            raise InvalidInputError(
                f"Level l_{self.n + 1}={schedule.levels[self.n + 1]} is beyond the tree"
            )
        if not self.tree.contains(self.tau):
            raise InvalidInputError(f"Node '{self.tau}' is not in the tree")

    @property
    def gap(self) -> int:
        return self.schedule.gap(self.n)

    @property
    def survivors(self) -> int:
        """s: tree nodes at l_{n+1} extending tau."""
        return len(self.tree.extensions(self.tau, self.schedule.levels[self.n + 1]))


def failure_prob_at_node(query: FailureQuery) -> Fraction:
    """Probability that a uniform equal split leaves class i without survivors.

    With N = 2^{m_n} extensions, s survivors and classes of size N/2: class 0
    misses iff it avoids all survivors, class 1 misses iff class 0 holds them all.
    """
    population = 1 << query.gap
    half = population >> 1
    survivors = query.survivors
    avoid = hypergeom_zero_prob(population, survivors, half)
    # Class 1 is the complement, so it misses the tree iff class 0 contains every survivor.
    contain = hypergeom_pmf(population, survivors, half, survivors)
    assert avoid == contain, f"class symmetry broken: {avoid} != {contain}"
    return avoid


@dataclass(frozen=True)
class NodeBoundCheck:
    tau: str
    survivors: int
    density: Fraction
    exact: Fraction
    exponent: Fraction
    hoeffding_bound: Fraction
    hoeffding_ok: bool
    power2_ok: bool

    @property
    def power2_exponent(self) -> int:
        return floor(self.exponent)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau": self.tau,
            "survivors": self.survivors,
            "density": format_rational(self.density),
            "exact": format_rational(self.exact),
            "hoeffding_bound_upper": format_rational(self.hoeffding_bound),
            "power2_bound": format_power_of_two(-self.power2_exponent),
            "hoeffding_ok": self.hoeffding_ok,
            "power2_ok": self.power2_ok,
        }


def bound_check_at_node(query: FailureQuery) -> NodeBoundCheck:
    """Compare the exact failure probability with e^{-2q^2 2^{m-1}} and 2^{-floor(q^2 2^m)}.

    Raises:
        PreconditionOutOfRegime: The node's density is not above q_n
    """
    threshold = query.schedule.densities[query.n]
    density = conditional_density(query.tree, query.tau)
    if density <= threshold:
        raise PreconditionOutOfRegime(query.tau, density, threshold)
    exact = failure_prob_at_node(query)
    exponent = density_exponent(query.schedule, query.n)
    return NodeBoundCheck(
        tau=query.tau,
        survivors=query.survivors,
        density=density,
        exact=exact,
        exponent=exponent,
        hoeffding_bound=exp_neg_upper(exponent),
        hoeffding_ok=at_most_exp_neg(exact, exponent),
        power2_ok=exact * (1 << floor(exponent)) <= 1,
    )


def power2_chain_holds(q: Fraction, m: int) -> bool:
    """e^{-2q^2 2^{m-1}} < 2^{-q^2 2^m}.

    Both sides are powers of the same exponent x = q^2 2^m > 0, so the strict
    inequality is e^{-x} < 2^{-x}, i.e. e > 2.
    """
    q = Fraction(q)
    if not 0 < q < 1 or m < 1:
        raise InvalidInputError(f"Need 0 < q < 1 and m >= 1, got q={q}, m={m}")
    exponent = q * q * (1 << m)
    e_low, _ = e_enclosure()
    return exponent > 0 and e_low > 2


@dataclass
class LevelFailureBound:
    """Union bound over the tree nodes at one level, against 2^{l_n+1} 2^{-floor(x)}."""

    n: int
    sum_exact: Fraction
    union_bound_log2: int
    satisfied: bool
    threshold_ok: bool
    node_count: int
    violations: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def union_bound(self) -> Fraction:
        return Fraction(2) ** self.union_bound_log2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "sum_exact": format_rational(self.sum_exact),
            "paper_bound": format_power_of_two(self.union_bound_log2),
            "paper_bound_log2": self.union_bound_log2,
            "satisfied": self.satisfied,
            "threshold_ok": self.threshold_ok,
            "node_count": self.node_count,
            "density_violations": self.violations,
        }


def level_failure_bound(tree: FiniteTree, schedule: LevelSchedule, n: int) -> LevelFailureBound:
    """Sum 2 * failure_prob_at_node over the level-l_n tree nodes.

    Args:
        tree: Tree reaching level l_{n+1}
        schedule: The level schedule
        n: Level index, n < N

    Returns:
        LevelFailureBound; nodes with density <= q_n are listed, not fatal
    """
    if not 0 <= n < schedule.n_max:
        raise InvalidInputError(f"Level index {n} is outside 0..N-1={schedule.n_max - 1}")
    level = schedule.levels[n]
    threshold = schedule.densities[n]
    total = Fraction(0)
    violations = []
    if schedule.levels[n + 1] > tree.top_level:
        raise InvalidInputError(
            f"Level l_{n + 1}={schedule.levels[n + 1]} is beyond the tree's top level {tree.top_level}"
        )
    nodes = tree.nodes_at(level)
    for tau in nodes:
        query = FailureQuery(tree, schedule, n, tau)
        total += 2 * failure_prob_at_node(query)
        density = conditional_density(tree, tau)
        if density <= threshold:
            violations.append({"tau": tau, "density": format_rational(density)})

    bound_log2 = union_bound_log2(schedule, n)
    result = LevelFailureBound(
        n=n,
        sum_exact=total,
        union_bound_log2=bound_log2,
        satisfied=_sum_below_power_of_two(total, bound_log2),
        threshold_ok=level_bound_holds(schedule, n),
        node_count=len(nodes),
        violations=violations,
    )
    if violations:
        logger.warning(f"{len(violations)} node(s) at level {n} are at or below q_{n}={threshold}")
    return result


def _sum_below_power_of_two(total: Fraction, exponent: int) -> bool:
    if total == 0:
        return True
    if exponent >= 0:
        return total <= (1 << exponent)
    return total.numerator << -exponent <= total.denominator


def summability_check(bounds: Sequence[LevelFailureBound], start: int) -> Dict[str, Any]:
    """Sum of sum_exact over levels n >= start against sum of 2^{-n} there."""
    selected = [bound for bound in bounds if bound.n >= start]
    total = sum((bound.sum_exact for bound in selected), Fraction(0))
    budget = sum((Fraction(1, 1 << bound.n) for bound in selected), Fraction(0))
    return {
        "start": start,
        "levels": [bound.n for bound in selected],
        "sum_exact": format_rational(total),
        "sum_2_pow_neg_n": format_rational(budget),
        "holds": total < budget if selected else None,
    }


def min_survivors(schedule: LevelSchedule, n: int) -> int:
    """Least s with s > q_n 2^{m_n}, the start of the bound's regime."""
    return floor(schedule.densities[n] * (1 << schedule.gap(n))) + 1


def node_checks_at_level(
    tree: FiniteTree, schedule: LevelSchedule, n: int
) -> List[Optional[NodeBoundCheck]]:
    """bound_check_at_node for every level-l_n node; None where out of regime."""
    checks = []
    for tau in tree.nodes_at(schedule.levels[n]):
        try:
            checks.append(bound_check_at_node(FailureQuery(tree, schedule, n, tau)))
        except PreconditionOutOfRegime as e:
            logger.warning(str(e))
            checks.append(None)
    return checks
