"""Exact hypergeometric probabilities as Fractions."""

from fractions import Fraction
from math import comb

from src.core.exceptions import InvalidInputError


def _check(population: int, successes: int, draws: int) -> None:
    if population < 0 or successes < 0 or draws < 0:
        raise InvalidInputError("Hypergeometric parameters must be non-negative")
    if successes > population:
        raise InvalidInputError(f"K={successes} exceeds N={population}")
    if draws > population:
        raise InvalidInputError(f"d={draws} exceeds N={population}")


def hypergeom_pmf(population: int, successes: int, draws: int, k: int) -> Fraction:
    """P(exactly k successes) in d draws without replacement from N with K successes."""
    _check(population, successes, draws)
    if k < 0 or k > draws or k > successes or draws - k > population - successes:
        return Fraction(0)
    return Fraction(
        comb(successes, k) * comb(population - successes, draws - k),
        comb(population, draws),
    )


def hypergeom_zero_prob(population: int, successes: int, draws: int) -> Fraction:
    """C(N-K, d) / C(N, d): a uniform d-subset avoids all K successes.

    Args:
        population: N
        successes: K <= N
        draws: d <= N

    Returns:
        The exact probability; 0 when d > N - K
    """
    _check(population, successes, draws)
    if draws > population - successes:
        return Fraction(0)
    return Fraction(comb(population - successes, draws), comb(population, draws))


def hypergeom_lower_tail(population: int, successes: int, draws: int, k: int) -> Fraction:
    """P(at most k successes)."""
    _check(population, successes, draws)
    return sum(
        (hypergeom_pmf(population, successes, draws, j) for j in range(0, k + 1)),
        Fraction(0),
    )
