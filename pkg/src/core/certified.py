"""Certified enclosures of transcendental quantities via mpmath interval arithmetic.

Every function returns exact Fractions bounding the true value; the
endpoints come from outward-rounded interval arithmetic.
"""

import threading
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Tuple

from mpmath import iv
from mpmath.libmp import to_rational

DEFAULT_PRECISION = 128
MAX_PRECISION = 1 << 14

_precision_lock = threading.Lock()


@contextmanager
def _interval_precision(bits: int) -> Iterator[None]:
    with _precision_lock:
        saved = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = saved


def _endpoints(interval) -> Tuple[Fraction, Fraction]:
    low, high = interval._mpi_
    return Fraction(*to_rational(low)), Fraction(*to_rational(high))


def _interval_of(value: Fraction):
    value = Fraction(value)
    return iv.mpf(value.numerator) / iv.mpf(value.denominator)


def exp_neg_upper(exponent: Fraction, precision: int = DEFAULT_PRECISION) -> Fraction:
    """A rational upper bound on e**(-exponent)."""
    with _interval_precision(precision):
        enclosure = iv.exp(-_interval_of(exponent))
        _, high = _endpoints(enclosure)
    return high


def exp_neg_enclosure(
    exponent: Fraction, precision: int = DEFAULT_PRECISION
) -> Tuple[Fraction, Fraction]:
    """Rational bounds low <= e**(-exponent) <= high."""
    with _interval_precision(precision):
        return _endpoints(iv.exp(-_interval_of(exponent)))


def at_most_exp_neg(value: Fraction, exponent: Fraction) -> bool:
    """Decide value <= e**(-exponent), refining the precision until certain.

    Raises ArithmeticError if the enclosures never separate (equality, which
    needs exponent == 0 for a rational value).
    """
    value = Fraction(value)
    if exponent == 0:
        return value <= 1
    precision = DEFAULT_PRECISION
    while precision <= MAX_PRECISION:
        low, high = exp_neg_enclosure(exponent, precision)
        if value <= low:
            return True
        if value > high:
            return False
        precision *= 2
    raise ArithmeticError(f"Could not compare {value} with exp(-{exponent})")


def e_enclosure(precision: int = DEFAULT_PRECISION) -> Tuple[Fraction, Fraction]:
    """Rational bounds low <= e <= high."""
    with _interval_precision(precision):
        return _endpoints(+iv.e)


def log2_enclosure(n: int, precision: int = DEFAULT_PRECISION) -> Tuple[Fraction, Fraction]:
    """Rational bounds low <= log2(n) <= high for a positive integer n."""
    with _interval_precision(precision):
        enclosure = iv.ln(iv.mpf(n)) / iv.ln(iv.mpf(2))
        return _endpoints(enclosure)


def compare_with_log2_multiple(value: Fraction, coeff: int, n: int) -> bool:
    """Decide value > coeff*log2(n) when log2(n) is irrational.

    Raises ArithmeticError if the enclosures never separate, which can only
    happen for equality, impossible for irrational log2(n).
    """
    precision = DEFAULT_PRECISION
    while precision <= MAX_PRECISION:
        low, high = log2_enclosure(n, precision)
        if value > coeff * high:
            return True
        if value < coeff * low:
            return False
        precision *= 2
    raise ArithmeticError(f"Could not separate {value} from {coeff}*log2({n})")
