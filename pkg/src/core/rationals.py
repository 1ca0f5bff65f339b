"""Helpers for exact rationals and binary strings."""

import sys
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Union

from src.core.exceptions import InvalidInputError

RationalLike = Union[Fraction, int, str]


@contextmanager
def _unlimited_int_digits() -> Iterator[None]:
    """Lift the interpreter's int/str conversion limit for huge dyadic values."""
    getter = getattr(sys, "get_int_max_str_digits", None)
    setter = getattr(sys, "set_int_max_str_digits", None)
    if getter is None or setter is None:
        yield
        return
    previous = getter()
    setter(0)
    try:
        yield
    finally:
        setter(previous)


def int_to_digits(value: int) -> str:
    """Decimal digits of an arbitrarily large integer."""
    try:
        return str(value)
    except ValueError:
        with _unlimited_int_digits():
            return str(value)


def digits_to_int(text: str) -> int:
    """Parse decimal digits of an arbitrarily large integer."""
    try:
        return int(text)
    except ValueError:
        with _unlimited_int_digits():
            return int(text)


def format_rational(value: RationalLike) -> str:
    """Serialize a rational as a "p/q" string (never as a float)."""
    value = Fraction(value)
    return f"{int_to_digits(value.numerator)}/{int_to_digits(value.denominator)}"


def parse_rational(text: RationalLike) -> Fraction:
    """Parse "p/q", "p" or an existing rational into a Fraction."""
    if isinstance(text, (Fraction, int)):
        return Fraction(text)
    raw = str(text).strip()
    try:
        if "/" in raw:
            num, den = raw.split("/", 1)
            return Fraction(digits_to_int(num.strip()), digits_to_int(den.strip()))
        return Fraction(digits_to_int(raw))
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidInputError(f"Not an exact rational: '{raw}' ({str(e)})")


def check_bits(bits: str, what: str = "bit string") -> str:
    """Validate that a string consists only of '0' and '1'."""
    if not isinstance(bits, str) or any(ch not in "01" for ch in bits):
        raise InvalidInputError(f"Invalid {what}: {bits!r} (expected only 0/1)")
    return bits


def ceil_log2(value: int) -> int:
    """Exact ceiling of log2 for a positive integer."""
    if value < 1:
        raise InvalidInputError(f"ceil_log2 needs a positive integer, got {value}")
    return (value - 1).bit_length()


def all_strings(length: int) -> Iterator[str]:
    """Every binary string of the given length, in lexicographic order."""
    if length == 0:
        yield ""
        return
    for index in range(1 << length):
        yield format(index, f"0{length}b")
