"""Exact rational numbers.

Every utility, probability and tolerance in the package is a
:class:`fractions.Fraction`; this module adds the canonical text form used
by the file formats and reports, plus a couple of helpers that make the
canonical-form contract explicit.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

_LITERAL = re.compile(r"([+-]?[0-9]+)(?:/([0-9]+))?\Z")

Rational = Fraction
RationalLike = Union[Fraction, int, str]

LT, EQ, GT = -1, 0, 1


def normalize(n: int, d: int) -> Fraction:
    """Return ``n/d`` in lowest terms with a positive denominator."""
    if d == 0:
        raise ZeroDivisionError("zero denominator")
    return Fraction(n, d)


def compare(a: Fraction, b: Fraction) -> int:
    """Three-way comparison: ``LT``, ``EQ`` or ``GT``."""
    if a < b:
        return LT
    if a > b:
        return GT
    return EQ


def parse_rational(token: str) -> Fraction:
    """Parse ``p/q`` or ``p``. Decimal and float spellings are rejected."""
    m = _LITERAL.match(token.strip())
    if m is None:
        raise ValueError(f"not a rational literal: {token!r}")
    d = int(m.group(2)) if m.group(2) is not None else 1
    if d == 0:
        raise ValueError(f"zero denominator in {token!r}")
    return Fraction(int(m.group(1)), d)


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def fmt(value: Fraction) -> str:
    """Canonical ``p/q`` form, ``p`` for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def fmt_vector(values: Iterable[Fraction], sep: str = " ") -> str:
    return sep.join(fmt(v) for v in values)


try:  # gmpy2 rationals are an order of magnitude faster inside pivot loops
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = None


def fast(value) -> "Fraction":
    """Convert to the fastest available exact rational type (internal use)."""
    if _mpq is None:
        return to_rational(value)
    if isinstance(value, Fraction):
        return _mpq(value.numerator, value.denominator)
    return _mpq(value)


def exact(value) -> Fraction:
    """Back from :func:`fast` to a plain :class:`~fractions.Fraction`."""
    if isinstance(value, Fraction):
        return value
    return Fraction(int(value.numerator), int(value.denominator))
