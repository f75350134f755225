"""Exact scalars: rationals, the extended value -inf, and q-powers.

Rationals are :class:`fractions.Fraction` (always in lowest terms).  An
extended value is either a ``Fraction`` or :data:`NEG_INF`; using the float
``-inf`` means that addition and ``max`` already absorb it correctly.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .errors import NonIntegerExponent, ParseError

NEG_INF = float("-inf")
FLOAT_TOL = 1e-9

ExtValue = Union[Fraction, float]
Scalar = Union[Fraction, float]


def is_neg_inf(v) -> bool:
    return isinstance(v, float) and v == NEG_INF


def as_ext(v) -> ExtValue:
    """Coerce ints, Fractions, rational strings and '-inf' to an ExtValue."""
    if isinstance(v, str):
        return parse_ext(v)
    if is_neg_inf(v):
        return NEG_INF
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            raise ValueError(f"only -inf is allowed, got {v!r}")
        return v
    return Fraction(v)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}") from exc


def parse_ext(text: str) -> ExtValue:
    if text.strip() == "-inf":
        return NEG_INF
    return parse_rational(text)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_ext(v: ExtValue) -> str:
    if is_neg_inf(v):
        return "-inf"
    if isinstance(v, float):
        return repr(v)
    return format_rational(v)


def q_neg_pow(q, v: ExtValue, exact: bool = True) -> Scalar:
    """Return ``q ** (-v)``, with ``q ** inf = 0`` when ``v`` is -inf.

    In exact mode ``v`` must be an integer so that the result is rational.
    """
    if is_neg_inf(v):
        return Fraction(0) if exact else 0.0
    if exact:
        q = Fraction(q)
        if not 0 < q <= 1:
            raise ValueError(f"q must lie in (0, 1], got {q}")
        v = Fraction(v)
        if v.denominator != 1:
            raise NonIntegerExponent(f"exponent {v} is not an integer")
        return q ** (-v.numerator)
    q = float(q)
    if not 0 < q <= 1:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    return q ** (-float(v))


def sign(x: Scalar) -> int:
    """Sign of a scalar; floats within FLOAT_TOL of zero count as zero."""
    if isinstance(x, float):
        if abs(x) <= FLOAT_TOL:
            return 0
        return 1 if x > 0 else -1
    return (x > 0) - (x < 0)


def factorial(k: int) -> int:
    return math.factorial(k)
