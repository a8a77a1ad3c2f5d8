"""Exact rational scalars and vectors.

Scalars are :class:`fractions.Fraction`; vectors are plain tuples of them.
The wire format is the string ``"p/q"`` (``"3"`` for integers, ``"inf"`` for
an infinite extended value).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

INF = math.inf

Scalar = Fraction
Vector = tuple  # tuple[Fraction, ...]
Number = Union[int, str, Fraction]


def Q(value: Number) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to an exact Fraction.

    Floats are rejected: silently converting 0.1 to 3602879701896397/2**55 is
    never what a caller of this package wants.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected int, Fraction or 'p/q' string, got {type(value).__name__}")


def parse_rational(text: str) -> Fraction:
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational of the form p/q: {text!r}") from None
    if d == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(n, d)


def parse_extended(text: str):
    if text.strip().lower() in ("inf", "+inf"):
        return INF
    return parse_rational(text)


def format_rational(value) -> str:
    if value == INF:
        return "inf"
    value = Q(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vec(*coords: Number) -> Vector:
    return tuple(Q(c) for c in coords)


def as_vector(coords: Iterable[Number]) -> Vector:
    return tuple(Q(c) for c in coords)


def zeros(d: int) -> Vector:
    return (Fraction(0),) * d


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def smul(t, u: Sequence[Fraction]) -> Vector:
    return tuple(t * a for a in u)


def neg(u: Sequence[Fraction]) -> Vector:
    return tuple(-a for a in u)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def is_zero(u: Sequence[Fraction]) -> bool:
    return all(a == 0 for a in u)
