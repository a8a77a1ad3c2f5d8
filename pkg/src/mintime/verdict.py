"""Membership verdicts and their certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .rational import format_rational


@dataclass(frozen=True)
class OptimalValue:
    """Exact value of the deciding optimization problem."""

    value: Fraction

    def to_json(self):
        return {"kind": "optimal_value", "value": format_rational(self.value)}


@dataclass(frozen=True)
class ViolatingPoint:
    """A point whose recorded value strictly exceeds ``bound``."""

    point: tuple
    value: Fraction
    bound: Fraction = Fraction(0)

    def __post_init__(self):
        if not self.value > self.bound:
            raise ValueError("a violating point must exceed its bound")

    def to_json(self):
        return {
            "kind": "violating_point",
            "point": [format_rational(c) for c in self.point],
            "value": format_rational(self.value),
            "bound": format_rational(self.bound),
        }


@dataclass(frozen=True)
class RecessionRay:
    """Direction along which the admissible bound is exceeded without limit."""

    ray: tuple
    value: Fraction

    def to_json(self):
        return {
            "kind": "recession_ray",
            "ray": [format_rational(c) for c in self.ray],
            "value": format_rational(self.value),
        }


Certificate = Union[OptimalValue, ViolatingPoint, RecessionRay]


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of an ``x* in S`` query.

    ``conjunct`` names the failing part of a conjunctive formula, ``approximate``
    flags verdicts that come from an inner approximation rather than an exact
    characterization, and ``details`` carries the exact auxiliary values.
    """

    member: bool
    certificate: Optional[Certificate] = None
    conjunct: Optional[str] = None
    approximate: bool = False
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.member

    def to_json(self):
        out = {
            "member": self.member,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "approximate": self.approximate,
        }
        if self.conjunct is not None:
            out["failed_conjunct"] = self.conjunct
        if self.details:
            out["details"] = {k: _json_value(v) for k, v in self.details.items()}
        return out


def _json_value(v):
    if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
        return format_rational(v)
    if isinstance(v, float):
        return format_rational(v)  # only +inf reaches here
    if isinstance(v, tuple):
        return [_json_value(c) for c in v]
    if isinstance(v, MembershipVerdict):
        return v.to_json()
    return v
