"""Polyhedral convex functions: max of affine pieces on a polytope domain."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .geometry import Polytope, contains
from .rational import INF, Q, as_vector, dot
from .verdict import MembershipVerdict, OptimalValue, ViolatingPoint


@dataclass(frozen=True)
class PolyhedralConvexFunction:
    """``f(x) = max_j <a_j, x> + b_j`` on ``domain``, ``+inf`` elsewhere."""

    pieces: tuple  # ((slope, intercept), ...)
    domain: Polytope

    def __post_init__(self):
        pieces = tuple((as_vector(a), Q(b)) for a, b in self.pieces)
        if not pieces:
            raise ValueError("need at least one affine piece")
        if not isinstance(self.domain, Polytope):
            object.__setattr__(self, "domain", Polytope(self.domain))
        d = self.domain.dim
        if any(len(a) != d for a, _ in pieces):
            raise ValueError("slopes must match the domain dimension")
        object.__setattr__(self, "pieces", pieces)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, x):
        x = as_vector(x)
        if not contains(self.domain, x):
            return INF
        return self.affine_max(x)

    def affine_max(self, x) -> Fraction:
        return max(dot(a, x) + b for a, b in self.pieces)

    def active_slope(self, x):
        """Slope of the first affine piece attaining the maximum at ``x``."""
        x = as_vector(x)
        top = self.affine_max(x)
        for a, b in self.pieces:
            if dot(a, x) + b == top:
                return a
        raise AssertionError("unreachable")


def subgradient_check(f: PolyhedralConvexFunction, xbar, xstar) -> MembershipVerdict:
    """Exact test of ``<x*, x - xbar> <= f(x) - f(xbar)`` for all ``x``.

    One LP: minimize ``s - <x*, x>`` over ``x = sum(mu v)`` in the domain with
    ``s >= <a_j, x> + b_j``. Vertices alone are not enough because
    ``f - <x*, .>`` is convex, so its minimum can sit inside the domain.
    """
    xbar, xstar = as_vector(xbar), as_vector(xstar)
    verts = f.domain.vertices
    m = len(verts)
    cons = []
    for a, b in f.pieces:
        cons.append((tuple(dot(a, v) for v in verts) + (-1,), lp.LE, -b))
    cons.append(((1,) * m + (0,), lp.EQ, 1))
    c = tuple(-dot(xstar, v) for v in verts) + (1,)
    out = lp.solve(lp.LinearProgram(c, cons, lower=(0,) * m + (None,)))
    # min over x of f(x) - <x*, x - xbar> - f(xbar)
    gap = out.value + dot(xstar, xbar) - f.affine_max(xbar)
    if gap >= 0:
        return MembershipVerdict(True, OptimalValue(gap))
    mu = out.point[:m]
    x = tuple(sum((w * v[i] for w, v in zip(mu, verts)), Fraction(0)) for i in range(f.dim))
    return MembershipVerdict(False, ViolatingPoint(x, -gap), conjunct="subgradient_inequality")
