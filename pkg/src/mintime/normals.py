"""Fréchet normal cones, eps-normal sets and horizontal epigraph normals.

All tests are exact. For a convex piece ``P`` and ``xbar`` in ``P``:

* ``x*`` is a Fréchet normal iff ``<x*, v - xbar> <= 0`` at every vertex ``v``;
* ``x*`` is an eps-normal iff ``max_{x in P} <x*, x - xbar> - eps|x - xbar| <= 0``,
  one LP because the norm is a maximum of linear forms.

A finite union of closed sets has, at ``xbar``, the intersection of the cones
of the pieces that contain ``xbar``; pieces missing ``xbar`` sit at positive
distance and do not see it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import lp
from .core import TargetSet
from .errors import DimensionMismatch, NotInDomain, NotInSet
from .geometry import NormKind, Polytope, contains, contains_with_recession, norm_pieces
from .rational import Q, as_vector, dot, format_rational, sub
from .verdict import MembershipVerdict, OptimalValue, RecessionRay, ViolatingPoint


def _target(T) -> TargetSet:
    if isinstance(T, TargetSet):
        return T
    if isinstance(T, Polytope):
        return TargetSet((T,))
    return TargetSet(tuple(T))


def _active(T: TargetSet, xbar) -> list:
    if len(xbar) != T.dim:
        raise DimensionMismatch(f"point has dimension {len(xbar)}, target has {T.dim}")
    active = [(k, P) for k, P in enumerate(T.pieces) if contains(P, xbar)]
    if not active:
        raise NotInSet(f"{[format_rational(c) for c in xbar]} is not in the set")
    return active


def _vertex_check(P: Polytope, xbar, xstar):
    """Largest ``<x*, v - xbar>`` over vertices and the first vertex attaining it."""
    best, arg = None, None
    for v in P.vertices:
        val = dot(xstar, sub(v, xbar))
        if best is None or val > best:
            best, arg = val, v
    return best, arg


def frechet_normal_membership(T, xbar, xstar) -> MembershipVerdict:
    T = _target(T)
    xbar, xstar = as_vector(xbar), as_vector(xstar)
    active = _active(T, xbar)
    overall = None
    for k, P in active:
        best, v = _vertex_check(P, xbar, xstar)
        if best > 0:
            return MembershipVerdict(False, ViolatingPoint(v, best), conjunct=f"normal_cone[piece {k}]",
                                     details={"active_pieces": len(active)})
        overall = best if overall is None else max(overall, best)
    return MembershipVerdict(True, OptimalValue(overall), details={"active_pieces": len(active)})


def _eps_lp(P: Polytope, kind: NormKind, xbar, xstar, eps) -> lp.LinearProgram:
    # variables: mu (simplex weights on P's vertices), s (free); maximize s
    verts = P.vertices
    m = len(verts)
    cons = []
    base = dot(xstar, xbar)
    for ell in norm_pieces(len(xbar), kind):
        row = tuple(-dot(xstar, v) + eps * dot(ell, v) for v in verts) + (1,)
        cons.append((row, lp.LE, -base + eps * dot(ell, xbar)))
    cons.append(((1,) * m + (0,), lp.EQ, 1))
    return lp.LinearProgram((0,) * m + (1,), cons, lower=(0,) * m + (None,), sense="max")


def eps_normal_membership(T, norm: NormKind, xbar, xstar, eps) -> MembershipVerdict:
    T = _target(T)
    xbar, xstar, eps = as_vector(xbar), as_vector(xstar), Q(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    norm = NormKind.parse(norm)
    active = _active(T, xbar)
    overall = None
    for k, P in active:
        out = lp.solve(_eps_lp(P, norm, xbar, xstar, eps))
        value = out.value
        if value > 0:
            mu = out.point[:-1]
            x = tuple(sum((w * v[i] for w, v in zip(mu, P.vertices)), Fraction(0)) for i in range(len(xbar)))
            return MembershipVerdict(False, ViolatingPoint(x, value), conjunct=f"eps_normal[piece {k}]",
                                     details={"eps": eps, "active_pieces": len(active)})
        overall = value if overall is None else max(overall, value)
    return MembershipVerdict(True, OptimalValue(overall), details={"eps": eps, "active_pieces": len(active)})


@dataclass(frozen=True)
class DomainData:
    """``conv(vertices) + cone(recession)``; the recession list may be empty."""

    vertices: tuple
    recession: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(as_vector(v) for v in self.vertices))
        object.__setattr__(self, "recession", tuple(as_vector(g) for g in self.recession))


def epigraph_singular_membership(dom: DomainData, xbar, xstar) -> MembershipVerdict:
    """Is ``(x*, 0)`` a Fréchet normal to the epigraph of a convex function at ``xbar``?

    The epigraph is unbounded upward and the vertical component vanishes, so
    this is the normal cone of the domain: nonpositive pairing with every
    recession generator and with every ``v - xbar``.
    """
    xbar, xstar = as_vector(xbar), as_vector(xstar)
    if len(xbar) != len(dom.vertices[0]) or len(xstar) != len(xbar):
        raise DimensionMismatch("domain, point and x* must share one dimension")
    if not contains_with_recession(dom.vertices, dom.recession, xbar):
        raise NotInDomain(f"{[format_rational(c) for c in xbar]} is not in the domain")
    for g in dom.recession:
        val = dot(xstar, g)
        if val > 0:
            return MembershipVerdict(False, RecessionRay(g, val), conjunct="recession")
    best, v = None, None
    for w in dom.vertices:
        val = dot(xstar, sub(w, xbar))
        if best is None or val > best:
            best, v = val, w
    if best > 0:
        return MembershipVerdict(False, ViolatingPoint(v, best), conjunct="domain_vertex")
    return MembershipVerdict(True, OptimalValue(best))


def normal_direction_lp(pieces: Sequence[Polytope], xbar, objective) -> lp.LinearProgram:
    """Maximize ``<objective, x*>`` over Fréchet normals at ``xbar`` with ``|x*|_1 <= 1``.

    Used to pull explicit normal vectors out of a V-represented cone.
    Variables are ``x* = p - q`` with ``p, q >= 0`` so the l1 bound is linear.
    """
    d = len(xbar)
    cons = []
    for P in pieces:
        for v in P.vertices:
            diff = sub(v, xbar)
            if any(diff):
                cons.append((tuple(diff) + tuple(-c for c in diff), lp.LE, 0))
    cons.append(((1,) * (2 * d), lp.LE, 1))
    c = tuple(objective) + tuple(-c for c in objective)
    return lp.LinearProgram(c, cons, sense="max")


def extract_normal(pieces: Sequence[Polytope], xbar, objective):
    """A nonzero normal at ``xbar`` maximizing ``objective``, or None."""
    out = lp.solve(normal_direction_lp(pieces, xbar, objective))
    if not out.optimal or out.value <= 0:
        return None
    d = len(xbar)
    return tuple(out.point[i] - out.point[d + i] for i in range(d))
