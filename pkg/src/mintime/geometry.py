"""Vertex-represented rational polytopes and polyhedral norms.

Only V-representations are stored. Every facet-type question (membership,
redundancy of a point, normal-cone tests) is answered by a small LP over the
vertex list, so the same code path works in every supported dimension.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from . import lp
from .errors import DimensionMismatch, InvalidPolytope, NegativeScale
from .rational import Q, Vector, add, as_vector, dot, format_rational, parse_rational, smul

MAX_DIMENSION = 4


class NormKind(str, enum.Enum):
    L1 = "l1"
    LINF = "linf"

    @classmethod
    def parse(cls, text) -> "NormKind":
        if isinstance(text, NormKind):
            return text
        key = str(text).strip().lower().replace("∞", "inf")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown norm {text!r}; expected 'l1' or 'linf'")

    @property
    def dual(self) -> "NormKind":
        return NormKind.LINF if self is NormKind.L1 else NormKind.L1


@dataclass(frozen=True)
class Polytope:
    """Convex hull of a nonempty finite list of rational points.

    The vertex list may contain redundant points until :func:`prune_vertices`
    is applied; all operations are correct either way.
    """

    vertices: tuple

    def __post_init__(self):
        verts = tuple(as_vector(v) for v in self.vertices)
        if not verts:
            raise InvalidPolytope("a polytope needs at least one vertex")
        d = len(verts[0])
        if d < 1:
            raise InvalidPolytope("vertices must have at least one coordinate")
        if any(len(v) != d for v in verts):
            raise InvalidPolytope("all vertices must have the same dimension")
        # duplicates carry no information and inflate every LP
        seen = dict.fromkeys(verts)
        object.__setattr__(self, "vertices", tuple(seen))

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def __len__(self) -> int:
        return len(self.vertices)

    @classmethod
    def point(cls, x: Iterable) -> "Polytope":
        return cls((as_vector(x),))

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "Polytope":
        lo, hi = as_vector(lo), as_vector(hi)
        return cls(tuple(product(*zip(lo, hi))))

    @classmethod
    def cross(cls, d: int, radius=1) -> "Polytope":
        """The l1 ball of the given radius (the 'diamond' in 2-D)."""
        r = Q(radius)
        verts = []
        for i in range(d):
            for s in (1, -1):
                verts.append(tuple(s * r if k == i else Fraction(0) for k in range(d)))
        return cls(tuple(verts))

    def to_json(self) -> dict:
        return {"vertices": [[format_rational(c) for c in v] for v in self.vertices]}

    @classmethod
    def from_json(cls, data) -> "Polytope":
        if not isinstance(data, dict) or "vertices" not in data:
            raise InvalidPolytope("polytope JSON must be an object with a 'vertices' list")
        verts = []
        for v in data["vertices"]:
            verts.append(tuple(parse_rational(str(c)) for c in v))
        return cls(tuple(verts))


def _check_dim(P: Polytope, x: Sequence) -> None:
    if len(x) != P.dim:
        raise DimensionMismatch(f"point has dimension {len(x)}, polytope has {P.dim}")


def hull_lp(vertices: Sequence[Vector], x: Sequence[Fraction], rays: Sequence[Vector] = ()) -> lp.LinearProgram:
    """Feasibility LP for ``x in conv(vertices) + cone(rays)``."""
    d = len(x)
    k = len(vertices)
    cols = list(vertices) + list(rays)
    cons = [(tuple(c[i] for c in cols), lp.EQ, x[i]) for i in range(d)]
    cons.append((tuple([1] * k + [0] * len(rays)), lp.EQ, 1))
    return lp.LinearProgram((0,) * len(cols), cons)


def contains(P: Polytope, x: Sequence) -> bool:
    x = as_vector(x)
    _check_dim(P, x)
    if x in P.vertices:
        return True
    if len(P) == 1:
        return False
    return lp.solve(hull_lp(P.vertices, x)).feasible


def contains_with_recession(vertices: Sequence[Vector], rays: Sequence[Vector], x: Sequence) -> bool:
    x = as_vector(x)
    if x in vertices:
        return True
    return lp.solve(hull_lp(vertices, x, rays)).feasible


def prune_vertices(P: Polytope) -> Polytope:
    """Drop every listed point that lies in the hull of the remaining ones.

    Each removal is decided by an exact membership LP against the current
    survivors, so the hull never changes.
    """
    verts = list(P.vertices)
    if len(verts) <= 1:
        return P
    keep = _extreme_by_coordinates(verts)
    i = 0
    while i < len(verts):
        v = verts[i]
        if v in keep or len(verts) == 1:
            i += 1
            continue
        others = verts[:i] + verts[i + 1:]
        if lp.solve(hull_lp(others, v)).feasible:
            verts.pop(i)
        else:
            i += 1
    return Polytope(tuple(verts))


def _extreme_by_coordinates(verts):
    # Lexicographic extremes along +-e_i are always vertices; skipping their LPs
    # is a pure speedup.
    out = set()
    d = len(verts[0])
    for i in range(d):
        order = [v[i:] + v[:i] for v in verts]
        out.add(verts[order.index(min(order))])
        out.add(verts[order.index(max(order))])
    return out


def minkowski_sum(P: Polytope, Q_: Polytope) -> Polytope:
    if P.dim != Q_.dim:
        raise DimensionMismatch(f"cannot add polytopes of dimension {P.dim} and {Q_.dim}")
    return prune_vertices(Polytope(tuple(add(p, q) for p in P.vertices for q in Q_.vertices)))


def scale(P: Polytope, t) -> Polytope:
    t = Q(t)
    if t < 0:
        raise NegativeScale(f"scale factor must be nonnegative, got {format_rational(t)}")
    return Polytope(tuple(smul(t, v) for v in P.vertices))


def norm_pieces(d: int, kind: NormKind) -> list:
    """Linear forms whose pointwise maximum is the norm."""
    kind = NormKind.parse(kind)
    if kind is NormKind.LINF:
        out = []
        for i in range(d):
            for s in (1, -1):
                out.append(tuple(Fraction(s if k == i else 0) for k in range(d)))
        return out
    return [tuple(Fraction(s) for s in signs) for signs in product((1, -1), repeat=d)]


def unit_ball_vertices(d: int, kind: NormKind) -> list:
    """Vertices of the closed unit ball; the ball of one norm is spanned by the
    linear pieces of its dual."""
    return norm_pieces(d, NormKind.parse(kind).dual)


def polyhedral_norm(x: Sequence, kind: NormKind) -> Fraction:
    kind = NormKind.parse(kind)
    x = as_vector(x)
    if kind is NormKind.L1:
        return sum((abs(c) for c in x), Fraction(0))
    return max((abs(c) for c in x), default=Fraction(0))


def dual_norm(x: Sequence, kind: NormKind) -> Fraction:
    return polyhedral_norm(x, NormKind.parse(kind).dual)


def norm_of_set(F: Polytope, kind: NormKind) -> Fraction:
    return max(polyhedral_norm(v, kind) for v in F.vertices)


def diameter(P: Polytope, kind: NormKind) -> Fraction:
    verts = P.vertices
    best = Fraction(0)
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            best = max(best, polyhedral_norm(tuple(a - b for a, b in zip(u, v)), kind))
    return best


def centroid(P: Polytope) -> Vector:
    k = len(P)
    return tuple(sum(c) / k for c in zip(*P.vertices))


def max_linear(P: Polytope, c: Sequence) -> Fraction:
    return max(dot(c, v) for v in P.vertices)
