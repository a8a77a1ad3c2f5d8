"""Minimal time function with constant polytope dynamics.

``T(x) = min{t >= 0 : (x + tF) meets Omega}`` where ``Omega`` is a finite
union of polytopes. For one piece ``P`` with vertices ``w_j`` and dynamics
vertices ``f_i`` the value is the LP

    min sum(lam)  s.t.  x + sum(lam_i f_i) = sum(mu_j w_j),  sum(mu) = 1,  lam, mu >= 0

since ``lam = t * (convex weights on F)``. The union value is the minimum over
pieces; the infimum is always attained, so finite values carry a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import lp
from .convex import Dynamics
from .errors import DimensionMismatch, InvalidInstance, NegativeScale
from .geometry import MAX_DIMENSION, NormKind, Polytope, contains, minkowski_sum
from .rational import INF, Q, add, as_vector, format_rational, neg, smul, sub

_T_DEFAULTS = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))


@dataclass(frozen=True)
class TargetSet:
    pieces: tuple

    def __post_init__(self):
        pieces = tuple(p if isinstance(p, Polytope) else Polytope(p) for p in self.pieces)
        if not pieces:
            raise InvalidInstance("target set needs at least one piece")
        d = pieces[0].dim
        if any(p.dim != d for p in pieces):
            raise InvalidInstance("all target pieces must share one dimension")
        object.__setattr__(self, "pieces", pieces)

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    @property
    def convex(self) -> bool:
        return len(self.pieces) == 1

    def contains(self, x) -> bool:
        return any(contains(P, x) for P in self.pieces)

    def active_pieces(self, x) -> list:
        return [P for P in self.pieces if contains(P, x)]


@dataclass(frozen=True)
class MinTimeInstance:
    norm: NormKind
    F: Dynamics
    target: TargetSet

    def __post_init__(self):
        object.__setattr__(self, "norm", NormKind.parse(self.norm))
        if not isinstance(self.F, Dynamics):
            object.__setattr__(self, "F", Dynamics(self.F))
        if not isinstance(self.target, TargetSet):
            object.__setattr__(self, "target", TargetSet(tuple(self.target)))
        d = self.F.dim
        if self.target.dim != d:
            raise InvalidInstance(f"dynamics has dimension {d}, target has {self.target.dim}")
        if not 1 <= d <= MAX_DIMENSION:
            raise InvalidInstance(f"dimension must be between 1 and {MAX_DIMENSION}, got {d}")

    @property
    def dim(self) -> int:
        return self.F.dim

    def with_target(self, target: TargetSet) -> "MinTimeInstance":
        return MinTimeInstance(self.norm, self.F, target)


@dataclass(frozen=True)
class Witness:
    """``w = x + t*f`` with ``f`` in F and ``w`` in the target."""

    t: Fraction
    f: tuple
    w: tuple
    piece: int


@dataclass(frozen=True)
class TimeValue:
    value: object  # Fraction or INF
    witness: Optional[Witness] = None

    @property
    def finite(self) -> bool:
        return self.value != INF


def _piece_lp(F: Dynamics, P: Polytope, x, objective=True) -> lp.LinearProgram:
    fv, wv = F.vertices, P.vertices
    n, m = len(fv), len(wv)
    cons = []
    for i in range(len(x)):
        row = tuple(f[i] for f in fv) + tuple(-w[i] for w in wv)
        cons.append((row, lp.EQ, -x[i]))
    cons.append(((0,) * n + (1,) * m, lp.EQ, 1))
    c = (1,) * n + (0,) * m if objective else (0,) * (n + m)
    return lp.LinearProgram(c, cons)


def _check(inst: MinTimeInstance, x) -> tuple:
    x = as_vector(x)
    if len(x) != inst.dim:
        raise DimensionMismatch(f"point has dimension {len(x)}, instance has {inst.dim}")
    return x


def eval_piece(F: Dynamics, P: Polytope, x, index: int = 0) -> TimeValue:
    out = lp.solve(_piece_lp(F, P, x))
    if not out.optimal:
        return TimeValue(INF)
    fv, wv = F.vertices, P.vertices
    n = len(fv)
    lam, mu = out.point[:n], out.point[n:]
    t = out.value
    w = tuple(sum((m_ * v[i] for m_, v in zip(mu, wv)), Fraction(0)) for i in range(len(x)))
    if t > 0:
        f = tuple(sum((l_ * v[i] for l_, v in zip(lam, fv)), Fraction(0)) / t for i in range(len(x)))
    else:
        f = fv[0]
    return TimeValue(t, Witness(t, f, w, index))


@lru_cache(maxsize=8192)
def _eval_cached(inst: MinTimeInstance, x: tuple) -> TimeValue:
    best = TimeValue(INF)
    for k, P in enumerate(inst.target.pieces):
        tv = eval_piece(inst.F, P, x, k)
        if tv.value < best.value:
            best = tv
            if tv.value == 0:
                break
    return best


def eval_T(inst: MinTimeInstance, x) -> TimeValue:
    return _eval_cached(inst, _check(inst, x))


def piece_values(inst: MinTimeInstance, x) -> list:
    """Per-piece minimal times at ``x``, in piece order."""
    x = _check(inst, x)
    return [eval_piece(inst.F, P, x, k).value for k, P in enumerate(inst.target.pieces)]


def dom_contains(inst: MinTimeInstance, x) -> bool:
    x = _check(inst, x)
    return any(lp.solve(_piece_lp(inst.F, P, x, objective=False)).feasible for P in inst.target.pieces)


@lru_cache(maxsize=512)
def _enlargement_cached(inst: MinTimeInstance, r: Fraction) -> TargetSet:
    # [0, r](-F) = conv({0} and -rF) because F is convex
    d = inst.dim
    segment = Polytope(((Fraction(0),) * d,) + tuple(smul(-r, f) for f in inst.F.vertices))
    return TargetSet(tuple(minkowski_sum(P, segment) for P in inst.target.pieces))


def enlargement(inst: MinTimeInstance, r) -> TargetSet:
    """The sublevel set ``{T <= r}`` as a union of per-piece polytopes."""
    r = Q(r)
    if r < 0:
        raise NegativeScale(f"enlargement radius must be nonnegative, got {format_rational(r)}")
    if r == 0:
        return inst.target
    return _enlargement_cached(inst, r)


def enlarged_instance(inst: MinTimeInstance, r) -> MinTimeInstance:
    return inst.with_target(enlargement(inst, r))


def dom_piece_generators(inst: MinTimeInstance, P: Polytope) -> tuple:
    """``dom T_P = P + cone(-F)`` as (vertices, recession generators)."""
    return P.vertices, tuple(neg(f) for f in inst.F.vertices)


def _max_step(vertices, rays, x, direction) -> Fraction:
    # max s in [0, 1] with x + s*direction in conv(vertices) + cone(rays)
    k, g = len(vertices), len(rays)
    cols = list(vertices) + list(rays)
    cons = []
    for i in range(len(x)):
        cons.append((tuple(c[i] for c in cols) + (-direction[i],), lp.EQ, x[i]))
    cons.append(((1,) * k + (0,) * g + (0,), lp.EQ, 1))
    cons.append(((0,) * (k + g) + (1,), lp.LE, 1))
    out = lp.solve(lp.LinearProgram((0,) * (k + g) + (1,), cons, sense="max"))
    return out.value if out.optimal else Fraction(-1)


def in_dom_interior(inst: MinTimeInstance, x) -> bool:
    """Sufficient test that T is finite, hence continuous, near ``x``.

    True when some piece attaining ``T(x)`` has ``x`` in the interior of its
    own domain ``P + cone(-F)``; for a single piece this is also necessary.
    Each interior test checks a positive step along every signed axis, which
    for a convex set is exact.
    """
    x = _check(inst, x)
    values = piece_values(inst, x)
    best = min(values)
    if best == INF:
        return False
    d = inst.dim
    axes = []
    for i in range(d):
        for s in (1, -1):
            axes.append(tuple(Fraction(s if k == i else 0) for k in range(d)))
    for P, v in zip(inst.target.pieces, values):
        if v != best:
            continue
        verts, rays = dom_piece_generators(inst, P)
        if all(_max_step(verts, rays, x, e) > 0 for e in axes):
            return True
    return False


@dataclass
class PropertyCheck:
    prop: str
    point: tuple
    passed: bool
    values: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "property": self.prop,
            "point": [format_rational(c) for c in self.point],
            "passed": self.passed,
            "values": {k: format_rational(v) if not isinstance(v, (bool, str)) else v
                       for k, v in self.values.items()},
        }


@dataclass
class PropertyReport:
    checks: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    @property
    def ok(self) -> bool:
        return not self.failures

    def count(self, prop: str) -> int:
        return sum(1 for c in self.checks if c.prop == prop)


def check_basic_properties(inst: MinTimeInstance, r, samples: Sequence, ts: Sequence = _T_DEFAULTS) -> PropertyReport:
    """Exact checks of the three basic identities on the given sample points.

    (i)   ``T(x) = 0`` iff ``x`` in the target;
    (ii)  ``T(x - t q) <= r + t`` for ``x`` in the r-enlargement, ``q`` a vertex of F;
    (iii) ``T(x) = T_r(x) + r`` for ``x`` outside the r-enlargement with finite T,
          where ``T_r`` is the minimal time to the enlargement.
    """
    r = Q(r)
    if not samples:
        raise ValueError("check_basic_properties needs at least one sample")
    report = PropertyReport()
    enlarged = enlarged_instance(inst, r)
    for x in samples:
        x = _check(inst, x)
        T = eval_T(inst, x).value
        inside = inst.target.contains(x)
        report.checks.append(PropertyCheck("i", x, (T == 0) == inside, {"T": T, "in_target": inside}))
        in_r = enlarged.target.contains(x)
        if in_r:
            for q in inst.F.vertices:
                for t in ts:
                    y = sub(x, smul(Q(t), q))
                    Ty = eval_T(inst, y).value
                    report.checks.append(PropertyCheck("ii", x, Ty <= r + t, {"t": Q(t), "T(x-tq)": Ty, "r+t": r + t}))
        elif T != INF:
            Tr = eval_T(enlarged, x).value
            report.checks.append(PropertyCheck("iii", x, T == Tr + r, {"T": T, "T_r": Tr, "r": r}))
    return report


def translate(x, t, f) -> tuple:
    return add(as_vector(x), smul(Q(t), as_vector(f)))
