"""Definition-based oracles.

Nothing in this module knows any subdifferential formula: values come from
the defining infimum (grid search, joint LPs over ``T``'s own description) or
from sampled difference quotients. The formula module is checked against
these, never the other way round.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from . import lp
from .convex import Dynamics, gauge, gauge_lipschitz
from .core import MinTimeInstance, TargetSet, dom_piece_generators, eval_T, piece_values
from .errors import ConvexOracleUnavailable, InvalidParams, NotInDomain
from .geometry import (
    MAX_DIMENSION,
    NormKind,
    Polytope,
    contains,
    diameter,
    norm_pieces,
    polyhedral_norm,
    prune_vertices,
    unit_ball_vertices,
)
from .normals import DomainData, epigraph_singular_membership, extract_normal
from .polyfn import PolyhedralConvexFunction
from .rational import INF, Q, add, as_vector, dot, format_rational, smul, sub
from .verdict import MembershipVerdict, OptimalValue, RecessionRay, ViolatingPoint

SAMPLED_TOLERANCE = Fraction(1, 10**9)


@dataclass(frozen=True)
class SamplingPlan:
    radii: tuple
    points_per_radius: int = 16
    seed: int = 0

    def __post_init__(self):
        radii = tuple(Q(r) for r in self.radii)
        if not radii or any(r <= 0 for r in radii):
            raise InvalidParams("radii must be positive")
        if any(a <= b for a, b in zip(radii, radii[1:])):
            raise InvalidParams("radii must be strictly decreasing")
        if self.points_per_radius < 1:
            raise InvalidParams("points_per_radius must be at least 1")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def default(cls, seed: int = 0) -> "SamplingPlan":
        return cls(tuple(Fraction(1, 4**k) for k in range(2, 7)), 16, seed)


def unit_directions(d: int, norm: NormKind, count: int, rng: random.Random) -> list:
    """Ball vertices, signed axes and ``count`` random rational unit vectors."""
    out = list(dict.fromkeys(unit_ball_vertices(d, norm) + unit_ball_vertices(d, NormKind.parse(norm).dual)))
    out = [tuple(c / polyhedral_norm(u, norm) for c in u) for u in out]
    added = 0
    while added < count:
        u = tuple(Fraction(rng.randint(-12, 12)) for _ in range(d))
        nu = polyhedral_norm(u, norm)
        if nu == 0:
            continue
        out.append(tuple(c / nu for c in u))
        added += 1
    return list(dict.fromkeys(out))


def _lattice(m: int, N: int):
    # compositions of N into m nonnegative parts
    for bars in combinations(range(N + m - 1), m - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(N + m - 2 - prev)
        yield parts


def brute_force_T(inst: MinTimeInstance, x, grid_step) -> tuple:
    """Grid minimization of ``gauge(F, w - x)`` over barycentric lattices of the pieces.

    ``grid_step = 1/N`` sets the lattice resolution. Any point of a piece with
    ``m`` vertices is within ``m * diam / (2N)`` of a lattice point, and the
    gauge is ``L``-Lipschitz with ``L`` its maximum on the unit ball, which
    gives the returned error bound (``INF`` when 0 is not interior to F).
    """
    x = as_vector(x)
    step = Q(grid_step)
    if step <= 0:
        raise InvalidParams("grid step must be positive")
    N = math.ceil(1 / step)
    best = INF
    bound = Fraction(0)
    L = gauge_lipschitz(inst.F, inst.norm)
    for P in inst.target.pieces:
        verts = P.vertices
        m = len(verts)
        for parts in _lattice(m, N):
            w = tuple(sum((Fraction(p, N) * v[i] for p, v in zip(parts, verts)), Fraction(0)) for i in range(len(x)))
            g = gauge(inst.F, sub(w, x))
            if g < best:
                best = g
        if m > 1:
            piece_bound = INF if L == INF else L * diameter(P, inst.norm) * m / (2 * N)
            bound = max(bound, piece_bound)
    return best, bound


def _single_piece(inst: MinTimeInstance) -> Polytope:
    if not inst.target.convex:
        raise ConvexOracleUnavailable("the exact subgradient oracle needs a single convex target piece")
    return inst.target.pieces[0]


def subgradient_inequality_exact(inst: MinTimeInstance, xbar, xstar, slack=0) -> MembershipVerdict:
    """Decide ``<x*, x - xbar> <= T(x) - T(xbar) + slack |x - xbar|`` for all ``x``.

    Single LP over ``(x, lam, mu, s)`` with ``x + sum(lam f) = sum(mu w)``,
    ``sum(mu) = 1`` and ``s >= l(x - xbar)`` for each linear piece ``l`` of the
    norm, minimizing ``sum(lam) - <x*, x> + slack*s``. Since ``x = xbar`` is
    feasible the optimum is at most ``T(xbar)``; membership is equality.
    """
    P = _single_piece(inst)
    xbar, xstar, slack = as_vector(xbar), as_vector(xstar), Q(slack)
    if slack < 0:
        raise InvalidParams("slack must be nonnegative")
    Tbar = eval_T(inst, xbar).value
    if Tbar == INF:
        raise NotInDomain("T(xbar) is infinite")
    d = len(xbar)
    fv, wv = inst.F.vertices, P.vertices
    n, m = len(fv), len(wv)
    use_s = slack > 0
    nvar = d + n + m + (1 if use_s else 0)
    cons = []
    for i in range(d):
        row = [Fraction(0)] * nvar
        row[i] = Fraction(1)
        for k, f in enumerate(fv):
            row[d + k] = f[i]
        for k, w in enumerate(wv):
            row[d + n + k] = -w[i]
        cons.append((tuple(row), lp.EQ, 0))
    cons.append(((0,) * (d + n) + (1,) * m + ((0,) if use_s else ()), lp.EQ, 1))
    if use_s:
        for ell in norm_pieces(d, inst.norm):
            row = tuple(ell) + (0,) * (n + m) + (-1,)
            cons.append((row, lp.LE, dot(ell, xbar)))
    c = tuple(-v for v in xstar) + (1,) * n + (0,) * m + ((slack,) if use_s else ())
    lower = (None,) * d + (0,) * (n + m) + ((None,) if use_s else ())
    out = lp.solve(lp.LinearProgram(c, cons, lower))
    details = {"T(xbar)": Tbar, "slack": slack}
    if out.status is lp.Status.UNBOUNDED:
        ray = out.ray[:d]
        return MembershipVerdict(False, RecessionRay(ray, -dot(c, out.ray)), conjunct="subgradient_inequality",
                                 details=details)
    value = out.value + dot(xstar, xbar)
    details["min_value"] = value
    if value >= Tbar:
        return MembershipVerdict(True, OptimalValue(value), details=details)
    return MembershipVerdict(False, ViolatingPoint(out.point[:d], Tbar - value), conjunct="subgradient_inequality",
                             details=details)


def epigraph_singular_oracle(inst: MinTimeInstance, xbar, xstar) -> MembershipVerdict:
    """``(x*, 0)`` normal to ``epi T`` at ``(xbar, T(xbar))``, from the domain of T alone.

    ``epi T`` is the union of the epigraphs of the per-piece times ``T_i``, and
    only the pieces with ``T_i(xbar) = T(xbar)`` pass through the base point;
    each of those is convex with domain ``P_i + cone(-F)``.
    """
    xbar, xstar = as_vector(xbar), as_vector(xstar)
    values = piece_values(inst, xbar)
    best = min(values)
    if best == INF:
        raise NotInDomain("T(xbar) is infinite")
    last = None
    for k, (P, v) in enumerate(zip(inst.target.pieces, values)):
        if v != best:
            continue
        verts, rays = dom_piece_generators(inst, P)
        verdict = epigraph_singular_membership(DomainData(verts, rays), xbar, xstar)
        if not verdict.member:
            return MembershipVerdict(False, verdict.certificate, conjunct=f"{verdict.conjunct}[piece {k}]")
        last = verdict
    return last


@dataclass
class SampledVerdict:
    """Outcome of a sampled liminf check: can refute membership, never prove it."""

    violated: bool
    per_radius_min: list
    violating_sample: Optional[tuple] = None
    violating_quotient: Optional[Fraction] = None
    samples: int = 0
    note: str = "sampling can refute membership but cannot prove it"

    @property
    def status(self) -> str:
        return "violated" if self.violated else "consistent"

    def to_json(self):
        return {
            "status": self.status,
            "per_radius_min": [None if v is None else float(v) for v in self.per_radius_min],
            "violating_sample": None if self.violating_sample is None
            else [format_rational(c) for c in self.violating_sample],
            "samples": self.samples,
            "note": self.note,
        }


def subgradient_inequality_sampled(inst: MinTimeInstance, xbar, xstar, slack, plan: SamplingPlan,
                                   tolerance=SAMPLED_TOLERANCE) -> SampledVerdict:
    """Difference quotients ``(T(x) - T(xbar) - <x*, x - xbar>)/|x - xbar|`` on shrinking spheres.

    Quotients are exact rationals; ``tolerance`` only guards the comparison
    against ``-slack``. The liminf is read off the smallest radius: T is
    piecewise linear, so quotients along a ray settle once the radius is below
    the scale of the data, while larger radii may still see pieces that do not
    touch ``xbar``. Minima at every radius are reported.
    """
    xbar, xstar, slack, tol = as_vector(xbar), as_vector(xstar), Q(slack), Q(tolerance)
    Tbar = eval_T(inst, xbar).value
    if Tbar == INF:
        raise NotInDomain("T(xbar) is infinite")
    rng = random.Random(plan.seed)
    dirs = unit_directions(inst.dim, inst.norm, plan.points_per_radius, rng)
    threshold = -slack - tol
    mins = []
    count = 0
    worst = None
    for rho in plan.radii:
        low, arg = None, None
        for u in dirs:
            x = add(xbar, smul(rho, u))
            Tx = eval_T(inst, x).value
            count += 1
            if Tx == INF:
                continue
            q = (Tx - Tbar - dot(xstar, smul(rho, u))) / rho
            if low is None or q < low:
                low, arg = q, x
        mins.append(low)
        worst = (low, arg)
    low, arg = worst
    if low is not None and low < threshold:
        return SampledVerdict(True, mins, arg, low, count)
    return SampledVerdict(False, mins, samples=count)


def singular_inequality_sampled(inst: MinTimeInstance, xbar, xstar, plan: SamplingPlan,
                                tolerance=SAMPLED_TOLERANCE) -> SampledVerdict:
    """Sampled test that ``(x*, 0)`` is a Fréchet normal to ``epi T`` at ``(xbar, T(xbar))``.

    For each sample ``x`` the nearest epigraph point above it has height
    ``max(T(x), T(xbar))``, so the quotient is
    ``<x*, x - xbar> / (|x - xbar| + max(0, T(x) - T(xbar)))``; its limsup must
    be at most 0. Reported with the sign flipped so that, as for subgradients,
    "violated" means a quotient below ``-tolerance`` at the smallest radius.

    The limsup runs over epigraph points tending to ``(xbar, T(xbar))``, so a
    sample whose lift jumps up by ``h`` (into the domain of a piece that does
    not attain ``T(xbar)``) is kept only while ``h**2 <= rho``. Locally
    Lipschitz growth passes that cutoff once ``rho`` is small; jumps never do.
    """
    xbar, xstar, tol = as_vector(xbar), as_vector(xstar), Q(tolerance)
    Tbar = eval_T(inst, xbar).value
    if Tbar == INF:
        raise NotInDomain("T(xbar) is infinite")
    rng = random.Random(plan.seed)
    dirs = unit_directions(inst.dim, inst.norm, plan.points_per_radius, rng)
    mins, count, worst = [], 0, (None, None)
    for rho in plan.radii:
        low, arg = None, None
        for u in dirs:
            x = add(xbar, smul(rho, u))
            Tx = eval_T(inst, x).value
            count += 1
            if Tx == INF or (Tx - Tbar > 0 and (Tx - Tbar) ** 2 > rho):
                continue
            q = -dot(xstar, smul(rho, u)) / (rho + max(Fraction(0), Tx - Tbar))
            if low is None or q < low:
                low, arg = q, x
        mins.append(low)
        worst = (low, arg)
    low, arg = worst
    if low is not None and low < -tol:
        return SampledVerdict(True, mins, arg, low, count)
    return SampledVerdict(False, mins, samples=count)


@dataclass
class ApproxNormals:
    directions: list
    approximate: bool = True
    note: str = "accumulated Fréchet normals at sampled nearby boundary points"


def _ray_exit(P: Polytope, xbar, u, rho) -> Optional[Fraction]:
    # largest s in [0, rho] with xbar + s*u in P
    verts = P.vertices
    k = len(verts)
    cons = [(tuple(v[i] for v in verts) + (-u[i],), lp.EQ, xbar[i]) for i in range(len(xbar))]
    cons.append(((1,) * k + (0,), lp.EQ, 1))
    cons.append(((0,) * k + (1,), lp.LE, rho))
    out = lp.solve(lp.LinearProgram((0,) * k + (1,), cons, sense="max"))
    return out.value if out.optimal else None


def approx_limiting_normals(T, xbar, plan: SamplingPlan, norm: NormKind = NormKind.LINF) -> ApproxNormals:
    """Heuristic view of the limiting normal cone at ``xbar``.

    Walks from ``xbar`` along sampled directions to the boundary of each
    piece containing it (within each radius), extracts exact Fréchet normals
    of the whole union there, and returns the unit directions collected at
    the smallest radius.
    """
    if not isinstance(T, TargetSet):
        T = TargetSet((T,) if isinstance(T, Polytope) else tuple(T))
    xbar = as_vector(xbar)
    active = [P for P in T.pieces if contains(P, xbar)]
    if not active:
        raise ValueError("xbar must lie in the set")
    rng = random.Random(plan.seed)
    dirs = unit_directions(T.dim, norm, plan.points_per_radius, rng)
    found = []
    for rho in plan.radii:
        found = []
        for P in active:
            for u in dirs:
                s = _ray_exit(P, xbar, u, rho)
                if s is None or s >= rho:
                    continue
                y = add(xbar, smul(s, u))
                at_y = [Q_ for Q_ in T.pieces if contains(Q_, y)]
                v = extract_normal(at_y, y, u)
                if v is None:
                    continue
                nv = polyhedral_norm(v, norm)
                unit = tuple(c / nv for c in v)
                if unit not in found:
                    found.append(unit)
    return ApproxNormals(found)


def _rand_q(rng: random.Random, lo: int, hi: int, dens=(1, 2, 3, 4)) -> Fraction:
    den = rng.choice(dens)
    return Fraction(rng.randint(lo * den, hi * den), den)


def _random_polytope(rng: random.Random, d: int, nverts: int, center, spread: int) -> Polytope:
    verts = []
    while len(verts) < nverts:
        v = tuple(c + _rand_q(rng, -spread, spread) for c in center)
        if v not in verts:
            verts.append(v)
    return prune_vertices(Polytope(tuple(verts)))


def random_dynamics(rng: random.Random, d: int, max_vertices: int) -> Dynamics:
    kind = rng.choice(("ball", "ball", "shifted", "segment", "point"))
    zero = (Fraction(0),) * d
    if kind == "ball":
        verts = []
        for i in range(d):
            for s in (1, -1):
                verts.append(tuple(s * _rand_q(rng, 1, 2) if k == i else Fraction(0) for k in range(d)))
        for _ in range(rng.randint(0, max(0, max_vertices - 2 * d))):
            verts.append(tuple(_rand_q(rng, -1, 1) for _ in range(d)))
        F = prune_vertices(Polytope(tuple(verts)))
    elif kind == "shifted":
        center = tuple(_rand_q(rng, -2, 2) for _ in range(d))
        if all(c == 0 for c in center):
            center = (Fraction(1),) + center[1:]
        F = _random_polytope(rng, d, rng.randint(1, max(1, max_vertices)), center, 1)
    elif kind == "segment":
        a = tuple(_rand_q(rng, -2, 2) for _ in range(d))
        b = tuple(_rand_q(rng, -2, 2) for _ in range(d))
        F = Polytope((a, b))
    else:
        F = Polytope((tuple(_rand_q(rng, -2, 2) for _ in range(d)),))
    if all(v == zero for v in F.vertices):
        F = Polytope(((Fraction(1),) + zero[1:],))
    return Dynamics(F)


def random_instance(seed: int, d: int = 2, piece_count: int = 1, max_vertices: int = 5,
                    norm: Optional[NormKind] = None) -> MinTimeInstance:
    """Deterministic random instance; identical arguments give identical instances."""
    if not 1 <= d <= MAX_DIMENSION:
        raise InvalidParams(f"dimension must be between 1 and {MAX_DIMENSION}")
    if piece_count < 1 or max_vertices < 1:
        raise InvalidParams("piece_count and max_vertices must be positive")
    rng = random.Random(f"mintime-instance:{seed}:{d}:{piece_count}:{max_vertices}")
    if norm is None:
        norm = rng.choice((NormKind.L1, NormKind.LINF))
    F = random_dynamics(rng, d, max_vertices)
    pieces = []
    for _ in range(piece_count):
        center = tuple(_rand_q(rng, -3, 3) for _ in range(d))
        nverts = rng.randint(min(d + 1, max_vertices), max_vertices)
        pieces.append(_random_polytope(rng, d, nverts, center, 2))
    return MinTimeInstance(norm, F, TargetSet(tuple(pieces)))


def instance_to_json(inst: MinTimeInstance) -> dict:
    return {
        "dimension": inst.dim,
        "norm": inst.norm.value,
        "dynamics": inst.F.F.to_json(),
        "target": [P.to_json() for P in inst.target.pieces],
    }


def instance_digest(inst: MinTimeInstance) -> str:
    blob = json.dumps(instance_to_json(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def random_polyhedral_function(seed: int, d: int = 2, max_pieces: int = 4, max_vertices: int = 6) -> PolyhedralConvexFunction:
    """Deterministic random max-affine function on a random polytope."""
    if not 1 <= d <= MAX_DIMENSION:
        raise InvalidParams(f"dimension must be between 1 and {MAX_DIMENSION}")
    rng = random.Random(f"mintime-function:{seed}:{d}:{max_pieces}:{max_vertices}")
    pieces = []
    for _ in range(rng.randint(1, max_pieces)):
        pieces.append((tuple(_rand_q(rng, -3, 3) for _ in range(d)), _rand_q(rng, -2, 2)))
    center = tuple(_rand_q(rng, -2, 2) for _ in range(d))
    domain = _random_polytope(rng, d, rng.randint(min(d + 1, max_vertices), max_vertices), center, 2)
    return PolyhedralConvexFunction(tuple(pieces), domain)
