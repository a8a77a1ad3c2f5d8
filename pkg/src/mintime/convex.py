"""Gauge, support function and the dual sets built from them.

For the dynamics polytope ``F`` (vertex list ``f_1..f_n``):

* gauge:    ``rho_F(u) = min sum(lam)`` s.t. ``sum(lam_i f_i) = u``, ``lam >= 0``
  (``+inf`` when ``u`` is outside ``cone(F)``);
* support:  ``sigma_F(x*) = max_i <x*, f_i>``;
* ``S*_eps = {x* : 1 - eps|F| <= sigma_F(-x*) <= 1 + eps|F|}``, ``S* = S*_0``,
  ``C* = {x* : sigma_F(-x*) <= 1}``, ``F*_+ = {x* : <x*, q> >= 0 for q in F}``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import lp
from .errors import DimensionMismatch, InvalidInstance, InvalidParams, NotNormalizable
from .geometry import NormKind, Polytope, norm_of_set, unit_ball_vertices
from .rational import INF, Q, as_vector, dot, format_rational, is_zero, neg
from .verdict import MembershipVerdict, OptimalValue, ViolatingPoint


@dataclass(frozen=True)
class Dynamics:
    """Constant dynamics: a nonempty polytope other than ``{0}``."""

    F: Polytope

    def __post_init__(self):
        if not isinstance(self.F, Polytope):
            object.__setattr__(self, "F", Polytope(self.F))
        if all(is_zero(v) for v in self.F.vertices):
            raise InvalidInstance("dynamics must satisfy F != {0}")

    @property
    def vertices(self):
        return self.F.vertices

    @property
    def dim(self) -> int:
        return self.F.dim


class DualSet(str, enum.Enum):
    SSTAR = "sstar"
    SSTAR_EPS = "sstar-eps"
    CSTAR = "cstar"
    FPLUS = "fplus"


@dataclass(frozen=True)
class DualSetKind:
    tag: DualSet
    eps: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "tag", DualSet(self.tag))
        object.__setattr__(self, "eps", Q(self.eps))
        if self.eps < 0:
            raise InvalidParams("eps must be nonnegative")

    @classmethod
    def sstar(cls):
        return cls(DualSet.SSTAR)

    @classmethod
    def sstar_eps(cls, eps):
        return cls(DualSet.SSTAR_EPS, eps)

    @classmethod
    def cstar(cls):
        return cls(DualSet.CSTAR)

    @classmethod
    def fplus(cls):
        return cls(DualSet.FPLUS)


def _dynamics(F) -> Dynamics:
    return F if isinstance(F, Dynamics) else Dynamics(F)


def _match(F: Dynamics, x) -> tuple:
    x = as_vector(x)
    if len(x) != F.dim:
        raise DimensionMismatch(f"vector has dimension {len(x)}, dynamics has {F.dim}")
    return x


def gauge_lp(F: Dynamics, u) -> lp.LinearProgram:
    verts = F.vertices
    cons = [(tuple(v[i] for v in verts), lp.EQ, u[i]) for i in range(len(u))]
    return lp.LinearProgram((1,) * len(verts), cons)


def gauge(F, u):
    """Minkowski gauge of ``F`` at ``u``; ``INF`` off ``cone(F)``."""
    F = _dynamics(F)
    u = _match(F, u)
    if is_zero(u):
        return Fraction(0)
    out = lp.solve(gauge_lp(F, u))
    return out.value if out.optimal else INF


def support(F, xstar) -> Fraction:
    F = _dynamics(F)
    xstar = _match(F, xstar)
    return max(dot(xstar, v) for v in F.vertices)


def dual_set_membership(F, norm: NormKind, xstar, kind: DualSetKind) -> MembershipVerdict:
    F = _dynamics(F)
    xstar = _match(F, xstar)
    if kind.tag is DualSet.FPLUS:
        values = [(dot(xstar, q), q) for q in F.vertices]
        worst, q = min(values, key=lambda p: p[0])
        if worst >= 0:
            return MembershipVerdict(True, OptimalValue(worst), details={"min_pairing": worst})
        return MembershipVerdict(False, ViolatingPoint(q, -worst), conjunct="F_plus",
                                 details={"min_pairing": worst})
    sigma = support(F, neg(xstar))
    normF = norm_of_set(F.F, norm)
    if kind.tag is DualSet.CSTAR:
        lo, hi = None, Fraction(1)
    else:
        eps = kind.eps if kind.tag is DualSet.SSTAR_EPS else Fraction(0)
        lo, hi = 1 - eps * normF, 1 + eps * normF
    details = {"sigma_F(-x*)": sigma, "norm_F": normF, "upper": hi}
    if lo is not None:
        details["lower"] = lo
    member = sigma <= hi and (lo is None or sigma >= lo)
    if member:
        return MembershipVerdict(True, OptimalValue(sigma), details=details)
    # record the band violation as an exceedance of the admissible bound
    if sigma > hi:
        cert = ViolatingPoint(neg(xstar), sigma, hi)
    else:
        cert = ViolatingPoint(neg(xstar), -sigma, -lo)
    return MembershipVerdict(False, cert, conjunct=kind.tag.value, details=details)


def normalize_to_sstar(F, xstar):
    """Rescale ``x*`` by ``1/sigma_F(-x*)`` so that it lands in ``S*``."""
    F = _dynamics(F)
    xstar = _match(F, xstar)
    gamma = support(F, neg(xstar))
    if gamma <= 0:
        raise NotNormalizable(f"sigma_F(-x*) = {format_rational(gamma)} is not positive")
    return tuple(c / gamma for c in xstar)


def gauge_lipschitz(F, kind: NormKind):
    """Smallest L with ``gauge(F, v) <= L |v|`` for all v (``INF`` if none).

    The gauge is sublinear, so its maximum over the unit ball is attained at a
    ball vertex.
    """
    F = _dynamics(F)
    best: Optional[Fraction] = Fraction(0)
    for e in unit_ball_vertices(F.dim, kind):
        g = gauge(F, e)
        if g == INF:
            return INF
        best = max(best, g)
    return best


def in_cone(F, u: Sequence) -> bool:
    return gauge(F, u) != INF
