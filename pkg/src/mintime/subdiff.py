"""Subdifferential formulas for the minimal time function as membership tests.

Each function decides ``x* in <formula right-hand side>`` exactly and returns a
:class:`MembershipVerdict`. With ``r = T(xbar)`` and ``Omega_r`` the
r-enlargement of the target:

* singular (horizontal) subgradients: ``N(xbar; Omega_r) ∩ F*_+``
  (``Omega_0 = Omega`` when ``xbar`` is in the target);
* Fréchet subgradients off the target: ``N(xbar; Omega_r) ∩ {sigma_F(-x*) = 1}``;
* eps-Fréchet enlargement: ``N_eps(xbar; Omega_r) ∩ S*_eps`` is contained in the
  ``ell*eps``-subdifferential, ``ell = 1 + 2 kappa |F|``;
* one-sided limiting subgradients off the target: ``N(xbar; Omega_r) ∩ S*``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .convex import DualSetKind, dual_set_membership, support
from .core import MinTimeInstance, enlargement, eval_T, in_dom_interior
from .errors import (
    InvalidParams,
    NotASingularSubgradient,
    NotInDomain,
    PreconditionUnverified,
    UseInSetForm,
)
from .geometry import contains, dual_norm, norm_of_set
from .normals import eps_normal_membership, frechet_normal_membership
from .oracles import SamplingPlan, SampledVerdict, subgradient_inequality_exact, subgradient_inequality_sampled
from .polyfn import PolyhedralConvexFunction, subgradient_check
from .rational import INF, Q, as_vector, format_rational, neg, smul, sub
from .verdict import MembershipVerdict, OptimalValue, ViolatingPoint


# --- constants from the eps-Fréchet estimate ---------------------------------

@dataclass(frozen=True)
class KappaParams:
    eps: Fraction
    xstar_norm: Fraction
    norm_F: Fraction
    k0: Fraction

    def __post_init__(self):
        for name in ("eps", "xstar_norm", "norm_F", "k0"):
            object.__setattr__(self, name, Q(getattr(self, name)))
        if self.eps < 0 or self.xstar_norm < 0:
            raise InvalidParams("eps and |x*| must be nonnegative")
        if self.norm_F <= 0:
            raise InvalidParams("|F| must be positive")
        if not 1 - 2 * self.eps * self.norm_F > 0:
            raise InvalidParams("need 1 - 2 eps |F| > 0")
        if not 0 < self.k0 < k0_bound(self.eps, self.xstar_norm, self.norm_F):
            raise InvalidParams(f"k0 = {format_rational(self.k0)} outside (0, {format_rational(k0_bound(self.eps, self.xstar_norm, self.norm_F))})")


def k0_bound(eps, xstar_norm, norm_F) -> Fraction:
    eps, a, b = Q(eps), Q(xstar_norm), Q(norm_F)
    return (1 - 2 * eps * b) / (1 + a * b)


def default_k0(eps, xstar_norm, norm_F) -> Fraction:
    return k0_bound(eps, xstar_norm, norm_F) / 2


def kappa(p: KappaParams) -> Fraction:
    a, b, c, k0 = p.xstar_norm, p.norm_F, p.eps, p.k0
    value = (a * (k0 + 1) + c) / (1 - 2 * c * b - k0 * (1 + a * b))
    # kappa > |x*| unless x* = 0 and eps = 0, where kappa = 0
    if not value > a:
        raise InvalidParams("kappa does not exceed |x*| (x* = 0 with eps = 0)")
    return value


def ell(kappa_value, norm_F) -> Fraction:
    kappa_value, norm_F = Q(kappa_value), Q(norm_F)
    if kappa_value <= 0 or norm_F <= 0:
        raise InvalidParams("kappa and |F| must be positive")
    return 1 + 2 * kappa_value * norm_F


# --- the monotonicity lemma behind kappa ---------------------------------------

@dataclass
class Lemma51Report:
    a: Fraction
    b: Fraction
    c: Fraction
    alpha: Fraction
    pole: Fraction
    grid: list
    values: list
    increasing: bool
    derivative_numerator: Fraction
    first_failure: Optional[int] = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.increasing and self.derivative_numerator > 0


def lemma51_f(a, b, c, t):
    den = -(1 + a * b) * t + 1 - 2 * b * c
    if den == 0:
        return INF
    return (a * t + a + c) / den


def lemma51_check(a, b, c, grid_size: int = 64, interval: str = "stated") -> Lemma51Report:
    """Evaluate ``f(t) = (at + a + c)/(-(1+ab)t + 1 - 2bc)`` on a grid of ``(0, alpha)``.

    ``interval="stated"`` uses ``alpha = (1-2ab)/(1+ab)``. ``interval="pole"``
    uses ``(1-2bc)/(1+ab)``, the zero of the denominator and the range the k0
    bound actually needs. When ``a < c`` the stated interval contains the pole
    and the increase check reports the failing grid index.
    """
    a, b, c = Q(a), Q(b), Q(c)
    if min(a, b, c) <= 0:
        raise InvalidParams("a, b, c must be positive")
    if not c < 1 / (2 * b) or not 1 - 2 * a * b > 0:
        raise InvalidParams("need c < 1/(2b) and 1 - 2ab > 0")
    if grid_size < 2:
        raise InvalidParams("grid needs at least two points")
    pole = (1 - 2 * b * c) / (1 + a * b)
    if interval == "stated":
        alpha = (1 - 2 * a * b) / (1 + a * b)
    elif interval == "pole":
        alpha = pole
    else:
        raise InvalidParams(f"unknown interval {interval!r}")
    grid = [alpha * k / (grid_size + 1) for k in range(1, grid_size + 1)]
    values = [lemma51_f(a, b, c, t) for t in grid]
    increasing, first = True, None
    for k in range(1, len(values)):
        lo, hi = values[k - 1], values[k]
        if lo == INF or hi == INF or not lo < hi:
            increasing, first = False, k
            break
    numerator = a * (2 - b * c) + a * a * b + c
    note = ""
    if 0 < pole < alpha:
        note = f"denominator vanishes at t = {format_rational(pole)} inside (0, alpha)"
    return Lemma51Report(a, b, c, alpha, pole, grid, values, increasing, numerator, first, note)


# --- singular and Fréchet subgradients of T ------------------------------------

def _time(inst: MinTimeInstance, xbar):
    tv = eval_T(inst, xbar)
    if not tv.finite:
        raise NotInDomain("T(xbar) is infinite")
    return tv.value


def _reference_set(inst: MinTimeInstance, xbar, r):
    return inst.target if r == 0 else enlargement(inst, r)


def singular_subdiff_membership(inst: MinTimeInstance, xbar, xstar) -> MembershipVerdict:
    xbar, xstar = as_vector(xbar), as_vector(xstar)
    r = _time(inst, xbar)
    ref = _reference_set(inst, xbar, r)
    normal = frechet_normal_membership(ref, xbar, xstar)
    details = {"r": r, "in_target": r == 0}
    if not normal.member:
        return MembershipVerdict(False, normal.certificate, conjunct="normal_cone", details=details)
    plus = dual_set_membership(inst.F, inst.norm, xstar, DualSetKind.fplus())
    if not plus.member:
        return MembershipVerdict(False, plus.certificate, conjunct="F_plus", details=details)
    return MembershipVerdict(True, normal.certificate, details=details)


def frechet_subdiff_membership(inst: MinTimeInstance, xbar, xstar) -> MembershipVerdict:
    xbar, xstar = as_vector(xbar), as_vector(xstar)
    if inst.target.contains(xbar):
        raise UseInSetForm("xbar lies in the target; the out-of-set formula does not apply")
    r = _time(inst, xbar)
    normal = frechet_normal_membership(enlargement(inst, r), xbar, xstar)
    sigma = support(inst.F, neg(xstar))
    details = {"r": r, "sigma_F(-x*)": sigma}
    if not normal.member:
        return MembershipVerdict(False, normal.certificate, conjunct="normal_cone", details=details)
    if sigma != 1:
        cert = ViolatingPoint(neg(xstar), abs(sigma - 1))
        return MembershipVerdict(False, cert, conjunct="sigma_equals_one", details=details)
    return MembershipVerdict(True, normal.certificate, details=details)


@dataclass
class Thm52Report:
    hypotheses_met: bool
    reason: str = ""
    eps: Fraction = Fraction(0)
    r: Optional[Fraction] = None
    norm_F: Optional[Fraction] = None
    xstar_dual_norm: Optional[Fraction] = None
    k0: Optional[Fraction] = None
    kappa: Optional[Fraction] = None
    ell: Optional[Fraction] = None
    premise_normal: Optional[MembershipVerdict] = None
    premise_band: Optional[MembershipVerdict] = None
    conclusion_global: Optional[MembershipVerdict] = None
    conclusion_local: Optional[SampledVerdict] = None
    notes: list = field(default_factory=list)

    @property
    def premise(self) -> bool:
        return bool(self.premise_normal and self.premise_normal.member and self.premise_band and self.premise_band.member)

    @property
    def conclusion(self) -> Optional[bool]:
        """Exact verdict when available, otherwise the sampled one."""
        if self.conclusion_global is not None:
            return self.conclusion_global.member
        if self.conclusion_local is not None:
            return not self.conclusion_local.violated
        return None

    @property
    def sound(self) -> bool:
        """No counterexample: either the premise fails or the conclusion holds."""
        return not self.hypotheses_met or not self.premise or bool(self.conclusion)

    def to_json(self):
        def q(v):
            return None if v is None else format_rational(v)

        return {
            "hypotheses_met": self.hypotheses_met,
            "reason": self.reason,
            "eps": q(self.eps),
            "r": q(self.r),
            "norm_F": q(self.norm_F),
            "xstar_dual_norm": q(self.xstar_dual_norm),
            "k0": q(self.k0),
            "kappa": q(self.kappa),
            "ell": q(self.ell),
            "premise": self.premise,
            "premise_normal": None if self.premise_normal is None else self.premise_normal.to_json(),
            "premise_band": None if self.premise_band is None else self.premise_band.to_json(),
            "conclusion_global": None if self.conclusion_global is None else self.conclusion_global.to_json(),
            "conclusion_local": None if self.conclusion_local is None else self.conclusion_local.to_json(),
            "notes": list(self.notes),
        }


def eps_frechet_enlargement_check(inst: MinTimeInstance, xbar, xstar, eps, k0=None,
                                  plan: Optional[SamplingPlan] = None) -> Thm52Report:
    """Check the eps-Fréchet enlargement estimate at one query.

    The premise is decided exactly. The conclusion is decided by the exact
    global subgradient LP for single-piece targets; the sampled local liminf
    check runs for unions, and additionally for convex targets when ``plan``
    is given.
    """
    xbar, xstar, eps = as_vector(xbar), as_vector(xstar), Q(eps)
    if eps < 0:
        return Thm52Report(False, "eps must be nonnegative", eps)
    if inst.target.contains(xbar):
        return Thm52Report(False, "xbar lies in the target", eps)
    tv = eval_T(inst, xbar)
    if not tv.finite:
        return Thm52Report(False, "T(xbar) is infinite", eps)
    r = tv.value
    normF = norm_of_set(inst.F.F, inst.norm)
    xs_norm = dual_norm(xstar, inst.norm)
    report = Thm52Report(True, eps=eps, r=r, norm_F=normF, xstar_dual_norm=xs_norm)
    report.notes.append(f"|x*| is the {inst.norm.dual.value} norm, dual to the ambient {inst.norm.value} norm")
    if not 1 - 2 * eps * normF > 0:
        report.hypotheses_met = False
        report.reason = "hypotheses not met: 1 - 2 eps |F| <= 0"
        return report
    if k0 is None:
        k0 = default_k0(eps, xs_norm, normF)
    try:
        params = KappaParams(eps, xs_norm, normF, Q(k0))
    except InvalidParams as exc:
        report.hypotheses_met = False
        report.reason = f"hypotheses not met: {exc}"
        return report
    report.k0 = params.k0
    try:
        report.kappa = kappa(params)
    except InvalidParams as exc:
        report.hypotheses_met = False
        report.reason = f"hypotheses not met: {exc}"
        return report
    report.ell = ell(report.kappa, normF)
    Omega_r = enlargement(inst, r)
    report.premise_normal = eps_normal_membership(Omega_r, inst.norm, xbar, xstar, eps)
    report.premise_band = dual_set_membership(inst.F, inst.norm, xstar, DualSetKind.sstar_eps(eps))
    slack = report.ell * eps
    if inst.target.convex:
        report.conclusion_global = subgradient_inequality_exact(inst, xbar, xstar, slack)
        if plan is not None:
            report.conclusion_local = subgradient_inequality_sampled(inst, xbar, xstar, slack, plan)
    else:
        report.conclusion_local = subgradient_inequality_sampled(inst, xbar, xstar, slack, plan or SamplingPlan.default())
        report.notes.append("union target: conclusion is sampled evidence only")
    return report


def one_sided_limiting_membership(inst: MinTimeInstance, xbar, xstar) -> MembershipVerdict:
    """``x*`` in ``N(xbar; Omega_r) ∩ S*`` for ``xbar`` off the target.

    Continuity of T near ``xbar`` is verified (interior of the domain of an
    attaining piece); weak* continuity of the support function holds
    automatically in finite dimension. For union targets the Fréchet cone is
    used as an inner approximation of the limiting one and the verdict is
    flagged ``approximate``.
    """
    xbar, xstar = as_vector(xbar), as_vector(xstar)
    if inst.target.contains(xbar):
        raise UseInSetForm("xbar lies in the target; the out-of-set formula does not apply")
    r = _time(inst, xbar)
    if not in_dom_interior(inst, xbar):
        raise PreconditionUnverified("could not verify that T is continuous around xbar")
    approximate = not inst.target.convex
    details = {"r": r, "continuity": "verified: xbar interior to an attaining piece's domain"}
    normal = frechet_normal_membership(enlargement(inst, r), xbar, xstar)
    if not normal.member:
        return MembershipVerdict(False, normal.certificate, conjunct="normal_cone", approximate=approximate,
                                 details=details)
    band = dual_set_membership(inst.F, inst.norm, xstar, DualSetKind.sstar())
    if not band.member:
        return MembershipVerdict(False, band.certificate, conjunct="S_star", approximate=approximate,
                                 details=details)
    return MembershipVerdict(True, normal.certificate, approximate=approximate, details=details)


# --- polyhedral convex functions -----------------------------------------------

def polyhedral_fn_singular(f: PolyhedralConvexFunction, xbar, xstar) -> MembershipVerdict:
    xbar, xstar = as_vector(xbar), as_vector(xstar)
    if not contains(f.domain, xbar):
        raise NotInDomain("xbar is outside dom f")
    return frechet_normal_membership(f.domain, xbar, xstar)


@dataclass(frozen=True)
class WitnessTerm:
    k: int
    x: tuple
    lam: Fraction
    xstar_k: tuple

    def residual(self, xstar) -> tuple:
        """``lam_k * x*_k - x*``."""
        return sub(smul(self.lam, self.xstar_k), xstar)


def singular_witness_sequence(f: PolyhedralConvexFunction, xbar, xstar, K: int) -> list:
    """Constant-point witnesses ``x_k = xbar``, ``lam_k = 1/k``, ``x*_k = u* + k x*``.

    ``u*`` is the slope of an affine piece attaining ``f(xbar)``, a subgradient
    of ``f`` there; adding ``k x*`` (a normal to the domain) keeps it one, and
    ``lam_k x*_k - x* = u*/k`` exactly.
    """
    xbar, xstar = as_vector(xbar), as_vector(xstar)
    if K < 1:
        raise InvalidParams("K must be positive")
    if not polyhedral_fn_singular(f, xbar, xstar).member:
        raise NotASingularSubgradient("x* is not normal to dom f at xbar")
    u = f.active_slope(xbar)
    return [WitnessTerm(k, xbar, Fraction(1, k), tuple(a + k * b for a, b in zip(u, xstar))) for k in range(1, K + 1)]


def witness_term_is_subgradient(f: PolyhedralConvexFunction, term: WitnessTerm) -> MembershipVerdict:
    return subgradient_check(f, term.x, term.xstar_k)


__all__ = [
    "KappaParams",
    "Lemma51Report",
    "PolyhedralConvexFunction",
    "Thm52Report",
    "WitnessTerm",
    "default_k0",
    "ell",
    "eps_frechet_enlargement_check",
    "frechet_subdiff_membership",
    "k0_bound",
    "kappa",
    "lemma51_check",
    "lemma51_f",
    "one_sided_limiting_membership",
    "polyhedral_fn_singular",
    "singular_subdiff_membership",
    "singular_witness_sequence",
    "witness_term_is_subgradient",
]
