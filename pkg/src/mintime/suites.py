"""Theorem suites: formula verdicts against definition-based oracles.

Every suite walks its inputs (instances, functions, or parameter triples),
samples query points and candidate dual vectors, and records one
:class:`QueryRecord` per comparison. A disagreement is a record whose formula
verdict contradicts an exact oracle, or an exact formula verdict contradicted
by sampled evidence.

Candidate ``x*`` family at a base point ``xbar`` with reference set ``R``
(the target or its enlargement): exact normals of ``R`` at ``xbar`` that
maximize the signed axes and two random objectives; their normalizations
to ``sigma_F(-x*) = 1``; those scaled by 2 and 1/2; axis perturbations by
1/7; two random integer vectors; and zero. Deduplicated, in that order.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .convex import normalize_to_sstar, support
from .core import TargetSet, check_basic_properties, enlargement, eval_T, MinTimeInstance
from .errors import PreconditionUnverified, UnknownTheorem
from .geometry import NormKind, centroid, norm_of_set, polyhedral_norm
from .normals import DomainData, epigraph_singular_membership, extract_normal
from .oracles import (
    SamplingPlan,
    epigraph_singular_oracle,
    instance_digest,
    random_instance,
    random_polyhedral_function,
    subgradient_inequality_exact,
    subgradient_inequality_sampled,
)
from .polyfn import PolyhedralConvexFunction, subgradient_check
from .rational import INF, add, format_rational, smul, sub
from .subdiff import (
    eps_frechet_enlargement_check,
    frechet_subdiff_membership,
    lemma51_check,
    one_sided_limiting_membership,
    polyhedral_fn_singular,
    singular_subdiff_membership,
    singular_witness_sequence,
)

SCHEMA_VERSION = "1.0"
THEOREMS = ("prop4.1", "prop4.2", "thm4.3", "lemma5.1", "thm5.2", "cor5.3", "thm5.5", "prop3.2", "thm3.3")
EPS_VALUES = (Fraction(0), Fraction(1, 100), Fraction(1, 20), Fraction(1, 10))
RADII = (Fraction(1, 2), Fraction(1), Fraction(2))
WITNESS_LENGTH = 1000


def _vec(x):
    return [format_rational(c) for c in x]


@dataclass
class QueryRecord:
    subject: str
    index: int
    kind: str
    agree: bool
    point: Optional[tuple] = None
    xstar: Optional[tuple] = None
    formula: Optional[bool] = None
    oracle: Optional[object] = None
    approximate: bool = False
    skipped: bool = False
    details: dict = field(default_factory=dict)

    def to_json(self):
        out = {
            "subject": self.subject,
            "index": self.index,
            "kind": self.kind,
            "agree": self.agree,
            "formula": self.formula,
            "oracle": self.oracle,
            "approximate": self.approximate,
            "skipped": self.skipped,
        }
        if self.point is not None:
            out["point"] = _vec(self.point)
        if self.xstar is not None:
            out["xstar"] = _vec(self.xstar)
        if self.details:
            out["details"] = _plain(self.details)
        return out


def _plain(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, Fraction, float)):
        return format_rational(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if hasattr(v, "to_json"):
        return v.to_json()
    return str(v)


@dataclass
class TheoremReport:
    theorem: str
    seed: int
    records: list = field(default_factory=list)
    subjects: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    @property
    def disagreements(self) -> list:
        return [r for r in self.records if not r.agree]

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def summary(self) -> dict:
        return {
            "queries": len(self.records),
            "compared": sum(1 for r in self.records if not r.skipped),
            "skipped": sum(1 for r in self.records if r.skipped),
            "approximate": sum(1 for r in self.records if r.approximate),
            "disagreements": len(self.disagreements),
        }

    def to_json(self):
        return {
            "schema_version": self.schema_version,
            "theorem": self.theorem,
            "seed": self.seed,
            "subjects": list(self.subjects),
            "summary": self.summary(),
            "note": "sampled checks can refute membership but cannot prove it",
            "records": [r.to_json() for r in self.records],
        }


# --- sampling ----------------------------------------------------------------

def _rng(seed, *tags) -> random.Random:
    return random.Random(":".join(["mintime-suite", str(seed)] + [str(t) for t in tags]))


def _rand_vec(rng, d, lo=-4, hi=4, den=4):
    return tuple(Fraction(rng.randint(lo * den, hi * den), den) for _ in range(d))


def boundary_points(T: TargetSet, limit: int = 8) -> list:
    """Vertices and vertex-pair midpoints of the pieces (interior midpoints possible)."""
    out = []
    for P in T.pieces:
        vs = P.vertices
        out.extend(vs)
        for i in range(len(vs)):
            out.append(tuple((a + b) / 2 for a, b in zip(vs[i], vs[(i + 1) % len(vs)])))
    return list(dict.fromkeys(out))[:limit]


def outside_points(inst: MinTimeInstance, rng, count: int) -> list:
    """Points ``w - t f`` with ``w`` in the target and ``f`` a vertex of F; T is finite there."""
    out = []
    bases = boundary_points(inst.target, 16)
    for _ in range(8 * count):
        if len(out) >= count:
            break
        w = rng.choice(bases)
        f = rng.choice(inst.F.vertices)
        t = Fraction(rng.randint(1, 8), 4)
        x = sub(w, smul(t, f))
        if x in out or inst.target.contains(x):
            continue
        out.append(x)
    return out


def candidates(inst: MinTimeInstance, R: TargetSet, xbar, rng) -> list:
    d = inst.dim
    active = R.active_pieces(xbar)
    objectives = []
    for i in range(d):
        for s in (1, -1):
            objectives.append(tuple(Fraction(s if k == i else 0) for k in range(d)))
    objectives += [_rand_vec(rng, d), _rand_vec(rng, d)]
    normals = []
    for c in objectives:
        v = extract_normal(active, xbar, c)
        if v is not None and v not in normals:
            normals.append(v)
    out = list(normals)
    for v in normals:
        if support(inst.F, smul(-1, v)) > 0:
            out.append(normalize_to_sstar(inst.F, v))
    base = list(out)
    for v in base:
        out.append(smul(2, v))
        out.append(smul(Fraction(1, 2), v))
    for v in normals[:2]:
        for i in range(d):
            out.append(tuple(c + (Fraction(1, 7) if k == i else 0) for k, c in enumerate(v)))
    out += [_rand_vec(rng, d, -3, 3, 1), _rand_vec(rng, d, -3, 3, 1)]
    out.append((Fraction(0),) * d)
    return list(dict.fromkeys(out))


def band_candidates(inst: MinTimeInstance, R: TargetSet, xbar, eps) -> list:
    """Unit-support normals stretched to both edges of the eps-band."""
    nF = norm_of_set(inst.F.F, inst.norm)
    out = []
    d = inst.dim
    for i in range(d):
        for s in (1, -1):
            c = tuple(Fraction(s if k == i else 0) for k in range(d))
            v = extract_normal(R.active_pieces(xbar), xbar, c)
            if v is None or support(inst.F, smul(-1, v)) <= 0:
                continue
            u = normalize_to_sstar(inst.F, v)
            out += [smul(1 + eps * nF, u), smul(1 - eps * nF, u)]
    return list(dict.fromkeys(out))


# --- per-subject checks -------------------------------------------------------

def prop41_samples(inst: MinTimeInstance, rng, count: int = 20) -> list:
    """Target vertices and midpoints, centroids, reachable outside points, random fill."""
    d = inst.dim
    samples = boundary_points(inst.target, 6)
    samples += [centroid(P) for P in inst.target.pieces][:2]
    samples += outside_points(inst, rng, 6)
    while len(samples) < count:
        samples.append(_rand_vec(rng, d))
    return samples[:count]


def outside_enlargement_points(inst: MinTimeInstance, r, rng, count: int = 10, attempts: int = 400) -> list:
    """Points outside the r-enlargement with finite T, pushed back from the target along -F."""
    d = inst.dim
    Or = enlargement(inst, r)
    bases = boundary_points(inst.target, 16)
    pts = []
    for k in range(attempts):
        if len(pts) >= count:
            break
        t = r + Fraction(rng.randint(1, 16), 4) + k // 100
        x = sub(rng.choice(bases), smul(t, rng.choice(inst.F.vertices)))
        if rng.random() < 0.3:
            x = add(x, _rand_vec(rng, d, -1, 1))
        if x in pts or Or.contains(x) or eval_T(inst, x).value == INF:
            continue
        pts.append(x)
    return pts


def straddling(inst: MinTimeInstance, rng, count: int = 50, radii=RADII) -> list:
    """``(x, r)`` pairs just inside and just outside enlargement boundaries, ``r`` cycling."""
    d = inst.dim
    out = []
    delta = Fraction(1, 64)
    k = 0
    while len(out) < count:
        r = radii[k % len(radii)]
        anchors = boundary_points(enlargement(inst, r), 32)
        a = anchors[(k // len(radii)) % len(anchors)]
        u = _rand_vec(rng, d, -1, 1, 2)
        if not any(u):
            u = (Fraction(1),) + (Fraction(0),) * (d - 1)
        out.append((add(a, smul(delta, u)), r))
        if len(out) < count:
            out.append((sub(a, smul(delta, u)), r))
        k += 1
    return out


def _prop41(inst, digest, seed):
    rng = _rng(seed, digest, "prop4.1")
    recs = []
    for x in prop41_samples(inst, rng):
        T = eval_T(inst, x).value
        inside = inst.target.contains(x)
        recs.append(QueryRecord(digest, 0, "i", (T == 0) == inside, x, details={"T": T, "in_target": inside}))
    for r in RADII:
        pts = outside_enlargement_points(inst, r, rng)
        if len(pts) < 10:
            recs.append(QueryRecord(digest, 0, "iii-sampling", False, details={"r": r, "found": len(pts)}))
        if pts:
            for c in check_basic_properties(inst, r, pts).checks:
                recs.append(QueryRecord(digest, 0, c.prop, c.passed, c.point, details=dict(c.values, r=r)))
    for x, r in straddling(inst, rng):
        T = eval_T(inst, x).value
        inside = enlargement(inst, r).contains(x)
        recs.append(QueryRecord(digest, 0, "enlargement", (T <= r) == inside, x,
                                details={"T": T, "r": r, "in_enlargement": inside}))
    return recs


def _singular(inst, digest, seed, in_set: bool):
    rng = _rng(seed, digest, "singular", in_set)
    recs = []
    xbars = boundary_points(inst.target, 6) if in_set else outside_points(inst, rng, 6)
    for j, xbar in enumerate(xbars):
        r = eval_T(inst, xbar).value
        R = inst.target if r == 0 else enlargement(inst, r)
        for xs in candidates(inst, R, xbar, rng):
            f = singular_subdiff_membership(inst, xbar, xs)
            o = epigraph_singular_oracle(inst, xbar, xs)
            recs.append(QueryRecord(digest, j, "singular", f.member == o.member, xbar, xs, f.member, o.member,
                                    details={"r": r, "failed_conjunct": f.conjunct}))
    return recs


def _cor53(inst, digest, seed, plan):
    rng = _rng(seed, digest, "cor5.3")
    recs = []
    for j, xbar in enumerate(outside_points(inst, rng, 4)):
        r = eval_T(inst, xbar).value
        R = enlargement(inst, r)
        for xs in candidates(inst, R, xbar, rng):
            f = frechet_subdiff_membership(inst, xbar, xs)
            if inst.target.convex:
                o = subgradient_inequality_exact(inst, xbar, xs, 0)
                recs.append(QueryRecord(digest, j, "frechet", f.member == o.member, xbar, xs, f.member, o.member,
                                        details={"r": r}))
            else:
                s = subgradient_inequality_sampled(inst, xbar, xs, 0, plan)
                recs.append(QueryRecord(digest, j, "frechet-sampled", not (f.member and s.violated), xbar, xs,
                                        f.member, s.status, details={"r": r}))
    return recs


def _thm52(inst, digest, seed, plan):
    rng = _rng(seed, digest, "thm5.2")
    recs = []
    for j, xbar in enumerate(outside_points(inst, rng, 3)):
        r = eval_T(inst, xbar).value
        R = enlargement(inst, r)
        base = candidates(inst, R, xbar, rng)
        for eps in EPS_VALUES:
            for xs in list(dict.fromkeys(base + band_candidates(inst, R, xbar, eps))):
                rep = eps_frechet_enlargement_check(inst, xbar, xs, eps, plan=None if inst.target.convex else plan)
                oracle = None if rep.conclusion is None else bool(rep.conclusion)
                approximate = not inst.target.convex
                recs.append(QueryRecord(digest, j, "eps-enlargement", rep.sound, xbar, xs, rep.premise, oracle,
                                        approximate=approximate, skipped=not rep.hypotheses_met,
                                        details={"eps": eps, "k0": rep.k0, "kappa": rep.kappa, "ell": rep.ell,
                                                 "xstar_dual_norm": rep.xstar_dual_norm, "norm_F": rep.norm_F,
                                                 "reason": rep.reason}))
    return recs


def _thm55(inst, digest, seed, plan):
    rng = _rng(seed, digest, "thm5.5")
    recs = []
    for j, xbar in enumerate(outside_points(inst, rng, 3)):
        r = eval_T(inst, xbar).value
        R = enlargement(inst, r)
        for xs in candidates(inst, R, xbar, rng):
            try:
                f = one_sided_limiting_membership(inst, xbar, xs)
            except PreconditionUnverified as exc:
                recs.append(QueryRecord(digest, j, "limiting", True, xbar, xs, skipped=True,
                                        details={"reason": str(exc)}))
                continue
            if inst.target.convex:
                o = subgradient_inequality_exact(inst, xbar, xs, 0)
                recs.append(QueryRecord(digest, j, "limiting", f.member == o.member, xbar, xs, f.member, o.member,
                                        details={"r": r}))
            else:
                # inner approximation: only a formula "member" can be contradicted by sampling,
                # and such a contradiction is reported without counting against an exact claim
                s = subgradient_inequality_sampled(inst, xbar, xs, 0, plan)
                recs.append(QueryRecord(digest, j, "limiting-sampled", f.approximate or not (f.member and s.violated),
                                        xbar, xs, f.member, s.status, approximate=f.approximate,
                                        details={"r": r, "sampled_contradiction": f.member and s.violated}))
    return recs


def _prop32(f: PolyhedralConvexFunction, label, seed):
    rng = _rng(seed, label, "prop3.2")
    recs = []
    pts = boundary_points(TargetSet((f.domain,)), 6) + [centroid(f.domain)]
    dom = DomainData(f.domain.vertices)
    for j, xbar in enumerate(pts):
        cands = []
        d = f.dim
        for i in range(d):
            for s in (1, -1):
                v = extract_normal([f.domain], xbar, tuple(Fraction(s if k == i else 0) for k in range(d)))
                if v is not None:
                    cands += [v, smul(3, v)]
        cands += [_rand_vec(rng, d, -3, 3, 1), (Fraction(0),) * d]
        for xs in dict.fromkeys(cands):
            a = polyhedral_fn_singular(f, xbar, xs)
            b = epigraph_singular_membership(dom, xbar, xs)
            recs.append(QueryRecord(label, j, "singular-fn", a.member == b.member, xbar, xs, a.member, b.member))
    return recs


def thm33_triples(f: PolyhedralConvexFunction, rng) -> list:
    """``(xbar, x*)`` pairs with ``x*`` normal to the domain at ``xbar``."""
    out = []
    d = f.dim
    for xbar in boundary_points(TargetSet((f.domain,)), 4):
        c = _rand_vec(rng, d)
        v = extract_normal([f.domain], xbar, c)
        out.append((xbar, (Fraction(0),) * d if v is None else v))
    return out


def _thm33(f: PolyhedralConvexFunction, label, seed, length=WITNESS_LENGTH, pairs=None):
    rng = _rng(seed, label, "thm3.3")
    recs = []
    for j, (xbar, xs) in enumerate(pairs or thm33_triples(f, rng)[:1]):
        seq = singular_witness_sequence(f, xbar, xs, length)
        u = f.active_slope(xbar)
        nu = polyhedral_norm(u, NormKind.L1)
        bad_norm = [t.k for t in seq if polyhedral_norm(t.residual(xs), NormKind.L1) != nu / t.k]
        bad_sub = [t.k for t in seq if not subgradient_check(f, t.x, t.xstar_k).member]
        recs.append(QueryRecord(label, j, "witness", not bad_norm and not bad_sub, xbar, xs, True,
                                not bad_norm and not bad_sub,
                                details={"terms": length, "norm_failures": bad_norm[:10],
                                         "subgradient_failures": bad_sub[:10], "u_star": u}))
    return recs


def lemma51_triples(seed, count: int) -> list:
    rng = _rng(seed, "lemma5.1")
    out = []
    while len(out) < count:
        b = Fraction(rng.randint(1, 40), 20)
        a = Fraction(rng.randint(1, 99), 100) / (2 * b)
        c = Fraction(rng.randint(1, 99), 100) / (2 * b)
        out.append((a, b, c))
    return out


def _lemma51(triple, label, grid_size=64):
    a, b, c = triple
    rep = lemma51_check(a, b, c, grid_size)
    return [QueryRecord(label, 0, "lemma", rep.ok, None, None, True, rep.ok,
                        details={"a": a, "b": b, "c": c, "alpha": rep.alpha, "pole": rep.pole,
                                 "increasing": rep.increasing, "first_failure": rep.first_failure,
                                 "derivative_numerator": rep.derivative_numerator, "note": rep.note})]


# --- driver ------------------------------------------------------------------

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MINTIME_THREADS", "1")))
    except ValueError:
        return 1


def default_subjects(theorem_id: str, seed: int, count: int) -> list:
    """Reproducible inputs for a suite: instances, functions, or parameter triples."""
    if theorem_id not in THEOREMS:
        raise UnknownTheorem(f"unknown theorem id {theorem_id!r}; expected one of {', '.join(THEOREMS)}")
    if theorem_id == "lemma5.1":
        return lemma51_triples(seed, count)
    if theorem_id in ("prop3.2", "thm3.3"):
        return [random_polyhedral_function(seed * 100003 + i, 2 + i % 2) for i in range(count)]
    pieces = 1 if theorem_id in ("cor5.3", "thm5.2") else None
    out = []
    for i in range(count):
        s = seed * 100003 + i
        out.append(random_instance(s, 2 + i % 2, pieces or 1 + i % 2, 5))
    return out


def run_theorem_suite(theorem_id: str, subjects: Sequence, plan: Optional[SamplingPlan] = None,
                      seed: int = 0) -> TheoremReport:
    if theorem_id not in THEOREMS:
        raise UnknownTheorem(f"unknown theorem id {theorem_id!r}; expected one of {', '.join(THEOREMS)}")
    plan = plan or SamplingPlan.default(seed)

    def label(i, s):
        if isinstance(s, MinTimeInstance):
            return instance_digest(s)
        return f"{theorem_id}#{i}"

    def one(item):
        i, s = item
        lab = label(i, s)
        if theorem_id == "prop4.1":
            return lab, _prop41(s, lab, seed)
        if theorem_id in ("prop4.2", "thm4.3"):
            return lab, _singular(s, lab, seed, theorem_id == "prop4.2")
        if theorem_id == "cor5.3":
            return lab, _cor53(s, lab, seed, plan)
        if theorem_id == "thm5.2":
            return lab, _thm52(s, lab, seed, plan)
        if theorem_id == "thm5.5":
            return lab, _thm55(s, lab, seed, plan)
        if theorem_id == "prop3.2":
            return lab, _prop32(s, lab, seed)
        if theorem_id == "thm3.3":
            return lab, _thm33(s, lab, seed)
        return lab, _lemma51(s, lab)

    items = list(enumerate(subjects))
    n = _threads()
    if n > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(one, items))
    else:
        results = [one(it) for it in items]
    report = TheoremReport(theorem_id, seed)
    for lab, recs in results:
        report.subjects.append(lab)
        report.records.extend(recs)
    return report


__all__ = [
    "EPS_VALUES",
    "QueryRecord",
    "SCHEMA_VERSION",
    "THEOREMS",
    "TheoremReport",
    "band_candidates",
    "boundary_points",
    "candidates",
    "default_subjects",
    "lemma51_triples",
    "outside_enlargement_points",
    "outside_points",
    "prop41_samples",
    "run_theorem_suite",
    "straddling",
    "thm33_triples",
]
