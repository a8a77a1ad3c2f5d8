"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import random
import time
from fractions import Fraction

import pytest

from mintime.core import check_basic_properties, enlargement, eval_T
from mintime.errors import PreconditionUnverified
from mintime.geometry import NormKind, polyhedral_norm
from mintime.lp import dual_program, solve, verify_outcome
from mintime.oracles import (
    SamplingPlan,
    random_instance,
    random_polyhedral_function,
    singular_inequality_sampled,
    subgradient_inequality_sampled,
)
from mintime.polyfn import subgradient_check
from mintime.subdiff import (
    eps_frechet_enlargement_check,
    frechet_subdiff_membership,
    lemma51_check,
    one_sided_limiting_membership,
    singular_subdiff_membership,
    singular_witness_sequence,
)
from mintime.suites import (
    EPS_VALUES,
    RADII,
    boundary_points,
    candidates,
    default_subjects,
    lemma51_triples,
    outside_enlargement_points,
    outside_points,
    prop41_samples,
    run_theorem_suite,
    straddling,
    thm33_triples,
)

from conftest import ACCEPTANCE_LINES, random_lp
from union_cases import union_cases


def record(name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def basic_instances():
    return [random_instance(seed, 2 + seed % 2, 1 + (seed // 2) % 2, 5) for seed in range(1, 101)]


@pytest.fixture(scope="module")
def instances():
    return basic_instances()


def test_zero_time_iff_in_target(instances):
    start = time.perf_counter()
    failures = checks = 0
    for seed, inst in enumerate(instances, 1):
        for x in prop41_samples(inst, random.Random(f"accept-i:{seed}"), 20):
            checks += 1
            if (eval_T(inst, x).value == 0) != inst.target.contains(x):
                failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and checks == 2000 and elapsed < 60
    assert record("T = 0 iff x in target", ok, f"{checks} checks, {failures} failures, {elapsed:.1f}s (< 60s)")


def test_time_decomposes_through_enlargement(instances):
    failures = checks = short = 0
    for seed, inst in enumerate(instances, 1):
        rng = random.Random(f"accept-iii:{seed}")
        for r in RADII:
            pts = outside_enlargement_points(inst, r, rng, 10)
            short += len(pts) < 10
            for c in check_basic_properties(inst, r, pts).checks:
                if c.prop == "iii":
                    checks += 1
                    failures += not c.passed
    ok = failures == 0 and short == 0 and checks == 10 * len(RADII) * len(instances)
    assert record("T = T_r + r outside the r-enlargement", ok,
                  f"{checks} checks, {failures} failures, {short} (instance, r) pairs short of 10 points")


def test_enlargement_is_sublevel_set(instances):
    failures = checks = 0
    for seed, inst in enumerate(instances, 1):
        for x, r in straddling(inst, random.Random(f"accept-enl:{seed}"), 50):
            checks += 1
            failures += (eval_T(inst, x).value <= r) != enlargement(inst, r).contains(x)
    ok = failures == 0 and checks == 50 * len(instances)
    assert record("T <= r iff x in enlargement(r)", ok, f"{checks} boundary-straddling samples, {failures} failures")


def test_frechet_formula_matches_definition():
    start = time.perf_counter()
    subjects = default_subjects("cor5.3", 7, 100)
    assert all(s.target.convex for s in subjects)
    rep = run_theorem_suite("cor5.3", subjects, seed=7)
    elapsed = time.perf_counter() - start
    members = sum(1 for r in rep.records if r.formula)
    ok = rep.ok and elapsed < 300
    assert record("Frechet subdifferential formula vs exact oracle", ok,
                  f"{len(rep.records)} queries ({members} members), {len(rep.disagreements)} disagreements, "
                  f"{elapsed:.1f}s (< 300s)")


def test_singular_formula_matches_epigraph():
    subjects = default_subjects("prop4.2", 3, 40)
    inside = run_theorem_suite("prop4.2", subjects, seed=3)
    outside = run_theorem_suite("thm4.3", subjects, seed=3)
    bad = len(inside.disagreements) + len(outside.disagreements)
    n = len(inside.records) + len(outside.records)
    assert record("singular subdifferential formulas vs epigraph normals", bad == 0,
                  f"{n} queries (in-set {len(inside.records)}, out-of-set {len(outside.records)}), {bad} disagreements")


def test_eps_enlargement_soundness():
    subjects = default_subjects("thm5.2", 11, 20)
    rep = run_theorem_suite("thm5.2", subjects, seed=11)
    live = [r for r in rep.records if not r.skipped]
    premises = [r for r in live if r.formula]
    per_eps = {e: sum(1 for r in premises if r.details["eps"] == e) for e in EPS_VALUES}
    ok = rep.ok and all(per_eps.values())
    assert record("eps-normal premise implies ell*eps-subgradient", ok,
                  f"{len(live)} checked, {len(premises)} verified premises "
                  f"({', '.join(f'eps={e}: {n}' for e, n in per_eps.items())}), {len(rep.disagreements)} failures")


def test_monotonicity_lemma():
    failures = []
    for a, b, c in lemma51_triples(51, 50):
        rep = lemma51_check(a, b, c, 64)
        if not rep.ok:
            failures.append((a, b, c, rep.pole, rep.alpha))
    detail = f"50 triples, {len(failures)} failures"
    if failures:
        a, b, c, pole, alpha = failures[0]
        detail += f"; e.g. a={a}, b={b}, c={c}: denominator vanishes at {pole} < alpha = {alpha}"
    assert record("monotonicity lemma on its stated interval", not failures, detail)


def test_singular_witness_sequences():
    failures = 0
    triples = 0
    for i in range(50):
        f = random_polyhedral_function(1000 + i, 2 + i % 2)
        xbar, xs = thm33_triples(f, random.Random(f"accept-3.3:{i}"))[0]
        triples += 1
        u = f.active_slope(xbar)
        nu = polyhedral_norm(u, NormKind.L1)
        for t in singular_witness_sequence(f, xbar, xs, 1000):
            if polyhedral_norm(t.residual(xs), NormKind.L1) != nu / t.k or not subgradient_check(f, t.x, t.xstar_k).member:
                failures += 1
    assert record("singular subgradient witness sequences", failures == 0,
                  f"{triples} triples x 1000 terms, {failures} failures")


def test_sampled_checks_cohere_on_unions():
    plan = SamplingPlan((Fraction(1, 64), Fraction(1, 1024), Fraction(1, 4096)), 8, 0)
    contradictions = []
    exact_members = approximate = unflagged = 0
    for n, inst in enumerate(union_cases()):
        rng = random.Random(f"accept-union:{n}")
        inside = boundary_points(inst.target, 6)
        outside = outside_points(inst, rng, 4)
        for xbar in inside + outside:
            r = eval_T(inst, xbar).value
            R = inst.target if r == 0 else enlargement(inst, r)
            for xs in candidates(inst, R, xbar, rng):
                if singular_subdiff_membership(inst, xbar, xs).member:
                    exact_members += 1
                    if singular_inequality_sampled(inst, xbar, xs, plan).violated:
                        contradictions.append(("singular", n, xbar, xs))
                if r == 0:
                    continue
                if frechet_subdiff_membership(inst, xbar, xs).member:
                    exact_members += 1
                    if subgradient_inequality_sampled(inst, xbar, xs, 0, plan).violated:
                        contradictions.append(("frechet", n, xbar, xs))
                for eps in EPS_VALUES[1:]:
                    rep = eps_frechet_enlargement_check(inst, xbar, xs, eps, plan=plan)
                    if rep.hypotheses_met and rep.premise and rep.conclusion_local.violated:
                        contradictions.append(("eps-enlargement", n, xbar, xs, eps))
                try:
                    v = one_sided_limiting_membership(inst, xbar, xs)
                except PreconditionUnverified:
                    continue
                approximate += v.approximate
                unflagged += not v.approximate
    ok = not contradictions and unflagged == 0 and exact_members > 0
    assert record("sampled liminf checks vs exact verdicts on 20 union targets", ok,
                  f"{exact_members} exact member verdicts, {len(contradictions)} contradictions, "
                  f"{approximate} limiting verdicts flagged approximate, {unflagged} unflagged")


def test_lp_kernel():
    start = time.perf_counter()
    rng = random.Random(500)
    bad_cert = bad_dual = optimal = 0
    for _ in range(500):
        prog = random_lp(rng)
        out = solve(prog)
        bad_cert += not verify_outcome(prog, out)
        if out.optimal:
            optimal += 1
            dual = solve(dual_program(prog))
            bad_dual += not (dual.optimal and dual.value == out.value)
    elapsed = time.perf_counter() - start
    ok = bad_cert == 0 and bad_dual == 0 and elapsed < 30
    assert record("exact LP kernel", ok, f"500 programs ({optimal} optimal), {bad_cert} certificate failures, "
                                         f"{bad_dual} duality failures, {elapsed:.1f}s (< 30s)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
