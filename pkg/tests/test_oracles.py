import random
from fractions import Fraction

import pytest

from mintime.convex import Dynamics
from mintime.core import MinTimeInstance, TargetSet, eval_T
from mintime.errors import ConvexOracleUnavailable, InvalidParams
from mintime.geometry import Polytope
from mintime.normals import frechet_normal_membership
from mintime.oracles import (
    SamplingPlan,
    approx_limiting_normals,
    brute_force_T,
    instance_digest,
    random_instance,
    random_polyhedral_function,
    singular_inequality_sampled,
    subgradient_inequality_exact,
    subgradient_inequality_sampled,
    unit_directions,
)

from conftest import DIAMOND, SQUARE

PLAN = SamplingPlan.default()


def test_brute_force_examples(diamond_square):
    approx, bound = brute_force_T(diamond_square, (2, 1), Fraction(1, 8))
    assert approx == 3
    assert abs(approx - 3) <= bound
    assert brute_force_T(diamond_square, (-1, -1), Fraction(1, 2))[0] == 0


def test_brute_force_refinement(diamond_square):
    x = (Fraction(1, 3), Fraction(-7, 5))
    exact = eval_T(diamond_square, x).value
    prev = None
    for step in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
        approx, bound = brute_force_T(diamond_square, x, step)
        assert abs(approx - exact) <= bound and approx >= exact
        if prev is not None:
            assert approx <= prev
        prev = approx
    with pytest.raises(InvalidParams):
        brute_force_T(diamond_square, x, 0)


def test_exact_subgradient_examples(left_square):
    v = subgradient_inequality_exact(left_square, (1, -1), (1, 0))
    assert v.member and v.certificate.value == 1
    assert not subgradient_inequality_exact(left_square, (1, -1), (2, 0)).member
    v = subgradient_inequality_exact(left_square, (-1, -1), (0, 0))
    assert v.member and v.certificate.value == 0


def test_exact_subgradient_slack(diamond_square):
    xs = (Fraction(11, 10), 1)
    assert not subgradient_inequality_exact(diamond_square, (2, 1), xs).member
    assert subgradient_inequality_exact(diamond_square, (2, 1), xs, Fraction(1, 5)).member


def test_exact_needs_single_piece():
    A, B = Polytope.box((0, 0), (1, 1)), Polytope.box((3, 0), (4, 1))
    inst = MinTimeInstance("linf", Dynamics(DIAMOND), TargetSet((A, B)))
    with pytest.raises(ConvexOracleUnavailable):
        subgradient_inequality_exact(inst, (2, 0), (0, 0))


def test_sampled_examples(diamond_square):
    good = subgradient_inequality_sampled(diamond_square, (2, 1), (1, 1), 0, PLAN)
    assert not good.violated and good.status == "consistent"
    assert len(good.per_radius_min) == len(PLAN.radii)
    bad = subgradient_inequality_sampled(diamond_square, (2, 1), (1, -1), 0, PLAN)
    assert bad.violated and bad.violating_sample is not None
    assert "cannot prove" in bad.note


def test_sampled_union_gap():
    A, B = Polytope.box((0, 0), (1, 1)), Polytope.box((3, 0), (4, 1))
    inst = MinTimeInstance("linf", Dynamics(DIAMOND), TargetSet((A, B)))
    # midway T = min(x - 1, 3 - x) peaks, so every candidate is refuted there
    xbar = (2, Fraction(1, 2))
    assert eval_T(inst, xbar).value == 1
    for xs in [(1, 0), (-1, 0), (0, 0)]:
        assert subgradient_inequality_sampled(inst, xbar, xs, 0, PLAN).violated
    # closer to A only A's time matters locally
    xbar = (Fraction(3, 2), Fraction(1, 2))
    assert not subgradient_inequality_sampled(inst, xbar, (1, 0), 0, PLAN).violated
    assert subgradient_inequality_sampled(inst, xbar, (0, 1), 0, PLAN).violated


def test_singular_sampled_ignores_far_pieces():
    tri = Polytope(((0, 0), (2, 0), (1, 2)))
    far = Polytope.box((-5, 0), (-4, 1))
    inst = MinTimeInstance("linf", Dynamics(((-1, 0),)), TargetSet((tri, far)))
    # left of the origin only the far box is reachable, with T near 4
    assert eval_T(inst, (Fraction(-1, 4096), Fraction(1, 4096))).value > 3
    for xs in [(-1, 0), (-2, 1), (0, -1)]:
        assert not singular_inequality_sampled(inst, (0, 0), xs, PLAN).violated
    # pointing into the triangle's domain is refuted
    for xs in [(1, 0), (0, 1), (1, 1)]:
        assert singular_inequality_sampled(inst, (0, 0), xs, PLAN).violated


def test_sampling_plan_validation():
    with pytest.raises(InvalidParams):
        SamplingPlan((Fraction(1, 4), Fraction(1, 2)))
    with pytest.raises(InvalidParams):
        SamplingPlan((0,))


def test_unit_directions_are_unit():
    dirs = unit_directions(3, "l1", 10, random.Random(0))
    from mintime.geometry import polyhedral_norm
    assert all(polyhedral_norm(u, "l1") == 1 for u in dirs)


def test_approx_limiting_normals():
    edge = approx_limiting_normals(SQUARE, (0, -1), PLAN)
    assert edge.approximate and edge.directions == [(1, 0)]
    corner = approx_limiting_normals(SQUARE, (0, 0), PLAN)
    assert set(corner.directions) == {(1, 0), (0, 1)}
    for v in corner.directions:
        assert frechet_normal_membership(SQUARE, (0, 0), v).member
    A, B = Polytope.box((0, 0), (1, 1)), Polytope.box((3, 0), (4, 1))
    assert approx_limiting_normals(TargetSet((A, B)), (Fraction(1, 2), Fraction(1, 2)), PLAN).directions == []


def test_random_instance_determinism():
    a, b = random_instance(42), random_instance(42)
    assert a == b and instance_digest(a) == instance_digest(b)
    assert instance_digest(random_instance(43)) != instance_digest(a)
    assert random_instance(7, 2, 1).target.convex
    assert len(random_instance(7, 3, 3).target.pieces) == 3
    for s in range(50):
        inst = random_instance(s, 1 + s % 4)
        assert any(any(v) for v in inst.F.vertices)
    with pytest.raises(InvalidParams):
        random_instance(0, 5)


def test_random_polyhedral_function():
    f = random_polyhedral_function(3, 3)
    assert f.dim == 3 and f == random_polyhedral_function(3, 3)
