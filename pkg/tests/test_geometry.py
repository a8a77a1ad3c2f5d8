from fractions import Fraction

import pytest

from mintime.errors import DimensionMismatch, InvalidPolytope, NegativeScale
from mintime.geometry import (
    NormKind,
    Polytope,
    contains,
    dual_norm,
    minkowski_sum,
    norm_of_set,
    polyhedral_norm,
    prune_vertices,
    scale,
)

from conftest import DIAMOND, LEFT, SQUARE

UNIT = Polytope.box((0, 0), (1, 1))


def vset(P):
    return set(P.vertices)


def test_contains():
    assert contains(UNIT, (Fraction(1, 2), Fraction(1, 2)))
    assert not contains(UNIT, (2, 0))
    assert contains(DIAMOND, (Fraction(1, 2), Fraction(1, 2)))
    assert not contains(DIAMOND, (Fraction(1, 2), Fraction(2, 3)))


def test_contains_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        contains(UNIT, (0, 0, 0))


def test_minkowski_examples():
    seg = Polytope(((0, 0), (3, 0)))
    assert vset(minkowski_sum(SQUARE, seg)) == vset(Polytope.box((-2, -2), (3, 0)))
    unit_seg = Polytope(((0, 0), (1, 0)))
    assert vset(minkowski_sum(SQUARE, unit_seg)) == vset(Polytope.box((-2, -2), (1, 0)))
    assert vset(minkowski_sum(SQUARE, Polytope.point((0, 0)))) == vset(SQUARE)
    octagon = minkowski_sum(SQUARE, DIAMOND)
    assert len(octagon) == 8
    for v in [(1, 0), (0, 1), (-3, -2), (-2, -3), (Fraction(1, 2), Fraction(1, 2))]:
        assert contains(octagon, v)
    assert not contains(octagon, (1, 1))


def test_scale():
    assert vset(scale(DIAMOND, 3)) == {(3, 0), (-3, 0), (0, 3), (0, -3)}
    assert vset(scale(SQUARE, 1)) == vset(SQUARE)
    assert vset(scale(SQUARE, 0)) == {(0, 0)}
    with pytest.raises(NegativeScale):
        scale(SQUARE, -1)


def test_prune():
    P = Polytope(SQUARE.vertices + ((-1, -1),))
    assert vset(prune_vertices(P)) == vset(SQUARE)
    assert vset(prune_vertices(DIAMOND)) == vset(DIAMOND)
    pts = tuple(tuple(a + b for a, b in zip(p, q)) for p in SQUARE.vertices for q in DIAMOND.vertices)
    assert len(pts) == 16
    pruned = prune_vertices(Polytope(pts))
    assert len(pruned) == 8
    for p in pts:
        assert contains(pruned, p)


def test_norms():
    assert polyhedral_norm((3, -4), NormKind.L1) == 7
    assert polyhedral_norm((3, -4), NormKind.LINF) == 4
    assert polyhedral_norm((0, 0), "l1") == 0
    assert dual_norm((3, -4), "l1") == 4
    assert norm_of_set(DIAMOND, "linf") == 1
    assert norm_of_set(LEFT, "linf") == 1
    assert norm_of_set(SQUARE, "l1") == 4


def test_norm_kind_parse():
    assert NormKind.parse("L1") is NormKind.L1
    assert NormKind.LINF.dual is NormKind.L1
    with pytest.raises(ValueError):
        NormKind.parse("l2")


def test_polytope_validation_and_json():
    with pytest.raises(InvalidPolytope):
        Polytope(())
    with pytest.raises(InvalidPolytope):
        Polytope(((0, 0), (1,)))
    P = Polytope(((Fraction(1, 3), -2), (0, 5)))
    assert Polytope.from_json(P.to_json()) == P
    assert P.to_json() == {"vertices": [["1/3", "-2"], ["0", "5"]]}
    assert len(Polytope(((0, 0), (0, 0)))) == 1
