from fractions import Fraction

import pytest

from mintime.convex import Dynamics
from mintime.core import MinTimeInstance, TargetSet
from mintime.errors import (
    InvalidParams,
    NotASingularSubgradient,
    NotInDomain,
    PreconditionUnverified,
    UseInSetForm,
)
from mintime.geometry import NormKind, Polytope, polyhedral_norm
from mintime.oracles import epigraph_singular_oracle, subgradient_inequality_exact
from mintime.subdiff import (
    KappaParams,
    PolyhedralConvexFunction,
    default_k0,
    ell,
    eps_frechet_enlargement_check,
    frechet_subdiff_membership,
    k0_bound,
    kappa,
    lemma51_check,
    lemma51_f,
    one_sided_limiting_membership,
    polyhedral_fn_singular,
    singular_subdiff_membership,
    singular_witness_sequence,
    witness_term_is_subgradient,
)

from conftest import SQUARE

F_ = Fraction
L1_ON_SQUARE = PolyhedralConvexFunction(
    tuple(((s, t), 0) for s in (1, -1) for t in (1, -1)), Polytope.box((0, 0), (1, 1))
)


# --- constants ---

def test_kappa_values():
    assert kappa(KappaParams(F_(1, 10), 1, 1, F_(1, 5))) == F_(13, 4)
    # (5/4) / (1 - 0 - (1/4)(1 + 1)) = 5/2
    assert kappa(KappaParams(0, 1, 1, F_(1, 4))) == F_(5, 2)


def test_kappa_blows_up_at_bound():
    a, b, eps = 1, 1, F_(1, 10)
    bound = k0_bound(eps, a, b)
    near = kappa(KappaParams(eps, a, b, bound * (1 - F_(1, 10**6))))
    assert near > 1000 * kappa(KappaParams(eps, a, b, bound / 2))


def test_kappa_params_validation():
    with pytest.raises(InvalidParams):
        KappaParams(F_(1, 2), 1, 1, F_(1, 100))  # 1 - 2 eps |F| = 0
    with pytest.raises(InvalidParams):
        KappaParams(0, 1, 1, F_(1, 2))  # k0 at the bound
    with pytest.raises(InvalidParams):
        KappaParams(0, 1, 0, F_(1, 4))
    with pytest.raises(InvalidParams):
        kappa(KappaParams(0, 0, 1, F_(1, 4)))


def test_ell():
    assert ell(F_(13, 4), 1) == F_(15, 2)
    assert ell(F_(5, 3), 1) == F_(13, 3)
    assert default_k0(0, 1, 1) == F_(1, 4)


# --- monotonicity lemma ---

def test_monotonicity_values():
    assert lemma51_f(1, F_(1, 10), 1, 0) == F_(5, 2)
    assert lemma51_f(1, F_(1, 10), 1, F_(1, 4)) == F_(30, 7)
    assert lemma51_f(1, F_(1, 10), 1, F_(1, 2)) == 10
    rep = lemma51_check(1, F_(1, 10), 1)
    assert rep.derivative_numerator == 3
    assert rep.ok and len(rep.grid) == 64


def test_stated_interval_crosses_pole_when_a_below_c():
    rep = lemma51_check(F_(1, 10), 1, F_(1, 4))
    assert rep.pole < rep.alpha
    assert not rep.increasing and rep.derivative_numerator > 0
    assert "denominator vanishes" in rep.note
    assert lemma51_check(F_(1, 10), 1, F_(1, 4), interval="pole").ok


def test_monotonicity_hypotheses():
    with pytest.raises(InvalidParams):
        lemma51_check(1, 1, 1)
    with pytest.raises(InvalidParams):
        lemma51_check(1, F_(1, 10), 1, interval="other")


# --- singular and Fréchet formulas ---

def test_singular_examples(left_square):
    assert singular_subdiff_membership(left_square, (-2, -1), (-1, 0)).member
    v = singular_subdiff_membership(left_square, (1, -1), (1, 0))
    assert not v.member and v.conjunct == "F_plus"
    for xbar in [(-2, -1), (1, -1), (0, 0), (-1, -1)]:
        assert singular_subdiff_membership(left_square, xbar, (0, 0)).member
    with pytest.raises(NotInDomain):
        singular_subdiff_membership(left_square, (0, 5), (0, 0))


def test_singular_matches_epigraph(left_square):
    for xbar in [(-2, -1), (-2, -2), (1, -1), (3, 0)]:
        for xs in [(-1, 0), (0, 1), (0, -1), (-1, 1), (1, 0), (-2, -3)]:
            a = singular_subdiff_membership(left_square, xbar, xs).member
            b = epigraph_singular_oracle(left_square, xbar, xs).member
            assert a == b, (xbar, xs)


def test_frechet_examples(left_square):
    assert frechet_subdiff_membership(left_square, (1, -1), (1, 0)).member
    v = frechet_subdiff_membership(left_square, (1, -1), (F_(1, 2), 0))
    assert not v.member and v.conjunct == "sigma_equals_one"
    v = frechet_subdiff_membership(left_square, (1, -1), (1, 1))
    assert not v.member and v.conjunct == "normal_cone"
    with pytest.raises(UseInSetForm):
        frechet_subdiff_membership(left_square, (-1, -1), (0, 0))
    with pytest.raises(NotInDomain):
        frechet_subdiff_membership(left_square, (1, 1), (0, 0))


def test_frechet_matches_exact_oracle(diamond_square):
    for xbar in [(2, 1), (1, -1), (-3, 2)]:
        for xs in [(1, 1), (1, 0), (-1, 1), (F_(1, 2), F_(1, 2)), (2, 0), (0, 0)]:
            a = frechet_subdiff_membership(diamond_square, xbar, xs).member
            b = subgradient_inequality_exact(diamond_square, xbar, xs).member
            assert a == b, (xbar, xs)


def test_eps_enlargement_examples(diamond_square):
    rep = eps_frechet_enlargement_check(diamond_square, (2, 1), (1, 1), 0, F_(1, 4))
    assert rep.hypotheses_met and rep.premise and rep.conclusion
    # |x*| = |(1, 1)|_1 = 2 for the linf ambient norm: (2 * 5/4) / (1 - (1/4)(1 + 2)) = 10
    assert rep.kappa == 10 and rep.ell == 21
    rep = eps_frechet_enlargement_check(diamond_square, (2, 1), (F_(11, 10), 1), F_(1, 10), F_(1, 100))
    assert rep.premise_band.member and rep.premise and rep.conclusion
    assert rep.ell > 1 and rep.to_json()["ell"] == str(rep.ell)
    rep = eps_frechet_enlargement_check(diamond_square, (2, 1), (1, 1), F_(1, 2))
    assert not rep.hypotheses_met and rep.reason.startswith("hypotheses not met")
    assert rep.sound


def test_eps_enlargement_reports_dual_norm(diamond_square):
    rep = eps_frechet_enlargement_check(diamond_square, (2, 1), (1, 1), F_(1, 100))
    assert rep.xstar_dual_norm == 2  # l1 norm of (1, 1), dual to the linf ambient norm
    assert rep.k0 == default_k0(F_(1, 100), 2, 1)


def test_one_sided_limiting(left_square):
    assert one_sided_limiting_membership(left_square, (1, -1), (1, 0)).member
    assert not one_sided_limiting_membership(left_square, (1, -1), (2, 0)).member
    v = one_sided_limiting_membership(left_square, (1, -1), (0, 0))
    assert not v.member and v.conjunct == "S_star"
    with pytest.raises(PreconditionUnverified):
        one_sided_limiting_membership(left_square, (1, 0), (1, 0))


def test_one_sided_union_flagged():
    A, B = Polytope.box((0, 0), (1, 1)), Polytope.box((3, 0), (4, 1))
    inst = MinTimeInstance("linf", Dynamics(Polytope.cross(2, 1)), TargetSet((A, B)))
    v = one_sided_limiting_membership(inst, (2, F_(1, 2)), (-1, 0))
    assert v.approximate


# --- polyhedral convex functions ---

def test_polyhedral_singular_examples():
    f = L1_ON_SQUARE
    assert polyhedral_fn_singular(f, (1, F_(1, 2)), (3, 0)).member
    v = polyhedral_fn_singular(f, (1, F_(1, 2)), (-1, 0))
    assert not v.member and v.certificate.point[0] == 0
    assert not polyhedral_fn_singular(f, (F_(1, 2), F_(1, 2)), (1, 0)).member
    assert polyhedral_fn_singular(f, (F_(1, 2), F_(1, 2)), (0, 0)).member
    with pytest.raises(NotInDomain):
        polyhedral_fn_singular(f, (2, 0), (0, 0))


def test_witness_sequence():
    f = L1_ON_SQUARE
    xbar, xs = (1, F_(1, 2)), (1, 0)
    seq = singular_witness_sequence(f, xbar, xs, 5)
    u = f.active_slope(xbar)
    for term in seq:
        assert term.x == xbar and term.lam == F_(1, term.k)
        assert polyhedral_norm(term.residual(xs), NormKind.L1) == polyhedral_norm(u, NormKind.L1) / term.k
        assert witness_term_is_subgradient(f, term).member
    zero = singular_witness_sequence(f, xbar, (0, 0), 3)
    assert all(t.xstar_k == u for t in zero)
    with pytest.raises(NotASingularSubgradient):
        singular_witness_sequence(f, xbar, (-1, 0), 3)


def test_polyhedral_function_values():
    f = L1_ON_SQUARE
    assert f((F_(1, 2), F_(1, 3))) == F_(5, 6)
    assert f((2, 0)) == float("inf")
