"""Exact minimal time functions with constant polytope dynamics.

``T(x) = min{t >= 0 : (x + tF) meets Omega}`` for polytopes ``F`` and a finite
union of polytopes ``Omega``, evaluated in exact rational arithmetic, together
with membership tests for its subdifferentials and the oracles that check them.
"""

from .convex import (
    DualSet,
    DualSetKind,
    Dynamics,
    dual_set_membership,
    gauge,
    normalize_to_sstar,
    support,
)
from .core import (
    MinTimeInstance,
    TargetSet,
    TimeValue,
    Witness,
    check_basic_properties,
    dom_contains,
    enlargement,
    eval_T,
)
from .errors import MintimeError
from .geometry import NormKind, Polytope, contains, dual_norm, minkowski_sum, norm_of_set, polyhedral_norm
from .lp import LinearProgram, Status, solve
from .normals import DomainData, epigraph_singular_membership, eps_normal_membership, frechet_normal_membership
from .oracles import (
    SamplingPlan,
    approx_limiting_normals,
    brute_force_T,
    random_instance,
    subgradient_inequality_exact,
    subgradient_inequality_sampled,
)
from .polyfn import PolyhedralConvexFunction
from .rational import INF, Q
from .subdiff import (
    KappaParams,
    ell,
    eps_frechet_enlargement_check,
    frechet_subdiff_membership,
    kappa,
    lemma51_check,
    one_sided_limiting_membership,
    polyhedral_fn_singular,
    singular_subdiff_membership,
    singular_witness_sequence,
)
from .suites import TheoremReport, run_theorem_suite

__version__ = "0.1.0"
