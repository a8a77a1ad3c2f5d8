"""Exact rational linear programming.

Two-phase primal simplex with Bland's anti-cycling rule. The tableau is kept
in integer (fraction-free) form: every row shares one positive denominator
``D`` equal to the absolute determinant of the current basis, and pivots use
Bareiss-style exact division. This is the same arithmetic as a Fraction
tableau but without a gcd per entry, which matters because every geometric
query in the package ends up here.

Variables with a finite lower bound are shifted to start at zero; variables
with no lower bound are split into a nonnegative pair ``x = x+ - x-``. Both
maps are inverted when reporting points and rays, so witnesses always live in
the caller's coordinates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .errors import StructuralError
from .rational import Q

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = {LE: LE, EQ: EQ, GE: GE, "=": EQ, "<": LE, ">": GE}


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    row: tuple
    rel: str
    rhs: Fraction


@dataclass(frozen=True)
class LinearProgram:
    """``sense`` ``c.x`` subject to ``row.x rel rhs`` and ``x_j >= lower_j``.

    ``lower`` defaults to all zeros; an entry of ``None`` means the variable
    is free. Inputs are coerced to Fractions on construction.
    """

    objective: tuple
    constraints: tuple = ()
    lower: Optional[tuple] = None
    sense: str = "min"

    def __post_init__(self):
        try:
            c = tuple(Q(v) for v in self.objective)
        except TypeError as exc:
            raise StructuralError(f"objective: {exc}") from None
        n = len(c)
        if n == 0:
            raise StructuralError("a linear program needs at least one variable")
        if self.sense not in ("min", "max"):
            raise StructuralError(f"sense must be 'min' or 'max', got {self.sense!r}")
        cons = []
        for k, con in enumerate(self.constraints):
            if isinstance(con, Constraint):
                row, rel, rhs = con.row, con.rel, con.rhs
            else:
                try:
                    row, rel, rhs = con
                except (TypeError, ValueError):
                    raise StructuralError(f"constraint {k} is not a (row, rel, rhs) triple") from None
            row = tuple(Q(v) for v in row)
            if len(row) != n:
                raise StructuralError(f"constraint {k} has {len(row)} coefficients, expected {n}")
            if rel not in _RELATIONS:
                raise StructuralError(f"constraint {k}: unknown relation {rel!r}")
            cons.append(Constraint(row, _RELATIONS[rel], Q(rhs)))
        if self.lower is None:
            lower = (Fraction(0),) * n
        else:
            lower = tuple(None if v is None else Q(v) for v in self.lower)
            if len(lower) != n:
                raise StructuralError(f"lower has {len(lower)} entries, expected {n}")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", tuple(cons))
        object.__setattr__(self, "lower", lower)

    @property
    def n(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpOutcome:
    """Solver result.

    ``point`` is the optimal vertex for OPTIMAL and a feasible starting point
    for UNBOUNDED; ``ray`` is an improving recession direction (UNBOUNDED only).
    """

    status: Status
    value: Optional[Fraction] = None
    point: Optional[tuple] = None
    ray: Optional[tuple] = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def feasible(self) -> bool:
        return self.status is not Status.INFEASIBLE


def _denominators_lcm(values) -> int:
    out = 1
    for v in values:
        if v.denominator != 1:
            out = lcm(out, v.denominator)
    return out


class _Tableau:
    __slots__ = ("rows", "basis", "D", "width", "m")

    def __init__(self, rows, basis, width):
        self.rows = rows  # constraint rows followed by objective rows
        self.basis = basis
        self.D = 1
        self.width = width
        self.m = len(basis)

    def pivot(self, i: int, j: int) -> None:
        rows = self.rows
        piv_row = rows[i]
        p = piv_row[j]
        D = self.D
        for k, row in enumerate(rows):
            if k == i:
                continue
            a = row[j]
            if a == 0:
                if p != D:
                    rows[k] = [x * p // D for x in row]
            else:
                rows[k] = [(p * x - a * y) // D for x, y in zip(row, piv_row)]
        if p < 0:
            for k in range(len(rows)):
                rows[k] = [-x for x in rows[k]]
            p = -p
        self.D = p
        self.basis[i] = j

    def run(self, obj: int, allowed: int):
        """Bland-rule iterations on objective row ``obj`` over columns < allowed.

        Returns None at optimality, or the entering column of an unbounded ray.
        """
        rows = self.rows
        m = self.m
        rhs = self.width
        while True:
            orow = rows[obj]
            entering = -1
            for j in range(allowed):
                if orow[j] < 0:
                    entering = j
                    break
            if entering < 0:
                return None
            best = -1
            bnum = bden = 0
            for i in range(m):
                a = rows[i][entering]
                if a > 0:
                    b = rows[i][rhs]
                    if best < 0:
                        best, bnum, bden = i, b, a
                        continue
                    lhs, rhs_cmp = b * bden, bnum * a
                    if lhs < rhs_cmp or (lhs == rhs_cmp and self.basis[i] < self.basis[best]):
                        best, bnum, bden = i, b, a
            if best < 0:
                return entering
            self.pivot(best, entering)

    def values(self, ncols: int):
        out = [Fraction(0)] * ncols
        D = self.D
        for i, col in enumerate(self.basis):
            if col < ncols:
                out[col] = Fraction(self.rows[i][self.width], D)
        return out


def solve(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly. Deterministic; raises StructuralError only on malformed input."""
    if not isinstance(lp, LinearProgram):
        raise StructuralError("solve expects a LinearProgram")
    n = lp.n
    # standard-form columns: (original var, sign)
    cols = []
    for j, lb in enumerate(lp.lower):
        cols.append((j, 1))
        if lb is None:
            cols.append((j, -1))
    nv = len(cols)

    std_rows = []
    for con in lp.constraints:
        coeffs = [con.row[j] * s for j, s in cols]
        rhs = con.rhs - sum((con.row[j] * lb for j, lb in enumerate(lp.lower) if lb is not None), Fraction(0))
        std_rows.append((coeffs, con.rel, rhs))

    m = len(std_rows)
    n_slack = sum(1 for _, rel, _ in std_rows if rel != EQ)
    slack_base = nv
    # Rows whose slack enters with +1 and nonnegative rhs start basic on it.
    needs_art = []
    prepared = []
    slack_col = slack_base
    for coeffs, rel, rhs in std_rows:
        s_col, s_coef = None, 0
        if rel != EQ:
            s_col, s_coef = slack_col, (1 if rel == LE else -1)
            slack_col += 1
        sign = 1
        if rhs < 0:
            sign = -1
        coeffs = [sign * v for v in coeffs]
        rhs = sign * rhs
        s_coef *= sign
        prepared.append((coeffs, s_col, s_coef, rhs))
        needs_art.append(not (s_col is not None and s_coef == 1))
    art_base = slack_base + n_slack
    n_art = sum(needs_art)
    width = art_base + n_art

    rows = []
    basis = []
    art_col = art_base
    for (coeffs, s_col, s_coef, rhs), art in zip(prepared, needs_art):
        scale = _denominators_lcm(coeffs + [rhs])
        row = [int(v * scale) for v in coeffs] + [0] * (width - nv) + [int(rhs * scale)]
        if s_col is not None:
            # rescaling the slack variable keeps its column a unit (or -unit) vector
            row[s_col] = s_coef
        if art:
            row[art_col] = 1
            basis.append(art_col)
            art_col += 1
        else:
            basis.append(s_col)
        rows.append(row)

    c = lp.objective if lp.sense == "min" else tuple(-v for v in lp.objective)
    c_std = [c[j] * s for j, s in cols]
    cscale = _denominators_lcm(c_std)
    obj2 = [int(v * cscale) for v in c_std] + [0] * (width - nv) + [0]
    obj1 = [0] * (width + 1)
    for i, art in enumerate(needs_art):
        if art:
            for k, v in enumerate(rows[i]):
                obj1[k] -= v
    for k in range(art_base, width):
        obj1[k] = 0

    tab = _Tableau(rows + [obj2, obj1], basis, width)
    i_obj2, i_obj1 = m, m + 1

    if n_art:
        tab.run(i_obj1, width)
        if tab.rows[i_obj1][width] != 0:
            return LpOutcome(Status.INFEASIBLE)
        for i in range(m):
            if tab.basis[i] >= art_base:
                row = tab.rows[i]
                for j in range(art_base):
                    if row[j] != 0:
                        tab.pivot(i, j)
                        break
                # otherwise the row is redundant; its zero entries keep it inert
    entering = tab.run(i_obj2, art_base)

    std_vals = tab.values(nv)
    point = _to_original(lp, cols, std_vals, shift=True)
    if entering is not None:
        d_std = [Fraction(0)] * nv
        if entering < nv:
            d_std[entering] = Fraction(1)
        for i, col in enumerate(tab.basis):
            if col < nv:
                d_std[col] = Fraction(-tab.rows[i][entering], tab.D)
        ray = _to_original(lp, cols, d_std, shift=False)
        return LpOutcome(Status.UNBOUNDED, point=point, ray=ray)
    value = sum((a * b for a, b in zip(lp.objective, point)), Fraction(0))
    return LpOutcome(Status.OPTIMAL, value=value, point=point)


def _to_original(lp, cols, std_vals, shift):
    out = [Fraction(0)] * lp.n
    for (j, s), v in zip(cols, std_vals):
        out[j] += s * v
    if shift:
        for j, lb in enumerate(lp.lower):
            if lb is not None:
                out[j] += lb
    return tuple(out)


def _row_value(row, x):
    return sum((a * b for a, b in zip(row, x)), Fraction(0))


def is_feasible_point(lp: LinearProgram, x: Sequence[Fraction]) -> bool:
    if len(x) != lp.n:
        return False
    for lb, v in zip(lp.lower, x):
        if lb is not None and v < lb:
            return False
    for con in lp.constraints:
        lhs = _row_value(con.row, x)
        if con.rel == LE and lhs > con.rhs:
            return False
        if con.rel == GE and lhs < con.rhs:
            return False
        if con.rel == EQ and lhs != con.rhs:
            return False
    return True


def is_recession_ray(lp: LinearProgram, d: Sequence[Fraction]) -> bool:
    if len(d) != lp.n or all(v == 0 for v in d):
        return False
    for lb, v in zip(lp.lower, d):
        if lb is not None and v < 0:
            return False
    for con in lp.constraints:
        lhs = _row_value(con.row, d)
        if (con.rel == LE and lhs > 0) or (con.rel == GE and lhs < 0) or (con.rel == EQ and lhs != 0):
            return False
    return True


def verify_outcome(lp: LinearProgram, out: LpOutcome) -> bool:
    """Re-check a certificate with exact substitution; never raises."""
    try:
        if out.status is Status.OPTIMAL:
            if out.point is None or out.value is None:
                return False
            x = tuple(Q(v) for v in out.point)
            if not is_feasible_point(lp, x) or _row_value(lp.objective, x) != out.value:
                return False
            again = solve(lp)
            return again.status is Status.OPTIMAL and again.value == out.value
        if out.status is Status.UNBOUNDED:
            if out.point is None or out.ray is None:
                return False
            x = tuple(Q(v) for v in out.point)
            d = tuple(Q(v) for v in out.ray)
            if not is_feasible_point(lp, x) or not is_recession_ray(lp, d):
                return False
            slope = _row_value(lp.objective, d)
            return slope < 0 if lp.sense == "min" else slope > 0
        if out.status is Status.INFEASIBLE:
            return solve(lp).status is Status.INFEASIBLE
    except (TypeError, ValueError, ArithmeticError):
        return False
    return False


def dual_program(lp: LinearProgram) -> LinearProgram:
    """Mechanically formed LP dual with the same optimal value as ``lp``.

    The primal is first rewritten as ``min c.x`` over free ``x`` with ``>=``
    and ``==`` rows (finite lower bounds become rows). The dual is then
    ``max b.y`` s.t. ``A^T y = c``, ``y >= 0`` on ``>=`` rows. For a ``max``
    primal the value is negated, so the dual is returned as a ``min``.
    """
    n = lp.n
    c = lp.objective if lp.sense == "min" else tuple(-v for v in lp.objective)
    rows, rhs, free = [], [], []
    for con in lp.constraints:
        if con.rel == LE:
            rows.append(tuple(-v for v in con.row))
            rhs.append(-con.rhs)
            free.append(False)
        else:
            rows.append(con.row)
            rhs.append(con.rhs)
            free.append(con.rel == EQ)
    for j, lb in enumerate(lp.lower):
        if lb is not None:
            rows.append(tuple(Fraction(int(k == j)) for k in range(n)))
            rhs.append(lb)
            free.append(False)
    if not rows:
        # no rows: dual is the feasibility question c == 0 over a 1-variable dummy
        rows.append((Fraction(0),) * n)
        rhs.append(Fraction(0))
        free.append(True)
    dual_cons = [(tuple(r[j] for r in rows), EQ, c[j]) for j in range(n)]
    lower = tuple(None if f else Fraction(0) for f in free)
    if lp.sense == "min":
        return LinearProgram(tuple(rhs), dual_cons, lower, sense="max")
    return LinearProgram(tuple(-v for v in rhs), dual_cons, lower, sense="min")
