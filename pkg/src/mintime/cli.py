"""Command line: ``mintime eval|member|verify|enlarge``.

Exit codes: 0 success, 1 theorem disagreements, 2 usage or validation error.
All rationals travel as strings (``"p/q"``, integers bare, ``"inf"``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Optional

import jsonschema

from .convex import DualSetKind, Dynamics, dual_set_membership
from .core import MinTimeInstance, TargetSet, enlargement, eval_T
from .errors import MintimeError, ScenarioError, UnknownTheorem
from .geometry import MAX_DIMENSION, NormKind, Polytope
from .normals import eps_normal_membership, frechet_normal_membership
from .oracles import SamplingPlan
from .rational import format_rational, parse_rational
from .subdiff import (
    eps_frechet_enlargement_check,
    frechet_subdiff_membership,
    one_sided_limiting_membership,
    singular_subdiff_membership,
)
from .suites import SCHEMA_VERSION, THEOREMS, default_subjects, run_theorem_suite

RATIONAL = {"type": ["string", "integer"], "pattern": r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$"}
VECTOR = {"type": "array", "items": RATIONAL, "minItems": 1, "maxItems": MAX_DIMENSION}
POLYTOPE = {
    "type": "object",
    "required": ["vertices"],
    "properties": {"vertices": {"type": "array", "items": VECTOR, "minItems": 1}},
}
SET_KINDS = (
    "sstar",
    "sstar-eps",
    "cstar",
    "fplus",
    "normal",
    "eps-normal",
    "singular-subdiff",
    "frechet-subdiff",
    "limiting-subdiff",
    "eps-frechet",
)
SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mintime scenario",
    "type": "object",
    "required": ["dimension", "norm", "dynamics", "target"],
    "properties": {
        "dimension": {"type": "integer", "minimum": 1, "maximum": MAX_DIMENSION},
        "norm": {"enum": ["l1", "linf"]},
        "dynamics": POLYTOPE,
        "target": {"type": "array", "items": POLYTOPE, "minItems": 1},
        "queries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {
                    "kind": {"enum": ["eval", "member", "enlarge"]},
                    "point": VECTOR,
                    "xstar": VECTOR,
                    "set": {"enum": list(SET_KINDS)},
                    "eps": RATIONAL,
                    "r": RATIONAL,
                    "k0": RATIONAL,
                    "seed": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mintime theorem report",
    "type": "object",
    "required": ["schema_version", "theorem", "seed", "subjects", "summary", "records"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "theorem": {"enum": list(THEOREMS)},
        "seed": {"type": "integer", "minimum": 0},
        "subjects": {"type": "array", "items": {"type": "string"}},
        "summary": {
            "type": "object",
            "required": ["queries", "compared", "skipped", "approximate", "disagreements"],
            "additionalProperties": {"type": "integer"},
        },
        "note": {"type": "string"},
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["subject", "index", "kind", "agree", "approximate", "skipped"],
                "properties": {
                    "agree": {"type": "boolean"},
                    "approximate": {"type": "boolean"},
                    "skipped": {"type": "boolean"},
                    "point": VECTOR,
                    "xstar": VECTOR,
                },
            },
        },
    },
}

U64 = 2**64


class UsageError(Exception):
    pass


# --- scenario parsing --------------------------------------------------------

def _field(path) -> str:
    return "/".join(str(p) for p in path) or "<root>"


def _line_of(text: str, path) -> Optional[int]:
    # best effort: first line mentioning the last named key of the path
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    needle = f'"{keys[-1]}"'
    for n, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return n
    return None


def _vector(data, where: str, d: int) -> tuple:
    try:
        v = tuple(parse_rational(str(c)) for c in data)
    except ValueError as exc:
        raise ScenarioError(str(exc), where) from None
    if len(v) != d:
        raise ScenarioError(f"expected {d} coordinates, got {len(v)}", where)
    return v


def parse_scenario(text: str) -> dict:
    """Validate a scenario and build its instance; errors carry the offending field."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    errors = sorted(jsonschema.Draft202012Validator(SCENARIO_SCHEMA).iter_errors(data), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        line = _line_of(text, list(e.path))
        where = _field(e.path) + (f" (line {line})" if line else "")
        raise ScenarioError(e.message, where)
    d = data["dimension"]
    F = Polytope(tuple(_vector(v, f"dynamics/vertices/{i}", d) for i, v in enumerate(data["dynamics"]["vertices"])))
    pieces = []
    for k, P in enumerate(data["target"]):
        pieces.append(Polytope(tuple(_vector(v, f"target/{k}/vertices/{i}", d) for i, v in enumerate(P["vertices"]))))
    try:
        dyn = Dynamics(F)
    except MintimeError as exc:
        raise ScenarioError(str(exc), "dynamics") from None
    inst = MinTimeInstance(NormKind.parse(data["norm"]), dyn, TargetSet(tuple(pieces)))
    queries = []
    for j, q in enumerate(data.get("queries", [])):
        item = {"kind": q["kind"], "set": q.get("set"), "seed": q.get("seed", 0)}
        for key in ("point", "xstar"):
            if key in q:
                item[key] = _vector(q[key], f"queries/{j}/{key}", d)
        for key in ("eps", "r", "k0"):
            if key in q:
                try:
                    item[key] = parse_rational(str(q[key]))
                except ValueError as exc:
                    raise ScenarioError(str(exc), f"queries/{j}/{key}") from None
        queries.append(item)
    return {"instance": inst, "queries": queries}


def load_scenario(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read scenario {path}: {exc.strerror}") from None
    return parse_scenario(text)


# --- commands ----------------------------------------------------------------

def cmd_eval(inst: MinTimeInstance, point) -> dict:
    tv = eval_T(inst, point)
    out = {"point": [format_rational(c) for c in point], "value": format_rational(tv.value)}
    if tv.finite:
        w = tv.witness
        out["witness"] = {
            "t": format_rational(w.t),
            "f": [format_rational(c) for c in w.f],
            "w": [format_rational(c) for c in w.w],
            "piece": w.piece,
        }
    return out


def cmd_member(inst: MinTimeInstance, kind: str, point, xstar, eps=None, r=None, k0=None, seed=0) -> dict:
    if kind not in SET_KINDS:
        raise UsageError(f"unknown set kind {kind!r}; expected one of {', '.join(SET_KINDS)}")
    if xstar is None:
        raise UsageError("--xstar is required")
    needs_point = kind not in ("sstar", "sstar-eps", "cstar", "fplus")
    if needs_point and point is None:
        raise UsageError(f"--point is required for {kind}")
    if kind in ("sstar-eps", "eps-normal", "eps-frechet") and eps is None:
        raise UsageError(f"--eps is required for {kind}")
    out = {"set": kind, "xstar": [format_rational(c) for c in xstar]}
    if point is not None:
        out["point"] = [format_rational(c) for c in point]
    if kind == "sstar":
        v = dual_set_membership(inst.F, inst.norm, xstar, DualSetKind.sstar())
    elif kind == "sstar-eps":
        v = dual_set_membership(inst.F, inst.norm, xstar, DualSetKind.sstar_eps(eps))
    elif kind == "cstar":
        v = dual_set_membership(inst.F, inst.norm, xstar, DualSetKind.cstar())
    elif kind == "fplus":
        v = dual_set_membership(inst.F, inst.norm, xstar, DualSetKind.fplus())
    elif kind in ("normal", "eps-normal"):
        S = inst.target if r is None else enlargement(inst, r)
        if kind == "normal":
            v = frechet_normal_membership(S, point, xstar)
        else:
            v = eps_normal_membership(S, inst.norm, point, xstar, eps)
        if r is not None:
            out["r"] = format_rational(r)
    elif kind == "singular-subdiff":
        v = singular_subdiff_membership(inst, point, xstar)
    elif kind == "frechet-subdiff":
        v = frechet_subdiff_membership(inst, point, xstar)
    elif kind == "limiting-subdiff":
        v = one_sided_limiting_membership(inst, point, xstar)
    else:
        rep = eps_frechet_enlargement_check(inst, point, xstar, eps, k0, SamplingPlan.default(seed))
        out["report"] = rep.to_json()
        out["member"] = rep.conclusion
        return out
    out.update(v.to_json())
    return out


def cmd_enlarge(inst: MinTimeInstance, r) -> dict:
    S = enlargement(inst, r)
    return {"r": format_rational(r), "target": [P.to_json() for P in S.pieces]}


def cmd_verify(theorem_id: str, seed: int, count: int):
    if theorem_id not in THEOREMS:
        raise UnknownTheorem(f"unknown theorem id {theorem_id!r}; expected one of {', '.join(THEOREMS)}")
    subjects = default_subjects(theorem_id, seed, count)
    return run_theorem_suite(theorem_id, subjects, SamplingPlan.default(seed), seed)


# --- plumbing ----------------------------------------------------------------

def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mintime-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(obj, out: Optional[str]) -> None:
    text = dumps(obj)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _vec_arg(text: Optional[str], name: str, d: int):
    if text is None:
        return None
    try:
        return _vector([c for c in text.split(",")], name, d)
    except ScenarioError as exc:
        raise UsageError(f"{name}: {exc}") from None


def _rat_arg(text: Optional[str], name: str):
    if text is None:
        return None
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise UsageError(f"{name}: {exc}") from None


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < U64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mintime", description="Exact minimal time function and subdifferential checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, scenario=True):
        if scenario:
            sp.add_argument("--scenario", required=True, help="scenario JSON file")
        sp.add_argument("--out", help="write JSON here (atomically) instead of stdout")
        sp.add_argument("--seed", type=_seed, default=0)

    e = sub.add_parser("eval", help="evaluate T at a point")
    common(e)
    e.add_argument("--point", help="comma separated rationals; default: the scenario's eval queries")

    m = sub.add_parser("member", help="decide x* membership in a dual set, normal set or subdifferential")
    common(m)
    m.add_argument("--set", dest="set_kind", help=", ".join(SET_KINDS))
    m.add_argument("--point")
    m.add_argument("--xstar")
    m.add_argument("--eps")
    m.add_argument("--r")
    m.add_argument("--k0")

    v = sub.add_parser("verify", help="run a theorem suite; exit 1 on any disagreement")
    v.add_argument("theorem", help=", ".join(THEOREMS))
    common(v, scenario=False)
    v.add_argument("--instances", type=int, default=20)

    n = sub.add_parser("enlarge", help="vertices of the r-enlargement of the target")
    common(n)
    n.add_argument("--r")
    return p


def _run(args) -> int:
    if args.command == "verify":
        if args.instances < 1:
            raise UsageError("--instances must be positive")
        report = cmd_verify(args.theorem, args.seed, args.instances)
        _emit(report.to_json(), args.out)
        if not report.ok:
            where = args.out or "stdout"
            sys.stderr.write(f"{len(report.disagreements)} disagreement(s); report at {where}\n")
            return 1
        return 0
    sc = load_scenario(args.scenario)
    inst = sc["instance"]
    d = inst.dim
    queries = [q for q in sc["queries"] if q["kind"] == args.command]
    if args.command == "eval":
        point = _vec_arg(args.point, "--point", d)
        if point is not None:
            _emit(cmd_eval(inst, point), args.out)
            return 0
        if not queries or any("point" not in q for q in queries):
            raise UsageError("give --point or eval queries with points in the scenario")
        _emit([cmd_eval(inst, q["point"]) for q in queries], args.out)
        return 0
    if args.command == "enlarge":
        r = _rat_arg(args.r, "--r")
        if r is not None:
            _emit(cmd_enlarge(inst, r), args.out)
            return 0
        if not queries or any("r" not in q for q in queries):
            raise UsageError("give --r or enlarge queries with r in the scenario")
        _emit([cmd_enlarge(inst, q["r"]) for q in queries], args.out)
        return 0
    if args.set_kind is not None:
        result = cmd_member(inst, args.set_kind, _vec_arg(args.point, "--point", d), _vec_arg(args.xstar, "--xstar", d),
                            _rat_arg(args.eps, "--eps"), _rat_arg(args.r, "--r"), _rat_arg(args.k0, "--k0"), args.seed)
        _emit(result, args.out)
        return 0
    if not queries:
        raise UsageError("give --set or member queries in the scenario")
    results = []
    for q in queries:
        if q["set"] is None:
            raise UsageError("member queries need a 'set' field")
        results.append(cmd_member(inst, q["set"], q.get("point"), q.get("xstar"), q.get("eps"), q.get("r"),
                                  q.get("k0"), q.get("seed", args.seed)))
    _emit(results, args.out)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ScenarioError as exc:
        sys.stderr.write(f"mintime: invalid scenario: {exc}\n")
        return 2
    except (UsageError, MintimeError) as exc:
        sys.stderr.write(f"mintime: error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
