"""Command-line front end: JSON problem files in, JSON reports out.

Subcommands: enumerate, solve, classify, invert, estimate-k, immerse, limit,
check.  Reports are byte-deterministic: fixed field order and 17-significant-
digit float serialization.  Exit codes: 0 success, 2 invalid input,
3 geometrically infeasible, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .curvature import estimate_curvature
from .dekster_wilker import BOUNDARY_TOL
from .enumeration import (EnumerationOptions, enumerate_incongruent, key_string,
                          max_count)
from .errors import InfeasibleError, NumericalError
from .geometry import CurvedSpace
from .immersion import CombinedTuple, schoenberg_rho_search
from .inverse import (InfinityFamily, infinity_limit_inverse, inverse_weights,
                      solve_infinity_tree)
from .realizability import PSD_TOL_FACTOR, RANK_TOL_FACTOR, check_edge_matrix
from .solver import (STATIONARY_TOL_FACTOR, SimplexRealization, classify_edges,
                     first_order_residual, branch_bound_check, multitree_solve,
                     volume_additivity_check, FermatTree, Classification)

SCHEMA = "ffm-1"
CHECK_FIRST_ORDER_TOL = 1e-7
CHECK_VOLUME_TOL = 1e-9


def _emit_json(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, %.17g floats, ASCII."""
    out: list[str] = []

    def walk(x):
        if x is None:
            out.append("null")
        elif isinstance(x, (bool, np.bool_)):
            out.append("true" if bool(x) else "false")
        elif isinstance(x, (int, np.integer)):
            out.append(str(int(x)))
        elif isinstance(x, (float, np.floating)):
            out.append(f"{float(x):.17g}")
        elif isinstance(x, str):
            out.append(json.dumps(x))
        elif isinstance(x, (list, tuple, np.ndarray)):
            out.append("[")
            items = list(x)
            for i, item in enumerate(items):
                if i:
                    out.append(",")
                walk(item)
            out.append("]")
        elif isinstance(x, dict):
            out.append("{")
            for i, (key, val) in enumerate(x.items()):
                if i:
                    out.append(",")
                out.append(json.dumps(str(key)))
                out.append(":")
                walk(val)
            out.append("}")
        else:
            raise TypeError(f"cannot serialize {type(x)}")

    walk(obj)
    return "".join(out)


def _write(report: dict, out_path: str | None) -> None:
    text = _emit_json(report) + "\n"
    if out_path:
        with open(out_path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _problem_from_args(args) -> dict:
    if args.input:
        prob = _load_json(args.input)
    else:
        prob = {}
        if args.n is None or args.k is None or args.lengths is None:
            raise ValueError("provide --input or all of --n/--k/--lengths")
        prob["n"] = args.n
        prob["k"] = args.k
        prob["lengths"] = _load_json(args.lengths)
        if getattr(args, "weights", None):
            prob["weights"] = _load_json(args.weights)
    if args.n is not None:
        prob["n"] = args.n
    if args.k is not None:
        prob["k"] = args.k
    return prob


def _tolerances(weights=None) -> dict:
    tol = {
        "psd": PSD_TOL_FACTOR,
        "rank": RANK_TOL_FACTOR,
        "dw_boundary": BOUNDARY_TOL,
        "first_order": CHECK_FIRST_ORDER_TOL,
        "volume_additivity": CHECK_VOLUME_TOL,
    }
    if weights is not None:
        tol["stationary"] = STATIONARY_TOL_FACTOR * float(np.sum(weights))
    return tol


def _classification_dict(cls) -> dict:
    return {
        "kind": cls.kind,
        "vertex": None if cls.vertex is None else int(cls.vertex),
        "violating": [int(v) for v in cls.violating],
    }


def _matrix(a: np.ndarray) -> list:
    return [[float(v) for v in row] for row in a]


def cmd_enumerate(args) -> int:
    prob = _problem_from_args(args)
    space = CurvedSpace(float(prob["k"]), int(prob["n"]))
    opts = EnumerationOptions(require_dw=bool(prob.get("options", {}).get("require_dw", False)))
    ms = enumerate_incongruent(prob["lengths"], space, opts)
    report = {
        "schema": SCHEMA,
        "command": "enumerate",
        "n": space.dim,
        "k": space.k,
        "tolerances": _tolerances(),
        "lengths": [float(x) for x in prob["lengths"]],
        "require_dw": opts.require_dw,
        "dw_member": ms.dw_member,
        "count": len(ms),
        "max_count": max_count(space.dim),
        "members": [
            {
                "canonical_key": key_string(mb.assignment.key),
                "edges": _matrix(mb.assignment.edges),
                "rank": mb.report.rank,
                "volume": mb.report.volume,
            }
            for mb in ms.members
        ],
    }
    _write(report, args.out)
    if args.plot:
        _plot_members(ms, args.plot)
    return 0


def _plot_members(ms, path: str) -> None:
    from .solver import realization_from_witness
    from .svg import render_trees

    groups = []
    for mb in ms.members:
        real = realization_from_witness(mb.report.witness, ms.space)
        groups.append((real.points, None, None, key_string(mb.assignment.key)[:24]))
    render_trees(groups, path)


def _solve_report(prob: dict, command: str) -> tuple[dict, object]:
    space = CurvedSpace(float(prob["k"]), int(prob["n"]))
    weights = [float(x) for x in prob["weights"]]
    opts = EnumerationOptions(require_dw=bool(prob.get("options", {}).get("require_dw", False)))
    sol = multitree_solve(prob["lengths"], weights, space, opts)
    entries = []
    for e in sol.entries:
        tree = e.tree
        entries.append({
            "canonical_key": key_string(e.member.assignment.key),
            "edges": _matrix(e.member.assignment.edges),
            "classification": _classification_dict(tree.classification),
            "point": [float(v) for v in tree.point],
            "branches": [float(v) for v in tree.branches],
            "objective": tree.objective,
            "stationarity_residual": tree.residual,
            "first_order_residual": e.first_order,
            "volume_additivity": e.volume_additivity,
            "branch_bound_ok": e.branch_bound_ok,
        })
    report = {
        "schema": SCHEMA,
        "command": command,
        "n": space.dim,
        "k": space.k,
        "tolerances": _tolerances(weights),
        "lengths": [float(x) for x in prob["lengths"]],
        "weights": weights,
        "require_dw": opts.require_dw,
        "dw_member": sol.multisimplex.dw_member,
        "count": len(sol),
        "max_count": max_count(space.dim),
        "entries": entries,
    }
    return report, sol


def cmd_solve(args) -> int:
    prob = _problem_from_args(args)
    report, sol = _solve_report(prob, "solve")
    _write(report, args.out)
    if args.plot:
        from .svg import render_trees

        groups = [
            (e.realization.points, e.tree.point, e.tree.branches,
             key_string(e.member.assignment.key)[:24])
            for e in sol.entries
        ]
        render_trees(groups, args.plot)
    return 0


def cmd_classify(args) -> int:
    prob = _problem_from_args(args)
    space = CurvedSpace(float(prob["k"]), int(prob["n"]))
    weights = [float(x) for x in prob["weights"]]
    opts = EnumerationOptions(require_dw=bool(prob.get("options", {}).get("require_dw", False)))
    ms = enumerate_incongruent(prob["lengths"], space, opts)
    entries = []
    for mb in ms.members:
        cls = classify_edges(mb.assignment.edges, weights, space)
        entries.append({
            "canonical_key": key_string(mb.assignment.key),
            "classification": _classification_dict(cls),
        })
    report = {
        "schema": SCHEMA,
        "command": "classify",
        "n": space.dim,
        "k": space.k,
        "tolerances": _tolerances(weights),
        "lengths": [float(x) for x in prob["lengths"]],
        "weights": weights,
        "count": len(ms),
        "entries": entries,
    }
    _write(report, args.out)
    return 0


def cmd_invert(args) -> int:
    prob = _load_json(args.input)
    if float(prob.get("k", 0.0)) != 0.0:
        raise InfeasibleError("inverse weights are implemented for k = 0")
    points = np.asarray(prob["points"], dtype=float)
    space = CurvedSpace(0.0, points.shape[1])
    realization = SimplexRealization(points, space)
    w = inverse_weights(np.asarray(prob["a0"], dtype=float), realization,
                        float(prob.get("csum", 1.0)))
    report = {
        "schema": SCHEMA,
        "command": "invert",
        "n": space.dim,
        "k": 0.0,
        "csum": float(prob.get("csum", 1.0)),
        "weights": [float(x) for x in w],
    }
    _write(report, args.out)
    return 0


def cmd_estimate_k(args) -> int:
    prob = _load_json(args.input)
    edges = check_edge_matrix(np.asarray(prob["edges"], dtype=float))
    est = estimate_curvature(edges, prob["sign"], float(prob["k_lo"]), float(prob["k_hi"]),
                             float(prob.get("tol", 1e-10)))
    report = {
        "schema": SCHEMA,
        "command": "estimate-k",
        "sign": prob["sign"],
        "status": est.status,
        "k": est.k,
        "roots": [float(r) for r in est.roots],
    }
    _write(report, args.out)
    return 0


def cmd_immerse(args) -> int:
    prob = _load_json(args.input)
    ct = CombinedTuple(np.asarray(prob["edges"], dtype=float))
    res = schoenberg_rho_search(ct, int(prob["n"]), float(prob["rho_lo"]),
                                float(prob["rho_hi"]), float(prob.get("tol", 1e-9)))
    report = {
        "schema": SCHEMA,
        "command": "immerse",
        "n": int(prob["n"]),
        "rho0": res.rho0,
        "realizable": None if res.report is None else res.report.realizable,
        "cause": res.cause,
    }
    _write(report, args.out)
    return 0


def cmd_limit(args) -> int:
    prob = _load_json(args.input)
    fam = InfinityFamily(*[float(x) for x in prob["triangle"]],
                         tuple(float(x) for x in prob["b"]),
                         tuple(float(x) for x in prob["c"]))
    scan = []
    for m in prob["m_values"]:
        res = solve_infinity_tree(fam, float(m))
        dist = float(np.linalg.norm(res.tree.point - res.base_point))
        scan.append({
            "m": float(m),
            "tree_point": [float(v) for v in res.tree.point],
            "base_point": [float(v) for v in res.base_point],
            "distance_to_base": dist,
            "objective": res.tree.objective,
        })
    report = {
        "schema": SCHEMA,
        "command": "limit",
        "triangle": [float(x) for x in prob["triangle"]],
        "b": [float(x) for x in prob["b"]],
        "c": [float(x) for x in prob["c"]],
        "scan": scan,
    }
    if all(abs(b) < 1e-12 for b in fam.b):
        report["limit_weights"] = [float(x) for x in infinity_limit_inverse(fam)]
    _write(report, args.out)
    return 0


def cmd_check(args) -> int:
    rep = _load_json(args.input)
    if rep.get("schema") != SCHEMA:
        raise ValueError(f"unknown schema {rep.get('schema')!r}")
    if rep.get("command") != "solve":
        raise ValueError("check expects a solve report")
    space = CurvedSpace(float(rep["k"]), int(rep["n"]))
    weights = np.asarray(rep["weights"], dtype=float)
    stat_tol = float(rep["tolerances"]["stationary"])
    results = []
    all_ok = True
    for entry in rep["entries"]:
        edges = check_edge_matrix(np.asarray(entry["edges"], dtype=float))
        cls = classify_edges(edges, weights, space)
        checks = {"classification": cls.kind == entry["classification"]["kind"]}
        tree = FermatTree(
            np.asarray(entry["point"], dtype=float),
            np.asarray(entry["branches"], dtype=float),
            Classification(entry["classification"]["kind"],
                           entry["classification"]["vertex"],
                           tuple(entry["classification"]["violating"])),
            float(entry["objective"]),
            float(entry["stationarity_residual"]),
        )
        checks["stationarity"] = tree.residual <= 10.0 * stat_tol
        if tree.classification.floating:
            fo = first_order_residual(tree, edges, weights, space)
            checks["first_order"] = fo <= CHECK_FIRST_ORDER_TOL
            if space.k == 0.0:
                checks["volume_additivity"] = (
                    volume_additivity_check(tree, edges, space) <= CHECK_VOLUME_TOL)
                checks["branch_bound"] = branch_bound_check(tree, edges, space.dim)
        ok = all(checks.values())
        all_ok = all_ok and ok
        results.append({
            "canonical_key": entry["canonical_key"],
            "passed": ok,
            "checks": checks,
        })
    report = {
        "schema": SCHEMA,
        "command": "check",
        "passed": all_ok,
        "entries": results,
    }
    _write(report, args.out)
    return 0 if all_ok else 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fermat-frechet",
                                description="Weighted Fermat trees over all incongruent "
                                            "simplexes of a length multiset")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, weights=False):
        sp.add_argument("--input", help="problem JSON file")
        sp.add_argument("--n", type=int, help="dimension")
        sp.add_argument("--k", type=float, help="curvature")
        sp.add_argument("--lengths", help="JSON file with the length multiset")
        if weights:
            sp.add_argument("--weights", help="JSON file with the weights")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--plot", help="write an SVG projection of the result")

    sp = sub.add_parser("enumerate", help="incongruent realizable simplexes")
    common(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("solve", help="Fermat tree of every incongruent simplex")
    common(sp, weights=True)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("classify", help="floating/absorbed per member, no solving")
    common(sp, weights=True)
    sp.set_defaults(func=cmd_classify)

    for name, fn, hlp in (
        ("invert", cmd_invert, "weights from an interior point"),
        ("estimate-k", cmd_estimate_k, "curvature from tree + simplex distances"),
        ("immerse", cmd_immerse, "smallest realizing sphere radius"),
        ("limit", cmd_limit, "vertex-at-infinity family scan"),
        ("check", cmd_check, "re-verify residuals of a solve report"),
    ):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("--input", required=True)
        sp.add_argument("--out")
        sp.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except (ValueError, KeyError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
