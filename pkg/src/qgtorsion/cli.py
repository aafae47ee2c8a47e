"""Command-line front end.

Every subcommand reads graph files in the canonical JSON format and writes
JSON or CSV to standard output. Exit codes: 0 success, 1 other failure,
2 invalid input, 3 no torsion function or disconnected graph, 4 requested
accuracy not reached.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import bounds as bnd
from . import calculus, surgery
from . import graph as gc
from .errors import (BudgetExceeded, InconclusiveAccuracy, NotConnected, NoTorsion, QGTorsionError,
                     SurgeryError, ValidationError)
from .spectral import lambda1
from .torsion import classify_positivity, solve_torsion, torsional_rigidity

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NO_TORSION, EXIT_ACCURACY = 0, 1, 2, 3, 4
MAX_STEPS = 1_000_000
SWEEP_QUANTITIES = ("T", "lambda1", "product", "gradient", "positivity")


class InputError(QGTorsionError):
    """Unreadable or malformed input file or argument."""


# ---------------------------------------------------------------------------
# output helpers

def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _clean(x):
    """Replace non-finite floats by strings so the JSON stays standard."""
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def emit_json(doc, out) -> None:
    out.write(json.dumps(_clean(doc), indent=2, default=_json_default) + "\n")


def emit_csv(columns, rows, out) -> None:
    out.write(bnd.rows_to_csv(columns, rows))


def _load_graph(path: str) -> gc.MetricGraph:
    try:
        return gc.load(path)
    except ValidationError:
        raise
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read graph {path!r}: {exc}") from exc


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read {path!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands

def cmd_torsion(args, out) -> None:
    g = _load_graph(args.graph)
    t = solve_torsion(g)
    total = torsional_rigidity(g)
    if args.output == "json":
        emit_json({"torsion": t.to_dict(), "rigidity": total}, out)
        return
    rows = [["vertex_value", v, "", x] for v, x in t.vertex_values.items()]
    for eid, (a, b) in t.coefficients.items():
        rows += [["edge_coefficient", eid, "a", a], ["edge_coefficient", eid, "b", b]]
    rows.append(["rigidity", "", "", total])
    emit_csv(["quantity", "id", "coefficient", "value"], rows, out)


def cmd_positivity(args, out) -> None:
    g = _load_graph(args.graph)
    d = classify_positivity(g).to_dict()
    if args.output == "json":
        emit_json(d, out)
    else:
        emit_csv(list(d), [list(d.values())], out)


def cmd_lambda1(args, out) -> None:
    g = _load_graph(args.graph)
    res = lambda1(g, target_error=args.target_error, dof_cap=args.dof_cap)
    if args.output == "json":
        emit_json(res.to_dict(), out)
        return
    cols = ["level", "h_max", "dofs", "lambda1"]
    rows = [[i, lv.h_max, lv.dofs, lv.lambda1] for i, lv in enumerate(res.levels)]
    emit_csv(cols, rows, out)


def cmd_bounds(args, out) -> None:
    g = _load_graph(args.graph)
    rep = bnd.bounds_report(g, include_eigenvalue=not args.no_eigenvalue, target_error=args.target_error)
    if args.output == "json":
        emit_json(rep.to_dict(), out)
    else:
        out.write(rep.to_csv())


def cmd_gradient(args, out) -> None:
    g = _load_graph(args.graph)
    grad = calculus.gradient(g)
    rows = calculus.compare(grad, calculus.finite_difference_gradient(g, args.rel_step)) if args.fd_check else None
    if args.output == "json":
        doc = grad.to_dict()
        if rows is not None:
            doc["fd_check"] = [dict(zip(("kind", "id", "analytic", "finite_difference", "relative_error"), r))
                               for r in rows]
        emit_json(doc, out)
        return
    if rows is not None:
        emit_csv(["kind", "id", "analytic", "finite_difference", "relative_error"], rows, out)
    else:
        rows = [["length", k, v] for k, v in grad.d_by_length.items()]
        rows += [["strength", k, v] for k, v in grad.d_by_strength.items()]
        emit_csv(["kind", "id", "analytic"], rows, out)


_OBSERVED_OK = {
    surgery.INCREASES: lambda before, after, tol: after > before - tol,
    surgery.DECREASES: lambda before, after, tol: after < before + tol,
    surgery.NOT_INCREASING: lambda before, after, tol: after <= before + tol,
    surgery.NOT_DECREASING: lambda before, after, tol: after >= before - tol,
}


def cmd_surgery(args, out) -> None:
    g = _load_graph(args.graph)
    try:
        spec = surgery.SurgerySpec.from_dict(_load_json(args.spec))
        res = surgery.apply(g, spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad surgery spec: {exc!r}") from exc
    if not args.compare:
        if args.output == "json":
            out.write(gc.dumps(res.graph))
            return
        rows = [["vertex", v, "", "", "", "dirichlet" if isinstance(c, gc.Dirichlet) else c.strength]
                for v, c in res.graph.vertices]
        rows += [["edge", e.id, e.tail, e.head, e.length, ""] for e in res.graph.edges]
        emit_csv(["kind", "id", "tail", "head", "length", "condition"], rows, out)
        return
    before, after = torsional_rigidity(g), torsional_rigidity(res.graph)
    tol = 1e-9 * max(abs(before), abs(after))
    if res.relation == surgery.SCALES:
        observed = abs(after - float(spec.params["t"]) ** 3 * before) <= tol
    else:
        observed = _OBSERVED_OK[res.relation](before, after, tol)
    doc = {"kind": spec.kind, "rigidity_before": before, "rigidity_after": after, "predicted": res.relation,
           "hypothesis_ok": res.hypothesis_ok, "observed_consistent": bool(observed),
           "graph": gc.to_dict(res.graph)}
    if args.output == "json":
        emit_json(doc, out)
    else:
        doc.pop("graph")
        emit_csv(list(doc), [list(doc.values())], out)


# -- sweeps

@dataclass(frozen=True)
class SweepSpec:
    target: str
    id: str
    start: float
    stop: float
    steps: int
    log: bool = False
    quantities: tuple = ("T",)
    target_error: float = 1e-6

    def __post_init__(self):
        if self.target not in ("length", "strength"):
            raise InputError("sweep target must be 'length' or 'strength'")
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.start < self.stop):
            raise InputError("sweep needs finite from < to")
        if not 2 <= self.steps <= MAX_STEPS:
            raise InputError(f"steps must lie in [2, {MAX_STEPS}]")
        if self.log and self.start <= 0:
            raise InputError("log spacing needs a positive start")
        if self.target == "length" and self.start <= 0:
            raise InputError("lengths must stay positive")
        bad = set(self.quantities) - set(SWEEP_QUANTITIES)
        if bad:
            raise InputError(f"unknown sweep quantities {sorted(bad)}; choose from {SWEEP_QUANTITIES}")

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepSpec":
        q = doc.get("quantities", ["T"])
        q = tuple(q.split(",")) if isinstance(q, str) else tuple(q)
        return cls(doc["target"], str(doc["id"]), float(doc["from"]), float(doc["to"]), int(doc["steps"]),
                   bool(doc.get("log", False)), q, float(doc.get("target_error", 1e-6)))

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)

    def apply(self, g: gc.MetricGraph, value: float) -> gc.MetricGraph:
        if self.target == "length":
            return g.with_length(self.id, value)
        return g.with_strength(self.id, value)


def sweep_columns(g: gc.MetricGraph, spec: SweepSpec) -> list:
    cols = ["index", "value"]
    for q in spec.quantities:
        if q == "gradient":
            cols += [f"dT/dl[{e}]" for e in g.edge_ids] + [f"dT/dalpha[{v}]" for v in g.free_vertices]
        else:
            cols.append(q)
    return cols + ["error"]


def sweep_row(g: gc.MetricGraph, spec: SweepSpec, index: int, value: float) -> dict:
    row = {"index": index, "value": float(value), "error": ""}
    h = spec.apply(g, float(value))
    try:
        need_t = {"T", "product"} & set(spec.quantities)
        t = torsional_rigidity(h) if need_t else None
        lam = None
        if {"lambda1", "product"} & set(spec.quantities):
            lam = lambda1(h, target_error=spec.target_error).lambda1
        for q in spec.quantities:
            if q == "T":
                row["T"] = t
            elif q == "lambda1":
                row["lambda1"] = lam
            elif q == "product":
                row["product"] = lam * t
            elif q == "positivity":
                row["positivity"] = classify_positivity(h).classification
            elif q == "gradient":
                grad = calculus.gradient(h)
                row.update({f"dT/dl[{k}]": x for k, x in grad.d_by_length.items()})
                row.update({f"dT/dalpha[{k}]": x for k, x in grad.d_by_strength.items()})
    except QGTorsionError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(g: gc.MetricGraph, spec: SweepSpec, jobs: int = 1) -> list:
    """Rows in index order; with ``jobs > 1`` they are computed on a thread pool."""
    if spec.target == "length":
        g.edge(spec.id)
    elif g.is_dirichlet(spec.id):
        raise InputError(f"vertex {spec.id!r} is Dirichlet and has no strength to sweep")
    vals = spec.values()
    if jobs <= 1:
        return [sweep_row(g, spec, i, v) for i, v in enumerate(vals)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda iv: sweep_row(g, spec, *iv), enumerate(vals)))


def cmd_sweep(args, out) -> None:
    g = _load_graph(args.graph)
    try:
        if args.spec:
            spec = SweepSpec.from_dict(_load_json(args.spec))
        else:
            missing = [n for n in ("target", "id", "start", "stop", "steps") if getattr(args, n) is None]
            if missing:
                raise InputError(f"sweep needs --spec or all of {missing}")
            spec = SweepSpec(args.target, args.id, args.start, args.stop, args.steps, args.log,
                             tuple(args.quantities.split(",")), args.target_error)
        rows = run_sweep(g, spec, args.jobs)
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad sweep: {exc!r}") from exc
    cols = sweep_columns(g, spec)
    if args.output == "json":
        d = asdict(spec)
        d["quantities"] = list(spec.quantities)
        emit_json({"spec": d, "columns": cols, "rows": [[r.get(c) for c in cols] for r in rows]}, out)
    else:
        emit_csv(cols, [[r.get(c, "") for c in cols] for r in rows], out)


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from exc


def cmd_kj(args, out) -> None:
    try:
        rows = bnd.kohler_jobin_explorer(_floats(args.lengths), _floats(args.alphas))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.output == "json":
        emit_json({"exploratory": True, "limit": bnd.kohler_jobin_limit(), "columns": bnd.KJ_COLUMNS,
                   "rows": [asdict(r) for r in rows]}, out)
    else:
        emit_csv(bnd.KJ_COLUMNS, [[getattr(r, c) for c in bnd.KJ_COLUMNS] for r in rows], out)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgtorsion",
                                     description="Torsion function and torsional rigidity on metric graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, graph=True, default_output="json"):
        p = sub.add_parser(name, help=help_text, description=help_text)
        if graph:
            p.add_argument("graph", help="graph JSON file")
        p.add_argument("--output", choices=("json", "csv"), default=default_output)
        p.set_defaults(func=func)
        return p

    add("torsion", cmd_torsion, "torsion function and rigidity")
    add("positivity", cmd_positivity, "decide whether the torsion function is positive")
    p = add("lambda1", cmd_lambda1, "first eigenvalue by finite elements")
    p.add_argument("--target-error", type=float, default=1e-6)
    p.add_argument("--dof-cap", type=int, default=200_000)
    p = add("bounds", cmd_bounds, "check the closed-form bounds on the rigidity")
    p.add_argument("--target-error", type=float, default=1e-6)
    p.add_argument("--no-eigenvalue", action="store_true", help="skip the eigenvalue product bound")
    p = add("gradient", cmd_gradient, "derivatives of the rigidity in lengths and strengths")
    p.add_argument("--fd-check", action="store_true", help="compare with central differences")
    p.add_argument("--rel-step", type=float, default=1e-5)
    p = add("surgery", cmd_surgery, "apply a surgery spec to a graph")
    p.add_argument("spec", help="surgery spec JSON file")
    p.add_argument("--compare", action="store_true", help="report rigidity before and after")
    p = add("sweep", cmd_sweep, "sweep one edge length or vertex strength", default_output="csv")
    p.add_argument("--spec", help="sweep spec JSON file (overrides the flags below)")
    p.add_argument("--target", choices=("length", "strength"))
    p.add_argument("--id")
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--log", action="store_true", help="geometric spacing")
    p.add_argument("--quantities", default="T", help=f"comma-separated subset of {','.join(SWEEP_QUANTITIES)}")
    p.add_argument("--target-error", type=float, default=1e-6)
    p.add_argument("--jobs", type=int, default=1)
    p = add("kj", cmd_kj, "exploratory table of lambda1 * T^(2/3) on intervals", graph=False, default_output="csv")
    p.add_argument("--lengths", required=True, help="comma-separated interval lengths")
    p.add_argument("--alphas", required=True, help="comma-separated strengths")
    return parser


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, (ValidationError, InputError, SurgeryError)):
        return EXIT_INPUT
    if isinstance(exc, (NoTorsion, NotConnected)):
        return EXIT_NO_TORSION
    if isinstance(exc, (InconclusiveAccuracy, BudgetExceeded)):
        return EXIT_ACCURACY
    return EXIT_FAIL


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except QGTorsionError as exc:
        err.write(f"qgtorsion {args.command}: {type(exc).__name__}: {exc}\n")
        return exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
