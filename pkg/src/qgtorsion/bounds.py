"""Closed-form bounds on the torsional rigidity, checked against the solver.

Each check returns a :class:`BoundRecord` whose ``margin`` is oriented so
that ``margin >= 0`` means the inequality holds. ``equality_case`` marks
graphs of the shape that attains the bound.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

from .errors import BudgetExceeded, HypothesisViolated, InconclusiveAccuracy, NotDoublyConnected
from .graph import MetricGraph, is_connected, is_doubly_connected
from .spectral import lambda1 as fem_lambda1
from .spectral import secular_lambda1_interval
from .torsion import torsional_rigidity

PASS_RTOL = 1e-9


@dataclass(frozen=True)
class BoundRecord:
    name: str
    lhs: float
    rhs: float
    hypothesis_ok: bool = True
    equality_case: bool = False
    tolerance: float = 0.0
    note: str = ""

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        """Informational records (failed hypothesis) never count as failures."""
        if not self.hypothesis_ok:
            return True
        return self.margin >= -self.tolerance

    def to_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = self.margin
        d["passed"] = self.passed
        return d


def _record(name, lhs, rhs, **kw) -> BoundRecord:
    tol = PASS_RTOL * max(abs(lhs), abs(rhs))
    return BoundRecord(name, float(lhs), float(rhs), tolerance=tol, **kw)


def _check_hypothesis(g: MetricGraph) -> float:
    if g.dirichlet_vertices:
        raise HypothesisViolated("bounds require delta conditions at every vertex")
    alphas = list(g.strengths.values())
    if any(a < 0 for a in alphas) or not any(a > 0 for a in alphas):
        raise HypothesisViolated("bounds require nonnegative strengths, not all zero")
    if not is_connected(g):
        raise HypothesisViolated("bounds require a connected graph")
    return math.fsum(alphas)


def _is_flower(g: MetricGraph) -> bool:
    return len(g.vertices) == 1


def _is_equilateral_flower(g: MetricGraph, rtol: float = 1e-12) -> bool:
    if not _is_flower(g):
        return False
    ls = [e.length for e in g.edges]
    return max(ls) - min(ls) <= rtol * max(ls)


def _is_path(g: MetricGraph) -> bool:
    return (not any(e.is_loop for e in g.edges) and len(g.edges) == len(g.vertices) - 1
            and all(g.degree(v) <= 2 for v in g.vertex_ids) and is_connected(g))


def _concentrated_at(g: MetricGraph, candidates) -> bool:
    """All strength sits on one vertex among ``candidates``."""
    positive = [v for v, a in g.strengths.items() if a != 0]
    return len(positive) == 1 and positive[0] in candidates


def flower_lower_bound(g: MetricGraph, t: float | None = None) -> BoundRecord:
    """``T >= |G|^3 / (12 |E|^2) + |G|^2 / |alpha|_1``."""
    total_alpha = _check_hypothesis(g)
    t = torsional_rigidity(g) if t is None else t
    big_l, m = g.total_length, len(g.edges)
    bound = big_l ** 3 / (12 * m * m) + big_l ** 2 / total_alpha
    return _record("flower_lower_bound", bound, t, equality_case=_is_equilateral_flower(g))


def flower_edge_lower_bound(g: MetricGraph, t: float | None = None) -> BoundRecord:
    """Sharper form ``T >= sum_e l_e^3 / 12 + |G|^2 / |alpha|_1``: the rigidity
    of the flower obtained by gluing all vertices."""
    total_alpha = _check_hypothesis(g)
    t = torsional_rigidity(g) if t is None else t
    bound = math.fsum(e.length ** 3 for e in g.edges) / 12 + g.total_length ** 2 / total_alpha
    return _record("flower_edge_lower_bound", bound, t, equality_case=_is_flower(g))


def saint_venant_upper_bound(g: MetricGraph, t: float | None = None) -> BoundRecord:
    """``T <= |G|^3 / 3 + |G|^2 / |alpha|_1``, attained by a path with all strength at one end."""
    total_alpha = _check_hypothesis(g)
    t = torsional_rigidity(g) if t is None else t
    big_l = g.total_length
    bound = big_l ** 3 / 3 + big_l ** 2 / total_alpha
    ends = [v for v in g.vertex_ids if g.degree(v) == 1]
    eq = _is_path(g) and _concentrated_at(g, ends)
    return _record("saint_venant_upper_bound", t, bound, equality_case=eq)


def doubly_connected_upper_bound(g: MetricGraph, t: float | None = None) -> BoundRecord:
    """``T <= 2 T(path of length |G|/2, strengths (|alpha|_1/2, 0)) = |G|^3/12 + |G|^2/|alpha|_1``.

    Attained by a circle carrying all strength at one vertex.
    """
    total_alpha = _check_hypothesis(g)
    if not is_doubly_connected(g):
        raise NotDoublyConnected("graph has a bridge")
    t = torsional_rigidity(g) if t is None else t
    half = g.total_length / 2
    bound = 2 * (half ** 3 / 3 + half ** 2 / (total_alpha / 2))
    cycle = all(g.degree(v) == 2 for v in g.vertex_ids) and len(g.edges) == len(g.vertices)
    eq = cycle and _concentrated_at(g, g.vertex_ids)
    return _record("doubly_connected_upper_bound", t, bound, equality_case=eq)


def eigenvalue_product_bound(g: MetricGraph, target_error: float = 1e-6, t: float | None = None,
                             safety: float = 10.0, min_target: float = 1e-11) -> BoundRecord:
    """``lambda_1 T < |G|``.

    The eigenvalue is recomputed with a target error 100 times smaller until
    the margin exceeds ``safety`` times the eigenvalue error (scaled by ``T``).
    Raises :class:`InconclusiveAccuracy` if that does not happen before
    ``min_target`` or the refinement budget is reached.
    """
    _check_hypothesis(g)
    t = torsional_rigidity(g) if t is None else t
    target = target_error
    while True:
        try:
            spec = fem_lambda1(g, target_error=target)
        except BudgetExceeded as exc:
            raise InconclusiveAccuracy(f"eigenvalue budget reached before the verdict settled: {exc}") from exc
        lhs = spec.lambda1 * t
        err = max(spec.error_estimate, target)
        margin = g.total_length - lhs
        if margin > safety * err * t:
            break
        if target / 100 < min_target:
            raise InconclusiveAccuracy(f"margin {margin:.3e} within {safety} x eigenvalue error {err:.1e}")
        target /= 100
    return BoundRecord("eigenvalue_product_bound", lhs, g.total_length, tolerance=0.0,
                       note=f"lambda1={spec.lambda1!r} error_estimate={spec.error_estimate:.3e} target={target:.0e}")


@dataclass(frozen=True)
class BoundsReport:
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def by_name(self, name: str) -> BoundRecord:
        return next(r for r in self.records if r.name == name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "records": [r.to_dict() for r in self.records]}

    def to_csv(self) -> str:
        cols = ["name", "lhs", "rhs", "margin", "tolerance", "hypothesis_ok", "equality_case", "passed", "note"]
        return rows_to_csv(cols, [[r.to_dict()[c] for c in cols] for r in self.records])


def bounds_report(g: MetricGraph, include_eigenvalue: bool = True, target_error: float = 1e-6) -> BoundsReport:
    records = []
    try:
        total_alpha = _check_hypothesis(g)
    except HypothesisViolated as exc:
        nan = math.nan
        names = ["flower_lower_bound", "flower_edge_lower_bound", "saint_venant_upper_bound",
                 "doubly_connected_upper_bound"] + (["eigenvalue_product_bound"] if include_eigenvalue else [])
        return BoundsReport([BoundRecord(n, nan, nan, hypothesis_ok=False, note=str(exc)) for n in names])
    del total_alpha
    t = torsional_rigidity(g)
    records += [flower_lower_bound(g, t), flower_edge_lower_bound(g, t), saint_venant_upper_bound(g, t)]
    try:
        records.append(doubly_connected_upper_bound(g, t))
    except NotDoublyConnected as exc:
        records.append(BoundRecord("doubly_connected_upper_bound", t, math.nan, hypothesis_ok=False, note=str(exc)))
    if include_eigenvalue:
        records.append(eigenvalue_product_bound(g, target_error, t))
    return BoundsReport(records)


# ---------------------------------------------------------------------------
# exploratory table for the eigenvalue-torsion product on intervals

@dataclass(frozen=True)
class KJRow:
    length: float
    alpha: float
    lambda1: float
    rigidity: float
    product: float
    proxy: float
    proxy_le_product: bool
    constrained_bound: float | None
    constrained_ok: bool | None


KJ_COLUMNS = ["length", "alpha", "lambda1", "rigidity", "product", "proxy", "proxy_le_product",
              "constrained_bound", "constrained_ok"]


def eigenvalue_lower_bound(length: float, alpha: float) -> float:
    """Lower bound on the first eigenvalue of an interval, Neumann at one end and strength ``alpha`` at the other."""
    return math.pi ** 2 * alpha / (length * (math.pi ** 2 + 4 * alpha * length))


def kj_proxy(length: float, alpha: float) -> float:
    t = length ** 3 / 3 + length ** 2 / alpha
    return eigenvalue_lower_bound(length, alpha) * t ** (2 / 3)


def kohler_jobin_explorer(lengths, alphas, rtol: float = 1e-12) -> list:
    """Exploratory rows of ``lambda_1 T^{2/3}`` for intervals with a Neumann end
    and strength ``alpha`` at the other end. No inequality is claimed."""
    rows = []
    for length in lengths:
        for alpha in alphas:
            if not (length > 0 and alpha > 0):
                raise ValueError("lengths and strengths must be positive")
            lam = secular_lambda1_interval(length, alpha, 0.0)
            t = length ** 3 / 3 + length ** 2 / alpha
            product = lam * t ** (2 / 3)
            proxy = kj_proxy(length, alpha)
            if length >= 1:
                cb = math.pi ** 2 * alpha / (9 ** (1 / 3) * (math.pi ** 2 + 4 * alpha))
                cok = product >= cb * (1 - rtol)
            else:
                cb, cok = None, None
            rows.append(KJRow(length, alpha, lam, t, product, proxy, proxy <= product * (1 + rtol), cb, cok))
    return rows


def kohler_jobin_limit() -> float:
    return (math.pi / 24 ** (1 / 3)) ** 2


def rows_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(x) for x in row])
    return buf.getvalue()


def format_value(x) -> str:
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, float):
        return repr(x) if not math.isfinite(x) else f"{x:.17g}"
    return str(x)
