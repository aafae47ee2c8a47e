"""Torsion function, torsional rigidity and torsion positivity on metric graphs.

The torsion function solves ``-u'' = 1`` on every edge together with the
vertex conditions, so on each edge it is a downward parabola determined by
its two endpoint values. Those vertex values solve a symmetric system

    A g = D 1,    A[v,v] = sum_{non-loop e at v} 1/l_e + alpha_v,
                  A[v,w] = -sum_{e between v and w} 1/l_e,
                  D[v]   = (sum_{e at v} l_e) / 2      (loops counted twice),

which is the weighted discrete Laplacian ``L = D^{-1} A`` applied to ``g``.
Dirichlet vertices are pinned to zero and eliminated from the system.
Vertex derivatives are taken pointing into the vertex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import DegenerateForm, NoTorsion, SingularMatrix
from .graph import MetricGraph, ensure_valid, require_connected

POSITIVE = "PositiveTorsion"
NOT_POSITIVE = "TorsionExistsNotPositive"
NO_TORSION = "NoTorsion"


@dataclass(frozen=True)
class DiscreteLaplacian:
    order: tuple
    matrix: np.ndarray
    weights: np.ndarray

    @property
    def laplacian(self) -> np.ndarray:
        """The (non-symmetric) weighted discrete Laplacian ``D^{-1} A``."""
        return self.matrix / self.weights[:, None]

    @property
    def rhs(self) -> np.ndarray:
        return self.weights.copy()

    def index(self, v: str) -> int:
        return self.order.index(v)


def assemble_system(g: MetricGraph) -> DiscreteLaplacian:
    ensure_valid(g)
    require_connected(g)
    order = g.free_vertices
    idx = {v: i for i, v in enumerate(order)}
    n = len(order)
    a = np.zeros((n, n))
    d = np.zeros(n)
    for v in order:
        a[idx[v], idx[v]] += g.strength(v)
    for e in g.edges:
        w = 1.0 / e.length
        for end in (e.tail, e.head):
            if end in idx:
                d[idx[end]] += 0.5 * e.length
        if e.is_loop:
            continue
        i, j = idx.get(e.tail), idx.get(e.head)
        if i is not None:
            a[i, i] += w
        if j is not None:
            a[j, j] += w
        if i is not None and j is not None:
            a[i, j] -= w
            a[j, i] -= w
    return DiscreteLaplacian(order, a, d)


@dataclass(frozen=True)
class PiecewiseQuadratic:
    """``u_e(x) = c0 + c1 x + c2 x^2`` on each edge, keyed by edge id."""

    coefficients: dict

    def value(self, eid: str, x):
        c0, c1, c2 = self.coefficients[eid]
        return c0 + c1 * x + c2 * x * x

    def derivative(self, eid: str, x):
        _, c1, c2 = self.coefficients[eid]
        return c1 + 2 * c2 * x

    def scaled(self, c: float) -> "PiecewiseQuadratic":
        return PiecewiseQuadratic({k: (c * a, c * b, c * q) for k, (a, b, q) in self.coefficients.items()})

    @classmethod
    def from_vertex_values(cls, g: MetricGraph, values: dict, curvature: dict | None = None):
        """Quadratic interpolating ``values`` at the edge ends with the given ``c2`` per edge."""
        curvature = curvature or {}
        coeffs = {}
        for e in g.edges:
            c2 = curvature.get(e.id, 0.0)
            u0, u1 = values[e.tail], values[e.head]
            c1 = (u1 - u0) / e.length - c2 * e.length
            coeffs[e.id] = (u0, c1, c2)
        return cls(coeffs)


@dataclass(frozen=True)
class TorsionFunction:
    """Exact torsion function: ``u_e(x) = -x^2/2 + b_e x + a_e`` on ``[0, l_e]``."""

    vertex_values: dict
    coefficients: dict
    lengths: dict = field(repr=False, default_factory=dict)

    def value(self, eid: str, x):
        a, b = self.coefficients[eid]
        return -0.5 * x * x + b * x + a

    def derivative(self, eid: str, x):
        _, b = self.coefficients[eid]
        return b - x

    def as_quadratic(self) -> PiecewiseQuadratic:
        return PiecewiseQuadratic({k: (a, b, -0.5) for k, (a, b) in self.coefficients.items()})

    def to_dict(self) -> dict:
        return {
            "vertex_values": dict(self.vertex_values),
            "edges": [{"id": k, "a": a, "b": b} for k, (a, b) in self.coefficients.items()],
        }


def _from_vertex_values(g: MetricGraph, gv: dict) -> TorsionFunction:
    coeffs = {}
    for e in g.edges:
        a = gv[e.tail]
        b = (gv[e.head] - a) / e.length + 0.5 * e.length
        coeffs[e.id] = (a, b)
    return TorsionFunction(gv, coeffs, {e.id: e.length for e in g.edges})


def solve_torsion(g: MetricGraph, system: DiscreteLaplacian | None = None) -> TorsionFunction:
    """Torsion function of ``g``; raises :class:`NoTorsion` when the system is singular."""
    sys_ = assemble_system(g) if system is None else system
    if sys_.order:
        iner = numerics.inertia(sys_.matrix)
        if iner.n_zero:
            raise NoTorsion(f"discrete Laplacian has {iner.n_zero} eigenvalue(s) within {iner.zero_tolerance:.3e} of zero")
        try:
            x = numerics.solve_sym(sys_.matrix, sys_.rhs)
        except SingularMatrix as exc:
            raise NoTorsion(str(exc)) from exc
    else:
        x = np.zeros(0)
    gv = {v: 0.0 for v in g.dirichlet_vertices}
    gv.update({v: float(x[i]) for i, v in enumerate(sys_.order)})
    # keep the vertex order of the graph
    gv = {v: gv[v] for v in g.vertex_ids}
    return _from_vertex_values(g, gv)


def rigidity(t: TorsionFunction, g: MetricGraph) -> float:
    gv = t.vertex_values
    return math.fsum(e.length ** 3 / 12 + 0.5 * e.length * (gv[e.tail] + gv[e.head]) for e in g.edges)


def torsional_rigidity(g: MetricGraph) -> float:
    return rigidity(solve_torsion(g), g)


def check_vertex_residuals(t: TorsionFunction, g: MetricGraph) -> float:
    """Largest vertex-condition defect of ``t``: flux balance at delta vertices, value at Dirichlet ones."""
    worst = 0.0
    for v in g.vertex_ids:
        if g.is_dirichlet(v):
            worst = max(worst, abs(t.vertex_values[v]))
            continue
        flux = 0.0
        for e, end in g.incident(v):
            if end == "tail":
                flux -= t.derivative(e.id, 0.0)
            else:
                flux += t.derivative(e.id, e.length)
        worst = max(worst, abs(flux + g.strength(v) * t.vertex_values[v]))
    return worst


# ---------------------------------------------------------------------------
# quadratic-form quantities

def _abs_integral(c0: float, c1: float, c2: float, length: float) -> float:
    def prim(x):
        return c0 * x + c1 * x * x / 2 + c2 * x ** 3 / 3

    cuts = [0.0]
    if c2 != 0.0:
        disc = c1 * c1 - 4 * c2 * c0
        scale = max(c1 * c1, abs(4 * c2 * c0), 1e-300)
        if disc > 1e-14 * scale:
            s = math.sqrt(disc)
            # numerically stable pair of roots
            q = -0.5 * (c1 + math.copysign(s, c1))
            roots = [q / c2, c0 / q] if q != 0 else []
            cuts += sorted(r for r in roots if 0.0 < r < length)
    elif c1 != 0.0:
        r = -c0 / c1
        if 0.0 < r < length:
            cuts.append(r)
    cuts.append(length)
    return math.fsum(abs(prim(b) - prim(a)) for a, b in zip(cuts, cuts[1:]))


def l1_norm(u: PiecewiseQuadratic, g: MetricGraph) -> float:
    return math.fsum(_abs_integral(*u.coefficients[e.id], e.length) for e in g.edges)


def integral(u: PiecewiseQuadratic, g: MetricGraph) -> float:
    out = []
    for e in g.edges:
        c0, c1, c2 = u.coefficients[e.id]
        ell = e.length
        out.append(c0 * ell + c1 * ell ** 2 / 2 + c2 * ell ** 3 / 3)
    return math.fsum(out)


def _vertex_values(u: PiecewiseQuadratic, g: MetricGraph, tol: float = 1e-9) -> dict:
    vals = {}
    for e in g.edges:
        for end, x in ((e.tail, 0.0), (e.head, e.length)):
            val = u.value(e.id, x)
            if end in vals and abs(vals[end] - val) > tol * max(1.0, abs(val)):
                raise ValueError(f"test function is discontinuous at vertex {end!r}")
            vals.setdefault(end, val)
    for v in g.dirichlet_vertices:
        if abs(vals.get(v, 0.0)) > tol:
            raise ValueError(f"test function does not vanish at Dirichlet vertex {v!r}")
    return vals


def form_value(u: PiecewiseQuadratic, g: MetricGraph) -> float:
    """``h_alpha(u) = int |u'|^2 + sum_v alpha_v u(v)^2`` in closed form."""
    vals = _vertex_values(u, g)
    parts = []
    for e in g.edges:
        _, c1, c2 = u.coefficients[e.id]
        ell = e.length
        parts.append(4 * c2 * c2 * ell ** 3 / 3 + 2 * c1 * c2 * ell ** 2 + c1 * c1 * ell)
    for v, a in g.strengths.items():
        parts.append(a * vals[v] ** 2)
    return math.fsum(parts)


def polya_quotient(g: MetricGraph, u: PiecewiseQuadratic) -> float:
    """``(int |u|)^2 / h_alpha(u)`` for a continuous piecewise quadratic ``u``."""
    h = form_value(u, g)
    if not h > 0:
        raise DegenerateForm(f"quadratic form is {h:.3e} <= 0 on the test function")
    return l1_norm(u, g) ** 2 / h


def energy(t: TorsionFunction, g: MetricGraph) -> float:
    return form_value(t.as_quadratic(), g)


# ---------------------------------------------------------------------------
# positivity

@dataclass(frozen=True)
class PositivityVerdict:
    classification: str
    discrete_spectrum_min: float
    vertex_min: float
    weighted_spectrum_min: float = math.nan
    direct_classification: str = ""
    zero_tolerance: float = 0.0
    indeterminate: bool = False

    @property
    def routes_agree(self) -> bool:
        return self.classification == self.direct_classification

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "direct_classification": self.direct_classification,
            "routes_agree": self.routes_agree,
            "discrete_spectrum_min": self.discrete_spectrum_min,
            "weighted_spectrum_min": self.weighted_spectrum_min,
            "vertex_min": self.vertex_min,
            "zero_tolerance": self.zero_tolerance,
            "indeterminate": self.indeterminate,
        }


def classify_positivity(g: MetricGraph, zero_tol: float | None = None) -> PositivityVerdict:
    """Decide whether the torsion function exists and is strictly positive.

    The spectral route reads the inertia of the symmetric form ``A``, which
    matches that of ``D^{-1} A`` by congruence. The direct route solves the
    system and inspects vertex signs; on each edge the torsion function is
    concave, so positive vertex values mean positive everywhere.
    """
    sys_ = assemble_system(g)
    if not sys_.order:
        return PositivityVerdict(POSITIVE, math.inf, math.inf, math.inf, POSITIVE, 0.0, False)
    a = sys_.matrix
    tol = numerics.default_zero_tol(a) if zero_tol is None else zero_tol
    w = numerics.eig_sym(a, vectors=False)
    iner = numerics.inertia(a, tol)
    if iner.n_zero:
        spectral = NO_TORSION
    elif iner.n_negative:
        spectral = NOT_POSITIVE
    else:
        spectral = POSITIVE
    mu = float(numerics.eig_gen_sym(a, np.diag(sys_.weights), count=1, vectors=False)[0])
    try:
        x = numerics.solve_sym(a, sys_.rhs, tol=tol)
        vmin = float(x.min())
        direct = POSITIVE if vmin > 0 else NOT_POSITIVE
    except SingularMatrix:
        vmin = math.nan
        direct = NO_TORSION
    near_zero = float(np.min(np.abs(w)))
    return PositivityVerdict(
        classification=spectral,
        discrete_spectrum_min=float(w[0]),
        vertex_min=vmin,
        weighted_spectrum_min=mu,
        direct_classification=direct,
        zero_tolerance=tol,
        indeterminate=near_zero <= 10 * tol,
    )
