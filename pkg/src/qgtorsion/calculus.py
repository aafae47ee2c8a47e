"""Derivatives of the torsional rigidity with respect to edge lengths and vertex strengths.

On an edge the quantity ``2 u + (u')^2`` is constant because ``u'' = -1``;
its value is the derivative of the rigidity in that edge's length. The
derivative in a strength is ``-u(v)^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DirichletUnsupported, PointDependenceError
from .graph import MetricGraph
from .torsion import TorsionFunction, solve_torsion, torsional_rigidity


@dataclass(frozen=True)
class Gradient:
    d_by_length: dict = field(default_factory=dict)
    d_by_strength: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"d_by_length": dict(self.d_by_length), "d_by_strength": dict(self.d_by_strength)}


def _length_derivative(t: TorsionFunction, eid: str, length: float, rtol: float = 1e-10) -> float:
    vals = [2 * t.value(eid, x) + t.derivative(eid, x) ** 2 for x in (0.0, 0.5 * length, length)]
    scale = max(abs(v) for v in vals) + length ** 2
    if max(vals) - min(vals) > rtol * scale:
        raise PointDependenceError(f"edge {eid!r}: 2u + u'^2 varies along the edge: {vals}")
    return vals[0]


def dT_dlength(g: MetricGraph, edge: str, t: TorsionFunction | None = None) -> float:
    t = solve_torsion(g) if t is None else t
    return _length_derivative(t, edge, g.edge(edge).length)


def dT_dstrength(g: MetricGraph, v: str, t: TorsionFunction | None = None) -> float:
    if g.is_dirichlet(v):
        raise DirichletUnsupported(f"vertex {v!r} is Dirichlet; the strength derivative is not defined")
    t = solve_torsion(g) if t is None else t
    return -t.vertex_values[v] ** 2


def gradient(g: MetricGraph) -> Gradient:
    t = solve_torsion(g)
    dl = {e.id: _length_derivative(t, e.id, e.length) for e in g.edges}
    ds = {v: -t.vertex_values[v] ** 2 for v in g.free_vertices}
    return Gradient(dl, ds)


def finite_difference_gradient(g: MetricGraph, rel_step: float = 1e-5) -> Gradient:
    """Central differences of the rigidity, step ``rel_step`` times the parameter scale.

    The scale is the edge length, or ``max(|alpha_v|, 1)`` for strengths.
    """
    dl = {}
    for e in g.edges:
        h = rel_step * e.length
        up = torsional_rigidity(g.with_length(e.id, e.length + h))
        dn = torsional_rigidity(g.with_length(e.id, e.length - h))
        dl[e.id] = (up - dn) / (2 * h)
    ds = {}
    for v in g.free_vertices:
        a = g.strength(v)
        h = rel_step * max(abs(a), 1.0)
        up = torsional_rigidity(g.with_strength(v, a + h))
        dn = torsional_rigidity(g.with_strength(v, a - h))
        ds[v] = (up - dn) / (2 * h)
    return Gradient(dl, ds)


def compare(analytic: Gradient, fd: Gradient) -> list:
    """Rows ``(kind, id, analytic, finite_difference, relative_error)``."""
    rows = []
    for kind, a_map, f_map in (("length", analytic.d_by_length, fd.d_by_length),
                               ("strength", analytic.d_by_strength, fd.d_by_strength)):
        for k, a in a_map.items():
            f = f_map[k]
            rows.append((kind, k, a, f, abs(a - f) / max(abs(a), 1e-300)))
    return rows
