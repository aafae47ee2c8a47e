"""Graph surgery: pure graph-to-graph transformations with strength bookkeeping.

Every operation returns a new :class:`MetricGraph`. :func:`apply` runs a
:class:`SurgerySpec` (also loadable from JSON) and reports the effect on the
torsional rigidity that the corresponding monotonicity result predicts.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import (BadAttachment, DirichletUnsupported, Disconnects, NonPositiveScale, NotLonger,
                     NotPendant, SameVertex, StrengthMismatch, SurgeryError)
from .graph import Delta, Edge, MetricGraph, is_connected

# predicted relation between T(before) and T(after)
INCREASES = "increases"
DECREASES = "decreases"
NOT_INCREASING = "does not increase"
NOT_DECREASING = "does not decrease"
SCALES = "scales by t^3"


def lengthen(g: MetricGraph, edge: str, new_length: float) -> MetricGraph:
    old = g.edge(edge).length
    if not new_length > old:
        raise NotLonger(f"new length {new_length} is not longer than {old}")
    return g.with_length(edge, new_length)


def scale(g: MetricGraph, t: float) -> MetricGraph:
    """All lengths times ``t``, all strengths divided by ``t``."""
    if not t > 0:
        raise NonPositiveScale(f"scale factor must be positive, got {t}")
    verts = tuple((v, Delta(c.strength / t) if isinstance(c, Delta) else c) for v, c in g.vertices)
    edges = tuple(Edge(e.id, e.tail, e.head, e.length * t) for e in g.edges)
    return MetricGraph(verts, edges)


def set_strength(g: MetricGraph, v: str, new_alpha: float) -> MetricGraph:
    if g.is_dirichlet(v):
        raise DirichletUnsupported(f"vertex {v!r} is Dirichlet")
    return g.with_strength(v, new_alpha)


def _fresh_id(g: MetricGraph, wanted: str) -> str:
    taken = set(g.vertex_ids)
    if wanted not in taken:
        return wanted
    i = 1
    while f"{wanted}#{i}" in taken:
        i += 1
    return f"{wanted}#{i}"


def glue(g: MetricGraph, v1: str, v2: str, new_id: str | None = None) -> MetricGraph:
    """Identify ``v1`` and ``v2``; the merged vertex carries the sum of their strengths."""
    if v1 == v2:
        raise SameVertex(f"cannot glue {v1!r} to itself")
    if g.is_dirichlet(v1) or g.is_dirichlet(v2):
        raise DirichletUnsupported("gluing is only defined for delta vertices")
    new_id = new_id or _fresh_id(g, f"{v1}+{v2}")
    merged = Delta(g.strength(v1) + g.strength(v2))
    verts = []
    for v, c in g.vertices:
        if v == v1:
            verts.append((new_id, merged))
        elif v != v2:
            verts.append((v, c))

    def ren(x):
        return new_id if x in (v1, v2) else x

    edges = tuple(Edge(e.id, ren(e.tail), ren(e.head), e.length) for e in g.edges)
    return MetricGraph(tuple(verts), edges)


@dataclass(frozen=True)
class Cut:
    """Split ``v0`` into ``v1`` and ``v2``.

    ``edge_ends`` lists the edge ends moved to ``v1``: an edge id moves all of
    its ends at ``v0``, ``"<id>:tail"`` or ``"<id>:head"`` moves one end of a
    loop. Remaining ends go to ``v2``.
    """

    v0: str
    v1: str
    alpha1: float
    v2: str
    alpha2: float
    edge_ends: tuple


def _parse_end(item: str):
    if item.endswith(":tail") or item.endswith(":head"):
        eid, end = item.rsplit(":", 1)
        return eid, end
    return item, None


def cut(g: MetricGraph, spec: Cut, rel_tol: float = 1e-12) -> MetricGraph:
    v0 = spec.v0
    if g.is_dirichlet(v0):
        raise DirichletUnsupported(f"vertex {v0!r} is Dirichlet")
    a0 = g.strength(v0)
    if abs(spec.alpha1 + spec.alpha2 - a0) > rel_tol * max(1.0, abs(a0)):
        raise StrengthMismatch(f"{spec.alpha1} + {spec.alpha2} != {a0}")
    ends = {(e.id, end) for e, end in g.incident(v0)}
    to_v1 = set()
    for item in spec.edge_ends:
        eid, end = _parse_end(item)
        picked = {(i, en) for i, en in ends if i == eid and (end is None or en == end)}
        if not picked:
            raise SurgeryError(f"{item!r} is not an edge end at {v0!r}")
        to_v1 |= picked
    if not to_v1 or to_v1 == ends:
        raise SurgeryError("both new vertices need at least one edge end")
    taken = set(g.vertex_ids) - {v0}
    if spec.v1 in taken or spec.v2 in taken or spec.v1 == spec.v2:
        raise SurgeryError("new vertex ids must be fresh and distinct")
    verts = []
    for v, c in g.vertices:
        if v == v0:
            verts += [(spec.v1, Delta(spec.alpha1)), (spec.v2, Delta(spec.alpha2))]
        else:
            verts.append((v, c))
    edges = []
    for e in g.edges:
        tail, head = e.tail, e.head
        if tail == v0:
            tail = spec.v1 if (e.id, "tail") in to_v1 else spec.v2
        if head == v0:
            head = spec.v1 if (e.id, "head") in to_v1 else spec.v2
        edges.append(Edge(e.id, tail, head, e.length))
    out = MetricGraph(tuple(verts), tuple(edges))
    if not is_connected(out):
        raise Disconnects(f"cutting {v0!r} disconnects the graph")
    return out


def unglue_spec(g: MetricGraph, v1: str, v2: str, merged_id: str) -> Cut:
    """The :class:`Cut` undoing ``glue(g, v1, v2, merged_id)``."""
    ends = []
    for e in g.edges:
        if e.is_loop and e.tail == v1:
            ends.append(e.id)
        else:
            if e.tail == v1:
                ends.append(f"{e.id}:tail")
            if e.head == v1:
                ends.append(f"{e.id}:head")
    return Cut(merged_id, v1, g.strength(v1), v2, g.strength(v2), tuple(ends))


def insert(g: MetricGraph, at: str, inserted: MetricGraph, attachment: dict,
           prefix: str | None = None) -> MetricGraph:
    """Remove ``at`` and hang each of its edges on a vertex of ``inserted``.

    ``attachment`` maps every edge id incident to ``at`` onto a vertex id of
    ``inserted``; a loop at ``at`` moves both ends. Ids of ``inserted`` are
    prefixed (default ``"<at>/"``) when they would collide.
    """
    if g.is_dirichlet(at) or inserted.dirichlet_vertices:
        raise DirichletUnsupported("insertion is only defined for delta vertices")
    if not is_connected(inserted):
        raise BadAttachment("the inserted graph must be connected")
    incident = {e.id for e, _ in g.incident(at)}
    if set(attachment) != incident:
        raise BadAttachment(f"attachment must cover exactly the edges {sorted(incident)}")
    clash = (set(g.vertex_ids) - {at}) & set(inserted.vertex_ids) or set(g.edge_ids) & set(inserted.edge_ids)
    if prefix is None:
        prefix = f"{at}/" if clash else ""
    vmap = {v: prefix + v for v in inserted.vertex_ids}
    for eid, target in attachment.items():
        if target not in vmap:
            raise BadAttachment(f"edge {eid!r} attached to unknown vertex {target!r}")
    verts = [(v, c) for v, c in g.vertices if v != at]
    verts += [(vmap[v], c) for v, c in inserted.vertices]
    edges = []
    for e in g.edges:
        tail = vmap[attachment[e.id]] if e.tail == at else e.tail
        head = vmap[attachment[e.id]] if e.head == at else e.head
        edges.append(Edge(e.id, tail, head, e.length))
    edges += [Edge(prefix + e.id, vmap[e.tail], vmap[e.head], e.length) for e in inserted.edges]
    out = MetricGraph(tuple(verts), tuple(edges))
    if len(set(out.vertex_ids)) != len(out.vertices) or len(set(out.edge_ids)) != len(out.edges):
        raise BadAttachment("id collision; pass an explicit prefix")
    return out


def insert_hypothesis(g: MetricGraph, at: str, inserted: MetricGraph) -> bool:
    """Whether the strengths brought in do not exceed the strength removed at ``at``."""
    return math.fsum(inserted.strengths.values()) <= g.strength(at)


def unfold(g: MetricGraph, pendants, tip_rule: str = "zero", new_edge: str | None = None,
           new_tip: str | None = None) -> MetricGraph:
    """Replace pendant edges sharing a vertex by one pendant edge of their total length.

    ``tip_rule="zero"`` gives the new tip strength 0, ``"sum"`` the sum of
    the removed tip strengths. Intermediate vertices of the unfolded chain
    would carry strength 0, so the new pendant is stored as a single edge.
    """
    pendants = list(pendants)
    if not pendants:
        raise NotPendant("no pendant edges given")
    if tip_rule not in ("zero", "sum"):
        raise ValueError(f"unknown tip rule {tip_rule!r}")
    centers, tips = set(), []
    for eid in pendants:
        e = g.edge(eid)
        if e.is_loop:
            raise NotPendant(f"{eid!r} is a loop")
        ends = [x for x in (e.tail, e.head) if g.degree(x) == 1]
        if not ends:
            raise NotPendant(f"{eid!r} has no endpoint of degree one")
        tip = ends[0]
        centers.add(e.other(tip))
        tips.append(tip)
    if len(centers) != 1:
        raise NotPendant("pendant edges must share their inner vertex")
    (v0,) = centers
    if len(pendants) == 1:
        return g
    if any(g.is_dirichlet(t) for t in tips):
        raise DirichletUnsupported("pendant tips must be delta vertices")
    tip_strength = 0.0 if tip_rule == "zero" else math.fsum(g.strength(t) for t in tips)
    tip_id = new_tip or tips[0]
    edge_id = new_edge or pendants[0]
    total = math.fsum(g.edge(eid).length for eid in pendants)
    drop_v, drop_e = set(tips), set(pendants)
    verts = [(v, c) for v, c in g.vertices if v not in drop_v]
    verts.append((tip_id, Delta(tip_strength)))
    edges = [e for e in g.edges if e.id not in drop_e]
    edges.append(Edge(edge_id, v0, tip_id, total))
    return MetricGraph(tuple(verts), tuple(edges))


# ---------------------------------------------------------------------------
# serializable specs

@dataclass(frozen=True)
class SurgerySpec:
    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict) -> "SurgerySpec":
        doc = dict(doc)
        kind = doc.pop("kind", None) or doc.pop("op", None)
        if kind not in _APPLIERS:
            raise SurgeryError(f"unknown surgery kind {kind!r}; expected one of {sorted(_APPLIERS)}")
        return cls(kind, doc)

    @classmethod
    def loads(cls, text: str) -> "SurgerySpec":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


@dataclass(frozen=True)
class SurgeryResult:
    graph: MetricGraph
    relation: str
    hypothesis_ok: bool = True


def _apply_insert(g, p):
    from .graph import from_dict

    sub = p["graph"] if isinstance(p["graph"], MetricGraph) else from_dict(p["graph"])
    out = insert(g, p["at"], sub, dict(p["attachment"]), p.get("prefix"))
    ok = insert_hypothesis(g, p["at"], sub)
    return SurgeryResult(out, NOT_DECREASING, ok)


def _apply_unfold(g, p):
    rule = p.get("tip_rule", "zero")
    out = unfold(g, p["pendants"], rule, p.get("new_edge"), p.get("new_tip"))
    return SurgeryResult(out, NOT_DECREASING, rule == "zero")


def _apply_set_strength(g, p):
    new = float(p["alpha"])
    old = g.strength(p["vertex"])
    rel = DECREASES if new > old else INCREASES if new < old else NOT_INCREASING
    ok = all(a >= 0 for a in g.strengths.values()) and new >= 0
    return SurgeryResult(set_strength(g, p["vertex"], new), rel, ok)


def _apply_cut(g, p):
    spec = Cut(p["v0"], p["v1"], float(p["alpha1"]), p["v2"], float(p["alpha2"]), tuple(p["edge_ends"]))
    return SurgeryResult(cut(g, spec), NOT_DECREASING)


_APPLIERS = {
    "lengthen": lambda g, p: SurgeryResult(lengthen(g, p["edge"], float(p["new_length"])), INCREASES),
    "scale": lambda g, p: SurgeryResult(scale(g, float(p["t"])), SCALES),
    "glue": lambda g, p: SurgeryResult(glue(g, p["v1"], p["v2"], p.get("new_id")), NOT_INCREASING),
    "cut": _apply_cut,
    "insert": _apply_insert,
    "unfold": _apply_unfold,
    "set_strength": _apply_set_strength,
}


def apply(g: MetricGraph, spec: SurgerySpec) -> SurgeryResult:
    """Run ``spec`` on ``g``. ``hypothesis_ok`` is False when the predicted
    relation is not guaranteed (insertion adding too much strength, unfolding
    with the summed tip rule, negative strengths)."""
    res = _APPLIERS[spec.kind](g, spec.params)
    if any(a < 0 for a in g.strengths.values()) or not any(a > 0 for a in g.strengths.values()):
        return SurgeryResult(res.graph, res.relation, False)
    return res
