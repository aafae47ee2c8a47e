"""Metric graph data model, validation, connectivity and the JSON file format.

A :class:`MetricGraph` is a finite multigraph: loops and parallel edges are
allowed, every edge carries a positive length and every vertex carries either
a delta condition with a (possibly negative) strength or a Dirichlet condition.
Edges are parametrized as ``[0, length]`` running from ``tail`` to ``head``;
the orientation carries no other meaning.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import NotConnected, ValidationError


@dataclass(frozen=True)
class Delta:
    strength: float = 0.0


@dataclass(frozen=True)
class Dirichlet:
    pass


DIRICHLET = Dirichlet()
VertexCondition = Union[Delta, Dirichlet]


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: float

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    def other(self, v: str) -> str:
        return self.head if v == self.tail else self.tail


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    detail: str = ""

    def __str__(self):
        return f"{self.kind}({self.subject}){': ' + self.detail if self.detail else ''}"


def _as_condition(c) -> VertexCondition:
    if isinstance(c, (Delta, Dirichlet)):
        return c
    if c is None:
        return Delta(0.0)
    if isinstance(c, str) and c.lower() == "dirichlet":
        return DIRICHLET
    return Delta(float(c))


@dataclass(frozen=True)
class MetricGraph:
    """Immutable metric multigraph.

    ``vertices`` is a tuple of ``(id, condition)`` pairs in insertion order;
    use :meth:`build` to construct from a mapping and plain tuples.
    """

    vertices: tuple = ()
    edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple((str(v), _as_condition(c)) for v, c in self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    @classmethod
    def build(cls, vertices: Mapping | Iterable, edges: Iterable) -> "MetricGraph":
        """``vertices`` maps ids to a strength, ``"dirichlet"`` or a condition;
        ``edges`` holds :class:`Edge` objects or ``(id, tail, head, length)``."""
        if isinstance(vertices, Mapping):
            vertices = vertices.items()
        es = [e if isinstance(e, Edge) else Edge(str(e[0]), str(e[1]), str(e[2]), float(e[3])) for e in edges]
        return cls(tuple(vertices), tuple(es))

    # lookups

    @cached_property
    def _conditions(self) -> dict:
        return dict(self.vertices)

    @cached_property
    def _edges_by_id(self) -> dict:
        return {e.id: e for e in self.edges}

    @cached_property
    def _incidence(self) -> dict:
        inc = {v: [] for v, _ in self.vertices}
        for e in self.edges:
            inc.setdefault(e.tail, []).append((e, "tail"))
            inc.setdefault(e.head, []).append((e, "head"))
        return {v: tuple(ends) for v, ends in inc.items()}

    @property
    def vertex_ids(self) -> tuple:
        return tuple(v for v, _ in self.vertices)

    @property
    def edge_ids(self) -> tuple:
        return tuple(e.id for e in self.edges)

    def condition(self, v: str) -> VertexCondition:
        return self._conditions[v]

    def is_dirichlet(self, v: str) -> bool:
        return isinstance(self._conditions[v], Dirichlet)

    def strength(self, v: str) -> float:
        c = self._conditions[v]
        if isinstance(c, Dirichlet):
            raise ValueError(f"vertex {v!r} is Dirichlet and has no strength")
        return c.strength

    def edge(self, eid: str) -> Edge:
        return self._edges_by_id[eid]

    def incident(self, v: str) -> tuple:
        """Edge ends at ``v`` as ``(edge, "tail"|"head")``; a loop appears twice."""
        return self._incidence.get(v, ())

    def degree(self, v: str) -> int:
        return len(self.incident(v))

    @property
    def free_vertices(self) -> tuple:
        return tuple(v for v, c in self.vertices if not isinstance(c, Dirichlet))

    @property
    def dirichlet_vertices(self) -> tuple:
        return tuple(v for v, c in self.vertices if isinstance(c, Dirichlet))

    @property
    def strengths(self) -> dict:
        return {v: c.strength for v, c in self.vertices if isinstance(c, Delta)}

    @property
    def total_length(self) -> float:
        return math.fsum(e.length for e in self.edges)

    # functional updates

    def with_length(self, eid: str, length: float) -> "MetricGraph":
        if eid not in self._edges_by_id:
            raise KeyError(eid)
        es = tuple(Edge(e.id, e.tail, e.head, float(length)) if e.id == eid else e for e in self.edges)
        return MetricGraph(self.vertices, es)

    def with_condition(self, v: str, condition) -> "MetricGraph":
        if v not in self._conditions:
            raise KeyError(v)
        cond = _as_condition(condition)
        return MetricGraph(tuple((u, cond if u == v else c) for u, c in self.vertices), self.edges)

    def with_strength(self, v: str, strength: float) -> "MetricGraph":
        return self.with_condition(v, Delta(float(strength)))


@dataclass(frozen=True)
class GraphSummary:
    total_length: float
    total_strength: float
    edge_count: int
    vertex_count: int
    ell_degree: dict = field(default_factory=dict)
    degree: dict = field(default_factory=dict)


def validate(g: MetricGraph) -> list:
    """Return every violated structural invariant; an empty list means valid."""
    out = []
    seen = set()
    for v, c in g.vertices:
        if v in seen:
            out.append(Violation("DuplicateVertexId", v))
        seen.add(v)
        if isinstance(c, Delta) and not math.isfinite(c.strength):
            out.append(Violation("NonFiniteStrength", v, repr(c.strength)))
    seen_e = set()
    for e in g.edges:
        if e.id in seen_e:
            out.append(Violation("DuplicateEdgeId", e.id))
        seen_e.add(e.id)
        if not math.isfinite(e.length):
            out.append(Violation("NonFiniteLength", e.id, repr(e.length)))
        elif e.length <= 0:
            out.append(Violation("NonPositiveLength", e.id, repr(e.length)))
        for end in (e.tail, e.head):
            if end not in seen:
                out.append(Violation("DanglingEndpoint", e.id, f"unknown vertex {end!r}"))
    if not g.edges:
        out.append(Violation("NoEdges", "graph"))
    return out


def ensure_valid(g: MetricGraph) -> MetricGraph:
    problems = validate(g)
    if problems:
        raise ValidationError(problems)
    return g


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def components(g: MetricGraph, exclude_dirichlet: bool = False) -> list:
    """Connected pieces as sets of edge ids (plus ``"v:<id>"`` for bare vertices).

    With ``exclude_dirichlet`` the Dirichlet vertices are removed as metric
    points, so edge ends meeting only there are no longer joined.
    """
    dsu = _DSU()
    for e in g.edges:
        dsu.find(("e", e.id))
    for v, c in g.vertices:
        if exclude_dirichlet and isinstance(c, Dirichlet):
            continue
        ends = g.incident(v)
        if not ends:
            dsu.find(("v", v))
        for e, _ in ends:
            dsu.union(("e", e.id), ("e", ends[0][0].id))
    groups = defaultdict(set)
    for item in list(dsu.parent):
        kind, name = item
        groups[dsu.find(item)].add(name if kind == "e" else f"v:{name}")
    return list(groups.values())


def is_connected(g: MetricGraph, exclude_dirichlet: bool = False) -> bool:
    return len(components(g, exclude_dirichlet)) == 1


def require_connected(g: MetricGraph) -> None:
    """Raise unless ``g`` is connected, in the punctured sense when it has Dirichlet vertices."""
    if not is_connected(g, exclude_dirichlet=bool(g.dirichlet_vertices)):
        raise NotConnected("graph is not connected" + (" after removing Dirichlet vertices" if g.dirichlet_vertices else ""))


def bridges(g: MetricGraph) -> list:
    """Ids of cut edges. Parallel edges and loops are never bridges."""
    adj = defaultdict(list)
    for e in g.edges:
        if e.is_loop:
            continue
        adj[e.tail].append((e.head, e.id))
        adj[e.head].append((e.tail, e.id))
    disc, low, out = {}, {}, []
    counter = 0
    for root in g.vertex_ids:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        # iterative DFS; the frame remembers the edge used to enter the vertex
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, eid in it:
                if eid == via:
                    continue
                if w in disc:
                    low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, eid, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[v])
                    if low[v] > disc[parent]:
                        out.append(via)
    return out


def is_doubly_connected(g: MetricGraph) -> bool:
    if not is_connected(g):
        raise NotConnected("doubly-connectedness requires a connected graph")
    return not bridges(g)


def summarize(g: MetricGraph) -> GraphSummary:
    ell = {}
    deg = {}
    for v in g.vertex_ids:
        ends = g.incident(v)
        # a loop shows up as two ends, so its length is counted twice
        ell[v] = math.fsum(e.length for e, _ in ends)
        deg[v] = len(ends)
    return GraphSummary(
        total_length=g.total_length,
        total_strength=math.fsum(g.strengths.values()),
        edge_count=len(g.edges),
        vertex_count=len(g.vertices),
        ell_degree=ell,
        degree=deg,
    )


# ---------------------------------------------------------------------------
# file format

def to_dict(g: MetricGraph) -> dict:
    verts = []
    for v, c in g.vertices:
        cond = "dirichlet" if isinstance(c, Dirichlet) else {"delta": float(c.strength)}
        verts.append({"id": v, "condition": cond})
    edges = [{"id": e.id, "tail": e.tail, "head": e.head, "length": float(e.length)} for e in g.edges]
    return {"vertices": verts, "edges": edges}


def dumps(g: MetricGraph) -> str:
    """Canonical serialization: two-space indented JSON with a trailing newline."""
    return json.dumps(to_dict(g), indent=2) + "\n"


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError([Violation("BadNumber", where, repr(x))])
    return float(x)


def from_dict(doc: dict) -> MetricGraph:
    problems = []
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise ValidationError([Violation("BadDocument", "root", "expected 'vertices' and 'edges'")])
    verts = []
    for item in doc["vertices"]:
        vid = str(item["id"])
        cond = item.get("condition", {"delta": 0.0})
        if isinstance(cond, str):
            if cond.lower() != "dirichlet":
                raise ValidationError([Violation("BadCondition", vid, repr(cond))])
            verts.append((vid, DIRICHLET))
        elif isinstance(cond, dict) and set(cond) == {"delta"}:
            verts.append((vid, Delta(_number(cond["delta"], vid))))
        else:
            raise ValidationError([Violation("BadCondition", vid, repr(cond))])
    edges = []
    for item in doc["edges"]:
        eid = str(item["id"])
        edges.append(Edge(eid, str(item["tail"]), str(item["head"]), _number(item["length"], eid)))
    g = MetricGraph(tuple(verts), tuple(edges))
    problems.extend(validate(g))
    if problems:
        raise ValidationError(problems)
    return g


def loads(text: str) -> MetricGraph:
    return from_dict(json.loads(text, parse_constant=_reject_constant))


def load(path) -> MetricGraph:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(g: MetricGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(g))


# ---------------------------------------------------------------------------
# standard shapes

def interval_graph(length: float, alpha0=0.0, alpha1=0.0) -> MetricGraph:
    """Single edge ``v0 -> v1``; strengths may be given as ``"dirichlet"``."""
    return MetricGraph.build({"v0": alpha0, "v1": alpha1}, [("e0", "v0", "v1", length)])


def path_graph(lengths, strengths) -> MetricGraph:
    if len(strengths) != len(lengths) + 1:
        raise ValueError("a path with k edges needs k+1 vertex strengths")
    verts = {f"v{i}": a for i, a in enumerate(strengths)}
    edges = [(f"e{i}", f"v{i}", f"v{i + 1}", ell) for i, ell in enumerate(lengths)]
    return MetricGraph.build(verts, edges)


def flower_graph(lengths, strength: float) -> MetricGraph:
    """One vertex ``v`` carrying a loop for every entry of ``lengths``."""
    return MetricGraph.build({"v": strength}, [(f"e{i}", "v", "v", ell) for i, ell in enumerate(lengths)])


def cycle_graph(lengths, strengths) -> MetricGraph:
    """Cycle ``v0 - v1 - ... - v0``; a single length gives a loop."""
    if len(strengths) != len(lengths):
        raise ValueError("a cycle needs one strength per edge")
    n = len(lengths)
    verts = {f"v{i}": a for i, a in enumerate(strengths)}
    edges = [(f"e{i}", f"v{i}", f"v{(i + 1) % n}", ell) for i, ell in enumerate(lengths)]
    return MetricGraph.build(verts, edges)


def star_graph(lengths, center_strength, tip_strengths) -> MetricGraph:
    verts = {"c": center_strength}
    verts.update({f"t{i}": a for i, a in enumerate(tip_strengths)})
    edges = [(f"e{i}", "c", f"t{i}", ell) for i, ell in enumerate(lengths)]
    return MetricGraph.build(verts, edges)
