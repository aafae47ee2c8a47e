"""Random metric graphs for property checks and sweeps.

All generators take a :class:`numpy.random.Generator` so runs are reproducible.
"""
from __future__ import annotations

import numpy as np

from .graph import MetricGraph, flower_graph, interval_graph


def _lengths(rng: np.random.Generator, n: int, lo: float, hi: float) -> list:
    return [float(x) for x in rng.uniform(lo, hi, size=n)]


def random_connected_graph(rng: np.random.Generator, max_vertices: int = 8, max_edges: int = 12,
                           alpha_range=(0.1, 5.0), length_range=(0.2, 3.0),
                           allow_loops: bool = True) -> MetricGraph:
    """Random spanning tree plus extra edges; extras may be loops or parallel edges."""
    n = int(rng.integers(1, max_vertices + 1))
    if n == 1 and not allow_loops:
        n = 2
    m_min = max(n - 1, 1)
    m = int(rng.integers(m_min, max(m_min, max_edges) + 1))
    ends = []
    for i in range(1, n):
        ends.append((int(rng.integers(0, i)), i))
    while len(ends) < m:
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        if a == b and not allow_loops:
            continue
        ends.append((a, b))
    lengths = _lengths(rng, len(ends), *length_range)
    alphas = rng.uniform(*alpha_range, size=n)
    verts = {f"v{i}": float(alphas[i]) for i in range(n)}
    edges = [(f"e{k}", f"v{a}", f"v{b}", ell) for k, ((a, b), ell) in enumerate(zip(ends, lengths))]
    return MetricGraph.build(verts, edges)


def random_nonnegative_graph(rng: np.random.Generator, zero_fraction: float = 0.5, **kw) -> MetricGraph:
    """Strengths ``>= 0``, each zeroed with probability ``zero_fraction``; at least one stays positive."""
    g = random_connected_graph(rng, **kw)
    verts = {}
    ids = g.vertex_ids
    keep = int(rng.integers(0, len(ids)))
    for i, (v, c) in enumerate(g.vertices):
        verts[v] = c.strength if (i == keep or rng.random() >= zero_fraction) else 0.0
    return MetricGraph.build(verts, g.edges)


def random_signed_graph(rng: np.random.Generator, alpha_range=(-3.0, 3.0), **kw) -> MetricGraph:
    return random_connected_graph(rng, alpha_range=alpha_range, **kw)


def random_bridgeless_graph(rng: np.random.Generator, max_vertices: int = 8, max_edges: int = 12,
                            alpha_range=(0.0, 5.0), length_range=(0.2, 3.0)) -> MetricGraph:
    """A cycle (or loop) with ears attached; every ear keeps the graph bridgeless."""
    n_cycle = int(rng.integers(1, min(max_vertices, max_edges) + 1))
    ends = [(i, (i + 1) % n_cycle) for i in range(n_cycle)]
    n = n_cycle
    while len(ends) < max_edges and rng.random() < 0.7:
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        inner = int(rng.integers(0, 3))
        inner = min(inner, max_vertices - n, max_edges - len(ends) - 1)
        if inner <= 0:
            ends.append((a, b))
            continue
        chain = [a] + list(range(n, n + inner)) + [b]
        n += inner
        ends.extend(zip(chain, chain[1:]))
    alphas = rng.uniform(*alpha_range, size=n)
    alphas[int(rng.integers(0, n))] = rng.uniform(0.5, 5.0)
    verts = {f"v{i}": float(alphas[i]) for i in range(n)}
    lengths = _lengths(rng, len(ends), *length_range)
    edges = [(f"e{k}", f"v{a}", f"v{b}", ell) for k, ((a, b), ell) in enumerate(zip(ends, lengths))]
    return MetricGraph.build(verts, edges)


def random_flower(rng: np.random.Generator, max_loops: int = 6, alpha_range=(0.1, 5.0),
                  length_range=(0.2, 3.0)) -> MetricGraph:
    k = int(rng.integers(1, max_loops + 1))
    return flower_graph(_lengths(rng, k, *length_range), float(rng.uniform(*alpha_range)))


def random_interval(rng: np.random.Generator, length_range=(0.2, 3.0), alpha_range=(0.0, 10.0)) -> MetricGraph:
    length = float(rng.uniform(*length_range))
    a0, a1 = (float(x) for x in rng.uniform(*alpha_range, size=2))
    return interval_graph(length, a0, a1)
