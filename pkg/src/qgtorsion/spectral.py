"""First eigenvalue of the vertex-condition Laplacian.

General graphs use continuous piecewise-linear finite elements with mesh
doubling and Richardson extrapolation. Intervals additionally have an exact
route through the secular equation, kept as an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from . import numerics
from .errors import BudgetExceeded, NegativeGroundState
from .graph import MetricGraph, ensure_valid, interval_graph, require_connected

DENSE_LIMIT = 300
DEFAULT_DOF_CAP = 200_000


@dataclass(frozen=True)
class Mesh:
    cells: dict

    @classmethod
    def initial(cls, g: MetricGraph, base_cells: int = 64, min_cells: int = 4) -> "Mesh":
        h0 = g.total_length / base_cells
        return cls({e.id: max(min_cells, math.ceil(e.length / h0 - 1e-12)) for e in g.edges})

    @classmethod
    def uniform(cls, g: MetricGraph, m: int) -> "Mesh":
        return cls({e.id: int(m) for e in g.edges})

    def refined(self) -> "Mesh":
        return Mesh({k: 2 * m for k, m in self.cells.items()})

    def h_max(self, g: MetricGraph) -> float:
        return max(e.length / self.cells[e.id] for e in g.edges)

    def dof_count(self, g: MetricGraph) -> int:
        return len(g.free_vertices) + sum(m - 1 for m in self.cells.values())


def _dof_map(g: MetricGraph, mesh: Mesh):
    """Per edge, the global DOF index of every node from tail to head (-1 = Dirichlet)."""
    vidx = {v: i for i, v in enumerate(g.free_vertices)}
    nxt = len(vidx)
    nodes = {}
    for e in g.edges:
        m = mesh.cells[e.id]
        if m < 1:
            raise ValueError(f"edge {e.id!r} needs at least one cell")
        interior = np.arange(nxt, nxt + m - 1)
        nxt += m - 1
        nodes[e.id] = np.concatenate(([vidx.get(e.tail, -1)], interior, [vidx.get(e.head, -1)]))
    return nodes, nxt


def assemble_fem(g: MetricGraph, mesh: Mesh, sparse: bool = False):
    """Stiffness and mass matrices of the P1 discretization, Dirichlet DOFs eliminated.

    Stiffness is ``int u'v'`` plus ``alpha_v`` on vertex DOFs; mass is the
    consistent P1 mass matrix.
    """
    nodes, n = _dof_map(g, mesh)
    rows, cols, kv, mv = [], [], [], []
    for e in g.edges:
        idx = nodes[e.id]
        h = e.length / mesh.cells[e.id]
        i, j = idx[:-1], idx[1:]
        k_loc = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
        m_loc = np.array([[2.0, 1.0], [1.0, 2.0]]) * h / 6
        for a, ia in enumerate((i, j)):
            for b, ib in enumerate((i, j)):
                keep = (ia >= 0) & (ib >= 0)
                rows.append(ia[keep])
                cols.append(ib[keep])
                kv.append(np.full(keep.sum(), k_loc[a, b]))
                mv.append(np.full(keep.sum(), m_loc[a, b]))
    for i, v in enumerate(g.free_vertices):
        rows.append(np.array([i]))
        cols.append(np.array([i]))
        kv.append(np.array([g.strength(v)]))
        mv.append(np.array([0.0]))
    r = np.concatenate(rows) if rows else np.zeros(0, int)
    c = np.concatenate(cols) if cols else np.zeros(0, int)
    k = scipy.sparse.coo_matrix((np.concatenate(kv), (r, c)), shape=(n, n)).tocsr()
    m = scipy.sparse.coo_matrix((np.concatenate(mv), (r, c)), shape=(n, n)).tocsr()
    if sparse:
        return k, m
    return k.toarray(), m.toarray()


@dataclass(frozen=True)
class Level:
    h_max: float
    dofs: int
    lambda1: float


@dataclass(frozen=True)
class SpectralResult:
    lambda1: float
    h_max: float
    lambda1_refined: float
    error_estimate: float
    order: float | None
    levels: tuple = field(default_factory=tuple)

    @property
    def error_estimates(self) -> list:
        """Richardson estimate ``|lam_h - lam_{h/2}| / 3`` for each doubling step."""
        lam = [lv.lambda1 for lv in self.levels]
        return [abs(a - b) / 3 for a, b in zip(lam, lam[1:])]

    def to_dict(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "h_max": self.h_max,
            "lambda1_refined": self.lambda1_refined,
            "error_estimate": self.error_estimate,
            "order": self.order,
            "levels": [{"h_max": lv.h_max, "dofs": lv.dofs, "lambda1": lv.lambda1} for lv in self.levels],
        }


def rayleigh_quotient(g: MetricGraph, mesh: Mesh, x) -> float:
    """``h_alpha(u) / ||u||^2`` for the P1 function with nodal values ``x``.

    The stiffness part is summed from squared nodal differences rather than
    as ``x^T K x``, which avoids cancellation on fine meshes.
    """
    nodes, _ = _dof_map(g, mesh)
    xz = np.concatenate([np.asarray(x, dtype=float), [0.0]])  # index -1 reads the Dirichlet zero
    stiff, mass = [], []
    for e in g.edges:
        u = xz[nodes[e.id]]
        h = e.length / mesh.cells[e.id]
        du = np.diff(u)
        stiff.append(np.sum(du * du) / h)
        mass.append(h / 3 * np.sum(u[:-1] ** 2 + u[:-1] * u[1:] + u[1:] ** 2))
    for i, v in enumerate(g.free_vertices):
        stiff.append(g.strength(v) * xz[i] ** 2)
    return math.fsum(stiff) / math.fsum(mass)


def smallest_eigenvalue(g: MetricGraph, mesh: Mesh, below: float | None = None) -> float:
    """Smallest generalized eigenvalue of the assembled pair on ``mesh``.

    ``below`` must lie under the sought eigenvalue; it is only used as the
    shift for the sparse path on large meshes. The value returned is the
    Rayleigh quotient of the computed eigenvector.
    """
    n = mesh.dof_count(g)
    if n <= DENSE_LIMIT or below is None:
        k, m = assemble_fem(g, mesh)
        _, vec = numerics.eig_gen_sym(k, m, count=1, vectors=True)
        x = vec[:, 0]
    else:
        k, m = assemble_fem(g, mesh, sparse=True)
        _, vec = numerics.eig_gen_sym_sparse(k, m, sigma=below, count=1, vectors=True)
        x = vec[:, 0]
    return rayleigh_quotient(g, mesh, x)


def _observed_order(lams) -> float | None:
    if len(lams) < 3:
        return None
    d1, d2 = lams[-3] - lams[-2], lams[-2] - lams[-1]
    noise = 1e-12 * (1.0 + abs(lams[-1]))
    if abs(d1) <= noise or abs(d2) <= noise:
        return None
    return math.log2(abs(d1 / d2))


def lambda1(g: MetricGraph, target_error: float = 1e-6, dof_cap: int = DEFAULT_DOF_CAP,
            mesh: Mesh | None = None, min_levels: int = 3) -> SpectralResult:
    """First eigenvalue by P1 finite elements, doubling the mesh until the
    Richardson error estimate drops to ``target_error``.

    Strengths may have either sign. The error model assumes the O(h^2)
    convergence of P1 eigenvalues, which the reported ``order`` lets callers
    check.
    """
    ensure_valid(g)
    require_connected(g)
    mesh = Mesh.initial(g) if mesh is None else mesh
    levels = []
    lams = []
    while True:
        n = mesh.dof_count(g)
        if n > dof_cap:
            raise BudgetExceeded(f"mesh with {n} DOFs exceeds cap {dof_cap} before reaching "
                                 f"error {target_error:.1e}")
        below = None
        if len(lams) >= 2:
            # Galerkin values decrease towards the limit; stay safely under it
            gap = abs(lams[-2] - lams[-1])
            below = lams[-1] - 4 * gap - 1e-3 * (1.0 + abs(lams[-1]))
        lam = smallest_eigenvalue(g, mesh, below)
        lams.append(lam)
        levels.append(Level(mesh.h_max(g), n, lam))
        if len(lams) >= max(2, min_levels):
            est = abs(lams[-2] - lams[-1]) / 3
            if est <= target_error:
                break
        mesh = mesh.refined()
    refined = lams[-1] + (lams[-1] - lams[-2]) / 3
    return SpectralResult(
        lambda1=lams[-1],
        h_max=levels[-1].h_max,
        lambda1_refined=refined,
        error_estimate=abs(refined - lams[-1]),
        order=_observed_order(lams),
        levels=tuple(levels),
    )


# ---------------------------------------------------------------------------
# exact route for intervals

def _sinc_term(lam: float, length: float) -> float:
    """``sin(k L)/k`` with ``k = sqrt(lam)``, continued analytically to ``lam <= 0``."""
    if lam > 0:
        k = math.sqrt(lam)
        return math.sin(k * length) / k
    if lam < 0:
        k = math.sqrt(-lam)
        return math.sinh(k * length) / k
    return length


def _cos_term(lam: float, length: float) -> float:
    if lam > 0:
        return math.cos(math.sqrt(lam) * length)
    if lam < 0:
        return math.cosh(math.sqrt(-lam) * length)
    return 1.0


def interval_determinant(lam: float, length: float, alpha0: float, alpha1: float) -> float:
    """Secular function of the interval with delta conditions at both ends; zero exactly at eigenvalues.

    With ``u = k cos(kx) + alpha0 sin(kx)`` the left condition holds and the
    right one reads ``(a0 + a1) cos(kL) + (a0 a1 - k^2) sin(kL)/k = 0``.
    """
    return (alpha0 + alpha1) * _cos_term(lam, length) + (alpha0 * alpha1 - lam) * _sinc_term(lam, length)


def secular_lambda1_interval(length: float, alpha0: float, alpha1: float, tol: float = 1e-14,
                             grid: int = 4096) -> float:
    """Smallest eigenvalue of the interval, which must be nonnegative.

    The sign of the ground state is read from the one-cell stiffness matrix:
    linear interpolation minimizes ``int |u'|^2`` for given end values, so its
    inertia is exactly that of the quadratic form.
    """
    if not length > 0:
        raise ValueError("length must be positive")
    k, _ = assemble_fem(interval_graph(length, alpha0, alpha1), Mesh({"e0": 1}))
    iner = numerics.inertia(k, 1e-13 * max(1.0, numerics.inf_norm(k)))
    if iner.n_negative:
        raise NegativeGroundState(f"interval ({length}, {alpha0}, {alpha1}) has a negative first eigenvalue")
    if iner.n_zero:
        return 0.0

    def f(kk):
        return interval_determinant(kk * kk, length, alpha0, alpha1)

    # the ground state never exceeds the Dirichlet value (pi/L)^2
    k_hi = math.pi / length
    ks = np.linspace(0.0, k_hi, grid + 1)[1:]
    lo = 0.0
    f_lo = f(1e-300) if f(0.0) == 0 else f(0.0)
    for kk in ks:
        fk = f(kk)
        if fk == 0.0:
            return kk * kk
        if math.copysign(1.0, fk) != math.copysign(1.0, f_lo):
            root = numerics.bisect_root(f, lo, kk, tol=tol * k_hi)
            return root * root
        lo, f_lo = kk, fk
    # an eigenvalue at the top of the bracket (Dirichlet-like end behaviour)
    return k_hi * k_hi
