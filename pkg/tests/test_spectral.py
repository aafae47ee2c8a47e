import math

import numpy as np
import pytest

from qgtorsion import graph as gc
from qgtorsion.bounds import eigenvalue_lower_bound
from qgtorsion.errors import BudgetExceeded, NegativeGroundState
from qgtorsion.generators import random_connected_graph
from qgtorsion.spectral import (Mesh, assemble_fem, interval_determinant, lambda1, secular_lambda1_interval,
                                smallest_eigenvalue)

K_ROBIN = 0.8603335890193797  # root of k tan k = 1


def test_single_cell_element():
    g = gc.interval_graph(2.0, 0.0, 0.0)
    k, m = assemble_fem(g, Mesh({"e0": 1}))
    assert np.allclose(k, np.array([[1, -1], [-1, 1]]) / 2.0)
    assert np.allclose(m, np.array([[2, 1], [1, 2]]) * 2.0 / 6)
    k2, _ = assemble_fem(gc.interval_graph(2.0, 3.0, -1.0), Mesh({"e0": 1}))
    assert np.allclose(np.diag(k2) - np.diag(k), [3.0, -1.0])


def test_dirichlet_dof_eliminated():
    g = gc.interval_graph(1.0, "dirichlet", 0.0)
    k, m = assemble_fem(g, Mesh({"e0": 1}))
    assert k.shape == (1, 1) and m.shape == (1, 1)
    assert k[0, 0] == pytest.approx(1.0) and m[0, 0] == pytest.approx(1 / 3)


def test_mass_interior_pattern():
    g = gc.interval_graph(1.0, 0.0, 0.0)
    _, m = assemble_fem(g, Mesh({"e0": 4}))
    h = 0.25
    # vertex DOFs come first, then interior nodes
    assert m[0, 0] == pytest.approx(2 * h / 6)
    assert m[2, 2] == pytest.approx(4 * h / 6)
    assert m[2, 3] == pytest.approx(h / 6)


def test_loop_and_parallel_edges_assemble(rng):
    g = random_connected_graph(rng, max_vertices=3, max_edges=6)
    mesh = Mesh.initial(g)
    k, m = assemble_fem(g, mesh)
    assert k.shape == (mesh.dof_count(g),) * 2
    assert np.allclose(k, k.T) and np.allclose(m, m.T)
    assert np.all(np.linalg.eigvalsh(m) > 0)


def test_sparse_and_dense_assembly_agree(rng):
    g = random_connected_graph(rng)
    mesh = Mesh.initial(g)
    kd, md = assemble_fem(g, mesh)
    ks, ms = assemble_fem(g, mesh, sparse=True)
    assert np.allclose(kd, ks.toarray()) and np.allclose(md, ms.toarray())


def test_initial_mesh_rule():
    g = gc.path_graph([0.01, 10.0], [1.0, 0.0, 0.0])
    mesh = Mesh.initial(g)
    h0 = g.total_length / 64
    assert mesh.cells == {"e0": 4, "e1": math.ceil(10.0 / h0)}


def test_neumann_interval_has_zero_ground_state():
    res = lambda1(gc.interval_graph(1.0, 0.0, 0.0))
    assert abs(res.lambda1) <= 1e-8


def test_robin_interval():
    res = lambda1(gc.interval_graph(1.0, 1.0, 0.0), target_error=1e-8)
    assert abs(res.lambda1_refined - K_ROBIN ** 2) <= 1e-8
    assert abs(res.lambda1 - K_ROBIN ** 2) <= 10 * 1e-8
    assert 1.8 <= res.order <= 2.2


def test_mixed_dirichlet_neumann_interval():
    res = lambda1(gc.interval_graph(1.0, "dirichlet", 0.0), target_error=1e-8)
    assert abs(res.lambda1 - math.pi ** 2 / 4) <= 1e-6


def test_richardson_estimate_ratio():
    res = lambda1(gc.interval_graph(1.0, 1.0, 0.0), target_error=1e-9, min_levels=4)
    est = res.error_estimates
    ratios = [a / b for a, b in zip(est, est[1:])]
    assert ratios and all(3.5 <= r <= 4.5 for r in ratios)


def test_spectral_result_json():
    d = lambda1(gc.interval_graph(1.0, 1.0, 0.0)).to_dict()
    assert {"lambda1", "h_max", "lambda1_refined", "error_estimate", "order", "levels"} <= set(d)
    assert len(d["levels"]) >= 3 and d["error_estimate"] >= 0


def test_negative_ground_state_is_computed():
    res = lambda1(gc.path_graph([1.0, 1.0], [2.0, -3.0, 2.0]), target_error=1e-6)
    assert res.lambda1 < 0


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        lambda1(gc.interval_graph(1.0, 1.0, 0.0), target_error=1e-14, dof_cap=2000)


def test_sparse_path_matches_dense():
    g = gc.interval_graph(1.0, 20.0, 20.0)
    mesh = Mesh.uniform(g, 400)
    lam_dense = smallest_eigenvalue(g, mesh)
    lam_sparse = smallest_eigenvalue(g, mesh, below=lam_dense - 1.0)
    assert lam_sparse == pytest.approx(lam_dense, rel=1e-10)


def test_monotone_in_strength(rng):
    for _ in range(100):
        g = random_connected_graph(rng, alpha_range=(-1.0, 4.0))
        v = g.vertex_ids[int(rng.integers(0, len(g.vertex_ids)))]
        mesh = Mesh.initial(g)
        lam_hi = smallest_eigenvalue(g, mesh)
        lam_lo = smallest_eigenvalue(g.with_strength(v, g.strength(v) - rng.uniform(0.1, 2.0)), mesh)
        assert lam_lo <= lam_hi + 1e-12 * (1 + abs(lam_hi))


# -- secular route

def test_secular_values():
    assert secular_lambda1_interval(1.0, 0.0, 0.0) == 0.0
    assert secular_lambda1_interval(1.0, 1.0, 0.0) == pytest.approx(K_ROBIN ** 2, rel=1e-12)
    assert secular_lambda1_interval(1.0, 1e6, 1e6) == pytest.approx(math.pi ** 2, rel=1e-3)


def test_secular_root_is_zero_of_determinant():
    lam = secular_lambda1_interval(1.7, 0.3, 2.5)
    assert abs(interval_determinant(lam, 1.7, 0.3, 2.5)) <= 1e-12


def test_secular_negative_ground_state():
    with pytest.raises(NegativeGroundState):
        secular_lambda1_interval(1.0, -1.0, 0.0)


def test_fem_matches_secular_on_random_intervals(rng):
    for _ in range(20):
        length = rng.uniform(0.3, 3.0)
        a0, a1 = rng.uniform(0, 20, size=2)
        exact = secular_lambda1_interval(length, a0, a1)
        res = lambda1(gc.interval_graph(length, a0, a1), target_error=1e-6)
        assert abs(res.lambda1 - exact) <= 1e-5


@pytest.mark.parametrize("alpha", [0.1, 1.0, 10.0, 100.0])
@pytest.mark.parametrize("length", [0.5, 1.0, 2.0])
def test_neumann_robin_lower_bound(alpha, length):
    assert secular_lambda1_interval(length, alpha, 0.0) >= eigenvalue_lower_bound(length, alpha)
