import math

import pytest

from qgtorsion import bounds as bnd
from qgtorsion import graph as gc
from qgtorsion.errors import HypothesisViolated, InconclusiveAccuracy, NotDoublyConnected
from qgtorsion.generators import random_bridgeless_graph, random_flower, random_nonnegative_graph
from qgtorsion.spectral import secular_lambda1_interval
from qgtorsion.torsion import torsional_rigidity


def test_equilateral_flower_is_equality():
    r = bnd.flower_lower_bound(gc.flower_graph([0.8] * 5, 1.3))
    assert r.equality_case and r.passed
    assert abs(r.margin) <= 1e-12 * r.rhs


def test_non_equilateral_flower():
    g = gc.flower_graph([0.5, 1.0, 2.5], 2.0)
    jensen = bnd.flower_lower_bound(g)
    sharp = bnd.flower_edge_lower_bound(g)
    assert jensen.margin > 1e-3 and not jensen.equality_case
    assert abs(sharp.margin) <= 1e-12 * sharp.rhs and sharp.equality_case


def test_flower_bound_on_random_trees(rng):
    for _ in range(30):
        g = random_nonnegative_graph(rng, allow_loops=False, max_edges=7)
        if gc.bridges(g) != list(g.edge_ids):
            continue
        r = bnd.flower_lower_bound(g)
        assert r.margin > 0


def test_saint_venant_equality_and_strict_cases():
    eq = bnd.saint_venant_upper_bound(gc.path_graph([1.0, 2.0], [3.0, 0.0, 0.0]))
    assert eq.equality_case and abs(eq.margin) <= 1e-12 * eq.rhs
    circle = bnd.saint_venant_upper_bound(gc.cycle_graph([1.0, 2.0], [3.0, 0.0]))
    assert circle.margin > 0 and not circle.equality_case
    split = bnd.saint_venant_upper_bound(gc.path_graph([1.0, 2.0], [1.5, 0.0, 1.5]))
    assert split.margin > 0 and not split.equality_case


def test_doubly_connected_circle_saturates():
    for length, alpha in [(3.0, 2.0), (1.0, 0.1), (5.0, 40.0)]:
        r = bnd.doubly_connected_upper_bound(gc.flower_graph([length], alpha))
        assert r.equality_case
        assert abs(r.margin) <= 1e-12 * r.rhs


def test_doubly_connected_bound_is_twice_the_half_path():
    g = gc.cycle_graph([1.0, 0.5, 1.5], [0.0, 2.0, 0.0])
    half = gc.interval_graph(g.total_length / 2, 1.0, 0.0)  # total strength 2, halved
    r = bnd.doubly_connected_upper_bound(g)
    assert r.rhs == pytest.approx(2 * torsional_rigidity(half), rel=1e-14)
    # the half-size closed form would be violated by this very circle
    assert r.lhs > g.total_length ** 3 / 24 + g.total_length ** 2 / (2 * 2.0)


def test_doubly_connected_figure_eight_and_interval():
    r = bnd.doubly_connected_upper_bound(gc.flower_graph([1.0, 1.0], 1.0))
    assert r.margin > 0 and not r.equality_case
    with pytest.raises(NotDoublyConnected):
        bnd.doubly_connected_upper_bound(gc.interval_graph(1.0, 1.0, 0.0))


def test_hypotheses():
    with pytest.raises(HypothesisViolated):
        bnd.flower_lower_bound(gc.interval_graph(0.25, -1.0, 2.0))
    with pytest.raises(HypothesisViolated):
        bnd.saint_venant_upper_bound(gc.interval_graph(1.0, "dirichlet", 1.0))
    with pytest.raises(HypothesisViolated):
        bnd.flower_lower_bound(gc.flower_graph([1.0], 0.0))


def test_report_marks_failed_hypotheses_informational():
    rep = bnd.bounds_report(gc.interval_graph(0.25, -1.0, 2.0))
    assert rep.passed
    assert all(not r.hypothesis_ok for r in rep.records)


def test_report_on_interval_flags_bridge():
    rep = bnd.bounds_report(gc.interval_graph(1.0, 1.0, 0.0), include_eigenvalue=False)
    dc = rep.by_name("doubly_connected_upper_bound")
    assert not dc.hypothesis_ok and dc.passed
    assert rep.by_name("saint_venant_upper_bound").equality_case


def test_report_serialization():
    rep = bnd.bounds_report(gc.flower_graph([1.0, 2.0], 2.0))
    d = rep.to_dict()
    assert d["passed"] is True
    assert {"name", "lhs", "rhs", "margin", "hypothesis_ok", "equality_case", "tolerance", "passed"} <= set(d["records"][0])
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("name,lhs,rhs,margin") and len(lines) == 1 + len(rep.records)


def test_eigenvalue_product_unit_interval():
    r = bnd.eigenvalue_product_bound(gc.interval_graph(1.0, 1.0, 0.0))
    assert r.lhs == pytest.approx(secular_lambda1_interval(1.0, 1.0, 0.0) * 4 / 3, rel=1e-5)
    assert r.lhs == pytest.approx(0.98690, abs=1e-5)
    assert r.passed


def test_eigenvalue_product_circle():
    r = bnd.eigenvalue_product_bound(gc.flower_graph([1.0], 1.0))
    assert r.passed and r.lhs < 1


def test_eigenvalue_product_trend_on_path():
    # the product falls from |G| towards the Dirichlet-Neumann value pi^2/12 as the strength grows
    prods = [secular_lambda1_interval(1.0, a, 0.0) * (1 / 3 + 1 / a) for a in (0.01, 0.1, 1.0, 10.0, 1e3, 1e6)]
    assert all(x > y for x, y in zip(prods, prods[1:]))
    assert prods[0] < 1 and prods[0] == pytest.approx(1.0, abs=1e-5)
    assert prods[-1] == pytest.approx(math.pi ** 2 / 12, rel=1e-5)


def test_eigenvalue_product_inconclusive():
    with pytest.raises(InconclusiveAccuracy):
        bnd.eigenvalue_product_bound(gc.interval_graph(1.0, 1e6, 0.0), target_error=1e-3, safety=1e6,
                                     min_target=1e-5)


def test_eigenvalue_product_tightens_until_conclusive():
    # weak strength: the product sits just below |G|, so the default target is not enough
    g = gc.interval_graph(1.0, 0.03, 0.0)
    r = bnd.eigenvalue_product_bound(g, target_error=1e-6)
    exact = secular_lambda1_interval(1.0, 0.03, 0.0) * torsional_rigidity(g)
    assert r.passed and r.lhs < r.rhs
    assert r.rhs - r.lhs > 10 * 1e-8 * torsional_rigidity(g)
    assert abs(r.lhs - exact) <= 10 * 1e-8 * torsional_rigidity(g)
    assert r.note.endswith("target=1e-08")


def test_eigenvalue_product_budget_is_inconclusive():
    with pytest.raises(InconclusiveAccuracy):
        bnd.eigenvalue_product_bound(gc.interval_graph(1.0, 1e-9, 0.0))


def test_random_bounds(rng):
    for _ in range(60):
        g = random_nonnegative_graph(rng)
        t = torsional_rigidity(g)
        assert bnd.flower_lower_bound(g, t).passed
        assert bnd.flower_edge_lower_bound(g, t).passed
        assert bnd.saint_venant_upper_bound(g, t).passed
    for _ in range(30):
        assert bnd.doubly_connected_upper_bound(random_bridgeless_graph(rng)).passed
    for _ in range(20):
        f = random_flower(rng)
        assert bnd.flower_edge_lower_bound(f).equality_case


def test_equality_flags_only_on_extremizers(rng):
    for _ in range(50):
        g = random_nonnegative_graph(rng)
        t = torsional_rigidity(g)
        for rec in (bnd.flower_lower_bound(g, t), bnd.saint_venant_upper_bound(g, t)):
            if not rec.equality_case:
                assert rec.margin > 1e-9 * rec.rhs


# -- Kohler-Jobin explorer

def test_kj_limit():
    (row,) = bnd.kohler_jobin_explorer([1.0], [1e6])
    assert abs(row.proxy - bnd.kohler_jobin_limit()) <= 1e-4
    assert bnd.kohler_jobin_limit() == pytest.approx(math.pi ** 2 / 24 ** (2 / 3))
    assert bnd.kohler_jobin_limit() == pytest.approx(1.18620, abs=1e-5)


def test_kj_rows():
    (row,) = bnd.kohler_jobin_explorer([1.0], [1.0])
    assert row.proxy <= row.product and row.proxy_le_product
    (row,) = bnd.kohler_jobin_explorer([2.0], [5.0])
    assert row.constrained_ok is True
    (row,) = bnd.kohler_jobin_explorer([0.5], [5.0])
    assert row.constrained_ok is None


def test_kj_rejects_nonpositive():
    with pytest.raises(ValueError):
        bnd.kohler_jobin_explorer([1.0], [0.0])


def test_csv_precision():
    text = bnd.rows_to_csv(["x"], [[1 / 3]])
    assert text.splitlines()[1] == "0.33333333333333331"
