from fractions import Fraction

import pytest

from qgtorsion import graph as gc
from qgtorsion.errors import UnknownFixture
from qgtorsion.fixtures import PROVENANCE_TAGS, check_fixture, fixture_names, get_fixture, graph_text, load_fixture

NAMES = fixture_names()


@pytest.mark.parametrize("name", NAMES)
def test_every_expectation_reproduced(name):
    for res in check_fixture(name):
        assert res.passed, (name, res.expectation, res.observed)


@pytest.mark.parametrize("name", NAMES)
def test_graph_file_is_canonical(name):
    text = graph_text(name)
    assert gc.dumps(gc.loads(text)) == text
    assert gc.validate(get_fixture(name).graph) == []


@pytest.mark.parametrize("name", NAMES)
def test_provenance_is_complete(name):
    for exp in get_fixture(name).expectations:
        assert exp.provenance in PROVENANCE_TAGS
        if exp.provenance == "PAPER":
            assert exp.source
        if exp.provenance == "DERIVED":
            assert exp.oracle
        if exp.printed is not None:
            assert exp.discrepancy and exp.provenance == "DERIVED"


@pytest.mark.parametrize("name", NAMES)
def test_exact_values_match_stored_floats(name):
    for exp in get_fixture(name).expectations:
        if exp.exact and "/" in exp.exact and all(p.strip("-").isdigit() for p in exp.exact.split("/")):
            assert float(Fraction(exp.exact)) == pytest.approx(exp.value, rel=1e-15)


def test_discrepancies_are_reported():
    msgs = [m for r in check_fixture("inserting-after") for m in r.messages]
    assert len(msgs) == 1 and "0.69696" in msgs[0] and "24/17" in msgs[0]
    msgs = [m for r in check_fixture("example-2.6") for m in r.messages]
    assert len(msgs) == 2


def test_named_examples():
    g, exps = load_fixture("example-2.6")
    assert [g.strength(v) for v in g.vertex_ids] == [1.0, -2.0, 1.0]
    assert all(e.length == 1.0 for e in g.edges)
    g, _ = load_fixture("example-2.7")
    assert sorted(g.strengths.values()) == [-3.0, 2.0, 2.0]
    limit = {e.quantity: e.value for e in load_fixture("no-unfolding-limit")[1]}
    assert limit["rigidity"] == pytest.approx(5 / 6, rel=1e-15)


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        load_fixture("no-such-graph")
    with pytest.raises(KeyError):
        get_fixture("no-such-graph")
