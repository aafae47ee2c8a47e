"""Curated graphs with expected values and provenance.

Graphs are stored as canonical JSON next to ``manifest.json``, which lists
the expectations for each fixture. Every expectation carries a provenance
tag: ``PAPER`` values come with a ``source`` location, ``DERIVED`` and
``TRIVIAL`` values with an ``oracle`` description. When a printed value could
not be reproduced, the entry keeps it under ``printed`` together with a
``discrepancy`` note and asserts the derived value instead.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from . import graph as gc
from .errors import UnknownFixture
from .spectral import lambda1, secular_lambda1_interval
from .torsion import PiecewiseQuadratic, classify_positivity, form_value, solve_torsion, torsional_rigidity

PROVENANCE_TAGS = ("PAPER", "TRIVIAL", "DERIVED")
DEFAULT_RTOL = 1e-9


@dataclass(frozen=True)
class Expectation:
    quantity: str
    value: object
    provenance: str
    target: str | None = None
    exact: str | None = None
    source: str | None = None
    oracle: str | None = None
    printed: object = None
    discrepancy: str | None = None
    rtol: float = DEFAULT_RTOL

    @classmethod
    def from_dict(cls, doc: dict) -> "Expectation":
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in doc.items() if k in known})


@dataclass(frozen=True)
class Fixture:
    name: str
    graph: gc.MetricGraph
    expectations: tuple
    notes: str = ""
    graph_file: str = ""


@dataclass(frozen=True)
class CheckResult:
    fixture: str
    expectation: Expectation
    observed: object
    passed: bool
    messages: list = field(default_factory=list)


def _package_files():
    return resources.files(__package__).joinpath("data")


@lru_cache(maxsize=1)
def manifest() -> dict:
    return json.loads(_package_files().joinpath("manifest.json").read_text())


def fixture_names() -> list:
    return sorted(manifest()["fixtures"])


def graph_text(name: str) -> str:
    """Raw canonical JSON of a fixture graph."""
    entry = _entry(name)
    return _package_files().joinpath(entry["graph"]).read_text()


def _entry(name: str) -> dict:
    try:
        return manifest()["fixtures"][name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}") from None


def get_fixture(name: str) -> Fixture:
    entry = _entry(name)
    g = gc.ensure_valid(gc.loads(graph_text(name)))
    exps = tuple(Expectation.from_dict(d) for d in entry["expectations"])
    return Fixture(name, g, exps, entry.get("notes", ""), entry["graph"])


def load_fixture(name: str):
    """Return ``(graph, expectations)`` for a named fixture."""
    fx = get_fixture(name)
    return fx.graph, list(fx.expectations)


def _hat(g: gc.MetricGraph, v: str) -> PiecewiseQuadratic:
    return PiecewiseQuadratic.from_vertex_values(g, {u: 1.0 if u == v else 0.0 for u in g.vertex_ids})


def evaluate(g: gc.MetricGraph, exp: Expectation):
    """Compute the quantity an expectation refers to."""
    q = exp.quantity
    if q == "rigidity":
        return torsional_rigidity(g)
    if q == "vertex_value":
        return solve_torsion(g).vertex_values[exp.target]
    if q == "classification":
        return classify_positivity(g).classification
    if q == "discrete_spectrum_min":
        return classify_positivity(g).discrete_spectrum_min
    if q == "lambda1_secular":
        (e,) = g.edges
        return secular_lambda1_interval(e.length, g.strength(e.tail), g.strength(e.head))
    if q == "lambda1_negative":
        return lambda1(g, target_error=1e-4).lambda1 < 0
    if q == "form_of_hat":
        return form_value(_hat(g, exp.target), g)
    raise ValueError(f"unknown expectation quantity {q!r}")


def _matches(observed, expected, rtol: float) -> bool:
    if isinstance(expected, bool) or isinstance(expected, str):
        return observed == expected
    return math.isclose(observed, expected, rel_tol=rtol, abs_tol=rtol * 1e-3)


def check_fixture(name: str) -> list:
    """Evaluate every expectation of a fixture; discrepancy notes are passed through as messages."""
    fx = get_fixture(name)
    out = []
    for exp in fx.expectations:
        observed = evaluate(fx.graph, exp)
        msgs = []
        if exp.discrepancy:
            msgs.append(f"{name}: {exp.quantity}{'[' + exp.target + ']' if exp.target else ''} "
                        f"printed {exp.printed!r}, reproduced {observed!r}: {exp.discrepancy}")
        out.append(CheckResult(name, exp, observed, _matches(observed, exp.value, exp.rtol), msgs))
    return out
