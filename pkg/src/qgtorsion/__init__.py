"""Torsion function and torsional rigidity on metric graphs.

Vertices carry delta conditions of arbitrary real strength or Dirichlet
conditions. The torsion function solves ``-u'' = 1`` edgewise and is exact
(piecewise quadratic); the first eigenvalue is computed by finite elements,
with an exact secular-equation route on intervals.
"""
from .errors import (BudgetExceeded, DegenerateForm, HypothesisViolated, InconclusiveAccuracy,
                     NegativeGroundState, NotConnected, NotDoublyConnected, NoTorsion, QGTorsionError,
                     SurgeryError, UnknownFixture, ValidationError)
from .graph import (DIRICHLET, Delta, Dirichlet, Edge, MetricGraph, bridges, cycle_graph, dumps,
                    flower_graph, interval_graph, is_connected, is_doubly_connected, load, loads,
                    path_graph, save, star_graph, summarize, validate)
from .torsion import (NO_TORSION, NOT_POSITIVE, POSITIVE, PiecewiseQuadratic, PositivityVerdict,
                      TorsionFunction, classify_positivity, energy, polya_quotient, solve_torsion,
                      torsional_rigidity)
from .spectral import SpectralResult, lambda1, secular_lambda1_interval
from .calculus import Gradient, dT_dlength, dT_dstrength, finite_difference_gradient, gradient
from .bounds import (BoundRecord, BoundsReport, bounds_report, doubly_connected_upper_bound,
                     eigenvalue_product_bound, flower_lower_bound, kohler_jobin_explorer,
                     saint_venant_upper_bound)
from .fixtures import fixture_names, load_fixture

__version__ = "0.1.0"
