"""Conformal maps, Carnot-Caratheodory lengths and rectilinear domains in the Grushin plane."""
from .core import (
    DAlphaMatrix,
    GrushinPoint,
    HorizontalJet,
    PlanePoint,
    d_alpha_matrix,
    dilation,
    finite_diff_jet,
    horizontal_gradient,
    horizontal_jacobian,
    meyerson,
    meyerson_inv,
    wirtinger,
    wirtinger_identity_residual,
)
from .curves import (
    ClosedFormCurve,
    PolylineCurve,
    admissibility_check,
    graph,
    grushin_length,
    length_distortion,
    pushforward,
    segment,
)
from .documents import load_document, parse_curve, parse_domain, parse_map
from .errors import *  # noqa: F401,F403
from .geodesic import cc_distance_upper
from .holo import Joukovski, OddRealPoly, RealAffine, Shift, compose
from .maps import (
    ConjugatedMap,
    EntireAffineMap,
    SampledMap,
    analytic_jet,
    classify_entire,
    compose_maps,
    conjugate,
    dilation_map,
    entire_map,
    ext_boundary,
    identity_map,
    invert_map,
    ratio_limit_check,
)
from .topology import RectilinearDomain, axis_components, incidence_graph, obstruction_check, side_components
from .verify import ConformalityReport, emit_grid, verify_conformal

__version__ = "0.1.0"
