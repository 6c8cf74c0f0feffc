"""Graph-theoretic bounds on the odd-cycle inequality."""
from .bounds import (
    BOUNDS_HEADER,
    BoundsReport,
    TriangleError,
    bounds_report,
    closed_form_report,
    fractional_packing,
    independence_number,
    lovasz_theta_circulant,
    theta_closed_form,
)
from .graphs import (
    Event,
    ExclusivityGraph,
    circulant_graph,
    circulant_spectrum,
    exclusivity_graph,
    find_triangle,
    from_edges,
    mobius_ladder,
    verify_is_mobius,
)
from .lp import InfeasibleError, LPError, LPResult, UnboundedError, lp_solve

__all__ = [
    "BOUNDS_HEADER", "BoundsReport", "Event", "ExclusivityGraph", "InfeasibleError", "LPError", "LPResult",
    "TriangleError", "UnboundedError", "bounds_report", "circulant_graph", "circulant_spectrum",
    "closed_form_report", "exclusivity_graph", "find_triangle", "fractional_packing", "from_edges",
    "independence_number", "lovasz_theta_circulant", "lp_solve", "mobius_ladder", "theta_closed_form",
    "verify_is_mobius",
]
