"""Estimate edge count, vertex count and mixing time of a graph from
intersections of lazy random walk trajectories."""

__version__ = "0.1.0"

from .graph import Graph, load_graph, min_degree, stationary_measure
from .walks import WalkTrace, Profile, simulate_lazy_walk, compute_profile
from .intersections import (
    WindowSpec,
    count_intersections,
    count_weighted_intersections,
    count_J,
    count_L_pairwise,
)
from .estimators import (
    EstimateResult,
    InsufficientIntersectionsError,
    estimate_edges,
    estimate_edges_burnin,
    estimate_vertices_general,
    estimate_vertices_regular,
)
from .stopping import StoppingLog, selfstop_edges, selfstop_mixing

__all__ = [
    "Graph", "load_graph", "min_degree", "stationary_measure",
    "WalkTrace", "Profile", "simulate_lazy_walk", "compute_profile",
    "WindowSpec", "count_intersections", "count_weighted_intersections", "count_J",
    "count_L_pairwise", "EstimateResult", "InsufficientIntersectionsError",
    "estimate_edges", "estimate_edges_burnin", "estimate_vertices_general",
    "estimate_vertices_regular", "StoppingLog", "selfstop_edges", "selfstop_mixing",
]
