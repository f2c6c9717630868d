"""Percolation configurations on H(2, n), their components and explorations."""
from .explore import (
    ExplorationTrace,
    LineOccupancy,
    explore_cluster,
    explore_lazy,
    line_occupancy,
    occupancy_cap,
    occupancy_of,
)
from .graph import (
    OpenGraph,
    Vertex,
    dump_edges,
    graph_from_edges,
    load_edges,
    sample_edge_batch,
    sample_open_graph,
    sample_open_graph_coupled,
)
from .oracle import ExactLaw, c1_chi_square, exact_small_oracle, simulate_top_two
from .spectrum import (
    ComponentSpectrum,
    batch_top_two,
    component_spectrum,
    middle_component_count,
    z_geq,
)

__all__ = [
    "ComponentSpectrum",
    "ExactLaw",
    "ExplorationTrace",
    "LineOccupancy",
    "OpenGraph",
    "Vertex",
    "batch_top_two",
    "c1_chi_square",
    "component_spectrum",
    "dump_edges",
    "exact_small_oracle",
    "explore_cluster",
    "explore_lazy",
    "graph_from_edges",
    "line_occupancy",
    "load_edges",
    "middle_component_count",
    "occupancy_cap",
    "occupancy_of",
    "sample_edge_batch",
    "sample_open_graph",
    "sample_open_graph_coupled",
    "simulate_top_two",
    "z_geq",
]
