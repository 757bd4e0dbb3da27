"""Piecewise-Lipschitz Markov dynamics on finite metric graphs."""

from .graph import (Edge, GraphError, GraphPoint, MetricGraph, Piece, Segment,
                    Splitting, ValidationResult, circle_graph, interval_graph,
                    path_arclength, star_graph, validate_splitting)
from .markov import InvariantError, Itinerary, Lap, PLMarkovMap
from .transition import (FrequencySpec, TransitionMatrix, is_irreducible,
                         is_primitive, lap_matrix, matrix_power_trace,
                         max_outside_frequency, min_cycle_log_expansion,
                         outside_count_dp, outside_frequency_dp_limit, period,
                         periodic_count_lower_bound, perron_root,
                         transition_matrix)
from .constructions import (ConstructionSpec, ParameterError, arr_example,
                            build_construction, describe, free_arc_cycle,
                            star_devaney, star_exact, star_minimal,
                            tent_family, two_piece_swap)

__version__ = "0.1.0"
