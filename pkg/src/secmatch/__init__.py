"""Online secretary matching: random-order vertex, edge, and hypergraph arrivals.

The package provides:

* exact and greedy maximum-weight matching on weighted general graphs
  (:mod:`secmatch.graphs`);
* the explore-then-exploit vertex-arrival matching algorithm, its
  pairwise-comparison variant, and the matched-probability formulas
  (:mod:`secmatch.vertex`);
* the edge-arrival algorithm with its acceptance-probability schedule and
  exact availability oracles (:mod:`secmatch.edge`, :mod:`secmatch.schedules`);
* the online bipartite hypergraph generalization (:mod:`secmatch.hypergraph`);
* the rank-only policy analysis that pins the 5/12 ceiling for vertex
  arrival (:mod:`secmatch.ordinal`);
* a seeded experiment harness with CSV/JSON reports and a CLI
  (:mod:`secmatch.bench`, ``secmatch`` entry point).
"""

from .errors import CapacityError, InputError
from .graphs import (
    Matching,
    WeightedGraph,
    graph_from_json,
    graph_to_json,
    greedy_matching,
    load_graph,
    matching_weight,
    max_weight_matching,
    restrict_matching,
    save_graph,
)
from .schedules import (
    alpha_closed,
    alpha_recursive,
    edge_telescope_coefficient,
    f_d,
    hyper_alpha_closed,
    hyper_alpha_recursive,
    hyper_coefficient,
    hyper_cutoff,
    hyper_limit,
)
from .vertex import (
    VertexInstance,
    estimate_match_probability,
    p_closed,
    p_recursive,
    pad_with_auxiliary,
    run_vertex_algorithm,
    run_vertex_ordinal_greedy,
)
from .edge import (
    EdgeInstance,
    edge_in_optimum_mass,
    exact_availability,
    exact_expected_value,
    mc_availability,
    run_edge_algorithm,
)
from .hypergraph import (
    BipartiteHypergraph,
    embed_edge_instance,
    max_weight_hyper_matching,
    pad_with_dummies,
    run_hypergraph_algorithm,
)
from .ordinal import (
    OrdinalPolicy,
    gradient,
    hard_instance_matching,
    objective,
    optimal_threshold,
    policy_state,
    simulate_ordinal,
    threshold_policy,
)

__version__ = "0.1.0"
