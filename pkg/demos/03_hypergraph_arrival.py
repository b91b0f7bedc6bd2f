"""Online bipartite hypergraph matching.

Hyperedges pair one online vertex with up to d offline vertices.  The
exploration fraction becomes f_d = d^(-1/(d-1)) and the guarantee
1/d^(d/(d-1)).  Edge arrival is the d = 2 special case, and the embedding
reproduces the edge-arrival numbers bit for bit.
"""

import numpy as np

from secmatch import (
    BipartiteHypergraph,
    EdgeInstance,
    WeightedGraph,
    embed_edge_instance,
    f_d,
    hyper_coefficient,
    hyper_limit,
)
from secmatch.edge import exact_expected_value as edge_value
from secmatch.hypergraph import exact_expected_value as hyper_value
from secmatch.hypergraph import max_weight_hyper_matching, run_hypergraph_algorithm

for d in (2, 3, 4):
    print(f"d={d}: exploration fraction f_d = {f_d(d):.5f}, "
          f"guarantee -> {hyper_limit(d):.5f}")

print("\ncoefficient convergence for d = 3:")
for m in (20, 100, 1000, 10000):
    print(f"  m={m:6d}: {hyper_coefficient(m, 3):.6f}")

H = BipartiteHypergraph(4, 5, 3, [
    (0, {0, 1}, 2.0), (0, {2}, 0.7),
    (1, {1, 2, 3}, 2.5), (2, {3, 4}, 1.2), (3, {0, 4}, 1.1),
])
print(f"\noptimum hypermatching: {max_weight_hyper_matching(H)}")
print(f"exact expected value: {hyper_value(H):.4f} "
      f"(optimum {H.optimum_weight():.4f})")

rng = np.random.default_rng(2)
trace = run_hypergraph_algorithm(H, rng.permutation(H.m).tolist(), rng=np.random.default_rng(5))
print(f"one run: weight {trace.total_weight:.3f}")

g = WeightedGraph(5, [(0, 1, 1.0), (1, 2, 0.8), (2, 3, 0.6), (3, 4, 0.9)])
inst = EdgeInstance(g)
emb = embed_edge_instance(inst)
print(f"\nd=2 embedding: edge value {edge_value(inst)!r} == hyper value {hyper_value(emb)!r}")
