import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240808)


def random_graph(rng, n, density=0.7, integer=False, hi=6):
    from secmatch.graphs import WeightedGraph

    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                w = float(rng.integers(0, hi)) if integer else float(rng.random())
                edges.append((u, v, w))
    if not edges:
        edges = [(0, 1, 1.0)]
    return WeightedGraph(n, edges)
