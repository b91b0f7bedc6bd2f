"""Stress tests for the numba blossom solver against independent oracles."""

import numpy as np
import networkx as nx
import pytest

from secmatch._blossom import blossom_max_weight_matching, solve_with_duals

from oracles import brute_force_max_matching_weight


def arrays(edges):
    eu = np.array([e[0] for e in edges], dtype=np.int32)
    ev = np.array([e[1] for e in edges], dtype=np.int32)
    ew = np.array([e[2] for e in edges], dtype=np.float64)
    return eu, ev, ew


def matched_weight(n, mate, wd):
    total = 0.0
    for v in range(n):
        p = int(mate[v])
        if p >= 0:
            assert int(mate[p]) == v and p != v
            if v < p:
                assert (v, p) in wd
                total += wd[(v, p)]
    return total


def random_edges(rng, n, density, style):
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                if style == 0:
                    w = float(rng.integers(0, 6))   # heavy ties
                elif style == 1:
                    w = float(rng.random())
                else:
                    w = float(rng.integers(0, 2))   # 0/1 weights
                edges.append((u, v, w))
    return edges


def test_empty_graph():
    assert blossom_max_weight_matching(3, *arrays([])).tolist() == [-1, -1, -1]


def test_brute_force_stress():
    rng = np.random.default_rng(12345)
    count = 0
    for rep in range(1200):
        n = int(rng.integers(2, 9))
        edges = random_edges(rng, n, 0.65, rep % 3)
        if not edges:
            continue
        mate = blossom_max_weight_matching(n, *arrays(edges))
        wd = {(u, v): w for u, v, w in edges}
        got = matched_weight(n, mate, wd)
        want = brute_force_max_matching_weight(n, lambda a, b: wd.get((min(a, b), max(a, b)), 0.0))
        assert got == pytest.approx(want, abs=1e-9), (n, edges)
        count += 1
    assert count > 1000


def test_networkx_cross_check():
    rng = np.random.default_rng(777)
    for rep in range(40):
        n = int(rng.integers(8, 40))
        edges = random_edges(rng, n, float(rng.uniform(0.2, 1.0)), rep % 2)
        if not edges:
            continue
        mate = blossom_max_weight_matching(n, *arrays(edges))
        wd = {(u, v): w for u, v, w in edges}
        got = matched_weight(n, mate, wd)
        G = nx.Graph()
        G.add_weighted_edges_from(edges)
        M = nx.max_weight_matching(G)
        want = sum(wd[(min(a, b), max(a, b))] for a, b in M)
        assert got == pytest.approx(want, abs=1e-8)


def test_integer_weights_are_exact():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        edges = random_edges(rng, n, 0.8, 0)
        if not edges:
            continue
        mate = blossom_max_weight_matching(n, *arrays(edges))
        wd = {(u, v): w for u, v, w in edges}
        got = matched_weight(n, mate, wd)
        want = brute_force_max_matching_weight(n, lambda a, b: wd.get((min(a, b), max(a, b)), 0.0))
        assert got == want  # exact, no tolerance


def test_duals_certify_optimality():
    # du + dv >= 2w holds for every edge outside blossoms' interiors, and
    # the conservative check is what the pruning fast path relies on
    rng = np.random.default_rng(31)
    for _ in range(50):
        n = int(rng.integers(4, 20))
        edges = random_edges(rng, n, 1.0, 1)
        mate, dual = solve_with_duals(n, *arrays(edges))
        wd = {(u, v): w for u, v, w in edges}
        for v in range(n):
            p = int(mate[v])
            if p > v:
                # matched edges are tight up to blossom credits
                assert dual[v] + dual[p] <= 2 * wd[(v, p)] + 1e-9


def test_blossom_heavy_structures():
    # odd cycles and nested structures exercised explicitly
    tri = [(0, 1, 2.0), (1, 2, 2.0), (0, 2, 2.0)]
    mate = blossom_max_weight_matching(3, *arrays(tri))
    assert sorted(mate.tolist()).count(-1) == 1

    # 5-cycle with a pendant that forces expansion
    edges = [(0, 1, 4.0), (1, 2, 4.0), (2, 3, 4.0), (3, 4, 4.0), (4, 0, 4.0), (2, 5, 8.0)]
    mate = blossom_max_weight_matching(6, *arrays(edges))
    wd = {(min(u, v), max(u, v)): w for u, v, w in edges}
    got = matched_weight(6, mate, wd)
    want = brute_force_max_matching_weight(6, lambda a, b: wd.get((min(a, b), max(a, b)), 0.0))
    assert got == want
