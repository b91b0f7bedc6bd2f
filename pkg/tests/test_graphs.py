import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secmatch.errors import InputError
from secmatch.graphs import (
    Matching,
    WeightedGraph,
    graph_from_json,
    graph_to_json,
    greedy_matching,
    matching_weight,
    max_weight_matching,
    restrict_matching,
)

from conftest import random_graph
from oracles import brute_force_max_matching_weight


def k4_example():
    return WeightedGraph(4, [(0, 1, 10.0), (2, 3, 10.0), (0, 2, 1.0),
                             (0, 3, 2.0), (1, 2, 3.0), (1, 3, 4.0)])


class TestWeightedGraph:
    def test_defaults_to_zero_for_absent_pairs(self):
        g = WeightedGraph(3, [(0, 1, 5.0)])
        assert g.weight(0, 1) == 5.0
        assert g.weight(1, 2) == 0.0

    def test_rejects_self_loops_duplicates_negatives(self):
        with pytest.raises(InputError):
            WeightedGraph(3, [(1, 1, 1.0)])
        with pytest.raises(InputError):
            WeightedGraph(3, [(0, 1, 1.0), (1, 0, 2.0)])
        with pytest.raises(InputError):
            WeightedGraph(3, [(0, 1, -0.5)])
        with pytest.raises(InputError):
            WeightedGraph(3, [(0, 1, float("nan"))])
        with pytest.raises(InputError):
            WeightedGraph(3, [(0, 5, 1.0)])

    def test_json_round_trip(self, tmp_path):
        g = k4_example()
        obj = graph_to_json(g)
        assert graph_from_json(json.loads(json.dumps(obj))) == g
        with pytest.raises(InputError):
            graph_from_json({"n": 2, "edges": [[0, 1]]})


class TestMatching:
    def test_partner_lookup(self):
        mu = Matching([(1, 0), (2, 3)])
        assert mu.partner(0) == 1 and mu.partner(1) == 0
        assert mu.partner(4) is None
        assert (0, 1) in mu and (1, 0) in mu  # membership is orientation-free
        assert (0, 2) not in mu

    def test_rejects_shared_vertices(self):
        with pytest.raises(InputError):
            Matching([(0, 1), (1, 2)])


class TestMaxWeightMatching:
    def test_k4_example(self):
        mu = max_weight_matching(k4_example())
        assert set(mu.edges) == {(0, 1), (2, 3)}
        assert matching_weight(mu, k4_example()) == 20.0

    def test_single_pair(self):
        g = WeightedGraph(2, [(0, 1, 5.0)])
        mu = max_weight_matching(g)
        assert set(mu.edges) == {(0, 1)}
        assert matching_weight(mu, g) == 5.0

    def test_empty_subset(self):
        assert len(max_weight_matching(k4_example(), [])) == 0

    def test_invalid_vertex_rejected(self):
        with pytest.raises(InputError):
            max_weight_matching(k4_example(), [0, 9])
        with pytest.raises(InputError):
            max_weight_matching(k4_example(), [0, 0, 1])

    def test_perfect_on_even_subsets(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 13))
            g = random_graph(rng, n, density=0.5)
            sub = sorted(rng.choice(n, size=(int(rng.integers(1, n + 1)) // 2) * 2,
                                    replace=False).tolist())
            mu = max_weight_matching(g, sub)
            assert mu.vertices() == frozenset(sub)

    def test_matches_brute_force_small(self, rng):
        # 100 seeded samples with |T| <= 10: exact equality of weights
        for rep in range(100):
            n = int(rng.integers(2, 11))
            g = random_graph(rng, n, density=float(rng.uniform(0.3, 1.0)))
            mu = max_weight_matching(g)
            assert matching_weight(mu, g) == pytest.approx(
                brute_force_max_matching_weight(n, g.weight), abs=1e-12)

    def test_deterministic(self, rng):
        g = random_graph(rng, 14, density=0.6)
        first = max_weight_matching(g)
        for _ in range(3):
            assert max_weight_matching(g).edges == first.edges

    def test_lexicographic_tie_break_small(self):
        # equal-weight options: the lexicographically smallest list wins
        g = WeightedGraph(4, [(1, 2, 5.0), (1, 3, 5.0)])
        mu = max_weight_matching(g)
        assert list(mu.edges) == [(0, 2), (1, 3)]  # beats [(0, 3), (1, 2)]

    def test_zero_weight_graph_even_subset_perfect(self):
        g = WeightedGraph(4, [])
        mu = max_weight_matching(g)
        assert list(mu.edges) == [(0, 1), (2, 3)]

    def test_large_path_consistent_with_small_on_unique_optimum(self, rng):
        # continuous weights: unique optimum, so the exhaustive small-set
        # rule and the core+pad rule coincide
        for _ in range(10):
            g = random_graph(rng, 10, density=1.0)
            small = max_weight_matching(g)  # |T| = 10 exhaustive path
            core_pairs = matching_weight(small, g)
            assert core_pairs == pytest.approx(
                brute_force_max_matching_weight(10, g.weight), abs=1e-12)


class TestRestrictAndWeight:
    def test_restrict_examples(self):
        mu = Matching([(0, 1), (2, 3)])
        assert set(restrict_matching(mu, [0, 1, 2]).edges) == {(0, 1)}
        assert len(restrict_matching(mu, [0, 2])) == 0
        assert len(restrict_matching(Matching(), [0, 1])) == 0

    def test_weight_examples(self):
        g = k4_example()
        assert matching_weight(Matching([(0, 1), (2, 3)]), g) == 20.0
        assert matching_weight(Matching(), g) == 0.0

    @given(st.integers(2, 8), st.randoms(use_true_random=False))
    @settings(max_examples=40, deadline=None)
    def test_restrict_is_idempotent_and_monotone(self, n, pyrng):
        pairs = [(2 * i, 2 * i + 1) for i in range(n // 2) if pyrng.random() < 0.7]
        mu = Matching(pairs)
        sub = [v for v in range(n) if pyrng.random() < 0.6]
        r1 = restrict_matching(mu, sub)
        assert restrict_matching(r1, sub) == r1
        assert set(r1.edges) <= set(mu.edges)


class TestGreedyMatching:
    def test_path_example(self):
        g = WeightedGraph(4, [(0, 1, 3.0), (1, 2, 2.0), (2, 3, 3.0)])
        mu = greedy_matching(g)
        assert set(mu.edges) == {(0, 1), (2, 3)}
        assert matching_weight(mu, g) == 6.0

    def test_triangle_example(self):
        g = WeightedGraph(3, [(0, 1, 2.0), (1, 2, 1.0), (0, 2, 1.0)])
        mu = greedy_matching(g)
        assert set(mu.edges) == {(0, 1)}

    def test_empty(self):
        assert len(greedy_matching(k4_example(), [])) == 0

    def test_two_approximation(self, rng):
        for _ in range(60):
            n = int(rng.integers(2, 11))
            g = random_graph(rng, n, density=float(rng.uniform(0.3, 1.0)))
            gw = matching_weight(greedy_matching(g), g)
            opt = brute_force_max_matching_weight(n, g.weight)
            assert gw >= opt / 2.0 - 1e-12

    def test_pads_even_subsets(self, rng):
        g = random_graph(rng, 8, density=0.4)
        mu = greedy_matching(g, range(8))
        assert mu.vertices() == frozenset(range(8))
