import itertools
import math

import numpy as np
import pytest

from secmatch.errors import CapacityError, InputError
from secmatch.graphs import WeightedGraph
from secmatch.edge import (
    EdgeInstance,
    availability_floor,
    edge_in_optimum_mass,
    enumerate_edge_process,
    exact_availability,
    exact_expected_value,
    exact_oracle,
    matching_from_trace,
    mc_availability,
    monte_carlo_oracle,
    run_edge_algorithm,
)

def star_instance():
    return EdgeInstance(WeightedGraph(3, [(0, 1, 2.0), (0, 2, 1.0)]))


def random_instance(rng, m_target, nv=None):
    nv = nv or m_target + 2
    pairs = [(u, v) for u in range(nv) for v in range(u + 1, nv)]
    take = rng.permutation(len(pairs))[:m_target]
    edges = [(pairs[i][0], pairs[i][1], float(rng.random()) + 1e-6) for i in take]
    return EdgeInstance(WeightedGraph(nv, edges))


class TestEdgeInstance:
    def test_positive_edges_only(self):
        g = WeightedGraph(4, [(0, 1, 1.0), (2, 3, 0.0)])
        inst = EdgeInstance(g)
        assert inst.m == 1

    def test_requires_an_edge(self):
        with pytest.raises(InputError):
            EdgeInstance(WeightedGraph(3, []))

    def test_edge_index_resolution(self):
        inst = star_instance()
        assert inst.edge_index((1, 0)) == inst.edge_index(0)
        with pytest.raises(InputError):
            inst.edge_index((1, 2))

    def test_subset_optimum_is_lex_min(self):
        # two disjoint equal-weight options: lowest canonical edge wins
        g = WeightedGraph(4, [(0, 3, 5.0), (1, 2, 5.0)])
        inst = EdgeInstance(g)
        full = (1 << inst.m) - 1
        mu = inst.optimum_mask(full)
        assert mu == full  # disjoint, both taken
        g2 = WeightedGraph(3, [(0, 1, 5.0), (0, 2, 5.0)])
        inst2 = EdgeInstance(g2)
        mu2 = inst2.optimum_mask(3)
        assert mu2 == 1  # (0,1) beats (0,2) on the tie


class TestExactAvailability:
    def test_first_exploitation_step_is_one(self, rng):
        inst = random_instance(rng, 6)
        cut = inst.schedule.cutoff
        for Q in itertools.combinations(range(6), cut):
            rest = set(range(6)) - set(Q)
            for e in rest:
                assert exact_availability(inst, Q, e) == 1.0

    def test_m2_star(self):
        inst = star_instance()
        assert exact_availability(inst, [(0, 1)], (0, 2)) == 1.0

    def test_floor_holds_exactly(self, rng):
        for _ in range(12):
            m = int(rng.integers(2, 8))
            inst = random_instance(rng, m)
            gap, minx = availability_floor(inst)
            assert gap >= -1e-12

    def test_matches_enumeration_frequencies(self, rng):
        inst = random_instance(rng, 5)
        enum = enumerate_edge_process(inst)
        for (mask, item), freq in enum.availability_freq.items():
            assert freq == pytest.approx(inst.process().availability(mask, item), abs=1e-12)

    def test_capacity_guard(self):
        g = WeightedGraph(16, [(2 * i, 2 * i + 1, 1.0 + i) for i in range(8)]
                          + [(0, 2 * i, 0.5) for i in range(1, 8)])
        inst = EdgeInstance(g)
        assert inst.m == 15
        with pytest.raises(CapacityError):
            inst.process()

    def test_arrived_edge_rejected_as_next(self):
        inst = star_instance()
        with pytest.raises(InputError):
            exact_availability(inst, [0], 0)


class TestAcceptanceIdentity:
    def test_acceptance_probability_equals_alpha(self, rng):
        # Pr[taken at position t | in current optimum at t] == alpha_t
        for _ in range(6):
            m = int(rng.integers(4, 7))
            inst = random_instance(rng, m)
            enum = enumerate_edge_process(inst)
            for t in range(inst.schedule.cutoff + 1, m + 1):
                if enum.opportunity[t] > 0:
                    assert enum.acceptance_given_opportunity(t) == pytest.approx(
                        inst.schedule[t], abs=1e-12)


class TestExactExpectedValue:
    def test_m1(self):
        inst = EdgeInstance(WeightedGraph(2, [(0, 1, 7.0)]))
        assert exact_expected_value(inst) == 7.0

    def test_m2_star(self):
        assert exact_expected_value(star_instance()) == pytest.approx(1.0, abs=1e-15)

    def test_m2_disjoint(self):
        inst = EdgeInstance(WeightedGraph(4, [(0, 1, 2.0), (2, 3, 1.0)]))
        assert exact_expected_value(inst) == pytest.approx(1.5, abs=1e-15)

    def test_equals_enumeration(self, rng):
        for _ in range(8):
            m = int(rng.integers(3, 7))
            inst = random_instance(rng, m)
            assert exact_expected_value(inst) == pytest.approx(
                enumerate_edge_process(inst).value, abs=1e-12)

    def test_quarter_guarantee_small(self, rng):
        for _ in range(15):
            m = int(rng.integers(4, 9))
            inst = random_instance(rng, m)
            assert exact_expected_value(inst) >= inst.offline_optimum() / 4 - 1e-12

    def test_capacity(self, rng):
        inst = random_instance(rng, 9)
        with pytest.raises(CapacityError):
            exact_expected_value(inst)


class TestMonteCarloOracle:
    def test_first_step_exact(self, rng):
        inst = random_instance(rng, 4)
        cut = inst.schedule.cutoff
        Q = list(range(cut))
        e = cut
        est = mc_availability(inst, Q, e, trials=200, seed=1)
        assert est.estimate == 1.0 and est.stderr == 0.0

    def test_within_four_sigma_of_exact(self, rng):
        inst = random_instance(rng, 4)
        full = list(range(4))
        for e in range(4):
            Q = [k for k in full if k != e]
            exact = exact_availability(inst, Q, e)
            est = mc_availability(inst, Q, e, trials=4000, seed=7, inner_trials=400)
            tol = 4 * max(est.stderr, 0.01)
            assert abs(est.estimate - exact) <= tol

    def test_floor_statistically(self, rng):
        inst = random_instance(rng, 6)
        Q = list(range(5))
        est = mc_availability(inst, Q, 5, trials=3000, seed=3, inner_trials=300)
        alpha = inst.schedule[6]
        assert est.estimate >= alpha - 4 * max(est.stderr, 0.01)


class TestRunEdgeAlgorithm:
    def test_m1_always_takes(self):
        inst = EdgeInstance(WeightedGraph(2, [(0, 1, 7.0)]))
        tr = run_edge_algorithm(inst, [0], rng=np.random.default_rng(0))
        assert tr.total_weight == 7.0
        assert matching_from_trace(inst, tr).edges == ((0, 1),)

    def test_trace_fields_and_feasibility(self, rng):
        inst = random_instance(rng, 6)
        oracle = exact_oracle(inst)
        for seed in range(20):
            order = rng.permutation(6).tolist()
            tr = run_edge_algorithm(inst, order, oracle, np.random.default_rng(seed))
            accum = 0
            for item, block, w in tr.taken:
                assert accum & block == 0, "taken blocking sets must be disjoint"
                accum |= block
            for s in tr.steps:
                assert 0.0 <= s.x <= 1.0
                assert not s.clamped  # exact oracle never clamps
            matching_from_trace(inst, tr)  # vertex-disjointness enforced here

    def test_monte_carlo_oracle_runs_and_flags(self, rng):
        inst = random_instance(rng, 5)
        oracle = monte_carlo_oracle(inst, trials=300, inner_trials=60, seed=5)
        tr = run_edge_algorithm(inst, rng.permutation(5).tolist(), oracle,
                                np.random.default_rng(1))
        assert tr.total_weight >= 0.0

    def test_mean_over_orders_matches_exact_value(self, rng):
        inst = random_instance(rng, 5)
        oracle = exact_oracle(inst)
        crg = np.random.default_rng(11)
        vals = []
        for _ in range(4000):
            order = rng.permutation(5).tolist()
            vals.append(run_edge_algorithm(inst, order, oracle, crg).total_weight)
        vals = np.array(vals)
        want = exact_expected_value(inst)
        se = vals.std(ddof=1) / math.sqrt(len(vals))
        assert abs(vals.mean() - want) <= 4 * se


class TestEdgeInOptimumMass:
    def test_isolated_vertex_zero(self, rng):
        inst = star_instance()
        # vertex 1 with arrived set {(0,2)}: no incident edges
        assert edge_in_optimum_mass(inst, 1, 2, 1, arrived=[(0, 2)]) == 0.0

    def test_upper_bound_exhaustive_m5(self, rng):
        inst = random_instance(rng, 5)
        verts = sorted({v for u, w, _ in inst.edges for v in (u, w)})
        for t in range(2, 6):
            for arrived in itertools.combinations(range(5), t - 1):
                for i in range(1, t):
                    for u in verts:
                        val = edge_in_optimum_mass(inst, u, t, i, arrived=arrived)
                        assert val <= (t - 1) / i + 1e-12

    def test_single_incident_edge_at_last_position(self, rng):
        inst = star_instance()
        # u = 1 has a single incident edge; with i = t-1 the mass is <= 1
        val = edge_in_optimum_mass(inst, 1, 2, 1, arrived=[0])
        assert 0.0 <= val <= 1.0

    def test_validation(self):
        inst = star_instance()
        with pytest.raises(InputError):
            edge_in_optimum_mass(inst, 0, 1, 1)
        with pytest.raises(InputError):
            edge_in_optimum_mass(inst, 0, 3, 1, arrived=[0])
