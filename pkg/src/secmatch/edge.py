"""Edge-arrival secretary matching.

The ``m`` positive-weight edges of a graph arrive in uniformly random
order (0-weight pairs are not edges and never arrive).  After the first
``floor(m/2)`` arrivals, the algorithm computes the maximum-weight
matching of the edges seen so far; if the arriving edge lies in it and
both endpoints are free, it is taken with probability ``alpha_t / x_t``,
which makes the unconditional acceptance probability of a current-optimum
arrival exactly ``alpha_t``.  The expected matched weight is at least a
quarter of the offline optimum.

``x_t`` -- the probability that both endpoints are free given the arrived
set and the arriving edge -- has no known polynomial computation; this
module provides the exact exponential subset dynamic program (default
limit 14 edges) and a nested Monte Carlo estimator, both through
:mod:`secmatch.arrival`.

Subset optima ``mu*_S`` are made unique by preferring, among maximum
weight matchings, the one whose sorted edge list is lexicographically
smallest; with positive weights this is realized by a take-lowest-edge
greedy over the subset-optimum recursion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arrival import (
    ArrivalProcess,
    ArrivalTrace,
    ExactOracle,
    MonteCarloOracle,
    simulate_arrival,
)
from .errors import CapacityError, InputError
from .graphs import Matching, WeightedGraph, matching_weight, max_weight_matching
from .schedules import alpha_recursive, edge_cutoff

EXACT_VALUE_LIMIT = 8


class EdgeInstance:
    """Arrival-ready view of a weighted graph: the canonical list of its
    positive-weight edges plus subset-optimum machinery."""

    def __init__(self, graph: WeightedGraph):
        self.graph = graph
        self.edges: list[tuple[int, int, float]] = graph.positive_edges()
        self.m = len(self.edges)
        if self.m == 0:
            raise InputError("edge arrival needs at least one positive-weight edge")
        verts = sorted({v for u, w, _ in self.edges for v in (u, w)})
        self._vbit = {v: i for i, v in enumerate(verts)}
        self.n_active = len(verts)
        self._block = [
            (1 << self._vbit[u]) | (1 << self._vbit[v]) for u, v, _ in self.edges
        ]
        # edges sharing an endpoint, as a mask per edge (self included)
        self._conflict = []
        for k, (u, v, _) in enumerate(self.edges):
            cm = 0
            for k2, (u2, v2, _) in enumerate(self.edges):
                if u2 in (u, v) or v2 in (u, v):
                    cm |= 1 << k2
            self._conflict.append(cm)
        self._wt = [w for _, _, w in self.edges]
        self._optw: dict[int, float] = {0: 0.0}
        self._optmu: dict[int, int] = {0: 0}
        self._schedule = alpha_recursive(self.m)
        self._process: ArrivalProcess | None = None

    # -- subset optima --------------------------------------------------------

    def optimum_weight(self, mask: int) -> float:
        """Maximum matching weight within the edge subset ``mask``."""
        got = self._optw.get(mask)
        if got is not None:
            return got
        low = mask & (-mask)
        k = low.bit_length() - 1
        skip = self.optimum_weight(mask ^ low)
        take = self._wt[k] + self.optimum_weight(mask & ~self._conflict[k])
        best = take if take >= skip else skip
        self._optw[mask] = best
        return best

    def optimum_mask(self, mask: int) -> int:
        """Edge mask of the unique (lexicographically smallest) maximum
        matching within ``mask``: the lowest edge is taken whenever some
        maximum matching contains it."""
        got = self._optmu.get(mask)
        if got is not None:
            return got
        low = mask & (-mask)
        k = low.bit_length() - 1
        skip = self.optimum_weight(mask ^ low)
        take = self._wt[k] + self.optimum_weight(mask & ~self._conflict[k])
        if take >= skip:
            mu = low | self.optimum_mask(mask & ~self._conflict[k])
        else:
            mu = self.optimum_mask(mask ^ low)
        self._optmu[mask] = mu
        return mu

    # -- arrival process ------------------------------------------------------

    @property
    def schedule(self):
        return self._schedule

    def process(self, state_limit: int | None = None) -> ArrivalProcess:
        if self._process is None:
            limit = 14 if state_limit is None else state_limit

            def candidate(mask: int, last: int):
                if self.optimum_mask(mask) >> last & 1:
                    return self._block[last], self._wt[last]
                return None

            self._process = ArrivalProcess(
                self.m, edge_cutoff(self.m), self._schedule.alpha, candidate,
                state_limit=limit,
            )
        return self._process

    def edge_index(self, e) -> int:
        """Resolve an edge given as an index or an (u, v) pair."""
        if isinstance(e, (int, np.integer)):
            k = int(e)
            if not 0 <= k < self.m:
                raise InputError(f"edge index {k} out of range")
            return k
        u, v = e
        u, v = (int(u), int(v)) if u < v else (int(v), int(u))
        for k, (a, b, _) in enumerate(self.edges):
            if (a, b) == (u, v):
                return k
        raise InputError(f"({u}, {v}) is not a positive-weight edge of the instance")

    def edge_set_mask(self, edges) -> int:
        mask = 0
        for e in edges:
            mask |= 1 << self.edge_index(e)
        return mask

    def offline_optimum(self) -> float:
        return matching_weight(max_weight_matching(self.graph), self.graph)


def exact_availability(inst: EdgeInstance, arrived, e, state_limit: int | None = None) -> float:
    """Exact probability that both endpoints of ``e`` are unmatched when it
    arrives right after the edge set ``arrived``."""
    k = inst.edge_index(e)
    mask = inst.edge_set_mask(arrived)
    if mask >> k & 1:
        raise InputError("the arriving edge cannot be part of the arrived set")
    return inst.process(state_limit).availability(mask, k)


@dataclass(frozen=True)
class AvailabilityEstimate:
    estimate: float
    stderr: float
    trials: int
    wide: bool


def mc_availability(inst: EdgeInstance, arrived, e, trials: int, seed,
                    inner_trials: int = 200, flag_threshold: float = 0.1) -> AvailabilityEstimate:
    """Nested Monte Carlo estimate of :func:`exact_availability`.

    Inner acceptance decisions recursively estimate their own availability
    with ``inner_trials`` samples, so the estimate is only asymptotically
    unbiased; wide results are flagged via the binomial standard error."""
    k = inst.edge_index(e)
    mask = inst.edge_set_mask(arrived)
    if mask >> k & 1:
        raise InputError("the arriving edge cannot be part of the arrived set")
    proc = _mc_process(inst)
    oracle = MonteCarloOracle(proc, trials=trials, inner_trials=inner_trials,
                              seed=seed, flag_threshold=flag_threshold)
    est, se = oracle.x(mask, k)
    return AvailabilityEstimate(est, se, trials, bool(oracle.wide_flags))


def _mc_process(inst: EdgeInstance) -> ArrivalProcess:
    # Monte Carlo estimation needs the candidate map but never touches the
    # exponential DP, so the state guard is waived.
    def candidate(mask: int, last: int):
        if inst.optimum_mask(mask) >> last & 1:
            return inst._block[last], inst._wt[last]
        return None

    return ArrivalProcess(inst.m, edge_cutoff(inst.m), inst.schedule.alpha, candidate,
                          state_limit=None)


def exact_oracle(inst: EdgeInstance, state_limit: int | None = None) -> ExactOracle:
    return ExactOracle(inst.process(state_limit))


def monte_carlo_oracle(inst: EdgeInstance, trials: int = 2000, inner_trials: int = 200,
                       seed=0, flag_threshold: float = 0.1) -> MonteCarloOracle:
    return MonteCarloOracle(_mc_process(inst), trials=trials, inner_trials=inner_trials,
                            seed=seed, flag_threshold=flag_threshold)


def run_edge_algorithm(inst: EdgeInstance, order: Sequence[int], oracle=None, rng=None) -> ArrivalTrace:
    """One run over ``order`` (a permutation of edge indices).  ``oracle``
    defaults to the exact one; Monte Carlo oracles may trigger clamped
    steps, which the trace records."""
    if oracle is None:
        oracle = exact_oracle(inst)
    if rng is None:
        rng = np.random.default_rng(0)
    proc = oracle.process
    return simulate_arrival(proc, [inst.edge_index(e) for e in order], oracle, rng)


def matching_from_trace(inst: EdgeInstance, trace: ArrivalTrace) -> Matching:
    return Matching((inst.edges[i][0], inst.edges[i][1]) for i, _b, _w in trace.taken)


def exact_expected_value(inst: EdgeInstance) -> float:
    """Exact expected matched weight of the algorithm (all orders and coin
    flips).  Limited to ``m <= 8`` edges."""
    if inst.m > EXACT_VALUE_LIMIT:
        raise CapacityError(f"exact expected value limited to m <= {EXACT_VALUE_LIMIT}")
    return inst.process().exact_expected_value()


def availability_floor(inst: EdgeInstance) -> tuple[float, float]:
    """(min over reachable states of x - alpha_t, min x); the first being
    nonnegative is the schedule's feasibility guarantee."""
    return inst.process().availability_floor()


def enumerate_edge_process(inst: EdgeInstance):
    """Independent oracle: exhaust all m! orders with exact coin-flip
    propagation (m <= 7).  Returns per-position opportunity and acceptance
    masses, empirical availability per (arrived set, edge), and the exact
    expected value."""
    return inst.process().enumerate_orders()


def edge_in_optimum_mass(inst: EdgeInstance, u: int, t: int, i: int,
                         arrived=None) -> float:
    """sum over edges ``e`` incident to ``u`` inside the arrived set of
    Pr[e in mu*_i | e arrives at position i], for an arrived set of size
    ``t - 1`` (default: the first ``t - 1`` edges of the instance).  Bounded
    above by ``(t - 1) / i``."""
    if not 1 <= i < t <= inst.m + 1:
        raise InputError(f"need 1 <= i < t <= m+1, got i={i}, t={t}")
    if arrived is None:
        arrived_idx = list(range(t - 1))
    else:
        arrived_idx = sorted({inst.edge_index(e) for e in arrived})
        if len(arrived_idx) != t - 1:
            raise InputError(f"arrived set must have {t - 1} edges")
    incident = [k for k in arrived_idx if u in inst.edges[k][:2]]
    if not incident:
        return 0.0
    others = list(arrived_idx)
    denom = math.comb(t - 2, i - 1)
    total = 0.0
    for k in incident:
        rest = [k2 for k2 in others if k2 != k]
        hits = 0
        for comb in itertools.combinations(rest, i - 1):
            mask = 1 << k
            for k2 in comb:
                mask |= 1 << k2
            if inst.optimum_mask(mask) >> k & 1:
                hits += 1
        total += hits / denom
    return total
