"""Online bipartite hypergraph secretary matching.

Hyperedges have the form ``(v, S, w)`` with one online vertex ``v``, an
offline set ``S`` of at most ``d`` vertices, and positive weight.  The
``m`` online vertices arrive in random order; after the exploration
cutoff ``floor(f_d m)`` with ``f_d = d^{-1/(d-1)}``, step ``t`` computes
the maximum-weight hypermatching over the arrived side, takes the
arrival's assigned hyperedge with probability ``alpha_t / x_t`` when its
offline set is free, and skips silently when the optimum leaves the
arrival unmatched.  The guarantee is ``1/d^{d/(d-1)}`` of the offline
optimum.

Edge arrival embeds as ``d = 2``: every graph edge becomes an online
vertex whose single hyperedge blocks the edge's endpoints.  The cutoff
and schedule then coincide with the edge-arrival ones, and the shared
:mod:`secmatch.arrival` engine evaluates both processes with identical
arithmetic, so exact values agree bit for bit.

Exact hypermatchings are found by dynamic programming over subsets of
the offline side (limit 20 offline vertices), with the lexicographically
smallest optimal edge list as the uniqueness rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import json
import numpy as np

from .arrival import (
    ArrivalProcess,
    ArrivalTrace,
    ExactOracle,
    MonteCarloOracle,
    simulate_arrival,
)
from .errors import CapacityError, InputError
from .graphs import WeightedGraph
from .schedules import HyperAlphaSchedule, hyper_alpha_recursive, hyper_cutoff

OFFLINE_LIMIT = 20
EXACT_VALUE_LIMIT = 8


@dataclass(frozen=True)
class HyperEdge:
    v: int
    offline: frozenset[int]
    weight: float

    def sort_key(self):
        return (self.v, tuple(sorted(self.offline)))


class BipartiteHypergraph:
    """``m`` online vertices, ``r`` offline vertices, hyperedges ``(v, S, w)``
    with ``1 <= |S| <= d`` and ``w > 0``."""

    def __init__(self, m: int, r: int, d: int, edges: Iterable[tuple[int, Iterable[int], float]]):
        if m < 1 or r < 0:
            raise InputError("need m >= 1 online and r >= 0 offline vertices")
        if d < 2:
            raise InputError("offline set size parameter d must be at least 2")
        self.m = m
        self.r = r
        self.d = d
        out: list[HyperEdge] = []
        seen = set()
        for v, S, w in edges:
            v = int(v)
            S = frozenset(int(x) for x in S)
            w = float(w)
            if not 0 <= v < m:
                raise InputError(f"online vertex {v} out of range")
            if not S or len(S) > d:
                raise InputError(f"offline set size {len(S)} outside 1..{d}")
            if any(not 0 <= x < r for x in S):
                raise InputError("offline vertex id out of range")
            if w <= 0 or not np.isfinite(w):
                raise InputError(f"hyperedge weight must be positive and finite, got {w}")
            key = (v, S)
            if key in seen:
                raise InputError(f"duplicate hyperedge ({v}, {sorted(S)})")
            seen.add(key)
            out.append(HyperEdge(v, S, w))
        out.sort(key=HyperEdge.sort_key)
        self.edges = out
        self._by_online: list[list[int]] = [[] for _ in range(m)]
        for idx, e in enumerate(out):
            self._by_online[e.v].append(idx)
        self._smask = [sum(1 << x for x in e.offline) for e in out]
        self._assign_cache: dict[int, tuple[tuple[int, float], ...]] = {}
        self._schedule: HyperAlphaSchedule | None = None
        self._process: ArrivalProcess | None = None

    @property
    def schedule(self) -> HyperAlphaSchedule:
        if self._schedule is None:
            self._schedule = hyper_alpha_recursive(self.m, self.d)
        return self._schedule

    @property
    def cutoff(self) -> int:
        return hyper_cutoff(self.m, self.d)

    # -- exact hypermatching ---------------------------------------------------

    def _assignment(self, online_mask: int) -> tuple[tuple[int, float], ...]:
        """Per-online-vertex (offline mask, weight) of the unique maximum
        hypermatching over the arrived set; mask 0 for unassigned."""
        got = self._assign_cache.get(online_mask)
        if got is not None:
            return got
        if self.r > OFFLINE_LIMIT:
            raise CapacityError(f"offline side larger than {OFFLINE_LIMIT} vertices")
        online = [v for v in range(self.m) if online_mask >> v & 1]
        nloc = len(online)
        size = 1 << self.r
        # dp[j][mask]: best weight using online[j:] when ``mask`` offline
        # vertices are already used
        dp = np.zeros((nloc + 1, size))
        for j in range(nloc - 1, -1, -1):
            v = online[j]
            dp[j] = dp[j + 1]
            for idx in self._by_online[v]:
                sm = self._smask[idx]
                w = self.edges[idx].weight
                free = [mask for mask in range(size) if mask & sm == 0]
                for mask in free:
                    cand = w + dp[j + 1][mask | sm]
                    if cand > dp[j][mask]:
                        dp[j][mask] = cand
        # forward reconstruction; ties prefer taking the lexicographically
        # smallest hyperedge (positive weights make take-vs-skip ties favor
        # the take side, which keeps the sorted edge list smallest)
        assign = [(0, 0.0)] * self.m
        mask = 0
        for j, v in enumerate(online):
            best = None
            for idx in self._by_online[v]:
                sm = self._smask[idx]
                if mask & sm:
                    continue
                w = self.edges[idx].weight
                if w + dp[j + 1][mask | sm] == dp[j][mask]:
                    best = idx
                    break  # edges are sorted, first hit is lex-smallest
            if best is not None:
                assign[v] = (self._smask[best], self.edges[best].weight)
                mask |= self._smask[best]
        out = tuple(assign)
        self._assign_cache[online_mask] = out
        return out

    def optimum_weight(self, online: Sequence[int] | None = None) -> float:
        mask = (1 << self.m) - 1 if online is None else sum(1 << int(v) for v in online)
        return float(sum(w for _m, w in self._assignment(mask)))

    def optimum_matching(self, online: Sequence[int] | None = None) -> list[tuple[int, frozenset[int], float]]:
        mask = (1 << self.m) - 1 if online is None else sum(1 << int(v) for v in online)
        assign = self._assignment(mask)
        out = []
        for v in range(self.m):
            sm, w = assign[v]
            if sm:
                out.append((v, frozenset(x for x in range(self.r) if sm >> x & 1), w))
        return out

    # -- arrival process ---------------------------------------------------------

    def process(self, state_limit: int | None = None) -> ArrivalProcess:
        if self._process is None:

            def candidate(mask: int, last: int):
                sm, w = self._assignment(mask)[last]
                if sm == 0:
                    return None
                return sm, w

            self._process = ArrivalProcess(
                self.m, self.cutoff, self.schedule.alpha, candidate,
                state_limit=14 if state_limit is None else state_limit,
            )
        return self._process


def max_weight_hyper_matching(H: BipartiteHypergraph, online: Sequence[int] | None = None):
    """Unique maximum-weight hypermatching over the given online vertices."""
    return H.optimum_matching(online)


def pad_with_dummies(H: BipartiteHypergraph, extra: int) -> BipartiteHypergraph:
    """Add ``extra`` online vertices with no hyperedges (they arrive, reveal
    nothing, and stretch the schedule horizon)."""
    if extra < 0:
        raise InputError("extra must be nonnegative")
    if extra == 0:
        return H
    return BipartiteHypergraph(
        H.m + extra, H.r, H.d,
        [(e.v, e.offline, e.weight) for e in H.edges],
    )


def embed_edge_instance(graph_or_instance) -> BipartiteHypergraph:
    """d=2 embedding of edge arrival: one online vertex per positive-weight
    edge, whose single hyperedge blocks the edge's endpoints."""
    from .edge import EdgeInstance

    inst = graph_or_instance
    if isinstance(inst, WeightedGraph):
        inst = EdgeInstance(inst)
    verts = sorted({x for u, v, _ in inst.edges for x in (u, v)})
    remap = {x: i for i, x in enumerate(verts)}
    edges = [
        (k, (remap[u], remap[v]), w)
        for k, (u, v, w) in enumerate(inst.edges)
    ]
    return BipartiteHypergraph(inst.m, len(verts), 2, edges)


def exact_availability(H: BipartiteHypergraph, arrived: Sequence[int], ell: int,
                       state_limit: int | None = None) -> float:
    """Probability that the offline set assigned to arrival ``ell`` is free,
    given the arrived online set (1 when the optimum leaves it unmatched)."""
    mask = 0
    for v in arrived:
        mask |= 1 << int(v)
    return H.process(state_limit).availability(mask, int(ell))


def exact_expected_value(H: BipartiteHypergraph) -> float:
    if H.m > EXACT_VALUE_LIMIT:
        raise CapacityError(f"exact expected value limited to m <= {EXACT_VALUE_LIMIT}")
    return H.process().exact_expected_value()


def availability_floor(H: BipartiteHypergraph) -> tuple[float, float]:
    return H.process().availability_floor()


def enumerate_hyper_process(H: BipartiteHypergraph):
    return H.process().enumerate_orders()


def exact_oracle(H: BipartiteHypergraph, state_limit: int | None = None) -> ExactOracle:
    return ExactOracle(H.process(state_limit))


def monte_carlo_oracle(H: BipartiteHypergraph, trials: int = 2000, inner_trials: int = 200,
                       seed=0, flag_threshold: float = 0.1) -> MonteCarloOracle:
    def candidate(mask: int, last: int):
        sm, w = H._assignment(mask)[last]
        if sm == 0:
            return None
        return sm, w

    proc = ArrivalProcess(H.m, H.cutoff, H.schedule.alpha, candidate, state_limit=None)
    return MonteCarloOracle(proc, trials=trials, inner_trials=inner_trials, seed=seed,
                            flag_threshold=flag_threshold)


def run_hypergraph_algorithm(H: BipartiteHypergraph, order: Sequence[int], oracle=None,
                             rng=None) -> ArrivalTrace:
    """One run over an online arrival order (permutation of ``0..m-1``)."""
    if oracle is None:
        oracle = exact_oracle(H)
    if rng is None:
        rng = np.random.default_rng(0)
    return simulate_arrival(oracle.process, [int(v) for v in order], oracle, rng)


# ---------------------------------------------------------------------------
# JSON format: {"m": int, "r": int, "d": int,
#               "edges": [{"v": int, "s": [ids], "w": real}, ...]}
# ---------------------------------------------------------------------------

def hypergraph_to_json(H: BipartiteHypergraph) -> dict:
    return {
        "m": H.m,
        "r": H.r,
        "d": H.d,
        "edges": [{"v": e.v, "s": sorted(e.offline), "w": e.weight} for e in H.edges],
    }


def hypergraph_from_json(obj: Mapping) -> BipartiteHypergraph:
    try:
        return BipartiteHypergraph(
            obj["m"], obj["r"], obj["d"],
            [(e["v"], e["s"], e["w"]) for e in obj["edges"]],
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed hypergraph object: {exc}") from exc


def load_hypergraph(path: str) -> BipartiteHypergraph:
    with open(path, "r", encoding="utf-8") as fh:
        return hypergraph_from_json(json.load(fh))


def save_hypergraph(H: BipartiteHypergraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hypergraph_to_json(H), fh)
        fh.write("\n")
