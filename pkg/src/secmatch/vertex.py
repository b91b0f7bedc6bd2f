"""Vertex-arrival secretary matching.

Vertices arrive in uniformly random order; the arriving vertex reveals its
edge weights to all earlier vertices and must be matched immediately or
never.  The algorithm explores for ``k`` steps (default ``n // 2``) and
then, at each step ``t``, recomputes the maximum-weight matching on the
arrived vertices, first deleting one uniformly random earlier arrival when
``t`` is odd so that the matched set always has even size and the arriving
vertex always has a designated partner.  The arriving vertex is matched to
that partner iff the partner is still unmatched.

The probability that any fixed vertex is matched by step ``t`` (given it
arrived by then) satisfies

    p(k, k) = 0,   p(k, t) = 2/t + ((t - 3) / t) * p(k, t - 1),

with closed form ``p(k, t) = (2/3) (1 - k(k-1)(k-2) / (t(t-1)(t-2)))``.
With ``k = n // 2`` the expected matched weight is at least ``5/12 - o(1)``
times the offline optimum; three-vertex instances give exactly 1/3, and
padding with many 0-weight auxiliary vertices pushes the ratio back up
toward 5/12.

Monte Carlo batches are executed by numba kernels (:mod:`secmatch._vkernels`);
randomness is split into two named streams per experiment, one for arrival
orders and one for the odd-step deletion draws, so every trace is
reproducible from ``(seed, trial)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError, InputError
from .graphs import (
    Matching,
    WeightedGraph,
    check_subset,
    greedy_matching,
    matching_weight,
    max_weight_matching,
)
from . import _vkernels


@dataclass(frozen=True)
class VertexInstance:
    """A weighted graph whose vertices will arrive online."""

    graph: WeightedGraph

    @property
    def n(self) -> int:
        return self.graph.n

    def optimum(self) -> float:
        return matching_weight(max_weight_matching(self.graph), self.graph)


def default_k(n: int) -> int:
    """Exploration length ``n // 2`` (the ratio-optimal choice)."""
    return n // 2


def check_order(order: Sequence[int], n: int) -> tuple[int, ...]:
    out = check_subset(order, n)
    if len(out) != n:
        raise InputError(f"arrival order must be a permutation of 0..{n - 1}")
    return out


@dataclass(frozen=True)
class VertexStep:
    """One exploitation step: arrival ``t`` (1-based), the dropped arrival
    index (odd ``t`` only), the designated partner, and whether the edge
    was actually added."""

    t: int
    arrived: int
    dropped_index: int | None
    partner: int | None
    executed: bool


@dataclass
class VertexRunTrace:
    matching: Matching
    steps: list[VertexStep] = field(default_factory=list)
    matched_weight: float = 0.0

    def to_json(self) -> dict:
        return {
            "matching": [[u, v] for u, v in self.matching.edges],
            "weight": self.matched_weight,
            "steps": [
                {
                    "t": s.t,
                    "arrived": s.arrived,
                    "dropped_index": s.dropped_index,
                    "partner": s.partner,
                    "executed": s.executed,
                }
                for s in self.steps
            ],
        }

    def dump(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh)
            fh.write("\n")


def _run(inst: VertexInstance, order, k, rng, matcher) -> VertexRunTrace:
    n = inst.n
    order = check_order(order, n)
    if k is None:
        k = default_k(n)
    if not 0 <= k <= n:
        raise InputError(f"exploration length k={k} outside 0..{n}")
    g = inst.graph
    available = [True] * n
    pairs: list[tuple[int, int]] = []
    steps: list[VertexStep] = []
    weight = 0.0
    for t in range(k + 1, n + 1):
        v_t = order[t - 1]
        dropped_index = None
        active = list(order[:t])
        if t % 2 == 1:
            if t == 1:
                steps.append(VertexStep(t, v_t, None, None, False))
                continue
            dropped_index = int(rng.integers(1, t))
            del active[dropped_index - 1]
        mu_t = matcher(g, active)
        partner = mu_t.partner(v_t)
        if partner is None:
            steps.append(VertexStep(t, v_t, dropped_index, None, False))
            continue
        executed = available[partner]
        if executed:
            available[partner] = False
            available[v_t] = False
            pairs.append((v_t, partner))
            weight += g.weight(v_t, partner)
        steps.append(VertexStep(t, v_t, dropped_index, partner, executed))
    return VertexRunTrace(Matching(pairs), steps, weight)


def run_vertex_algorithm(inst: VertexInstance, order: Sequence[int], k: int | None = None,
                         rng=None) -> VertexRunTrace:
    """Run the explore-then-exploit algorithm for one arrival order.

    ``rng`` supplies the odd-step deletion draws and must provide
    ``integers(low, high)``; exactly one draw ``integers(1, t)`` is made
    per odd step ``t > max(k, 1)``, in increasing ``t``.  Arrival order
    randomness is the caller's responsibility, so the trace is a pure
    function of ``(order, drop draws)``.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    return _run(inst, order, k, rng, max_weight_matching)


def run_vertex_ordinal_greedy(inst: VertexInstance, order: Sequence[int], k: int | None = None,
                              rng=None) -> VertexRunTrace:
    """Same control flow, but each step matching is built greedily.

    The greedy step matching is a 2-approximation built from pairwise
    comparisons only, so the guarantee halves to 5/24.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    return _run(inst, order, k, rng, greedy_matching)


def pad_with_auxiliary(inst: VertexInstance, m_aux: int) -> VertexInstance:
    """Append ``m_aux`` auxiliary vertices joined to everything by 0-weight
    edges.  The optimum is unchanged; running the algorithm on the padded
    instance realizes the auxiliary-arrival construction whose ratio tends
    to 5/12 for any base instance."""
    if m_aux < 0:
        raise InputError("m_aux must be nonnegative")
    if m_aux == 0:
        return inst
    g = inst.graph
    return VertexInstance(WeightedGraph(g.n + m_aux, g.edges()))


# ---------------------------------------------------------------------------
# Matched-by-time-t probability: recursion and closed form.
# ---------------------------------------------------------------------------

def p_recursive(k: int, t: int) -> float:
    """p(k,k) = 0;  p(k,t) = 2/t + ((t-3)/t) p(k,t-1)."""
    if t < k:
        raise InputError(f"need t >= k, got k={k}, t={t}")
    if k < 0:
        raise InputError("k must be nonnegative")
    p = 0.0
    for s in range(k + 1, t + 1):
        p = 2.0 / s + (s - 3.0) / s * p
    return p


def p_recursive_sweep(k: int, t_max: int) -> np.ndarray:
    """All recursion values p(k, k..t_max) in one incremental pass (index
    by t; entries below ``k`` are zero)."""
    if t_max < k:
        raise InputError(f"need t_max >= k, got k={k}, t_max={t_max}")
    out = np.zeros(t_max + 1)
    p = 0.0
    for s in range(k + 1, t_max + 1):
        p = 2.0 / s + (s - 3.0) / s * p
        out[s] = p
    return out


def p_closed(k: int, t: int) -> float:
    """(2/3) (1 - k(k-1)(k-2) / (t(t-1)(t-2))), valid for t >= k >= 3."""
    if k < 3:
        raise InputError(f"closed form requires k >= 3, got k={k}")
    if t < k:
        raise InputError(f"need t >= k, got k={k}, t={t}")
    ratio = (k * (k - 1.0) * (k - 2.0)) / (t * (t - 1.0) * (t - 2.0))
    return (2.0 / 3.0) * (1.0 - ratio)


# ---------------------------------------------------------------------------
# Batched Monte Carlo (kernel-backed).
# ---------------------------------------------------------------------------

def _streams(seed):
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    order_ss, drop_ss = ss.spawn(2)
    return np.random.default_rng(order_ss), np.random.default_rng(drop_ss)


def _odd_steps(k: int, n: int, upto: int | None = None) -> list[int]:
    hi = n if upto is None else upto
    return [t for t in range(k + 1, hi + 1) if t % 2 == 1 and t > 1]


def _gen_orders(rng, trials: int, n: int) -> np.ndarray:
    base = np.tile(np.arange(n, dtype=np.int32), (trials, 1))
    return rng.permuted(base, axis=1)


def _gen_drops(rng, trials: int, odd_ts: list[int]) -> np.ndarray:
    out = np.empty((trials, max(len(odd_ts), 1)), dtype=np.int32)
    for c, t in enumerate(odd_ts):
        out[:, c] = rng.integers(1, t, size=trials, dtype=np.int32)
    return out


def _neighbor_order(W: np.ndarray) -> np.ndarray:
    """Per-vertex neighbor ids by descending weight (prune threshold walks)."""
    return np.argsort(-W, axis=1, kind="stable").astype(np.int32)


def matched_weight_batch(inst: VertexInstance, k: int | None, trials: int, seed,
                         greedy: bool = False, prune_k: int = 10,
                         block: int = 4096) -> np.ndarray:
    """Matched weight of ``trials`` independent runs (fresh order + drops
    per trial, derived from ``seed``)."""
    n = inst.n
    if k is None:
        k = default_k(n)
    W = inst.graph.dense()
    nbr = _neighbor_order(W)
    org, drg = _streams(seed)
    odd_ts = _odd_steps(k, n)
    out = np.empty(trials)
    done = 0
    while done < trials:
        b = min(block, trials - done)
        orders = _gen_orders(org, b, n)
        drops = _gen_drops(drg, b, odd_ts)
        out[done : done + b] = _vkernels.vertex_ratio_batch(W, nbr, k, orders, drops, greedy, prune_k)
        done += b
    return out


def padded_matched_weight_batch(base: VertexInstance, m_aux: int, k: int | None,
                                trials: int, seed, block: int = 20000) -> np.ndarray:
    """Matched weight per run on ``pad_with_auxiliary(base, m_aux)``.

    Fast path for padded instances: the positive weights live on the
    ``base.n`` smallest ids, so each step matching is the precomputed real
    core plus ascending 0-weight pairing, simulated exactly in O(log n)
    per step.  Requires ``base.n <= 6`` and ``k >= 11`` (above the
    exhaustive small-set limit, so the step rule matches the generic one).
    """
    nr = base.n
    if nr > 6:
        raise CapacityError("padded fast path supports base instances with at most 6 vertices")
    n = nr + m_aux
    if k is None:
        k = default_k(n)
    if k < 11:
        raise InputError("padded fast path requires exploration length k >= 11")
    core_tab = _core_table(base.graph)
    naux = n - nr
    topbit = 1 << (max(naux, 1).bit_length() - 1)
    Wb = base.graph.dense()
    org, drg = _streams(seed)
    odd_ts = _odd_steps(k, n)
    out = np.empty(trials)
    done = 0
    while done < trials:
        b = min(block, trials - done)
        orders = _gen_orders(org, b, n)
        drops = _gen_drops(drg, b, odd_ts)
        out[done : done + b] = _vkernels.padded_ratio_batch(Wb, nr, k, core_tab, topbit, orders, drops)
        done += b
    return out


def padded_run_trace(base: VertexInstance, m_aux: int, k: int, order: Sequence[int],
                     drops: Sequence[int]):
    """Single fast-path run with full per-step recording (for validation
    against :func:`run_vertex_algorithm`).  Returns (weight, partner-per-step,
    executed-per-step) with arrays indexed by ``t - 1``."""
    nr = base.n
    n = nr + m_aux
    core_tab = _core_table(base.graph)
    naux = n - nr
    topbit = 1 << (max(naux, 1).bit_length() - 1)
    order = np.asarray(check_order(order, n), dtype=np.int32)
    dropvals = np.asarray(list(drops) + [0], dtype=np.int32)
    tp = np.full(n, -1, dtype=np.int32)
    te = np.zeros(n, dtype=np.int8)
    w = _vkernels._run_one_padded_trial(base.graph.dense(), nr, n, k, core_tab, topbit,
                                        order, dropvals, tp, te)
    return w, tp, te


def _core_table(base: WeightedGraph) -> np.ndarray:
    """Per present-subset core partners: row ``mask`` gives, for each real
    vertex, its partner in the deterministic maximum-weight matching of the
    present reals (-1 when unmatched or absent)."""
    nr = base.n
    tab = np.full((1 << nr, nr), -1, dtype=np.int8)
    for mask in range(1 << nr):
        present = [i for i in range(nr) if mask >> i & 1]
        if len(present) < 2:
            continue
        mu = _core_of(base, present)
        for u, v in mu:
            tab[mask, u] = v
            tab[mask, v] = u
    return tab


def _core_of(base: WeightedGraph, present: list[int]):
    from .graphs import _enumerate_best

    return _enumerate_best(present, base, perfect=False)


@dataclass(frozen=True)
class MatchProbEstimate:
    """Monte Carlo estimate with its binomial standard error."""

    estimate: float
    stderr: float
    trials: int
    draws: int

    def within(self, target: float, sigmas: float = 4.0) -> bool:
        tol = sigmas * max(self.stderr, 1e-12)
        return abs(self.estimate - target) <= tol


def estimate_match_probability(inst: VertexInstance, k: int, t: int, u: int,
                               trials: int, seed, prune_k: int = 10,
                               block: int = 8192) -> MatchProbEstimate:
    """Frequency of "``u`` is matched by step ``t``", conditioned on ``u``
    arriving among the first ``t``.

    Conditioning is by rejection: orders where ``u`` arrives later than
    ``t`` are discarded, which matches the conditional law without
    enumerating arrival sets.
    """
    n = inst.n
    if not 0 <= u < n:
        raise InputError(f"vertex {u} out of range")
    if not 0 <= k <= t <= n:
        raise InputError(f"need 0 <= k <= t <= n, got k={k}, t={t}, n={n}")
    if trials < 1:
        raise InputError("trials must be positive")
    W = inst.graph.dense()
    nbr = _neighbor_order(W)
    org, drg = _streams(seed)
    odd_ts = _odd_steps(k, n, upto=t)
    hits = 0
    accepted = 0
    draws = 0
    while accepted < trials:
        b = min(block, 4 * (trials - accepted) + 64)
        orders = _gen_orders(org, b, n)
        drops = _gen_drops(drg, b, odd_ts)
        res = _vkernels.vertex_match_by_batch(W, nbr, k, t, u, orders, drops, prune_k)
        draws += b
        for r in res:
            if r < 0:
                continue
            if accepted == trials:
                break
            accepted += 1
            hits += int(r)
    p = hits / trials
    stderr = float(np.sqrt(p * (1.0 - p) / trials))
    return MatchProbEstimate(p, stderr, trials, draws)


def exact_ratio_by_enumeration(inst: VertexInstance, k: int) -> float:
    """E[matched weight] / OPT by exhausting all arrival orders and all
    odd-step deletion draws.  Exponential; intended for n <= 7."""
    import itertools
    from fractions import Fraction

    n = inst.n
    if n > 7:
        raise CapacityError("exact enumeration supported for n <= 7")
    opt = inst.optimum()
    if opt <= 0:
        raise InputError("instance optimum must be positive")
    total = Fraction(0)
    norders = 0
    for order in itertools.permutations(range(n)):
        norders += 1
        total += _expected_weight_over_drops(inst, order, k)
    return float(total / norders / Fraction(opt).limit_denominator(10**12))


def _expected_weight_over_drops(inst: VertexInstance, order, k) -> "Fraction":
    """Expected matched weight for a fixed order, averaging the odd-step
    deletion draws exactly (depth-first over all draw combinations)."""
    from fractions import Fraction

    g = inst.graph
    n = inst.n

    def rec(t, available) -> Fraction:
        if t > n:
            return Fraction(0)
        v_t = order[t - 1]
        if t % 2 == 1:
            if t == 1:
                return rec(t + 1, available)
            acc = Fraction(0)
            for r in range(1, t):
                active = [order[s] for s in range(t) if s != r - 1]
                acc += apply_step(t, v_t, active, available)
            return acc / (t - 1)
        return apply_step(t, v_t, [order[s] for s in range(t)], available)

    def apply_step(t, v_t, active, available) -> Fraction:
        mu = max_weight_matching(g, active)
        partner = mu.partner(v_t)
        if partner is None or not available[partner]:
            return rec(t + 1, available)
        new_avail = list(available)
        new_avail[partner] = False
        new_avail[v_t] = False
        gained = Fraction(g.weight(v_t, partner)).limit_denominator(10**12)
        return gained + rec(t + 1, tuple(new_avail))

    if k >= n:
        return Fraction(0)
    return rec(k + 1, tuple([True] * n))
