"""Exact analysis of explore-then-exploit arrival processes.

A process has ``m`` items arriving in uniformly random order.  After an
exploration cutoff, the step-``t`` arrival determines a *candidate* --
a blocking set of resource bits plus a weight -- as a function of the
*set* of arrived items and the last arrival only.  The candidate is taken
with probability ``alpha_t / x_t`` when its blocking set is still free,
where ``x_t`` is the probability that it is free given (set, last).  Both
the edge-arrival matching algorithm (items = edges, blocking set = the two
endpoints, candidate = the arriving edge if it lies in the current optimum
matching) and the bipartite hypergraph algorithm (items = online vertices,
blocking set = the offline set the current optimum assigns to the
arrival) are instances of this shape.

``x_t`` is computed exactly by dynamic programming over the ``2^m``
arrival subsets: the distribution of the blocked-resource mask after a
random order of a set ``S`` is the uniform mixture over the last item of
the transition applied to the distribution of ``S`` minus that item.  The
inner acceptance probabilities consume the same memoized ``x`` values, so
the recursion is self-consistent.  Exponential in ``m`` by design; the
guard is configurable (default 14 items).

A full order-by-order enumeration (all ``m!`` orders with exact coin-flip
propagation) is provided as an independent oracle; it is what the tests
compare the DP and the per-step acceptance identities against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CapacityError, InputError

Candidate = tuple[int, float] | None
CandidateFn = Callable[[int, int], Candidate]

DEFAULT_STATE_LIMIT = 14
ENUMERATION_LIMIT = 7


class ArrivalProcess:
    """Availability analysis for one instance.

    Parameters
    ----------
    m : number of arrival items (ids ``0..m-1``).
    cutoff : last exploration step (no candidate is ever taken at ``t <= cutoff``).
    alpha : schedule array indexed ``1..m`` (``alpha[0]`` ignored).
    candidate : maps ``(arrived_mask, last_item)`` to ``(blocking_mask, weight)``
        or None when the arrival goes untaken.
    state_limit : refuse instances with more items than this.
    """

    def __init__(self, m: int, cutoff: int, alpha: np.ndarray, candidate: CandidateFn,
                 state_limit: int | None = DEFAULT_STATE_LIMIT):
        if m < 1:
            raise InputError("need at least one arrival")
        if state_limit is not None and m > state_limit:
            raise CapacityError(
                f"exact availability analysis over {m} items exceeds the limit "
                f"{state_limit}; use the Monte Carlo oracle instead"
            )
        self.m = m
        self.cutoff = cutoff
        self.alpha = alpha
        self.candidate = candidate
        self._dist: dict[int, dict[int, float]] = {0: {0: 1.0}}
        self._x: dict[tuple[int, int], float] = {}

    # -- exact distributions -------------------------------------------------

    def state_dist(self, mask: int) -> dict[int, float]:
        """Distribution of the blocked-resource mask after the items in
        ``mask`` arrived in uniformly random order."""
        got = self._dist.get(mask)
        if got is not None:
            return got
        t = mask.bit_count()
        if t <= self.cutoff:
            out = {0: 1.0}
            self._dist[mask] = out
            return out
        acc: dict[int, float] = {}
        inv = 1.0 / t
        mm = mask
        while mm:
            low = mm & (-mm)
            mm ^= low
            last = low.bit_length() - 1
            prev = self.state_dist(mask ^ low)
            cand = self.candidate(mask, last)
            if cand is None:
                for st, p in prev.items():
                    acc[st] = acc.get(st, 0.0) + p * inv
                continue
            block, _w = cand
            x = self.availability(mask ^ low, last)
            q = 0.0
            if x > 0.0:
                q = self.alpha[t] / x
                if q > 1.0:
                    q = 1.0
            for st, p in prev.items():
                if st & block == 0 and q > 0.0:
                    taken = st | block
                    acc[taken] = acc.get(taken, 0.0) + p * q * inv
                    if q < 1.0:
                        acc[st] = acc.get(st, 0.0) + p * (1.0 - q) * inv
                else:
                    acc[st] = acc.get(st, 0.0) + p * inv
        self._dist[mask] = acc
        return acc

    def availability(self, arrived_mask: int, item: int) -> float:
        """x for the arrival of ``item`` after the set ``arrived_mask``:
        the probability that the candidate's blocking set is fully free
        (1 when the arrival has no candidate)."""
        key = (arrived_mask, item)
        got = self._x.get(key)
        if got is not None:
            return got
        if arrived_mask >> item & 1:
            raise InputError("item already arrived")
        cand = self.candidate(arrived_mask | (1 << item), item)
        if cand is None:
            x = 1.0
        else:
            block, _w = cand
            x = 0.0
            for st, p in self.state_dist(arrived_mask).items():
                if st & block == 0:
                    x += p
        self._x[key] = x
        return x

    # -- exact aggregates ----------------------------------------------------

    def exact_expected_value(self) -> float:
        """Expected total taken weight, exact.

        Sums, over arrival position t, arrived set S and last item e, the
        weight of the candidate times the unconditional probability it is
        taken: ``Pr[E_t = S, e_t = e] * min(x, alpha_t)`` (the acceptance
        draw turns availability ``x`` into ``x * min(1, alpha_t/x)``).
        """
        total = 0.0
        m = self.m
        for mask in range(1, 1 << m):
            t = mask.bit_count()
            if t <= self.cutoff:
                continue
            pmask = 1.0 / (math.comb(m, t) * t)
            mm = mask
            while mm:
                low = mm & (-mm)
                mm ^= low
                last = low.bit_length() - 1
                cand = self.candidate(mask, last)
                if cand is None:
                    continue
                _block, w = cand
                x = self.availability(mask ^ low, last)
                a = self.alpha[t]
                total += pmask * w * (x if x < a else a)
        return total

    def availability_floor(self) -> tuple[float, float]:
        """min over all reachable (arrived set, next item) of ``x - alpha_t``
        and of ``x`` itself (every pair is reachable under a random order)."""
        worst_gap = np.inf
        worst_x = np.inf
        m = self.m
        for mask in range(1 << m):
            t = mask.bit_count() + 1
            if t > m:
                continue
            for item in range(m):
                if mask >> item & 1:
                    continue
                x = self.availability(mask, item)
                worst_x = min(worst_x, x)
                worst_gap = min(worst_gap, x - self.alpha[t])
        return float(worst_gap), float(worst_x)

    # -- independent oracle: all m! orders, exact coin propagation ------------

    def enumerate_orders(self) -> "OrderEnumeration":
        if self.m > ENUMERATION_LIMIT:
            raise CapacityError(f"order enumeration limited to {ENUMERATION_LIMIT} items")
        m = self.m
        norders = math.factorial(m)
        value = 0.0
        opp = np.zeros(m + 1)      # Pr[candidate exists at position t]
        acc = np.zeros(m + 1)      # Pr[candidate exists and is taken at t]
        avail_hit: dict[tuple[int, int], float] = {}
        avail_tot: dict[tuple[int, int], float] = {}
        for order in itertools.permutations(range(m)):
            states = {0: 1.0}
            mask = 0
            for pos, item in enumerate(order, start=1):
                prev = mask
                mask |= 1 << item
                if pos <= self.cutoff:
                    continue
                cand = self.candidate(mask, item)
                if cand is None:
                    continue
                block, w = cand
                x = self.availability(prev, item)
                q = 0.0
                if x > 0.0:
                    q = min(1.0, self.alpha[pos] / x)
                opp[pos] += 1.0
                key = (prev, item)
                free_mass = 0.0
                nxt: dict[int, float] = {}
                for st, p in states.items():
                    if st & block == 0:
                        free_mass += p
                        if q > 0.0:
                            taken = st | block
                            nxt[taken] = nxt.get(taken, 0.0) + p * q
                            value += p * q * w / norders
                            acc[pos] += p * q
                            if q < 1.0:
                                nxt[st] = nxt.get(st, 0.0) + p * (1.0 - q)
                        else:
                            nxt[st] = nxt.get(st, 0.0) + p
                    else:
                        nxt[st] = nxt.get(st, 0.0) + p
                avail_hit[key] = avail_hit.get(key, 0.0) + free_mass
                avail_tot[key] = avail_tot.get(key, 0.0) + 1.0
                states = nxt
        opp /= norders
        acc /= norders
        freq = {k: avail_hit[k] / avail_tot[k] for k in avail_tot}
        return OrderEnumeration(value=value, opportunity=opp, taken=acc, availability_freq=freq)


@dataclass
class OrderEnumeration:
    """Aggregates from exhausting every arrival order with exact coin flips."""

    value: float
    opportunity: np.ndarray   # Pr[candidate exists at position t], index t
    taken: np.ndarray         # Pr[candidate exists and accepted at position t]
    availability_freq: dict[tuple[int, int], float]

    def acceptance_given_opportunity(self, t: int) -> float:
        if self.opportunity[t] == 0.0:
            return float("nan")
        return float(self.taken[t] / self.opportunity[t])


# ---------------------------------------------------------------------------
# Oracles and single-run simulation.
# ---------------------------------------------------------------------------

class ExactOracle:
    """Availability from the subset dynamic program."""

    mode = "exact"

    def __init__(self, process: ArrivalProcess):
        self.process = process

    def x(self, arrived_mask: int, item: int) -> tuple[float, float]:
        return self.process.availability(arrived_mask, item), 0.0


class MonteCarloOracle:
    """Nested Monte Carlo availability estimates.

    The outer call simulates random orders of the arrived set; each inner
    acceptance decision needs its own availability, estimated recursively
    with ``inner_trials`` samples (estimates are memoized per oracle, so
    repeated queries reuse and correlate).  Estimates whose binomial
    standard error exceeds ``flag_threshold`` are reported via
    ``wide_flags``.  No competitive guarantee is claimed for runs driven
    by this oracle.
    """

    mode = "monte-carlo"

    def __init__(self, process: ArrivalProcess, trials: int = 2000, inner_trials: int = 200,
                 seed=0, flag_threshold: float = 0.1):
        if trials < 1 or inner_trials < 1:
            raise InputError("trial budgets must be positive")
        self.process = process
        self.trials = trials
        self.inner_trials = inner_trials
        self.rng = np.random.default_rng(seed)
        self.flag_threshold = flag_threshold
        self.wide_flags: list[tuple[int, int, float]] = []
        self._memo: dict[tuple[int, int], float] = {}

    def x(self, arrived_mask: int, item: int) -> tuple[float, float]:
        est = self._estimate(arrived_mask, item, self.trials)
        stderr = math.sqrt(max(est * (1.0 - est), 0.0) / self.trials)
        if stderr > self.flag_threshold:
            self.wide_flags.append((arrived_mask, item, stderr))
        return est, stderr

    def _estimate(self, arrived_mask: int, item: int, budget: int) -> float:
        proc = self.process
        t = arrived_mask.bit_count() + 1
        if t <= proc.cutoff + 1:
            return 1.0
        cand = proc.candidate(arrived_mask | (1 << item), item)
        if cand is None:
            return 1.0
        block, _w = cand
        items = [i for i in range(proc.m) if arrived_mask >> i & 1]
        hits = 0
        for _ in range(budget):
            order = self.rng.permutation(len(items))
            state = 0
            mask = 0
            for pos, oi in enumerate(order, start=1):
                it = items[oi]
                prev = mask
                mask |= 1 << it
                if pos <= proc.cutoff:
                    continue
                c = proc.candidate(mask, it)
                if c is None:
                    continue
                b, _wv = c
                if state & b:
                    continue
                key = (prev, it)
                xi = self._memo.get(key)
                if xi is None:
                    xi = self._estimate(prev, it, self.inner_trials)
                    self._memo[key] = xi
                q = 1.0 if xi <= 0.0 else min(1.0, proc.alpha[pos] / xi)
                if self.rng.random() < q:
                    state |= b
            if state & block == 0:
                hits += 1
        return hits / budget


@dataclass(frozen=True)
class ArrivalStep:
    t: int
    item: int
    has_candidate: bool
    in_optimum: bool
    x: float
    alpha: float
    available: bool
    accepted: bool
    clamped: bool


@dataclass
class ArrivalTrace:
    taken: list[tuple[int, int, float]] = field(default_factory=list)  # (item, block, weight)
    steps: list[ArrivalStep] = field(default_factory=list)
    total_weight: float = 0.0

    def to_json(self) -> dict:
        return {
            "total_weight": self.total_weight,
            "taken": [{"item": i, "block": b, "weight": w} for i, b, w in self.taken],
            "steps": [
                {
                    "t": s.t, "item": s.item, "in_optimum": s.in_optimum,
                    "x": s.x, "alpha": s.alpha, "available": s.available,
                    "accepted": s.accepted, "clamped": s.clamped,
                }
                for s in self.steps
            ],
        }


def simulate_arrival(process: ArrivalProcess, order: Sequence[int], oracle, rng) -> ArrivalTrace:
    """One run of the process under ``order`` with availability from
    ``oracle``.  A Monte Carlo oracle may understate ``x``; the acceptance
    probability is then clamped to 1 and the step flagged."""
    m = process.m
    seen = sorted(order)
    if seen != list(range(m)):
        raise InputError("order must be a permutation of the items")
    trace = ArrivalTrace()
    state = 0
    mask = 0
    for pos, item in enumerate(order, start=1):
        prev = mask
        mask |= 1 << item
        if pos <= process.cutoff:
            continue
        cand = process.candidate(mask, item)
        if cand is None:
            trace.steps.append(ArrivalStep(pos, item, False, False, 1.0, process.alpha[pos],
                                           True, False, False))
            continue
        block, w = cand
        x, _se = oracle.x(prev, item)
        available = state & block == 0
        accepted = False
        clamped = False
        if available:
            a = process.alpha[pos]
            if a <= 0.0:
                q = 0.0
            elif x < a:
                # only a noisy Monte Carlo estimate can land here
                q = 1.0
                clamped = True
            else:
                q = a / x
            if q > 0.0 and rng.random() < q:
                accepted = True
                state |= block
                trace.taken.append((item, block, w))
                trace.total_weight += w
        trace.steps.append(ArrivalStep(pos, item, True, True, x, process.alpha[pos],
                                       available, accepted, clamped))
    return trace
