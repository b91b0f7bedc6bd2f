"""Rank-only matching policies and the 5/12 ceiling for vertex arrival.

In the rank-only (ordinal) setting, ``n`` distinctly-ranked vertices
arrive in random order, the algorithm sees only relative ranks, and it
may, whenever the arriving vertex is one of the current top two and both
of those are unmatched, match the two with a probability ``c_i`` that
depends only on the arrival position ``i``.  The objective is the
probability that the global top two end up matched to each other.

With ``p_i`` the probability that the best-so-far is unmatched after step
``i`` (``p_1 = 1``):

    p_i = (1 + (i-1) p_{i-1} - 2 p_{i-1} c_i) / i,
    objective(c) = (1 / C(n,2)) * sum_{i=2..n} (i-1) p_{i-1} c_i.

Writing ``q_i = i p_i`` and ``f = C(n,2) * objective``, the partial
derivative ``df/dc_i = q_{i-1} (1 - 2 x_i / (i-1))`` with
``x_i = sum_{j>i} c_j prod_{i<k<j} (1 - 2 c_k / (k-1))`` does not depend
on ``c_i``, and once it is nonpositive at ``i`` it is negative at
``i - 1``; the maximizer is therefore a threshold policy (explore through
some step ``l``, then always match).  Under the threshold policy,
``q_i = i`` up to the cutoff and ``q_i = i/3 + 2 l(l-1)(l-2)/(3(i-1)(i-2))``
afterwards, which evaluates every cutoff in O(1) and bounds the optimum
by ``5/12 + O(1/n)``: the scaled objective is ``2 g(l/n) + O(1/n)`` with
``g(x) = 1/6 + x^2/2 - 2x^3/3``, maximized at ``x = 1/2`` with value 5/24.

The weighted instances behind this ceiling put weight ``n^{3(i+j)}`` on
the pair with value labels ``i`` and ``j``, so the maximum-weight matching
pairs vertices by descending label and its weight is dominated by the top
pair; the module represents those instances directly in rank space.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapacityError, InputError

ENUMERATION_LIMIT = 7
EXHAUSTIVE_POLICY_LIMIT = 8


@dataclass(frozen=True)
class OrdinalPolicy:
    """Match-the-top-two probabilities ``c[i]`` indexed by arrival position
    ``1..n`` (``c[0]`` and ``c[1]`` are carried but never used: no pair
    exists at step 1)."""

    n: int
    c: tuple

    def __post_init__(self):
        if self.n < 2:
            raise InputError("ordinal policies need n >= 2")
        if len(self.c) != self.n + 1:
            raise InputError("policy vector must have one entry per step 1..n")
        for ci in self.c[1:]:
            if not 0 <= ci <= 1:
                raise InputError(f"policy entry {ci} outside [0, 1]")

    @classmethod
    def from_list(cls, values: Sequence) -> "OrdinalPolicy":
        vals = list(values)
        return cls(len(vals), tuple([0.0] + vals))

    def to_json(self) -> dict:
        return {"n": self.n, "c": [float(x) for x in self.c[1:]]}


def threshold_policy(n: int, ell: int) -> OrdinalPolicy:
    """Explore through step ``ell``, then always match when possible."""
    if not 1 <= ell <= n:
        raise InputError(f"cutoff must lie in 1..{n}")
    return OrdinalPolicy(n, tuple([0.0] * (ell + 1) + [1.0] * (n - ell)))


@dataclass(frozen=True)
class PolicyState:
    """``p[i]`` = Pr[best-so-far unmatched after step i]; ``q[i] = i p[i]``."""

    p: tuple
    q: tuple


def policy_state(policy: OrdinalPolicy) -> PolicyState:
    """Evaluate the ``p_i`` recursion (exact if the policy entries are
    Fractions)."""
    n = policy.n
    c = policy.c
    one = Fraction(1) if isinstance(c[2], Fraction) else 1.0
    p = [None, one]
    for i in range(2, n + 1):
        prev = p[i - 1]
        p.append((one + (i - 1) * prev - 2 * prev * c[i]) / i)
    q = [None] + [i * p[i] for i in range(1, n + 1)]
    return PolicyState(tuple(p), tuple(q))


def objective(policy: OrdinalPolicy) -> float:
    """Probability that the global top two get matched together."""
    n = policy.n
    st = policy_state(policy)
    total = sum((i - 1) * st.p[i - 1] * policy.c[i] for i in range(2, n + 1))
    if isinstance(total, Fraction):
        return total / math.comb(n, 2)
    return float(total) / math.comb(n, 2)


def gradient(policy: OrdinalPolicy) -> np.ndarray:
    """Partial derivatives of ``f = C(n,2) * objective`` in ``c``.

    ``grad[i]`` for ``i in 2..n`` (entries 0 and 1 are zero); computed by
    the backward recurrence ``x_{i-1} = c_i + (1 - 2 c_i / (i-1)) x_i``.
    Each component is independent of its own coordinate (f is affine in
    every ``c_i``).
    """
    n = policy.n
    c = policy.c
    st = policy_state(policy)
    x = [0.0] * (n + 1)  # x[i] = sum_{j>i} c_j prod_{i<k<j} (1 - 2 c_k/(k-1))
    for i in range(n, 1, -1):
        x[i - 1] = c[i] + (1.0 - 2.0 * c[i] / (i - 1)) * x[i]
    grad = np.zeros(n + 1)
    for i in range(2, n + 1):
        grad[i] = st.q[i - 1] * (1.0 - 2.0 * x[i] / (i - 1))
    return grad


@dataclass(frozen=True)
class ThresholdSearch:
    l_star: int
    value: float
    ties: tuple[int, ...]
    values: np.ndarray  # value per cutoff, index 1..n


def threshold_values(n: int) -> np.ndarray:
    """objective(threshold_policy(n, l)) for every cutoff, via the closed
    forms (index 0 unused; vectorized so ceiling sweeps over many n stay
    cheap)."""
    if n < 2:
        raise InputError("need n >= 2")
    vals = np.zeros(n + 1)
    denom = math.comb(n, 2)
    if n >= 2:
        # generic cutoffs 2 <= l <= n-1
        ells = np.arange(2, n, dtype=np.float64)
        if len(ells):
            tail = np.where(ells + 1 <= n - 1,
                            (ells + 1 + (n - 1)) * (n - 1 - ells) / 2.0 / 3.0, 0.0)
            tele = np.where(ells + 1 <= n - 1,
                            (2.0 * ells * (ells - 1) * (ells - 2) / 3.0)
                            * (1.0 / (ells - 1) - 1.0 / (n - 2)), 0.0)
            vals[2:n] = (ells + tail + tele) / denom
        # l = 1: q_1 = 1, q_2 = 0, q_i = i/3 beyond
        total = 1.0
        if n - 1 >= 3:
            total += sum_range(3, n - 1) / 3.0
        vals[1] = total / denom
        vals[n] = 0.0
    return vals


def sum_range(a: int, b: int) -> float:
    """sum of integers a..b inclusive (0 when empty)."""
    if b < a:
        return 0.0
    return (a + b) * (b - a + 1) / 2.0


def optimal_threshold(n: int, check_tol: float = 1e-12) -> ThresholdSearch:
    """Best threshold cutoff by exhaustive closed-form sweep.

    The winning value is revalidated against the ``p_i`` recursion to
    ``check_tol``; all tied maximizers are reported.
    """
    if n < 3:
        raise InputError("threshold search needs n >= 3")
    vals = threshold_values(n)
    best = float(vals[1:].max())
    ties = tuple(int(l) for l in range(1, n + 1) if vals[l] == best)
    l_star = ties[0]
    direct = objective(threshold_policy(n, l_star))
    if abs(direct - best) > check_tol:
        raise AssertionError(
            f"closed-form threshold value {best} disagrees with recursion {direct}"
        )
    return ThresholdSearch(l_star, best, ties, vals)


def ceiling_bound(x: float) -> float:
    """g(x) = 1/6 + x^2/2 - 2x^3/3; 2*g(l/n) caps the threshold objective."""
    return 1.0 / 6.0 + x * x / 2.0 - 2.0 * x**3 / 3.0


# ---------------------------------------------------------------------------
# Simulation (vectorized over trials).
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrdinalEstimate:
    estimate: float
    stderr: float
    trials: int
    top_free: np.ndarray | None  # Pr[best-so-far unmatched after step i], index 1..n


def simulate_ordinal(policy: OrdinalPolicy, trials: int, seed,
                     collect_state: bool = False, block: int = 20000) -> OrdinalEstimate:
    """Monte Carlo frequency of matching the global top two together.

    Tracks only the identities and matched flags of the current top two,
    which is sufficient: matches only ever involve the current top two,
    and a vertex displaced below them can never be matched later.
    """
    if trials < 1:
        raise InputError("trials must be positive")
    n = policy.n
    c = np.array([float(x) for x in policy.c])
    rng = np.random.default_rng(seed)
    hits = 0
    free_acc = np.zeros(n + 1) if collect_state else None
    done = 0
    while done < trials:
        b = min(block, trials - done)
        ranks = np.tile(np.arange(1, n + 1, dtype=np.int32), (b, 1))
        ranks = rng.permuted(ranks, axis=1)
        v1 = ranks[:, 0].astype(np.int64)
        v2 = np.full(b, n + 1, dtype=np.int64)
        m1 = np.zeros(b, dtype=bool)
        m2 = np.zeros(b, dtype=bool)
        success = np.zeros(b, dtype=bool)
        if collect_state:
            free_acc[1] += b
        for i in range(2, n + 1):
            r = ranks[:, i - 1].astype(np.int64)
            ci = c[i]
            new_top = r < v1
            new_second = (~new_top) & (r < v2)
            possible = (new_top | new_second) & ~m1
            # insert the arrival into the top-two state
            v2 = np.where(new_top, v1, np.where(new_second, r, v2))
            m2 = np.where(new_top, m1, np.where(new_second, False, m2))
            v1 = np.where(new_top, r, v1)
            m1 = np.where(new_top, False, m1)
            if ci > 0.0:
                if ci >= 1.0:
                    matched = possible
                else:
                    matched = possible & (rng.random(b) < ci)
                pair_is_global_top = (v1 == 1) & (v2 == 2)
                success |= matched & pair_is_global_top
                m1 |= matched
                m2 |= matched
            if collect_state:
                free_acc[i] += b - int(m1.sum())
        hits += int(success.sum())
        done += b
    est = hits / trials
    stderr = math.sqrt(max(est * (1.0 - est), 0.0) / trials)
    top_free = free_acc / trials if collect_state else None
    return OrdinalEstimate(est, stderr, trials, top_free)


# ---------------------------------------------------------------------------
# Exact enumeration oracle (all n! orders, exact coin handling).
# ---------------------------------------------------------------------------

def exact_objective_by_enumeration(policy: OrdinalPolicy) -> Fraction:
    """Exact success probability by exhausting arrival orders; policy
    entries are taken as exact rationals.  Limited to n <= 7."""
    n = policy.n
    if n > ENUMERATION_LIMIT:
        raise CapacityError(f"enumeration limited to n <= {ENUMERATION_LIMIT}")
    c = [Fraction(x).limit_denominator(10**9) if not isinstance(x, Fraction) else x
         for x in policy.c]
    total = Fraction(0)
    for order in itertools.permutations(range(1, n + 1)):
        # states: (m1, m2) -> probability, with v1/v2 deterministic per step
        states = {(False, False): Fraction(1)}
        v1 = order[0]
        v2 = n + 1
        for i in range(2, n + 1):
            r = order[i - 1]
            new_top = r < v1
            new_second = (not new_top) and r < v2
            nxt: dict[tuple[bool, bool], Fraction] = {}
            if new_top:
                v2, v1 = v1, r
            elif new_second:
                v2 = r
            pair_global = v1 == 1 and v2 == 2
            for (m1, m2), pr in states.items():
                if new_top:
                    m1n, m2n = False, m1
                elif new_second:
                    m1n, m2n = m1, False
                else:
                    m1n, m2n = m1, m2
                possible = (new_top or new_second) and not (m1n or m2n)
                if possible and c[i] > 0:
                    take = pr * c[i]
                    if pair_global:
                        total += take  # success mass; the pair stays matched
                    key = (True, True)
                    nxt[key] = nxt.get(key, Fraction(0)) + take
                    keep = pr - take
                    if keep:
                        key = (m1n, m2n)
                        nxt[key] = nxt.get(key, Fraction(0)) + keep
                else:
                    key = (m1n, m2n)
                    nxt[key] = nxt.get(key, Fraction(0)) + pr
            states = nxt
    return total / math.factorial(n)


def exhaustive_policy_search(n: int):
    """Exact search over all 0/1 policies (c_1 fixed to 0); returns the
    best value, every maximizer, and whether a threshold policy attains
    the maximum."""
    if n > EXHAUSTIVE_POLICY_LIMIT:
        raise CapacityError(f"exhaustive policy search limited to n <= {EXHAUSTIVE_POLICY_LIMIT}")
    best = Fraction(-1)
    winners: list[tuple[int, ...]] = []
    for bits in itertools.product((0, 1), repeat=n - 1):
        pol = OrdinalPolicy(n, tuple([Fraction(0), Fraction(0)] + [Fraction(b) for b in bits]))
        val = objective(pol)
        if val > best:
            best = val
            winners = [bits]
        elif val == best:
            winners.append(bits)
    def is_threshold(bits):
        joined = "".join(map(str, bits))
        return "10" not in joined
    return best, winners, any(is_threshold(w) for w in winners)


# ---------------------------------------------------------------------------
# The steep-weight hard instances, in rank space.
# ---------------------------------------------------------------------------

def hard_instance_matching(values: Sequence[int]) -> list[tuple[int, int]]:
    """Maximum-weight matching of an even subset of value labels under the
    steeply separated weights ``w(i, j) = n^{3(i+j)}``: pair the labels in
    descending order.  The top pair outweighs everything below it, so this
    greedy pairing is exactly optimal."""
    vals = sorted(set(int(v) for v in values), reverse=True)
    if len(vals) != len(list(values)):
        raise InputError("value labels must be distinct")
    if len(vals) % 2:
        raise InputError("hard-instance matching needs an even subset")
    return [(vals[2 * i], vals[2 * i + 1]) for i in range(len(vals) // 2)]


def hard_instance_weight(n: int, i: int, j: int) -> int:
    """Exact integer weight n^(3(i+j)) of the pair with labels i and j."""
    if i == j:
        raise InputError("labels must differ")
    return n ** (3 * (i + j))


def policy_from_json(obj) -> OrdinalPolicy:
    try:
        n = int(obj["n"])
        c = list(obj["c"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed policy object: {exc}") from exc
    if len(c) != n:
        raise InputError("policy vector length must equal n")
    return OrdinalPolicy.from_list(c)
