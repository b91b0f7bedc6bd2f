"""Acceptance-probability schedules for edge and hypergraph arrival.

Edge arrival over ``m`` edges explores through step ``floor(m/2)`` and then
accepts the current-optimum edge with probability ``alpha_t / x_t`` where

    alpha_t = 0                          for t <= floor(m/2),
    alpha_t = 1 - 2 sum_{i<t} alpha_i/i  otherwise,

whose closed form is ``alpha_t = floor(m/2) floor((m-2)/2) / ((t-1)(t-2))``
for the exploitation steps.  The hypergraph generalization with offline
sets of size at most ``d`` explores through ``floor(f_d m)`` with
``f_d = d^{-1/(d-1)}`` and uses the factor ``d`` in place of 2; its closed
form is the product ``prod_{i=1..d} (floor(f_d m)+1-i) / (t-i)``.  At the
first exploitation step both forms equal 1 (for horizons of one or two
arrivals the written quotients degenerate to 0/0 and are defined to be 1).

The two families coincide at ``d = 2``: the cutoffs match because
``floor((m-2)/2) = floor(m/2) - 1`` and the closed forms are evaluated as
one integer product divided by another, so the d=2 hypergraph schedule is
bit-for-bit the edge schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InputError


def edge_cutoff(m: int) -> int:
    """Last exploration step for edge arrival."""
    return m // 2


def f_d(d: int) -> float:
    """Exploration fraction for (d+1)-uniform hypergraph arrival."""
    if d < 2:
        raise InputError("offline set size parameter d must be at least 2")
    return d ** (-1.0 / (d - 1.0))


def hyper_cutoff(m: int, d: int) -> int:
    """floor(f_d * m), computed with exact integer comparisons.

    c <= f_d m  iff  c^(d-1) d <= m^(d-1), so the float estimate is nudged
    until the integer inequality pins the floor (a tie t = f_d m counts as
    exploration).
    """
    if d < 2:
        raise InputError("offline set size parameter d must be at least 2")
    if m < 1:
        raise InputError("horizon m must be positive")
    c = int(m * f_d(d))
    rhs = m ** (d - 1)
    while (c + 1) ** (d - 1) * d <= rhs:
        c += 1
    while c > 0 and c ** (d - 1) * d > rhs:
        c -= 1
    return c


@dataclass(frozen=True)
class AlphaSchedule:
    """Edge-arrival acceptance probabilities; ``alpha[t]`` is indexed by
    arrival position ``t`` in ``1..m`` (index 0 unused)."""

    m: int
    alpha: np.ndarray

    @property
    def cutoff(self) -> int:
        return edge_cutoff(self.m)

    def __getitem__(self, t: int) -> float:
        if not 1 <= t <= self.m:
            raise InputError(f"step {t} outside 1..{self.m}")
        return float(self.alpha[t])


@dataclass(frozen=True)
class HyperAlphaSchedule:
    m: int
    d: int
    alpha: np.ndarray

    @property
    def cutoff(self) -> int:
        return hyper_cutoff(self.m, self.d)

    @property
    def exploration_fraction(self) -> float:
        return f_d(self.d)

    def __getitem__(self, t: int) -> float:
        if not 1 <= t <= self.m:
            raise InputError(f"step {t} outside 1..{self.m}")
        return float(self.alpha[t])


def _recursive_alpha(m: int, factor: int, cutoff: int) -> np.ndarray:
    alpha = np.zeros(m + 1)
    alpha[0] = np.nan
    s = 0.0
    for t in range(1, m + 1):
        if t <= cutoff:
            a = 0.0
        else:
            a = 1.0 - factor * s
        alpha[t] = a
        s += a / t
    return alpha


def alpha_recursive(m: int) -> AlphaSchedule:
    """Edge-arrival schedule from the literal recursion."""
    if m < 1:
        raise InputError("horizon m must be positive")
    return AlphaSchedule(m, _recursive_alpha(m, 2, edge_cutoff(m)))


def alpha_closed(m: int, t: int) -> float:
    """Closed-form alpha_t for edge arrival; requires t > floor(m/2)."""
    if m < 1:
        raise InputError("horizon m must be positive")
    cut = edge_cutoff(m)
    if t <= cut or t > m:
        raise InputError(f"closed form defined for {cut} < t <= {m}, got t={t}")
    return _product_alpha(cut, 2, t)


def hyper_alpha_recursive(m: int, d: int) -> HyperAlphaSchedule:
    """Hypergraph schedule from the literal recursion.

    Horizons with ``floor(f_d m) < d - 1`` and more than one exploitation
    step would drive the recursion negative; such instances must be padded
    with dummy arrivals first, so they are rejected.
    """
    if d < 2:
        raise InputError("offline set size parameter d must be at least 2")
    if m < 1:
        raise InputError("horizon m must be positive")
    cut = hyper_cutoff(m, d)
    if cut < d - 1 and m > cut + 1:
        raise InputError(
            f"horizon m={m} too short for d={d}: schedule degenerates; pad with dummy arrivals"
        )
    return HyperAlphaSchedule(m, d, _recursive_alpha(m, d, cut))


def hyper_alpha_closed(m: int, d: int, t: int) -> float:
    """Closed-form product alpha_t for hypergraph arrival; t > floor(f_d m)."""
    if d < 2:
        raise InputError("offline set size parameter d must be at least 2")
    cut = hyper_cutoff(m, d)
    if t <= cut or t > m:
        raise InputError(f"closed form defined for {cut} < t <= {m}, got t={t}")
    return _product_alpha(cut, d, t)


def _product_alpha(cut: int, d: int, t: int) -> float:
    if t == cut + 1:
        return 1.0
    num = 1.0
    den = 1.0
    for i in range(1, d + 1):
        num *= cut + 1 - i
        den *= t - i
    if den <= 0.0:
        raise InputError(f"product form degenerate at t={t} for d={d}")
    if num < 0.0:
        num = 0.0
    return num / den


def edge_telescope_coefficient(m: int) -> float:
    """Exact lower-bound coefficient of the optimum in the edge-arrival
    guarantee: floor(m/2) floor((m-2)/2) (1/(floor(m/2)-1) - 1/(m-1)) / m.
    Exceeds 1/4 for every m >= 4."""
    if m < 4:
        raise InputError("telescoped coefficient requires m >= 4")
    half = m // 2
    return half * ((m - 2) // 2) * (1.0 / (half - 1) - 1.0 / (m - 1)) / m


def hyper_coefficient(m: int, d: int) -> float:
    """Exact lower-bound coefficient for hypergraph arrival; requires
    floor(f_d m) > d.  Converges to 1 / d^(d/(d-1)) as m grows."""
    cut = hyper_cutoff(m, d)
    if cut <= d:
        raise InputError(f"need floor(f_d m) > d, got cut={cut} for m={m}, d={d}")
    prod = 1.0
    for i in range(1, d + 1):
        prod *= cut + 1 - i
    inv_cut = 1.0
    inv_m = 1.0
    for i in range(1, d):
        inv_cut /= cut - i
        inv_m /= m - i
    return prod / m * (inv_cut - inv_m) / (d - 1)


def hyper_limit(d: int) -> float:
    """Asymptotic guarantee 1 / d^(d/(d-1))."""
    if d < 2:
        raise InputError("offline set size parameter d must be at least 2")
    return d ** (-d / (d - 1.0))


# ---------------------------------------------------------------------------
# Bulk identity checks (recursion vs closed form), numba-compiled since the
# acceptance sweep covers every horizon up to 10^4.
# ---------------------------------------------------------------------------

@njit(cache=True)
def _identity_err_kernel(m, factor, cut):
    s = 0.0
    err = 0.0
    for t in range(1, m + 1):
        if t <= cut:
            a = 0.0
        else:
            a = 1.0 - factor * s
            if t == cut + 1:
                c = 1.0
            else:
                num = 1.0
                den = 1.0
                for i in range(1, factor + 1):
                    num *= cut + 1 - i
                    den *= t - i
                if num < 0.0:
                    num = 0.0
                c = num / den
            e = abs(a - c)
            if e > err:
                err = e
        s += a / t
    return err


def alpha_identity_max_error(m_lo: int, m_hi: int) -> float:
    """max over m in [m_lo, m_hi] and valid t of |recursive - closed| for
    the edge schedule."""
    worst = 0.0
    for m in range(max(m_lo, 1), m_hi + 1):
        worst = max(worst, float(_identity_err_kernel(m, 2, edge_cutoff(m))))
    return worst


def hyper_identity_max_error(d: int, m_lo: int, m_hi: int) -> float:
    """max over valid horizons of |recursive - closed| for the hypergraph
    schedule with parameter ``d`` (degenerate horizons are skipped)."""
    worst = 0.0
    for m in range(max(m_lo, 1), m_hi + 1):
        cut = hyper_cutoff(m, d)
        if cut < d - 1 and m > cut + 1:
            continue
        worst = max(worst, float(_identity_err_kernel(m, d, cut)))
    return worst
