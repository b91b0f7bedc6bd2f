"""Batched numba kernels for the vertex-arrival simulations.

Two families of kernels:

* generic instances: every exploitation step solves a maximum-weight
  matching on the arrived (even-sized) vertex set.  Dense complete-graph
  solves are accelerated by pruning to the union of per-vertex top-K edge
  lists and certifying the pruned optimum against the full edge set with
  the solver duals (``du + dv >= 2w`` suffices because blossom duals only
  add slack); any certificate failure falls back to the full solve, so
  results are exact.

* zero-padded instances (a small "real" core with ids ``0..nr-1`` plus
  all-zero auxiliary vertices): the maximum-weight matching is the real
  core (precomputed per subset of present reals) plus ascending-order
  pairing of the leftovers, so the partner of the arriving vertex is
  determined by order statistics over the arrived auxiliary ids.  A
  Fenwick tree per trial provides exact rank/select in O(log n).

Both paths implement the same deterministic matching rule as
``graphs.max_weight_matching`` on vertex sets larger than the exhaustive
small-set limit, which the trace-equality tests rely on.

Randomness is consumed from pregenerated arrays: one arrival order per
trial and one uniform draw per odd exploitation step (the dropped arrival
index), matching the two named streams of the Python implementation.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from ._blossom import _solve

# Below this subset size the pruning detour is not worth the certificate pass.
_PRUNE_MIN_SIZE = 40


@njit(cache=True)
def _subset_mate(W, nbr_desc, inset, verts, sz, prune_k):
    """Local mate array of the positive-core maximum-weight matching on
    ``verts[:sz]`` (ascending global ids), -1 for vertices the core leaves
    unmatched.  Exact; pruning is certificate-checked with full fallback.

    ``nbr_desc`` lists every vertex's neighbors by descending weight and
    ``inset`` flags membership of ``verts[:sz]``, so each vertex's pruning
    threshold (its prune_k-th largest present incident weight) comes from a
    short walk instead of a sort."""
    if prune_k > 0 and sz >= _PRUNE_MIN_SIZE:
        thresh = np.empty(sz, dtype=np.float64)
        kk = prune_k
        if kk > sz - 1:
            kk = sz - 1
        n_all = nbr_desc.shape[1]
        for i in range(sz):
            gi = verts[i]
            cnt = 0
            th = 0.0
            for idx in range(n_all):
                j = nbr_desc[gi, idx]
                if inset[j] and j != gi:
                    cnt += 1
                    if cnt == kk:
                        th = W[gi, j]
                        break
            thresh[i] = th
        m = 0
        for i in range(sz):
            ti = thresh[i]
            gi = verts[i]
            for j in range(i + 1, sz):
                w = W[gi, verts[j]]
                if w > 0.0 and (w >= ti or w >= thresh[j]):
                    m += 1
        eu = np.empty(m, dtype=np.int32)
        ev = np.empty(m, dtype=np.int32)
        ew = np.empty(m, dtype=np.float64)
        c = 0
        for i in range(sz):
            ti = thresh[i]
            gi = verts[i]
            for j in range(i + 1, sz):
                w = W[gi, verts[j]]
                if w > 0.0 and (w >= ti or w >= thresh[j]):
                    eu[c] = i
                    ev[c] = j
                    ew[c] = w
                    c += 1
        if m > 0:
            mate, dual = _solve(sz, eu, ev, ew)
            # Solved edges are certified by the solver itself (blossom duals
            # included); only the pruned-away edges need the conservative
            # du + dv >= 2w check.
            ok = True
            for i in range(sz):
                di = dual[i]
                ti = thresh[i]
                gi = verts[i]
                for j in range(i + 1, sz):
                    w = W[gi, verts[j]]
                    if w > 0.0 and not (w >= ti or w >= thresh[j]) and di + dual[j] < 2.0 * w:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return mate
    # full solve over every positive pair
    m = 0
    for i in range(sz):
        gi = verts[i]
        for j in range(i + 1, sz):
            if W[gi, verts[j]] > 0.0:
                m += 1
    eu = np.empty(m, dtype=np.int32)
    ev = np.empty(m, dtype=np.int32)
    ew = np.empty(m, dtype=np.float64)
    c = 0
    for i in range(sz):
        gi = verts[i]
        for j in range(i + 1, sz):
            w = W[gi, verts[j]]
            if w > 0.0:
                eu[c] = i
                ev[c] = j
                ew[c] = w
                c += 1
    if m == 0:
        return np.full(sz, -1, dtype=np.int32)
    mate, _dual = _solve(sz, eu, ev, ew)
    return mate


@njit(cache=True)
def _greedy_mate(W, verts, sz):
    """Greedy positive matching on ``verts[:sz]``: repeatedly take the
    heaviest available pair, ties to the lexicographically smallest."""
    mate = np.full(sz, -1, dtype=np.int32)
    while True:
        best = 0.0
        bi = -1
        bj = -1
        for i in range(sz):
            if mate[i] >= 0:
                continue
            gi = verts[i]
            for j in range(i + 1, sz):
                if mate[j] >= 0:
                    continue
                w = W[gi, verts[j]]
                if w > best:
                    best = w
                    bi = i
                    bj = j
        if bi < 0:
            break
        mate[bi] = bj
        mate[bj] = bi
    return mate


@njit(cache=True)
def _pad_partner(mate, sz, tloc):
    """Partner index of leftover ``tloc`` under ascending consecutive pairing."""
    below = 0
    for i in range(tloc):
        if mate[i] < 0:
            below += 1
    if below % 2 == 0:
        for i in range(tloc + 1, sz):
            if mate[i] < 0:
                return i
        return -1
    for i in range(tloc - 1, -1, -1):
        if mate[i] < 0:
            return i
    return -1


@njit(cache=True)
def _run_one_vertex_trial(W, nbr_desc, n, k, order, dropvals, greedy, prune_k, upto,
                          trace_partner, trace_exec):
    """One run of the vertex-arrival algorithm; returns matched weight.

    ``dropvals`` holds one dropped arrival index per odd step in
    ``k+1..upto`` (consumed in increasing t).  When trace arrays are
    nonempty, per-step chosen partners and execution flags are recorded
    at index ``t-1``.
    """
    avail = np.ones(n, dtype=np.bool_)
    verts_buf = np.empty(n, dtype=np.int32)
    inset = np.zeros(n, dtype=np.bool_)
    algw = 0.0
    oi = 0
    record = trace_partner.shape[0] > 0
    for t in range(k + 1, upto + 1):
        if t == 1:
            continue
        dropped = -1
        if t % 2 == 1:
            r = dropvals[oi]
            oi += 1
            dropped = order[r - 1]
        sz = 0
        for s in range(t):
            vid = order[s]
            if vid != dropped:
                verts_buf[sz] = vid
                sz += 1
        verts = np.sort(verts_buf[:sz])
        vt = order[t - 1]
        tloc = np.searchsorted(verts, vt)
        if greedy:
            mate = _greedy_mate(W, verts, sz)
        else:
            for i in range(sz):
                inset[verts[i]] = True
            mate = _subset_mate(W, nbr_desc, inset, verts, sz, prune_k)
            for i in range(sz):
                inset[verts[i]] = False
        ploc = mate[tloc]
        if ploc < 0:
            ploc = _pad_partner(mate, sz, tloc)
        if ploc < 0:
            continue
        partner = verts[ploc]
        executed = avail[partner]
        if executed:
            avail[partner] = False
            avail[vt] = False
            algw += W[vt, partner]
        if record:
            trace_partner[t - 1] = partner
            trace_exec[t - 1] = 1 if executed else 0
    return algw


@njit(cache=True, parallel=True)
def vertex_ratio_batch(W, nbr_desc, k, orders, drops, greedy, prune_k):
    """Matched weight of each trial's run over the full horizon."""
    trials = orders.shape[0]
    n = orders.shape[1]
    out = np.zeros(trials, dtype=np.float64)
    notrace_i = np.empty(0, dtype=np.int32)
    notrace_e = np.empty(0, dtype=np.int8)
    for tr in prange(trials):
        out[tr] = _run_one_vertex_trial(
            W, nbr_desc, n, k, orders[tr], drops[tr], greedy, prune_k, n, notrace_i, notrace_e
        )
    return out


@njit(cache=True, parallel=True)
def vertex_match_by_batch(W, nbr_desc, k, tcap, u, orders, drops, prune_k):
    """Per trial: -1 if ``u`` is not among the first ``tcap`` arrivals
    (rejected), else 1 if ``u`` is matched by step ``tcap``, 0 otherwise."""
    trials = orders.shape[0]
    n = orders.shape[1]
    out = np.full(trials, -1, dtype=np.int8)
    for tr in prange(trials):
        pos = -1
        for s in range(tcap):
            if orders[tr, s] == u:
                pos = s
                break
        if pos < 0:
            continue
        avail = np.ones(n, dtype=np.bool_)
        verts_buf = np.empty(n, dtype=np.int32)
        inset = np.zeros(n, dtype=np.bool_)
        oi = 0
        for t in range(k + 1, tcap + 1):
            if t == 1:
                continue
            dropped = -1
            if t % 2 == 1:
                r = drops[tr, oi]
                oi += 1
                dropped = orders[tr, r - 1]
            sz = 0
            for s in range(t):
                vid = orders[tr, s]
                if vid != dropped:
                    verts_buf[sz] = vid
                    sz += 1
            verts = np.sort(verts_buf[:sz])
            vt = orders[tr, t - 1]
            tloc = np.searchsorted(verts, vt)
            for s in range(sz):
                inset[verts[s]] = True
            mate = _subset_mate(W, nbr_desc, inset, verts, sz, prune_k)
            for s in range(sz):
                inset[verts[s]] = False
            ploc = mate[tloc]
            if ploc < 0:
                ploc = _pad_partner(mate, sz, tloc)
            if ploc < 0:
                continue
            partner = verts[ploc]
            if avail[partner]:
                avail[partner] = False
                avail[vt] = False
        out[tr] = 0 if avail[u] else 1
    return out


# ---------------------------------------------------------------------------
# Zero-padded instances: real core 0..nr-1 plus all-zero auxiliary vertices.
# ---------------------------------------------------------------------------

@njit(cache=True)
def _fen_add(tree, i):
    i += 1
    n = tree.shape[0]
    while i < n:
        tree[i] += 1
        i += i & (-i)


@njit(cache=True)
def _fen_rank(tree, x):
    """Count of inserted ids strictly below ``x``."""
    s = 0
    i = x
    while i > 0:
        s += tree[i]
        i -= i & (-i)
    return s


@njit(cache=True)
def _fen_select(tree, r, topbit):
    """The id with exactly ``r`` inserted ids below it (0-based select)."""
    pos = 0
    rem = r + 1
    bit = topbit
    n = tree.shape[0]
    while bit > 0:
        nxt = pos + bit
        if nxt < n and tree[nxt] < rem:
            pos = nxt
            rem -= tree[nxt]
        bit >>= 1
    return pos


@njit(cache=True)
def _aux_at(tree, q, d_aux, topbit):
    """q-th smallest arrived auxiliary id, skipping the dropped one."""
    p = _fen_select(tree, q, topbit)
    if d_aux >= 0 and d_aux <= p:
        p = _fen_select(tree, q + 1, topbit)
    return p


@njit(cache=True)
def _padded_step(Wb, nr, core_tab, tree, topbit, avail_real, avail_aux,
                 arrived_mask, t, x, dropped):
    """One exploitation step on a zero-padded instance.

    Returns ``(arrived_mask, partner_global, executed, weight)``.  The
    arriving vertex ``x`` pairs with its partner in the deterministic
    maximum-weight matching of the current (even) vertex set: its core
    partner if the positive core matches it, otherwise its neighbor in
    the ascending leftover list, where every real id precedes every
    auxiliary id.  The pair is executed only if the partner is available.
    """
    d_aux = -1
    pmask = arrived_mask
    if dropped >= 0:
        if dropped < nr:
            pmask &= ~(1 << dropped)
        else:
            d_aux = dropped - nr
    if x < nr:
        pmask |= 1 << x

    # leftover reals: present but not matched by the core of this subset
    n_rl = 0
    rl = np.empty(nr, dtype=np.int32)
    for i in range(nr):
        if (pmask >> i) & 1:
            if core_tab[pmask, i] < 0:
                rl[n_rl] = i
                n_rl += 1

    partner = -1
    executed = False
    wadd = 0.0
    if x < nr:
        cp = core_tab[pmask, x]
        if cp >= 0:
            partner = cp
            if avail_real[cp]:
                executed = True
                avail_real[cp] = False
                avail_real[x] = False
                wadd = Wb[x, cp]
        else:
            idx = 0
            for i in range(n_rl):
                if rl[i] == x:
                    idx = i
                    break
            if idx % 2 == 1:
                partner = rl[idx - 1]
                if avail_real[partner]:
                    executed = True
                    avail_real[partner] = False
                    avail_real[x] = False
                    wadd = Wb[x, partner]
            elif idx + 1 < n_rl:
                partner = rl[idx + 1]
                if avail_real[partner]:
                    executed = True
                    avail_real[partner] = False
                    avail_real[x] = False
                    wadd = Wb[x, partner]
            else:
                p0 = _aux_at(tree, 0, d_aux, topbit)
                partner = nr + p0
                if avail_aux[p0]:
                    executed = True
                    avail_aux[p0] = False
                    avail_real[x] = False
        arrived_mask |= 1 << x
    else:
        xa = x - nr
        j = _fen_rank(tree, xa)
        jj = j
        if d_aux >= 0 and d_aux < xa:
            jj -= 1
        g = n_rl + jj
        if g % 2 == 1:
            if jj == 0:
                partner = rl[n_rl - 1]
                if avail_real[partner]:
                    executed = True
                    avail_real[partner] = False
                    avail_aux[xa] = False
            else:
                p0 = _aux_at(tree, jj - 1, d_aux, topbit)
                partner = nr + p0
                if avail_aux[p0]:
                    executed = True
                    avail_aux[p0] = False
                    avail_aux[xa] = False
        else:
            p0 = _aux_at(tree, jj, d_aux, topbit)
            partner = nr + p0
            if avail_aux[p0]:
                executed = True
                avail_aux[p0] = False
                avail_aux[xa] = False
        _fen_add(tree, xa)
    return arrived_mask, partner, executed, wadd


@njit(cache=True)
def _run_one_padded_trial(Wb, nr, n, k, core_tab, topbit, order, dropvals,
                          trace_partner, trace_exec):
    naux = n - nr
    tree = np.zeros(naux + 1, dtype=np.int32)
    avail_real = np.ones(nr, dtype=np.bool_)
    avail_aux = np.ones(naux, dtype=np.bool_)
    arrived_mask = 0
    algw = 0.0
    oi = 0
    record = trace_partner.shape[0] > 0
    for t in range(1, n + 1):
        x = order[t - 1]
        if t <= k:
            if x < nr:
                arrived_mask |= 1 << x
            else:
                _fen_add(tree, x - nr)
            continue
        dropped = -1
        if t % 2 == 1 and t > 1:
            r = dropvals[oi]
            oi += 1
            dropped = order[r - 1]
        arrived_mask, partner, executed, wadd = _padded_step(
            Wb, nr, core_tab, tree, topbit, avail_real, avail_aux, arrived_mask, t, x, dropped
        )
        algw += wadd
        if record:
            trace_partner[t - 1] = partner
            trace_exec[t - 1] = 1 if executed else 0
    return algw


@njit(cache=True, parallel=True)
def padded_ratio_batch(Wb, nr, k, core_tab, topbit, orders, drops):
    trials = orders.shape[0]
    n = orders.shape[1]
    out = np.zeros(trials, dtype=np.float64)
    notrace_i = np.empty(0, dtype=np.int32)
    notrace_e = np.empty(0, dtype=np.int8)
    for tr in prange(trials):
        out[tr] = _run_one_padded_trial(
            Wb, nr, n, k, core_tab, topbit, orders[tr], drops[tr], notrace_i, notrace_e
        )
    return out
