"""Maximum-weight matching in general graphs (blossom algorithm).

Array-based O(n^3) implementation of the primal-dual blossom method,
compiled with numba.  The structure follows the classic formulation used
by Galil's survey and the well-known mwmatching implementation: a stage
per augmentation, with S/T labeling, blossom shrinking/expansion, and
four-way dual delta steps.  Negative-weight edges must be filtered out by
the caller; with nonnegative weights the result is a maximum total weight
matching (not necessarily of maximum cardinality).

All state lives in flat numpy arrays so the hot path stays inside numba:

* endpoints: edge k owns endpoints 2k and 2k+1; ``endpoint[p]`` is the
  vertex at endpoint ``p`` and ``p ^ 1`` is the opposite end.
* blossoms: ids 0..nv-1 are the vertices, nv..2nv-1 the nontrivial
  blossoms; child/endpoint lists are rows of 2D scratch arrays.
* ``mate[v]`` stores the remote endpoint of the matched edge, or -1.

Dual variables are premultiplied by two, so integer weights stay exact in
float64 and delta3 (half the S-S slack) remains exactly representable.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["blossom_max_weight_matching"]


@njit(cache=True)
def _solve(nv, eu, ev, ew):  # pragma: no cover - exercised via wrapper
    ne = eu.shape[0]
    nb = 2 * nv

    maxweight = 0.0
    for k in range(ne):
        if ew[k] > maxweight:
            maxweight = ew[k]

    endpoint = np.empty(2 * ne, dtype=np.int32)
    uxv = np.empty(ne, dtype=np.int32)
    for k in range(ne):
        endpoint[2 * k] = eu[k]
        endpoint[2 * k + 1] = ev[k]
        uxv[k] = eu[k] ^ ev[k]

    # CSR adjacency of incident edge ids per vertex.
    deg = np.zeros(nv + 1, dtype=np.int32)
    for k in range(ne):
        deg[eu[k] + 1] += 1
        deg[ev[k] + 1] += 1
    nbstart = np.empty(nv + 1, dtype=np.int32)
    nbstart[0] = 0
    for v in range(nv):
        nbstart[v + 1] = nbstart[v] + deg[v + 1]
    fill = nbstart[:nv].copy()
    nblist = np.empty(2 * ne, dtype=np.int32)
    for k in range(ne):
        u = eu[k]
        v = ev[k]
        nblist[fill[u]] = k
        fill[u] += 1
        nblist[fill[v]] = k
        fill[v] += 1

    INF = np.inf
    mate = np.full(nv, -1, dtype=np.int32)
    label = np.zeros(nb, dtype=np.int32)
    labelend = np.full(nb, -1, dtype=np.int32)
    inblossom = np.arange(nv, dtype=np.int32)
    blossomparent = np.full(nb, -1, dtype=np.int32)
    blossombase = np.full(nb, -1, dtype=np.int32)
    for v in range(nv):
        blossombase[v] = v
    # Child / connecting-endpoint lists for nontrivial blossoms (row b - nv).
    # rows are written before they are read (child counts gate access)
    childs = np.empty((nv, nv + 1), dtype=np.int32)
    endps = np.empty((nv, nv + 1), dtype=np.int32)
    nchilds = np.zeros(nv, dtype=np.int32)
    bestedge = np.full(nb, -1, dtype=np.int32)
    # Cached comparison keys for bestedge: slack plus the accumulated dual
    # drift of the edge class (2*cumdelta for S-S edges, cumdelta for edges
    # from an S-vertex to an unlabeled one), which stays constant while the
    # incident labels do, so candidates compare without recomputing slack.
    inv_ss = np.full(nb, INF, dtype=np.float64)
    inv_sf = np.full(nv, INF, dtype=np.float64)
    # Per-blossom least-slack edge lists toward other S-blossoms.
    bbe = np.empty((nv, nb), dtype=np.int32)
    nbbe = np.full(nv, -1, dtype=np.int32)  # -1 means "no list"
    unused = np.empty(nv, dtype=np.int32)
    for i in range(nv):
        unused[i] = nv + i
    nunused = nv
    dualvar = np.zeros(nb, dtype=np.float64)
    for v in range(nv):
        dualvar[v] = maxweight
    allowedge = np.zeros(ne, dtype=np.bool_)
    queue = np.empty(16 * nv + 64, dtype=np.int32)
    nqueue = 0

    # Scratch buffers.
    leafstack = np.empty(2 * nv + 2, dtype=np.int32)
    leafbuf = np.empty(nv, dtype=np.int32)
    scanpath = np.empty(nb, dtype=np.int32)
    bestedgeto = np.empty(nb, dtype=np.int32)  # fully reset before each use
    rotbuf = np.empty(nv + 1, dtype=np.int32)
    augstack = np.empty(4 * nv + 8, dtype=np.int64)  # packed (b, v) tasks
    dissolve = np.empty(nv + 1, dtype=np.int32)

    for _stage in range(nv):
        for b in range(nb):
            label[b] = 0
            bestedge[b] = -1
            inv_ss[b] = INF
        for v in range(nv):
            inv_sf[v] = INF
        for i in range(nv):
            nbbe[i] = -1
        for k in range(ne):
            allowedge[k] = False
        nqueue = 0
        cumdelta = 0.0

        # --- label all single vertices with S -------------------------------
        for v in range(nv):
            if mate[v] == -1 and label[inblossom[v]] == 0:
                w = v
                t = 1
                p = -1
                while True:
                    bw = inblossom[w]
                    label[w] = t
                    label[bw] = t
                    labelend[w] = p
                    labelend[bw] = p
                    bestedge[w] = -1
                    bestedge[bw] = -1
                    inv_ss[w] = INF
                    inv_ss[bw] = INF
                    if w < nv:
                        inv_sf[w] = INF
                    if t == 1:
                        if bw < nv:
                            queue[nqueue] = bw
                            nqueue += 1
                        else:
                            sp = 0
                            leafstack[sp] = bw
                            sp += 1
                            while sp > 0:
                                sp -= 1
                                x = leafstack[sp]
                                if x < nv:
                                    queue[nqueue] = x
                                    nqueue += 1
                                else:
                                    for ci in range(nchilds[x - nv]):
                                        leafstack[sp] = childs[x - nv, ci]
                                        sp += 1
                        break
                    else:
                        base = blossombase[bw]
                        pm = mate[base]
                        w = endpoint[pm]
                        t = 1
                        p = pm ^ 1

        augmented = False
        guard = 0
        while True:
            guard += 1
            if guard > 100 * nv * nv + 1000:
                raise RuntimeError("blossom solver failed to converge")

            # --- scan the queue ---------------------------------------------
            while nqueue > 0 and not augmented:
                nqueue -= 1
                v = queue[nqueue]
                bv = inblossom[v]
                for pi in range(nbstart[v], nbstart[v + 1]):
                    k = nblist[pi]
                    w = uxv[k] ^ v
                    bw = inblossom[w]
                    if bv == bw:
                        continue
                    kslack = 0.0
                    if not allowedge[k]:
                        kslack = dualvar[eu[k]] + dualvar[ev[k]] - 2.0 * ew[k]
                        if kslack <= 0.0:
                            allowedge[k] = True
                    if allowedge[k]:
                        lbw = label[bw]
                        if lbw == 0:
                            # free blossom: label with T, its mate with S
                            ww = w
                            tt = 2
                            pp = (2 * k + (1 if ev[k] == w else 0)) ^ 1
                            while True:
                                bw2 = inblossom[ww]
                                label[ww] = tt
                                label[bw2] = tt
                                labelend[ww] = pp
                                labelend[bw2] = pp
                                bestedge[ww] = -1
                                bestedge[bw2] = -1
                                inv_ss[ww] = INF
                                inv_ss[bw2] = INF
                                if ww < nv:
                                    inv_sf[ww] = INF
                                if tt == 1:
                                    if bw2 < nv:
                                        queue[nqueue] = bw2
                                        nqueue += 1
                                    else:
                                        sp = 0
                                        leafstack[sp] = bw2
                                        sp += 1
                                        while sp > 0:
                                            sp -= 1
                                            x = leafstack[sp]
                                            if x < nv:
                                                queue[nqueue] = x
                                                nqueue += 1
                                            else:
                                                for ci in range(nchilds[x - nv]):
                                                    leafstack[sp] = childs[x - nv, ci]
                                                    sp += 1
                                    break
                                else:
                                    base = blossombase[bw2]
                                    pm = mate[base]
                                    ww = endpoint[pm]
                                    tt = 1
                                    pp = pm ^ 1
                        elif lbw == 1:
                            # --- scanBlossom(v, w): find LCA or augment -----
                            pathn = 0
                            base = -1
                            vv = v
                            ww = w
                            while vv != -1 or ww != -1:
                                bsc = inblossom[vv]
                                if label[bsc] & 4:
                                    base = blossombase[bsc]
                                    break
                                scanpath[pathn] = bsc
                                pathn += 1
                                label[bsc] = 5
                                if labelend[bsc] == -1:
                                    vv = -1
                                else:
                                    vv = endpoint[labelend[bsc]]
                                    bsc = inblossom[vv]
                                    vv = endpoint[labelend[bsc]]
                                if ww != -1:
                                    tmp = vv
                                    vv = ww
                                    ww = tmp
                            for pj in range(pathn):
                                label[scanpath[pj]] = 1

                            if base >= 0:
                                # --- addBlossom(base, k) --------------------
                                vv = eu[k]
                                ww = ev[k]
                                bb = inblossom[base]
                                bvb = inblossom[vv]
                                bwb = inblossom[ww]
                                nunused -= 1
                                b = unused[nunused]
                                bi = b - nv
                                blossombase[b] = base
                                blossomparent[b] = -1
                                blossomparent[bb] = b
                                cnt = 0
                                while bvb != bb:
                                    blossomparent[bvb] = b
                                    childs[bi, cnt] = bvb
                                    endps[bi, cnt] = labelend[bvb]
                                    cnt += 1
                                    vv = endpoint[labelend[bvb]]
                                    bvb = inblossom[vv]
                                # reverse traced prefix then close the cycle;
                                # childs gets bb prepended, endps stays put so
                                # endps[i] keeps joining childs[i], childs[i+1]
                                for i2 in range(cnt // 2):
                                    t1 = childs[bi, i2]
                                    childs[bi, i2] = childs[bi, cnt - 1 - i2]
                                    childs[bi, cnt - 1 - i2] = t1
                                    t2 = endps[bi, i2]
                                    endps[bi, i2] = endps[bi, cnt - 1 - i2]
                                    endps[bi, cnt - 1 - i2] = t2
                                for i2 in range(cnt, 0, -1):
                                    childs[bi, i2] = childs[bi, i2 - 1]
                                childs[bi, 0] = bb
                                endps[bi, cnt] = 2 * k
                                cnt += 1
                                while bwb != bb:
                                    blossomparent[bwb] = b
                                    childs[bi, cnt] = bwb
                                    endps[bi, cnt] = labelend[bwb] ^ 1
                                    cnt += 1
                                    ww = endpoint[labelend[bwb]]
                                    bwb = inblossom[ww]
                                nchilds[bi] = cnt
                                label[b] = 1
                                labelend[b] = labelend[bb]
                                dualvar[b] = 0.0
                                # relabel leaves; queue former T-vertices
                                sp = 0
                                leafstack[sp] = b
                                sp += 1
                                nleaf = 0
                                while sp > 0:
                                    sp -= 1
                                    x = leafstack[sp]
                                    if x < nv:
                                        leafbuf[nleaf] = x
                                        nleaf += 1
                                    else:
                                        for ci in range(nchilds[x - nv]):
                                            leafstack[sp] = childs[x - nv, ci]
                                            sp += 1
                                for li in range(nleaf):
                                    x = leafbuf[li]
                                    if label[inblossom[x]] == 2:
                                        queue[nqueue] = x
                                        nqueue += 1
                                    inblossom[x] = b
                                # merge least-slack edge lists of children
                                for b2 in range(nb):
                                    bestedgeto[b2] = -1
                                for ci in range(cnt):
                                    bv2 = childs[bi, ci]
                                    if bv2 < nv or nbbe[bv2 - nv] < 0:
                                        sp = 0
                                        leafstack[sp] = bv2
                                        sp += 1
                                        while sp > 0:
                                            sp -= 1
                                            x = leafstack[sp]
                                            if x < nv:
                                                for pi2 in range(nbstart[x], nbstart[x + 1]):
                                                    k2 = nblist[pi2]
                                                    j3 = uxv[k2] ^ x
                                                    bj = inblossom[j3]
                                                    if (
                                                        bj != b
                                                        and label[bj] == 1
                                                        and (
                                                            bestedgeto[bj] == -1
                                                            or dualvar[eu[k2]] + dualvar[ev[k2]] - 2.0 * ew[k2]
                                                            < dualvar[eu[bestedgeto[bj]]]
                                                            + dualvar[ev[bestedgeto[bj]]]
                                                            - 2.0 * ew[bestedgeto[bj]]
                                                        )
                                                    ):
                                                        bestedgeto[bj] = k2
                                            else:
                                                for ci2 in range(nchilds[x - nv]):
                                                    leafstack[sp] = childs[x - nv, ci2]
                                                    sp += 1
                                    else:
                                        for li2 in range(nbbe[bv2 - nv]):
                                            k2 = bbe[bv2 - nv, li2]
                                            i3 = eu[k2]
                                            j3 = ev[k2]
                                            bj = inblossom[j3]
                                            if bj == b:
                                                bj = inblossom[i3]
                                            if (
                                                bj != b
                                                and label[bj] == 1
                                                and (
                                                    bestedgeto[bj] == -1
                                                    or dualvar[eu[k2]] + dualvar[ev[k2]] - 2.0 * ew[k2]
                                                    < dualvar[eu[bestedgeto[bj]]]
                                                    + dualvar[ev[bestedgeto[bj]]]
                                                    - 2.0 * ew[bestedgeto[bj]]
                                                )
                                            ):
                                                bestedgeto[bj] = k2
                                    if bv2 >= nv:
                                        nbbe[bv2 - nv] = -1
                                    bestedge[bv2] = -1
                                    inv_ss[bv2] = INF
                                nlist = 0
                                for b2 in range(nb):
                                    if bestedgeto[b2] != -1:
                                        bbe[bi, nlist] = bestedgeto[b2]
                                        nlist += 1
                                nbbe[bi] = nlist
                                bestedge[b] = -1
                                inv_ss[b] = INF
                                for li2 in range(nlist):
                                    k2 = bbe[bi, li2]
                                    sl = dualvar[eu[k2]] + dualvar[ev[k2]] - 2.0 * ew[k2]
                                    if bestedge[b] == -1 or sl + 2.0 * cumdelta < inv_ss[b]:
                                        bestedge[b] = k2
                                        inv_ss[b] = sl + 2.0 * cumdelta
                                bv = inblossom[v]
                            else:
                                # --- augmentMatching(k) ---------------------
                                for side in range(2):
                                    if side == 0:
                                        s = eu[k]
                                        p2 = 2 * k + 1
                                    else:
                                        s = ev[k]
                                        p2 = 2 * k
                                    while True:
                                        bs = inblossom[s]
                                        if bs >= nv:
                                            na = 0
                                            augstack[na] = (np.int64(bs) << 32) | np.int64(s)
                                            na += 1
                                            while na > 0:
                                                na -= 1
                                                task = augstack[na]
                                                tb = np.int32(task >> 32)
                                                tv = np.int32(task & 0xFFFFFFFF)
                                                tbi = tb - nv
                                                tt2 = tv
                                                while blossomparent[tt2] != tb:
                                                    tt2 = blossomparent[tt2]
                                                if tt2 >= nv:
                                                    augstack[na] = (np.int64(tt2) << 32) | np.int64(tv)
                                                    na += 1
                                                nch = nchilds[tbi]
                                                istart = 0
                                                for ci in range(nch):
                                                    if childs[tbi, ci] == tt2:
                                                        istart = ci
                                                        break
                                                if istart & 1:
                                                    jj = istart - nch
                                                    jstep = 1
                                                    endptrick = 0
                                                else:
                                                    jj = istart
                                                    jstep = -1
                                                    endptrick = 1
                                                while jj != 0:
                                                    jj += jstep
                                                    pch = endps[tbi, (jj - endptrick) % nch] ^ endptrick
                                                    tch = childs[tbi, jj % nch]
                                                    if tch >= nv:
                                                        augstack[na] = (np.int64(tch) << 32) | np.int64(endpoint[pch])
                                                        na += 1
                                                    jj += jstep
                                                    tch = childs[tbi, jj % nch]
                                                    if tch >= nv:
                                                        augstack[na] = (np.int64(tch) << 32) | np.int64(endpoint[pch ^ 1])
                                                        na += 1
                                                    mate[endpoint[pch]] = pch ^ 1
                                                    mate[endpoint[pch ^ 1]] = pch
                                                if istart > 0:
                                                    for ci in range(nch):
                                                        rotbuf[ci] = childs[tbi, (istart + ci) % nch]
                                                    for ci in range(nch):
                                                        childs[tbi, ci] = rotbuf[ci]
                                                    for ci in range(nch):
                                                        rotbuf[ci] = endps[tbi, (istart + ci) % nch]
                                                    for ci in range(nch):
                                                        endps[tbi, ci] = rotbuf[ci]
                                                blossombase[tb] = tv
                                        mate[s] = p2
                                        if labelend[bs] == -1:
                                            break
                                        t2 = endpoint[labelend[bs]]
                                        bt = inblossom[t2]
                                        s = endpoint[labelend[bt]]
                                        j2 = endpoint[labelend[bt] ^ 1]
                                        if bt >= nv:
                                            na = 0
                                            augstack[na] = (np.int64(bt) << 32) | np.int64(j2)
                                            na += 1
                                            while na > 0:
                                                na -= 1
                                                task = augstack[na]
                                                tb = np.int32(task >> 32)
                                                tv = np.int32(task & 0xFFFFFFFF)
                                                tbi = tb - nv
                                                tt2 = tv
                                                while blossomparent[tt2] != tb:
                                                    tt2 = blossomparent[tt2]
                                                if tt2 >= nv:
                                                    augstack[na] = (np.int64(tt2) << 32) | np.int64(tv)
                                                    na += 1
                                                nch = nchilds[tbi]
                                                istart = 0
                                                for ci in range(nch):
                                                    if childs[tbi, ci] == tt2:
                                                        istart = ci
                                                        break
                                                if istart & 1:
                                                    jj = istart - nch
                                                    jstep = 1
                                                    endptrick = 0
                                                else:
                                                    jj = istart
                                                    jstep = -1
                                                    endptrick = 1
                                                while jj != 0:
                                                    jj += jstep
                                                    pch = endps[tbi, (jj - endptrick) % nch] ^ endptrick
                                                    tch = childs[tbi, jj % nch]
                                                    if tch >= nv:
                                                        augstack[na] = (np.int64(tch) << 32) | np.int64(endpoint[pch])
                                                        na += 1
                                                    jj += jstep
                                                    tch = childs[tbi, jj % nch]
                                                    if tch >= nv:
                                                        augstack[na] = (np.int64(tch) << 32) | np.int64(endpoint[pch ^ 1])
                                                        na += 1
                                                    mate[endpoint[pch]] = pch ^ 1
                                                    mate[endpoint[pch ^ 1]] = pch
                                                if istart > 0:
                                                    for ci in range(nch):
                                                        rotbuf[ci] = childs[tbi, (istart + ci) % nch]
                                                    for ci in range(nch):
                                                        childs[tbi, ci] = rotbuf[ci]
                                                    for ci in range(nch):
                                                        rotbuf[ci] = endps[tbi, (istart + ci) % nch]
                                                    for ci in range(nch):
                                                        endps[tbi, ci] = rotbuf[ci]
                                                blossombase[tb] = tv
                                        mate[j2] = labelend[bt]
                                        p2 = labelend[bt] ^ 1
                                augmented = True
                                break
                        elif label[w] == 0:
                            # w sits inside a T-blossom but is unreached
                            label[w] = 2
                            labelend[w] = (2 * k + (1 if ev[k] == w else 0)) ^ 1
                    else:
                        lbw = label[bw]
                        if lbw == 1:
                            key = kslack + 2.0 * cumdelta
                            if key < inv_ss[bv]:
                                bestedge[bv] = k
                                inv_ss[bv] = key
                        elif label[w] == 0:
                            key = kslack + cumdelta
                            if key < inv_sf[w]:
                                bestedge[w] = k
                                inv_sf[w] = key

            if augmented:
                break

            # --- compute dual delta ------------------------------------------
            deltatype = 1
            delta = dualvar[0]
            for v in range(nv):
                if dualvar[v] < delta:
                    delta = dualvar[v]
            if delta < 0.0:
                delta = 0.0
            deltaedge = -1
            deltablossom = -1
            for v in range(nv):
                if label[inblossom[v]] == 0 and bestedge[v] != -1:
                    k2 = bestedge[v]
                    d = dualvar[eu[k2]] + dualvar[ev[k2]] - 2.0 * ew[k2]
                    if d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = k2
            for b in range(nb):
                if blossomparent[b] == -1 and label[b] == 1 and bestedge[b] != -1:
                    k2 = bestedge[b]
                    d = (dualvar[eu[k2]] + dualvar[ev[k2]] - 2.0 * ew[k2]) / 2.0
                    if d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = k2
            for b in range(nv, nb):
                if blossombase[b] >= 0 and blossomparent[b] == -1 and label[b] == 2 and dualvar[b] < delta:
                    delta = dualvar[b]
                    deltatype = 4
                    deltablossom = b

            # --- apply delta -------------------------------------------------
            for v in range(nv):
                lb = label[inblossom[v]]
                if lb == 1:
                    dualvar[v] -= delta
                elif lb == 2:
                    dualvar[v] += delta
            for b in range(nv, nb):
                if blossombase[b] >= 0 and blossomparent[b] == -1:
                    if label[b] == 1:
                        dualvar[b] += delta
                    elif label[b] == 2:
                        dualvar[b] -= delta
            cumdelta += delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allowedge[deltaedge] = True
                i3 = eu[deltaedge]
                if label[inblossom[i3]] == 0:
                    i3 = ev[deltaedge]
                queue[nqueue] = i3
                nqueue += 1
            elif deltatype == 3:
                allowedge[deltaedge] = True
                queue[nqueue] = eu[deltaedge]
                nqueue += 1
            else:
                # --- expandBlossom(deltablossom, endstage=False) ------------
                b = deltablossom
                bi = b - nv
                nch = nchilds[bi]
                for ci in range(nch):
                    s = childs[bi, ci]
                    blossomparent[s] = -1
                    if s < nv:
                        inblossom[s] = s
                    else:
                        sp = 0
                        leafstack[sp] = s
                        sp += 1
                        while sp > 0:
                            sp -= 1
                            x = leafstack[sp]
                            if x < nv:
                                inblossom[x] = s
                            else:
                                for ci2 in range(nchilds[x - nv]):
                                    leafstack[sp] = childs[x - nv, ci2]
                                    sp += 1
                if label[b] == 2:
                    # relabel the even path through the dissolved blossom
                    entrychild = inblossom[endpoint[labelend[b] ^ 1]]
                    jj = 0
                    for ci in range(nch):
                        if childs[bi, ci] == entrychild:
                            jj = ci
                            break
                    if jj & 1:
                        jj -= nch
                        jstep = 1
                        endptrick = 0
                    else:
                        jstep = -1
                        endptrick = 1
                    p2 = labelend[b]
                    while jj != 0:
                        label[endpoint[p2 ^ 1]] = 0
                        label[endpoint[endps[bi, (jj - endptrick) % nch] ^ endptrick ^ 1]] = 0
                        ww = endpoint[p2 ^ 1]
                        tt = 2
                        pp = p2
                        while True:
                            bw2 = inblossom[ww]
                            label[ww] = tt
                            label[bw2] = tt
                            labelend[ww] = pp
                            labelend[bw2] = pp
                            bestedge[ww] = -1
                            bestedge[bw2] = -1
                            inv_ss[ww] = INF
                            inv_ss[bw2] = INF
                            if ww < nv:
                                inv_sf[ww] = INF
                            if tt == 1:
                                if bw2 < nv:
                                    queue[nqueue] = bw2
                                    nqueue += 1
                                else:
                                    sp = 0
                                    leafstack[sp] = bw2
                                    sp += 1
                                    while sp > 0:
                                        sp -= 1
                                        x = leafstack[sp]
                                        if x < nv:
                                            queue[nqueue] = x
                                            nqueue += 1
                                        else:
                                            for ci2 in range(nchilds[x - nv]):
                                                leafstack[sp] = childs[x - nv, ci2]
                                                sp += 1
                                break
                            else:
                                base = blossombase[bw2]
                                pm = mate[base]
                                ww = endpoint[pm]
                                tt = 1
                                pp = pm ^ 1
                        allowedge[endps[bi, (jj - endptrick) % nch] >> 1] = True
                        jj += jstep
                        p2 = endps[bi, (jj - endptrick) % nch] ^ endptrick
                        allowedge[p2 >> 1] = True
                        jj += jstep
                    # relabel the base sub-blossom T without recursing
                    bv2 = childs[bi, 0]
                    label[endpoint[p2 ^ 1]] = 2
                    label[bv2] = 2
                    labelend[endpoint[p2 ^ 1]] = p2
                    labelend[bv2] = p2
                    bestedge[bv2] = -1
                    inv_ss[bv2] = INF
                    jj += jstep
                    while childs[bi, jj % nch] != entrychild:
                        bv2 = childs[bi, jj % nch]
                        if label[bv2] == 1:
                            jj += jstep
                            continue
                        vfound = -1
                        sp = 0
                        leafstack[sp] = bv2
                        sp += 1
                        while sp > 0 and vfound < 0:
                            sp -= 1
                            x = leafstack[sp]
                            if x < nv:
                                if label[x] != 0:
                                    vfound = x
                            else:
                                for ci2 in range(nchilds[x - nv]):
                                    leafstack[sp] = childs[x - nv, ci2]
                                    sp += 1
                        if vfound >= 0:
                            label[vfound] = 0
                            label[endpoint[mate[blossombase[bv2]]]] = 0
                            ww = vfound
                            tt = 2
                            pp = labelend[vfound]
                            while True:
                                bw2 = inblossom[ww]
                                label[ww] = tt
                                label[bw2] = tt
                                labelend[ww] = pp
                                labelend[bw2] = pp
                                bestedge[ww] = -1
                                bestedge[bw2] = -1
                                inv_ss[ww] = INF
                                inv_ss[bw2] = INF
                                if ww < nv:
                                    inv_sf[ww] = INF
                                if tt == 1:
                                    if bw2 < nv:
                                        queue[nqueue] = bw2
                                        nqueue += 1
                                    else:
                                        sp = 0
                                        leafstack[sp] = bw2
                                        sp += 1
                                        while sp > 0:
                                            sp -= 1
                                            x = leafstack[sp]
                                            if x < nv:
                                                queue[nqueue] = x
                                                nqueue += 1
                                            else:
                                                for ci2 in range(nchilds[x - nv]):
                                                    leafstack[sp] = childs[x - nv, ci2]
                                                    sp += 1
                                    break
                                else:
                                    base = blossombase[bw2]
                                    pm = mate[base]
                                    ww = endpoint[pm]
                                    tt = 1
                                    pp = pm ^ 1
                        jj += jstep
                # free blossom b
                label[b] = -1
                labelend[b] = -1
                nchilds[bi] = 0
                blossombase[b] = -1
                nbbe[bi] = -1
                bestedge[b] = -1
                inv_ss[b] = INF
                unused[nunused] = b
                nunused += 1

        if not augmented:
            break

        # --- end of stage: expand S-blossoms with zero dual -----------------
        for b in range(nv, nb):
            if blossomparent[b] == -1 and blossombase[b] >= 0 and label[b] == 1 and dualvar[b] == 0.0:
                nd = 0
                dissolve[nd] = b
                nd += 1
                while nd > 0:
                    nd -= 1
                    bb2 = dissolve[nd]
                    bbi = bb2 - nv
                    for ci in range(nchilds[bbi]):
                        s = childs[bbi, ci]
                        blossomparent[s] = -1
                        if s < nv:
                            inblossom[s] = s
                        elif dualvar[s] == 0.0:
                            dissolve[nd] = s
                            nd += 1
                        else:
                            sp = 0
                            leafstack[sp] = s
                            sp += 1
                            while sp > 0:
                                sp -= 1
                                x = leafstack[sp]
                                if x < nv:
                                    inblossom[x] = s
                                else:
                                    for ci2 in range(nchilds[x - nv]):
                                        leafstack[sp] = childs[x - nv, ci2]
                                        sp += 1
                    label[bb2] = -1
                    labelend[bb2] = -1
                    nchilds[bbi] = 0
                    blossombase[bb2] = -1
                    nbbe[bbi] = -1
                    bestedge[bb2] = -1
                    inv_ss[bb2] = INF
                    unused[nunused] = bb2
                    nunused += 1

    partner = np.full(nv, -1, dtype=np.int32)
    for v in range(nv):
        if mate[v] >= 0:
            partner[v] = endpoint[mate[v]]
    return partner, dualvar[:nv].copy()


@njit(cache=True)
def solve_with_duals(nv, eu, ev, ew):
    """Partner array plus final vertex duals (doubled scale).

    The duals certify optimality: for every edge, ``dual[u] + dual[v] +
    (blossom credits) >= 2 w``, with equality on matched edges.  Since
    blossom duals are nonnegative, ``dual[u] + dual[v] >= 2 w`` alone is a
    sufficient optimality certificate for edges outside the solved graph,
    which enables solve-on-pruned-subgraph-then-verify strategies.
    """
    if eu.shape[0] == 0:
        return np.full(nv, -1, dtype=np.int32), np.zeros(nv, dtype=np.float64)
    return _solve(nv, eu, ev, ew)


def blossom_max_weight_matching(nv: int, eu: np.ndarray, ev: np.ndarray, ew: np.ndarray) -> np.ndarray:
    """Partner array of a maximum-weight matching (``-1`` for unmatched).

    ``eu``/``ev`` are int32 vertex indices in ``0..nv-1`` and ``ew`` the
    nonnegative float64 weights.  Deterministic for a fixed edge order.
    """
    if len(eu) == 0:
        return np.full(nv, -1, dtype=np.int32)
    return _solve(nv, eu, ev, ew)[0]
