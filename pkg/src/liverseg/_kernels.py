"""Jitted inner loops for morphology and watershed flooding.

Everything here works on plain 2-D numpy arrays; the public wrappers in
morphology.py / watershed.py handle the image containers, preconditions and
dtype conversions. All algorithms are deterministic: scan order is row-major
and the flood queue breaks priority ties by insertion sequence (FIFO).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _neigh(conn8):
    if conn8:
        dy = np.array([-1, -1, -1, 0, 0, 1, 1, 1], dtype=np.int64)
        dx = np.array([-1, 0, 1, -1, 1, -1, 0, 1], dtype=np.int64)
    else:
        dy = np.array([-1, 0, 0, 1], dtype=np.int64)
        dx = np.array([0, -1, 1, 0], dtype=np.int64)
    return dy, dx


@njit(cache=True)
def recon_dilate(marker, mask, conn8):
    """Geodesic reconstruction by dilation (raster/anti-raster + queue).

    marker, mask: float64 2-D with marker <= mask. Returns the largest image
    below mask reachable by repeated unit dilations of marker, i.e. the
    fixpoint of marker = min(dilate1(marker), mask).
    """
    h, w = marker.shape
    m = marker.copy()

    if conn8:
        fdy = np.array([-1, -1, -1, 0], dtype=np.int64)
        fdx = np.array([-1, 0, 1, -1], dtype=np.int64)
    else:
        fdy = np.array([-1, 0], dtype=np.int64)
        fdx = np.array([0, -1], dtype=np.int64)
    nf = fdy.shape[0]

    # forward raster sweep
    for y in range(h):
        for x in range(w):
            v = m[y, x]
            for k in range(nf):
                ny = y + fdy[k]
                nx = x + fdx[k]
                if 0 <= ny < h and 0 <= nx < w and m[ny, nx] > v:
                    v = m[ny, nx]
            if v > mask[y, x]:
                v = mask[y, x]
            m[y, x] = v

    # anti-raster sweep; pixels that can still propagate go on the queue
    cap = h * w + 16
    queue = np.empty(cap, dtype=np.int64)
    head = 0
    tail = 0
    for y in range(h - 1, -1, -1):
        for x in range(w - 1, -1, -1):
            v = m[y, x]
            for k in range(nf):
                ny = y - fdy[k]
                nx = x - fdx[k]
                if 0 <= ny < h and 0 <= nx < w and m[ny, nx] > v:
                    v = m[ny, nx]
            if v > mask[y, x]:
                v = mask[y, x]
            m[y, x] = v
            for k in range(nf):
                ny = y - fdy[k]
                nx = x - fdx[k]
                if 0 <= ny < h and 0 <= nx < w:
                    if m[ny, nx] < v and m[ny, nx] < mask[ny, nx]:
                        queue[tail] = y * w + x
                        tail += 1
                        break

    dy, dx = _neigh(conn8)
    nn = dy.shape[0]
    while head < tail:
        p = queue[head]
        head += 1
        y = p // w
        x = p % w
        v = m[y, x]
        for k in range(nn):
            ny = y + dy[k]
            nx = x + dx[k]
            if 0 <= ny < h and 0 <= nx < w:
                if m[ny, nx] < v and mask[ny, nx] != m[ny, nx]:
                    nv = v
                    if mask[ny, nx] < nv:
                        nv = mask[ny, nx]
                    if nv > m[ny, nx]:
                        m[ny, nx] = nv
                        if tail == cap:
                            # compact or grow the pending slice
                            pending = tail - head
                            if pending * 2 > cap:
                                ncap = cap * 2
                                nq = np.empty(ncap, dtype=np.int64)
                                nq[:pending] = queue[head:tail]
                                queue = nq
                                cap = ncap
                            else:
                                for i in range(pending):
                                    queue[i] = queue[head + i]
                            tail = pending
                            head = 0
                        queue[tail] = ny * w + nx
                        tail += 1
    return m


@njit(cache=True)
def flood(rank, seeds, conn8):
    """Priority-flood watershed with ridge detection.

    rank:  int64 2-D relief ranks (order statistics of the relief values).
    seeds: int32 2-D, positive entries are marker labels, 0 elsewhere.

    Floods from the markers in (relief rank, insertion sequence) order. A
    pixel first claimed by one flood keeps that claim unless a different
    label also reaches it before it is finalized, in which case it becomes
    ridge (0). Markers are never relabeled; ridge pixels do not spread.
    """
    h, w = rank.shape
    n = h * w
    rflat = rank.ravel()
    sflat = seeds.ravel()

    out = np.zeros(n, dtype=np.int32)
    claim = np.zeros(n, dtype=np.int32)
    conflict = np.zeros(n, dtype=np.uint8)
    done = np.zeros(n, dtype=np.uint8)

    hr = np.empty(n, dtype=np.int64)
    hs = np.empty(n, dtype=np.int64)
    hp = np.empty(n, dtype=np.int64)
    size = 0
    seq = 0

    dy, dx = _neigh(conn8)
    nn = dy.shape[0]

    for p in range(n):
        if sflat[p] > 0:
            out[p] = sflat[p]
            done[p] = 1
            i = size
            hr[i] = rflat[p]
            hs[i] = seq
            hp[i] = p
            seq += 1
            size += 1
            while i > 0:
                par = (i - 1) >> 1
                if hr[i] < hr[par] or (hr[i] == hr[par] and hs[i] < hs[par]):
                    hr[i], hr[par] = hr[par], hr[i]
                    hs[i], hs[par] = hs[par], hs[i]
                    hp[i], hp[par] = hp[par], hp[i]
                    i = par
                else:
                    break

    while size > 0:
        p = hp[0]
        size -= 1
        hr[0] = hr[size]
        hs[0] = hs[size]
        hp[0] = hp[size]
        i = 0
        while True:
            l = 2 * i + 1
            r = l + 1
            sm = i
            if l < size and (hr[l] < hr[sm] or (hr[l] == hr[sm] and hs[l] < hs[sm])):
                sm = l
            if r < size and (hr[r] < hr[sm] or (hr[r] == hr[sm] and hs[r] < hs[sm])):
                sm = r
            if sm == i:
                break
            hr[i], hr[sm] = hr[sm], hr[i]
            hs[i], hs[sm] = hs[sm], hs[i]
            hp[i], hp[sm] = hp[sm], hp[i]
            i = sm

        if done[p] == 0:
            done[p] = 1
            if conflict[p] == 0:
                out[p] = claim[p]
        lab = out[p]
        if lab == 0:
            continue
        y = p // w
        x = p % w
        for k in range(nn):
            ny = y + dy[k]
            nx = x + dx[k]
            if 0 <= ny < h and 0 <= nx < w:
                q = ny * w + nx
                if done[q] == 0:
                    if claim[q] == 0:
                        claim[q] = lab
                        i = size
                        hr[i] = rflat[q]
                        hs[i] = seq
                        hp[i] = q
                        seq += 1
                        size += 1
                        while i > 0:
                            par = (i - 1) >> 1
                            if hr[i] < hr[par] or (hr[i] == hr[par] and hs[i] < hs[par]):
                                hr[i], hr[par] = hr[par], hr[i]
                                hs[i], hs[par] = hs[par], hs[i]
                                hp[i], hp[par] = hp[par], hp[i]
                                i = par
                            else:
                                break
                    elif claim[q] != lab:
                        conflict[q] = 1
    return out.reshape(h, w)


@njit(cache=True)
def extrema(vals, conn8, maxima):
    """Regional extrema by the plateau rule.

    A plateau (equal-value connected component) is a regional maximum iff no
    neighbor of the plateau is strictly greater; minima are the dual. A
    constant image is one plateau and entirely extremal.
    """
    h, w = vals.shape
    n = h * w
    v = vals.ravel()
    out = np.zeros(n, dtype=np.uint8)
    visited = np.zeros(n, dtype=np.uint8)
    stack = np.empty(n, dtype=np.int64)
    plateau = np.empty(n, dtype=np.int64)

    dy, dx = _neigh(conn8)
    nn = dy.shape[0]

    for p0 in range(n):
        if visited[p0] == 1:
            continue
        val = v[p0]
        visited[p0] = 1
        stack[0] = p0
        top = 1
        cnt = 0
        is_ext = True
        while top > 0:
            top -= 1
            p = stack[top]
            plateau[cnt] = p
            cnt += 1
            y = p // w
            x = p % w
            for k in range(nn):
                ny = y + dy[k]
                nx = x + dx[k]
                if 0 <= ny < h and 0 <= nx < w:
                    q = ny * w + nx
                    if v[q] == val:
                        if visited[q] == 0:
                            visited[q] = 1
                            stack[top] = q
                            top += 1
                    elif maxima:
                        if v[q] > val:
                            is_ext = False
                    else:
                        if v[q] < val:
                            is_ext = False
        if is_ext:
            for i in range(cnt):
                out[plateau[i]] = 1
    return out.reshape(h, w)


@njit(cache=True)
def label_mask(mask, conn8):
    """Connected components of a boolean mask, labeled 1..k in row-major
    order of first encounter. Returns (int32 labels, k)."""
    h, w = mask.shape
    n = h * w
    m = mask.ravel()
    lab = np.zeros(n, dtype=np.int32)
    stack = np.empty(n, dtype=np.int64)

    dy, dx = _neigh(conn8)
    nn = dy.shape[0]

    cur = 0
    for p0 in range(n):
        if m[p0] and lab[p0] == 0:
            cur += 1
            lab[p0] = cur
            stack[0] = p0
            top = 1
            while top > 0:
                top -= 1
                p = stack[top]
                y = p // w
                x = p % w
                for k in range(nn):
                    ny = y + dy[k]
                    nx = x + dx[k]
                    if 0 <= ny < h and 0 <= nx < w:
                        q = ny * w + nx
                        if m[q] and lab[q] == 0:
                            lab[q] = cur
                            stack[top] = q
                            top += 1
    return lab.reshape(h, w), cur


@njit(cache=True)
def edt_sq(fg):
    """Exact squared Euclidean distance to the nearest zero of ``fg``.

    Two-pass algorithm: per-column nearest-background runs, then per-row
    lower envelopes of the induced parabolas. Integer arithmetic end to end,
    so results are exact. Caller guarantees a background pixel exists.
    """
    h, w = fg.shape
    big = np.int64(w + h)

    g = np.empty((h, w), dtype=np.int64)
    for x in range(w):
        g[0, x] = 0 if fg[0, x] == 0 else big
        for y in range(1, h):
            if fg[y, x] == 0:
                g[y, x] = 0
            else:
                g[y, x] = g[y - 1, x] + 1 if g[y - 1, x] < big else big
        for y in range(h - 2, -1, -1):
            if g[y + 1, x] + 1 < g[y, x]:
                g[y, x] = g[y + 1, x] + 1

    out = np.empty((h, w), dtype=np.int64)
    s = np.empty(w, dtype=np.int64)
    t = np.empty(w, dtype=np.int64)
    for y in range(h):
        q = 0
        s[0] = 0
        t[0] = 0
        for u in range(1, w):
            while q >= 0:
                tq = t[q]
                sq = s[q]
                fa = (tq - sq) * (tq - sq) + g[y, sq] * g[y, sq]
                fb = (tq - u) * (tq - u) + g[y, u] * g[y, u]
                if fa <= fb:
                    break
                q -= 1
            if q < 0:
                q = 0
                s[0] = u
            else:
                sq = s[q]
                sep = (u * u - sq * sq + g[y, u] * g[y, u] - g[y, sq] * g[y, sq]) // (
                    2 * (u - sq)
                )
                if sep + 1 <= w - 1:
                    q += 1
                    s[q] = u
                    t[q] = sep + 1
        for u in range(w - 1, -1, -1):
            sq = s[q]
            out[y, u] = (u - sq) * (u - sq) + g[y, sq] * g[y, sq]
            if q > 0 and u == t[q]:
                q -= 1
    return out
