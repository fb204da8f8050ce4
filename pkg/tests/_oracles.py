"""Brute-force reference implementations used to cross-check the package.

Everything here favors clarity over speed: per-pixel python loops, explicit
fixpoint iteration, all-pairs scans. Keep the inputs small.
"""
from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# flat min/max filters


def erode_naive(a: np.ndarray, offsets, oob: int = 255) -> np.ndarray:
    h, w = a.shape
    out = np.empty_like(a)
    for y in range(h):
        for x in range(w):
            best = oob
            for dy, dx in offsets:
                yy, xx = y + dy, x + dx
                v = a[yy, xx] if 0 <= yy < h and 0 <= xx < w else oob
                if v < best:
                    best = v
            out[y, x] = best
    return out


def dilate_naive(a: np.ndarray, offsets, oob: int = 0) -> np.ndarray:
    h, w = a.shape
    out = np.empty_like(a)
    for y in range(h):
        for x in range(w):
            best = oob
            for dy, dx in offsets:
                yy, xx = y + dy, x + dx
                v = a[yy, xx] if 0 <= yy < h and 0 <= xx < w else oob
                if v > best:
                    best = v
            out[y, x] = best
    return out


def unit_offsets(conn: int):
    if conn == 8:
        return [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1)]
    return [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)]


def reconstruct_dilation_naive(marker: np.ndarray, mask: np.ndarray, conn: int) -> np.ndarray:
    offs = unit_offsets(conn)
    cur = marker.astype(np.int64)
    m = mask.astype(np.int64)
    while True:
        nxt = np.minimum(dilate_naive(cur, offs, oob=0), m)
        if np.array_equal(nxt, cur):
            return cur.astype(marker.dtype)
        cur = nxt


def reconstruct_erosion_naive(marker: np.ndarray, mask: np.ndarray, conn: int) -> np.ndarray:
    offs = unit_offsets(conn)
    cur = marker.astype(np.int64)
    m = mask.astype(np.int64)
    while True:
        nxt = np.maximum(erode_naive(cur, offs, oob=255), m)
        if np.array_equal(nxt, cur):
            return cur.astype(marker.dtype)
        cur = nxt


# ---------------------------------------------------------------------------
# regional extrema by plateau enumeration


def regional_extrema_naive(a: np.ndarray, conn: int, maxima: bool) -> np.ndarray:
    h, w = a.shape
    offs = [o for o in unit_offsets(conn) if o != (0, 0)]
    seen = np.zeros((h, w), dtype=bool)
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            if seen[y, x]:
                continue
            val = a[y, x]
            plateau = [(y, x)]
            seen[y, x] = True
            i = 0
            qualifies = True
            while i < len(plateau):
                py, px = plateau[i]
                i += 1
                for dy, dx in offs:
                    ny, nx = py + dy, px + dx
                    if not (0 <= ny < h and 0 <= nx < w):
                        continue
                    nv = a[ny, nx]
                    if nv == val:
                        if not seen[ny, nx]:
                            seen[ny, nx] = True
                            plateau.append((ny, nx))
                    elif (nv > val) if maxima else (nv < val):
                        qualifies = False
            if qualifies:
                for py, px in plateau:
                    out[py, px] = True
    return out


# ---------------------------------------------------------------------------
# exact distances, the slow way


def distance_naive(fg: np.ndarray) -> np.ndarray:
    h, w = fg.shape
    bg = np.argwhere(~fg)
    out = np.zeros((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            if not fg[y, x]:
                continue
            if bg.size == 0:
                out[y, x] = float(w + h)
                continue
            d2 = (bg[:, 0] - y) ** 2 + (bg[:, 1] - x) ** 2
            out[y, x] = np.sqrt(float(d2.min()))
    return out


# ---------------------------------------------------------------------------
# Sobel with replicated border


def sobel_naive(img: np.ndarray) -> np.ndarray:
    kx = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
    ky = kx.T
    h, w = img.shape
    pad = np.pad(img.astype(np.float64), 1, mode="edge")
    out = np.zeros((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            win = pad[y : y + 3, x : x + 3]
            gx = float((win * kx).sum())
            gy = float((win * ky).sum())
            out[y, x] = np.hypot(gx, gy)
    return out


# ---------------------------------------------------------------------------
# Otsu by direct evaluation of every split


def otsu_naive(hist: np.ndarray):
    """Return (threshold, best_sigma) via the definition, no cumulants."""
    counts = hist.astype(np.float64)
    total = counts.sum()
    occupied = np.nonzero(counts)[0]
    if occupied.size == 1:
        return int(occupied[0]), 0.0
    levels = np.arange(256, dtype=np.float64)
    scores = np.zeros(255, dtype=np.float64)
    for t in range(255):
        c0 = counts[: t + 1]
        c1 = counts[t + 1 :]
        n0, n1 = c0.sum(), c1.sum()
        if n0 == 0.0 or n1 == 0.0:
            continue
        mu0 = float((levels[: t + 1] * c0).sum() / n0)
        mu1 = float((levels[t + 1 :] * c1).sum() / n1)
        scores[t] = (n0 / total) * (n1 / total) * (mu0 - mu1) ** 2
    best = scores.max()
    ties = np.nonzero(scores == best)[0]
    return int(ties.sum()) // int(ties.size), float(best)


# ---------------------------------------------------------------------------
# one analysis level of the separable periodized filter bank


def _analyze_axis_naive(a: np.ndarray, lo, hi) -> tuple[np.ndarray, np.ndarray]:
    """Filter+decimate the LAST axis with periodic indexing, python loops."""
    n = a.shape[-1]
    half = n // 2
    taps = len(lo)
    ca = np.zeros(a.shape[:-1] + (half,), dtype=np.float64)
    cd = np.zeros_like(ca)
    for k in range(half):
        sa = np.zeros(a.shape[:-1], dtype=np.float64)
        sd = np.zeros_like(sa)
        for m in range(taps):
            col = a[..., (2 * k + m) % n]
            sa = sa + lo[m] * col
            sd = sd + hi[m] * col
        ca[..., k] = sa
        cd[..., k] = sd
    return ca, cd


def dwt2_level_naive(x: np.ndarray, lo, hi):
    """One 2-D level: rows then columns; input dims must be even.

    Returns (LL, LH, HL, HH) with LH = row-lowpass/column-highpass.
    """
    rl, rh = _analyze_axis_naive(x, lo, hi)
    ll, lh = _analyze_axis_naive(rl.swapaxes(0, 1), lo, hi)
    hl, hh = _analyze_axis_naive(rh.swapaxes(0, 1), lo, hi)
    return (
        ll.swapaxes(0, 1),
        lh.swapaxes(0, 1),
        hl.swapaxes(0, 1),
        hh.swapaxes(0, 1),
    )


# ---------------------------------------------------------------------------
# independent transcription of the 64-bit generator


def _rotl64(v: int, k: int) -> int:
    return ((v << k) | (v >> (64 - k))) & _MASK64


def splitmix64_naive(seed: int):
    state = seed & _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def xoshiro256pp_naive(seed: int):
    sm = splitmix64_naive(seed)
    s = [next(sm) for _ in range(4)]
    if s[0] == s[1] == s[2] == s[3] == 0:
        s[0] = 1
    while True:
        yield (_rotl64((s[0] + s[3]) & _MASK64, 23) + s[0]) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl64(s[3], 45)


def gaussians_naive(seed: int, n: int) -> np.ndarray:
    """Box-Muller pairs in stream order, spare of an odd count discarded."""
    gen = xoshiro256pp_naive(seed)
    out = np.empty(n, dtype=np.float64)
    i = 0
    while i < n:
        u1 = ((next(gen) >> 11) + 1) * 2.0**-53
        u2 = (next(gen) >> 11) * 2.0**-53
        r = math.sqrt(-2.0 * math.log(u1))
        out[i] = r * math.cos(2.0 * math.pi * u2)
        i += 1
        if i < n:
            out[i] = r * math.sin(2.0 * math.pi * u2)
            i += 1
    return out
