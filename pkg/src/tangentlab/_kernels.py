"""Compiled kernels: exact squared distance transform and deep rasterization.

Integer arithmetic everywhere exactness matters; fastmath stays off so float
operations are plain IEEE and bit-reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def edt_sq(occ):
    """Exact squared Euclidean distance (in cell index units) to the nearest
    occupied cell, separable two-pass. occ is bool[N1, N2]; the second axis is
    scanned first (per-column nearest), then a lower envelope of parabolas
    resolves the first axis. Empty columns use a sentinel distance larger than
    the grid diameter, so they never win against a real site."""
    n1, n2 = occ.shape
    sentinel = n1 + n2
    g = np.empty((n1, n2), np.int64)
    for i in range(n1):
        d = sentinel
        for j in range(n2):
            if occ[i, j]:
                d = 0
            elif d < sentinel:
                d += 1
            g[i, j] = d
        d = sentinel
        for j in range(n2 - 1, -1, -1):
            if occ[i, j]:
                d = 0
            elif d < sentinel:
                d += 1
            if d < g[i, j]:
                g[i, j] = d

    out = np.empty((n1, n2), np.int64)
    v = np.empty(n1, np.int64)
    z = np.empty(n1 + 1, np.float64)
    f = np.empty(n1, np.int64)
    for j in range(n2):
        for i in range(n1):
            gi = g[i, j]
            f[i] = gi * gi
        k = 0
        v[0] = 0
        z[0] = -1e30
        z[1] = 1e30
        for i in range(1, n1):
            fi = f[i] + i * i
            while True:
                vk = v[k]
                s = (fi - (f[vk] + vk * vk)) / (2.0 * (i - vk))
                if s <= z[k]:
                    k -= 1
                else:
                    break
            k += 1
            v[k] = i
            z[k] = s
            z[k + 1] = 1e30
        k = 0
        for i in range(n1):
            while z[k + 1] < i:
                k += 1
            di = i - v[k]
            out[i, j] = di * di + f[v[k]]
    return out


@njit(cache=True, nogil=True)
def raster_cover(rf, sf, af, bf, c1, c2, t, n_grid, width_stop, depth_cap):
    """Occupancy of the window [c1 +- t/2] x [c2 +- t/2] by the cylinder tree,
    rasterized at n_grid x n_grid in window coordinates.

    Depth-first descent; a cylinder is painted once its width drops to
    width_stop (heights are always smaller than widths, so painted pieces fit
    in about a cell) or the depth cap is hit. Cell marking is the closed-set
    rule: a cell is occupied when its closed square meets the clipped piece.
    """
    m = rf.shape[0]
    half = t / 2.0
    wx0 = c1 - half
    wx1 = c1 + half
    wy0 = c2 - half
    wy1 = c2 + half
    out = np.zeros((n_grid, n_grid), np.bool_)
    cap = depth_cap * m + 2
    st_r = np.empty(cap, np.float64)
    st_s = np.empty(cap, np.float64)
    st_a = np.empty(cap, np.float64)
    st_b = np.empty(cap, np.float64)
    st_d = np.empty(cap, np.int64)
    st_r[0] = 1.0
    st_s[0] = 1.0
    st_a[0] = 0.0
    st_b[0] = 0.0
    st_d[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        R = st_r[sp]
        S = st_s[sp]
        A = st_a[sp]
        B = st_b[sp]
        d = st_d[sp]
        x1 = A + R
        y1 = B + S
        if A > wx1 or x1 < wx0 or B > wy1 or y1 < wy0:
            continue
        if R <= width_stop or d >= depth_cap:
            cx0 = A if A > wx0 else wx0
            cx1 = x1 if x1 < wx1 else wx1
            cy0 = B if B > wy0 else wy0
            cy1 = y1 if y1 < wy1 else wy1
            xn0 = (cx0 - c1) / t + 0.5
            xn1 = (cx1 - c1) / t + 0.5
            yn0 = (cy0 - c2) / t + 0.5
            yn1 = (cy1 - c2) / t + 0.5
            i0 = int(np.ceil(xn0 * n_grid - 1.0))
            i1 = int(np.floor(xn1 * n_grid))
            j0 = int(np.ceil(yn0 * n_grid - 1.0))
            j1 = int(np.floor(yn1 * n_grid))
            if i0 < 0:
                i0 = 0
            if j0 < 0:
                j0 = 0
            if i1 > n_grid - 1:
                i1 = n_grid - 1
            if j1 > n_grid - 1:
                j1 = n_grid - 1
            for ii in range(i0, i1 + 1):
                for jj in range(j0, j1 + 1):
                    out[ii, jj] = True
            continue
        for k in range(m):
            st_a[sp] = A + R * af[k]
            st_b[sp] = B + S * bf[k]
            st_r[sp] = R * rf[k]
            st_s[sp] = S * sf[k]
            st_d[sp] = d + 1
            sp += 1
    return out
