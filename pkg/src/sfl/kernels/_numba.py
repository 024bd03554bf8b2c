"""numba-compiled versions of the hot loops; same contracts as ``_numpy``."""

import math

import numba
import numpy as np

TWO_PI = 2.0 * math.pi


@numba.njit(cache=True, nogil=True)
def _mask_row(u, Bm):
    N, n = Bm.shape
    re = 0.0
    im = 0.0
    for b in range(N):
        ph = 0.0
        for j in range(n):
            ph += Bm[b, j] * u[j]
        ph -= math.floor(ph)
        re += math.cos(TWO_PI * ph)
        im += math.sin(TWO_PI * ph)
    return complex(re / N, im / N)


@numba.njit(cache=True, nogil=True)
def mask_batch(T, Bm):
    m = T.shape[0]
    out = np.empty(m, dtype=np.complex128)
    for i in range(m):
        out[i] = _mask_row(T[i], Bm)
    return out


@numba.njit(cache=True, nogil=True)
def muhat_batch(T, Rinv_star, Bm, eps, max_depth):
    m, n = T.shape
    prod = np.ones(m, dtype=np.complex128)
    depth = np.zeros(m, dtype=np.int64)
    tail = np.zeros(m, dtype=np.float64)
    u = np.empty(n, dtype=np.float64)
    v = np.empty(n, dtype=np.float64)
    for i in range(m):
        for j in range(n):
            u[j] = T[i, j]
        p = complex(1.0, 0.0)
        k = 0
        while True:
            nrm = 0.0
            for j in range(n):
                a = abs(u[j])
                if a > nrm:
                    nrm = a
            if nrm <= eps or k >= max_depth or p == 0:
                break
            p *= _mask_row(u, Bm)
            for r in range(n):
                acc = 0.0
                for c in range(n):
                    acc += Rinv_star[r, c] * u[c]
                v[r] = acc
            for j in range(n):
                u[j] = v[j]
            k += 1
        prod[i] = p
        depth[i] = k
        tail[i] = nrm
    return prod, depth, tail


@numba.njit(cache=True, nogil=True)
def attractor(Rinv, Bm, k):
    N, n = Bm.shape
    P = Bm.copy()
    for _ in range(k):
        m = P.shape[0]
        moved = np.empty((m, n))
        for i in range(m):
            for r in range(n):
                acc = 0.0
                for c in range(n):
                    acc += Rinv[r, c] * P[i, c]
                moved[i, r] = acc
        Q = np.empty((N * m, n))
        for b in range(N):
            for i in range(m):
                for r in range(n):
                    Q[b * m + i, r] = Bm[b, r] + moved[i, r]
        P = Q
    return P


@numba.njit(cache=True, nogil=True)
def bin_points(XY, x0, x1, y0, y1, width, height):
    counts = np.zeros((height, width), dtype=np.int64)
    for i in range(XY.shape[0]):
        cx = int(math.floor((XY[i, 0] - x0) / (x1 - x0) * width))
        cy = int(math.floor((XY[i, 1] - y0) / (y1 - y0) * height))
        if cx == width:
            cx = width - 1
        if cy == height:
            cy = height - 1
        if 0 <= cx < width and 0 <= cy < height:
            counts[height - 1 - cy, cx] += 1
    return counts


@numba.njit(cache=True, nogil=True)
def discrete_transform(P, w, T):
    m = T.shape[0]
    out = np.empty(m, dtype=np.complex128)
    for i in range(m):
        re = 0.0
        im = 0.0
        for p in range(P.shape[0]):
            ph = 0.0
            for j in range(P.shape[1]):
                ph += P[p, j] * T[i, j]
            ph -= math.floor(ph)
            re += w[p] * math.cos(TWO_PI * ph)
            im += w[p] * math.sin(TWO_PI * ph)
        out[i] = complex(re, im)
    return out
