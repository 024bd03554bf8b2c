"""Pure-numpy implementations of the hot loops."""

import numpy as np

TWO_PI = 2.0 * np.pi


def mask_batch(T, Bm):
    """Mean over digits of exp(2 pi i b.t) for each row t of T."""
    phase = T @ Bm.T
    phase -= np.floor(phase)
    return np.exp(1j * TWO_PI * phase).mean(axis=1)


def muhat_batch(T, Rinv_star, Bm, eps, max_depth):
    """Truncated product of masks along t, R*^-1 t, R*^-2 t, ...

    Returns (product, depth, sup-norm of the remaining argument).
    """
    U = np.array(T, dtype=np.float64, copy=True)
    m = U.shape[0]
    prod = np.ones(m, dtype=np.complex128)
    depth = np.zeros(m, dtype=np.int64)
    active = np.abs(U).max(axis=1) > eps if U.shape[1] else np.zeros(m, dtype=bool)
    for _ in range(max_depth):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        prod[idx] *= mask_batch(U[idx], Bm)
        U[idx] = U[idx] @ Rinv_star.T
        depth[idx] += 1
        still = (np.abs(U[idx]).max(axis=1) > eps) & (prod[idx] != 0)
        active[idx] = still
    tail = np.abs(U).max(axis=1)
    return prod, depth, tail


def attractor(Rinv, Bm, k):
    """All sums sum_{i<=k} R^-i b_i; row index has b_0 as the most significant digit."""
    P = Bm.copy()
    for _ in range(k):
        moved = P @ Rinv.T
        P = (Bm[:, None, :] + moved[None, :, :]).reshape(-1, Bm.shape[1])
    return P


def bin_points(XY, x0, x1, y0, y1, width, height):
    counts = np.zeros((height, width), dtype=np.int64)
    if XY.shape[0] == 0:
        return counts
    cx = np.floor((XY[:, 0] - x0) / (x1 - x0) * width).astype(np.int64)
    cy = np.floor((XY[:, 1] - y0) / (y1 - y0) * height).astype(np.int64)
    cx = np.where(cx == width, width - 1, cx)
    cy = np.where(cy == height, height - 1, cy)
    ok = (cx >= 0) & (cx < width) & (cy >= 0) & (cy < height)
    # row 0 is the top of the image
    np.add.at(counts, (height - 1 - cy[ok], cx[ok]), 1)
    return counts


def discrete_transform(P, w, T):
    phase = T @ P.T
    phase -= np.floor(phase)
    return np.exp(1j * TWO_PI * phase) @ w
