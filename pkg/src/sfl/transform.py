"""The self-similar measure side: mask, Fourier transform, attractors.

The transform of the invariant measure obeys mu^(t) = mask(t) mu^(R*^-1 t),
so it is evaluated as a finite product of masks along the contracting orbit
t, R*^-1 t, R*^-2 t, ...  The neglected tail satisfies

    |mu^(u) - 1| <= 2 pi sup_x |u.x| <= C ||u||_inf,

with C = 2 pi max_b ||b||_1 sum_i ||R^-i||_1, which gives the reported
error bound.  Arguments passed as exact rationals additionally get an exact
short-circuit: when some mask factor along the orbit is a vanishing sum of
roots of unity the value is exactly zero.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import BadViewport, BudgetExceeded, NotSimilarity
from .hadamard import frac_part, root_sum_vanishes
from .ratlat import RatMatrix, as_matrix, dot, rat

DEFAULT_EPS_STOP = 1e-9
DEFAULT_MAX_DEPTH = 200
DEFAULT_ZERO_TOL = 1e-8
DEFAULT_MAX_POINTS = 2_000_000


def max_points() -> int:
    return int(os.environ.get("SFL_MAX_POINTS", DEFAULT_MAX_POINTS))


def _is_exact(t) -> bool:
    return all(isinstance(x, (int, Fraction, str)) and not isinstance(x, bool) for x in t)


def _as_float_rows(T, n: int) -> np.ndarray:
    arr = np.array([[float(x) for x in row] for row in T], dtype=np.float64) if not isinstance(T, np.ndarray) else T
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, n) if n > 1 else arr.reshape(-1, 1)
    return arr


# ---------------------------------------------------------------------------
# mask


class MaskEvaluator:
    """t -> |B|^-1 sum_b exp(2 pi i b.t)."""

    def __init__(self, B: Sequence):
        self.B = tuple(tuple(rat(x) for x in b) for b in B)
        if not self.B:
            raise ValueError("empty digit set")
        self.N = len(self.B)
        self.n = len(self.B[0])
        self.Bf = np.array([[float(x) for x in b] for b in self.B], dtype=np.float64)

    def __call__(self, t) -> complex:
        return complex(self.batch(np.asarray([[float(x) for x in t]]))[0])

    def batch(self, T) -> np.ndarray:
        return kernels.mask_batch(_as_float_rows(T, self.n), self.Bf)

    def exponents(self, t) -> list:
        t = tuple(rat(x) for x in t)
        return [frac_part(dot(b, t)) for b in self.B]

    def is_exact_zero(self, t) -> Optional[bool]:
        """Exact decision for rational t (None if the root order is too large)."""
        return root_sum_vanishes(self.exponents(t))


def mask(B, t) -> complex:
    return MaskEvaluator(B)(t)


# ---------------------------------------------------------------------------
# mu-hat


@dataclass(frozen=True)
class MuHat:
    value: complex
    bound: float
    depth: int
    exact_zero_level: Optional[int] = None

    def to_json(self, t) -> dict:
        return {
            "t": [str(x) if isinstance(x, Fraction) else x for x in t],
            "re": float(self.value.real),
            "im": float(self.value.imag),
            "bound": float(self.bound),
            "depth": int(self.depth),
            "exact_zero_level": self.exact_zero_level,
        }


def _induced_one_norm(A: np.ndarray) -> float:
    return float(np.abs(A).sum(axis=0).max())


def contraction_data(R) -> tuple:
    """(S, rho) with sum_i ||R^-i||_1 <= S and rho an asymptotic contraction rate.

    Finds p with q = ||R^-p||_1 < 1 and bounds the series by
    (sum_{i<p} ||R^-i||_1) / (1 - q).
    """
    Rinv = np.linalg.inv(as_matrix(R).to_float())
    P = np.eye(Rinv.shape[0])
    partial = 0.0
    for p in range(1, 4096):
        partial += _induced_one_norm(P)
        P = P @ Rinv
        q = _induced_one_norm(P)
        if q < 0.5 or (q < 1 and p > 64):
            S = partial / (1.0 - q) * (1 + 1e-12)
            return S, q ** (1.0 / p)
    raise ValueError("R is not expansive (no contracting power found)")


class MuHatEvaluator:
    """Evaluates mu^ for the invariant measure of (R, B)."""

    def __init__(self, R, B: Sequence, eps_stop: float = DEFAULT_EPS_STOP, max_depth: int = DEFAULT_MAX_DEPTH):
        if eps_stop <= 0:
            raise ValueError("eps_stop must be positive")
        self.R = as_matrix(R)
        self.mask = MaskEvaluator(B)
        self.B = self.mask.B
        self.N = self.mask.N
        self.n = self.R.nrows
        self.eps_stop = float(eps_stop)
        self.max_depth = int(max_depth)
        self.R_star_inv = self.R.T.inv()
        self.Rsi_f = self.R_star_inv.to_float()
        self.Rinv_f = self.R.inv().to_float()
        S, rho = contraction_data(self.R)
        self.rho = rho
        self.series = S
        self.max_digit_l1 = max(sum(abs(float(x)) for x in b) for b in self.B)
        self.tail_constant = 2.0 * math.pi * self.max_digit_l1 * S

    @classmethod
    def for_system(cls, s, **kw) -> "MuHatEvaluator":
        return cls(s.R, s.B, **kw)

    def _bounds(self, prod, depth, tail, tnorm):
        trunc = np.minimum(2.0, self.tail_constant * tail)
        # rounding: each factor is off by a few ulp of its phase 2 pi b.u_j, and
        # sum_j |b.u_j| <= tail_constant/(2 pi) * ||t||; factors are bounded by 1
        rounding = 4e-16 * (depth + 1) * (1.0 + self.tail_constant * tnorm)
        return np.abs(prod) * trunc + np.where(depth > 0, rounding, 0.0)

    def batch(self, T) -> tuple:
        """Numeric evaluation at each row of T; returns (values, bounds, depths)."""
        T = _as_float_rows(T, self.n)
        prod, depth, tail = kernels.muhat_batch(T, self.Rsi_f, self.mask.Bf, self.eps_stop, self.max_depth)
        tnorm = np.abs(T).max(axis=1) if T.shape[0] else np.zeros(0)
        return prod, self._bounds(prod, depth, tail, tnorm), depth

    def exact_zero_level(self, t, depth: Optional[int] = None) -> Optional[int]:
        """Least j with mask(R*^-j t) an exact vanishing root sum, for rational t."""
        u = tuple(rat(x) for x in t)
        limit = self.max_depth if depth is None else depth
        for j in range(limit + 1):
            if not any(u):
                return None
            if self.mask.is_exact_zero(u):
                return j
            u = self.R_star_inv @ u
        return None

    def __call__(self, t) -> MuHat:
        t = tuple(t)
        values, bounds, depths = self.batch(np.array([[float(x) for x in t]]))
        val, bnd, dep = complex(values[0]), float(bounds[0]), int(depths[0])
        if _is_exact(t):
            lvl = self.exact_zero_level(t, dep)
            if lvl is not None:
                return MuHat(0j, 0.0, lvl + 1, lvl)
        return MuHat(val, bnd, dep)

    muhat = __call__

    def inner_product(self, s, t) -> complex:
        """<e_s, e_t> in L^2(mu) = mu^(t - s)."""
        return self(_sub(t, s)).value

    def gram(self, freqs: Sequence) -> tuple:
        """Gram matrix G[i, j] = <e_{f_i}, e_{f_j}> with matching bounds."""
        F = np.array([[float(x) for x in f] for f in freqs], dtype=np.float64)
        m = F.shape[0]
        D = (F[None, :, :] - F[:, None, :]).reshape(m * m, self.n)
        vals, bnds, _ = self.batch(D)
        return vals.reshape(m, m), bnds.reshape(m, m)


def _sub(t, s):
    if _is_exact(t) and _is_exact(s):
        return tuple(rat(a) - rat(b) for a, b in zip(t, s))
    return tuple(float(a) - float(b) for a, b in zip(t, s))


def muhat(R, B, t, **kw) -> MuHat:
    return MuHatEvaluator(R, B, **kw)(t)


def inner_product(R, B, s, t, **kw) -> complex:
    return MuHatEvaluator(R, B, **kw).inner_product(s, t)


# ---------------------------------------------------------------------------
# attractor and discrete measures


@dataclass(frozen=True)
class AttractorCloud:
    depth: int
    points: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.points.shape[0]

    def to_csv(self) -> str:
        n = self.points.shape[1]
        lines = [",".join([f"x{i + 1}" for i in range(n)] + ["weight"])]
        for p, w in zip(self.points, self.weights):
            lines.append(",".join(repr(float(x)) for x in p) + "," + repr(float(w)))
        return "\n".join(lines) + "\n"


def admissible_depth(N: int, budget: int) -> int:
    k = 0
    while N ** (k + 2) <= budget:
        k += 1
    return k


def attractor_points(R, B, k: int, dedup: bool = False) -> AttractorCloud:
    """All sums sum_{i=0}^k R^-i b_i with uniform weights N^-(k+1)."""
    if k < 0:
        raise ValueError("depth must be nonnegative")
    Bf = np.array([[float(x) for x in b] for b in B], dtype=np.float64)
    N = Bf.shape[0]
    budget = max_points()
    if N ** (k + 1) > budget:
        adm = admissible_depth(N, budget)
        raise BudgetExceeded(f"{N}^{k + 1} points exceed budget {budget}; max depth {adm}", adm)
    P = kernels.attractor(as_matrix(R).inv().to_float(), Bf, k)
    w = np.full(P.shape[0], float(N) ** -(k + 1))
    if dedup:
        key = np.round(P, 12)
        _, idx, counts = np.unique(key, axis=0, return_index=True, return_counts=True)
        order = np.argsort(idx)
        P = P[idx[order]]
        w = counts[order] * float(N) ** -(k + 1)
    return AttractorCloud(k, P, w)


def attractor_points_exact(R, B, k: int) -> list:
    """Exact rational digit-string points, b_0 most significant; small k only."""
    Rinv = as_matrix(R).inv()
    B = [tuple(rat(x) for x in b) for b in B]
    if len(B) ** (k + 1) > 200_000:
        raise BudgetExceeded("exact attractor too large", admissible_depth(len(B), 200_000))
    pts = list(B)
    for _ in range(k):
        moved = [Rinv @ p for p in pts]
        pts = [tuple(a + c for a, c in zip(b, m)) for b in B for m in moved]
    return pts


@dataclass(frozen=True)
class DiscreteMeasure:
    points: np.ndarray
    weights: np.ndarray

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def transform(self, T) -> np.ndarray:
        """sum_x w_x exp(2 pi i x.t) for each row t.

        For the level-k measure this equals prod_{j=0}^{k} mask(R*^-j t): the
        infinite product with the tail factor mu^(R*^-(k+1) t) replaced by 1
        (the iteration starts from the point mass at 0).
        """
        T = _as_float_rows(T, self.points.shape[1])
        return kernels.discrete_transform(self.points, self.weights, T)


def measure_level(R, B, k: int) -> DiscreteMeasure:
    cloud = attractor_points(R, B, k)
    return DiscreteMeasure(cloud.points, cloud.weights)


def cell_masses(R, B, cell_depth: int, depth: int, atol: float = 1e-12) -> dict:
    """Mass of each cell sigma_w X at a finite level, with a geometric check.

    The level-``depth`` cloud is split by digit prefix w of length
    ``cell_depth``; each part must coincide with sigma_w applied to the
    level-``depth - cell_depth`` cloud.  Returns prefix -> mass.
    """
    if not 1 <= cell_depth <= depth + 1:
        raise ValueError("need 1 <= cell_depth <= depth + 1")
    N = len(B)
    full = attractor_points(R, B, depth)
    Rinv = as_matrix(R).inv()
    inner = attractor_points(R, B, depth - cell_depth).points if cell_depth <= depth else np.zeros((1, len(B[0])))
    block = N ** (depth + 1 - cell_depth)
    masses = {}
    for idx in range(N**cell_depth):
        digits = []
        rem = idx
        for _ in range(cell_depth):
            digits.append(rem % N)
            rem //= N
        digits = tuple(reversed(digits))
        # sigma_{b_0} ... sigma_{b_{c-1}} x = sum_i R^-i b_i + R^-c x
        offset = [Fraction(0)] * len(B[0])
        Rp = RatMatrix.identity(len(B[0]))
        for d in digits:
            offset = [o + v for o, v in zip(offset, Rp @ tuple(rat(x) for x in B[d]))]
            Rp = Rp @ Rinv
        expected = inner @ Rp.to_float().T + np.array([float(o) for o in offset])
        part = full.points[idx * block : (idx + 1) * block]
        if not np.allclose(part, expected, atol=atol, rtol=0):
            raise AssertionError(f"cell {digits} does not match sigma_w of the shallower cloud")
        masses[digits] = float(full.weights[idx * block : (idx + 1) * block].sum())
    return masses


def digit_points_distinct(R, B, k: int) -> bool:
    """No-overlap proxy: the N^(k+1) digit-string points are pairwise distinct (exact)."""
    pts = attractor_points_exact(R, B, k)
    return len(set(pts)) == len(pts)


# ---------------------------------------------------------------------------
# zeros and dimension


def explain_zero(R, B, t, zero_tol: float = DEFAULT_ZERO_TOL, max_depth: int = DEFAULT_MAX_DEPTH) -> Optional[int]:
    """Least j with |mask(R*^-j t)| < zero_tol, or None."""
    m = MaskEvaluator(B)
    Rsi = as_matrix(R).T.inv().to_float()
    u = np.array([float(x) for x in t], dtype=np.float64)
    for j in range(max_depth + 1):
        if abs(m.batch(u[None, :])[0]) < zero_tol:
            return j
        if np.abs(u).max() <= DEFAULT_EPS_STOP:
            return None
        u = Rsi @ u
    return None


def explain_zero_batch(R, B, T, zero_tol: float = DEFAULT_ZERO_TOL, max_depth: int = DEFAULT_MAX_DEPTH) -> np.ndarray:
    """Vectorized explain_zero; -1 marks 'no root found'."""
    m = MaskEvaluator(B)
    Rsi = as_matrix(R).T.inv().to_float()
    U = _as_float_rows(T, m.n).copy()
    out = np.full(U.shape[0], -1, dtype=np.int64)
    for j in range(max_depth + 1):
        open_ = out < 0
        if not open_.any():
            break
        idx = np.nonzero(open_)[0]
        hit = np.abs(m.batch(U[idx])) < zero_tol
        out[idx[hit]] = j
        U = U @ Rsi.T
    return out


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def fractal_dimension(R, B) -> float:
    """ln N / ln r for a similarity R (R^T R = r^2 I, r > 1)."""
    R = as_matrix(R)
    n = R.nrows
    G = R.T @ R
    c = G[0, 0]
    if G != RatMatrix.scalar(n, c) or c <= 1:
        raise NotSimilarity("dimension formula requires R^T R = r^2 I with r > 1")
    r = _rational_sqrt(c)
    log_r = math.log(r) if r is not None else 0.5 * math.log(c)
    return math.log(len(B)) / log_r


# ---------------------------------------------------------------------------
# rendering


def render(cloud: AttractorCloud, width: int, height: int, bbox=None) -> np.ndarray:
    """Binary occupancy raster (uint8, 255 = occupied), row 0 at the top.

    1-D clouds render as a strip; 3-D clouds are projected onto (x1, x2).
    ``bbox`` is (xmin, xmax, ymin, ymax); for 1-D, (xmin, xmax) suffices.
    """
    if width < 1 or height < 1:
        raise BadViewport("raster must be at least 1x1")
    P = cloud.points
    n = P.shape[1] if P.ndim == 2 else 1
    if n > 3:
        raise ValueError("render supports dimensions 1 to 3")
    if bbox is None:
        if len(P) == 0:
            bbox = (0.0, 1.0, 0.0, 1.0)
        else:
            lo, hi = P.min(axis=0), P.max(axis=0)
            pad = np.where(hi - lo > 0, 0.02 * (hi - lo), 0.5)
            lo, hi = lo - pad, hi + pad
            bbox = (lo[0], hi[0], lo[1] if n > 1 else 0.0, hi[1] if n > 1 else 1.0)
    bbox = tuple(float(x) for x in bbox)
    if len(bbox) == 2:
        bbox = bbox + (0.0, 1.0)
    x0, x1, y0, y1 = bbox
    if not (x1 > x0 and y1 > y0):
        raise BadViewport(f"empty bounding box {bbox}")
    if n == 1:
        XY = np.column_stack([P[:, 0], np.full(len(P), 0.5 * (y0 + y1))]) if len(P) else np.zeros((0, 2))
        counts = kernels.bin_points(XY, x0, x1, y0, y1, width, height)
        cols = counts.sum(axis=0) > 0
        counts = np.broadcast_to(cols, (height, width))
    else:
        counts = kernels.bin_points(P[:, :2] if len(P) else np.zeros((0, 2)), x0, x1, y0, y1, width, height)
    return np.where(counts > 0, 255, 0).astype(np.uint8)


def pgm_bytes(grid: np.ndarray) -> bytes:
    h, w = grid.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(grid, dtype=np.uint8).tobytes()


def read_pgm(data: bytes) -> np.ndarray:
    """Parse a binary (P5) PGM with 8-bit samples; header comments are allowed."""
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.find(b"\n", pos)
            if pos < 0:
                raise ValueError("truncated PGM header")
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval > 255:
        raise ValueError("only 8-bit PGM is supported")
    raster = data[pos + 1 : pos + 1 + w * h]
    if len(raster) != w * h:
        raise ValueError("truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w)
