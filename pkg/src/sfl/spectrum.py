"""Candidate spectra and orthogonality checks.

Two frequency sets are built from L: the classical spectrum L + R* K° and the
fractal set of finite sums l_0 + R* l_1 + ... + R*^m l_m.  Orthogonality in
L^2(mu) is tested through <e_s, e_t> = mu^(t - s); orthogonality in L^2 of a
union of boxes uses closed-form integrals.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import ratlat
from .hadamard import frac_part
from .ratlat import Lattice, RatMatrix, as_matrix, rat
from .transform import MuHatEvaluator, attractor_points_exact

DEFAULT_WITNESS_TOL = 1e-3


def _key(v):
    return tuple(v)


def _fmt_vec(v):
    return [str(x) if isinstance(x, Fraction) else x for x in v]


@dataclass(frozen=True)
class SpectrumSet:
    points: tuple
    provenance: str  # "LAMBDA", "CAL_L" or "USER"
    params: dict = field(default_factory=dict)
    digits: Optional[tuple] = None  # CAL_L: digit indices (l_0, ..., l_m) per point
    injective: Optional[bool] = None  # CAL_L: digit map one-to-one

    def __len__(self):
        return len(self.points)

    def __contains__(self, v):
        return tuple(rat(x) for x in v) in set(self.points)

    def to_json(self) -> dict:
        out = {
            "provenance": self.provenance,
            "params": self.params,
            "points": [_fmt_vec(p) for p in self.points],
        }
        if self.injective is not None:
            out["injective"] = self.injective
        return out


def user_set(points) -> SpectrumSet:
    pts = sorted({tuple(rat(x) for x in p) for p in points})
    return SpectrumSet(tuple(pts), "USER")


def lambda_set(L: Sequence, R, Kdual: Lattice, bound) -> SpectrumSet:
    """All l + R* s (l in L, s in K°) with sup-norm at most ``bound``."""
    R = as_matrix(R)
    n = R.nrows
    bound = Fraction(bound) if not isinstance(bound, float) else Fraction(bound).limit_denominator(10**12)
    L = [tuple(rat(x) for x in l) for l in L]
    A = R.T @ Kdual.canonical  # R* s = A c for integer coordinates c
    Ainv = A.inv()
    reach = bound + max(max(abs(x) for x in l) for l in L)
    # |c_i| <= ||A^-1||_inf * reach
    row_norm = max(sum(abs(x) for x in r) for r in Ainv.rows)
    cmax = int(math.floor(row_norm * reach)) + 1
    pts = set()
    for c in itertools.product(range(-cmax, cmax + 1), repeat=n):
        shift = A @ c
        for l in L:
            p = tuple(a + b for a, b in zip(l, shift))
            if max(abs(x) for x in p) <= bound:
                pts.add(p)
    return SpectrumSet(tuple(sorted(pts)), "LAMBDA", {"bound": str(bound)})


def cal_l(L: Sequence, R, m: int) -> SpectrumSet:
    """All sums sum_{j<=m} R*^j l_j; records whether the digit map is one-to-one.

    Since 0 is a digit, sequences of length m + 1 padded with trailing zeros
    stand for all shorter ones, so injectivity on B^(m+1) is injectivity on
    normalized finite sequences of length at most m + 1.
    """
    R = as_matrix(R)
    L = [tuple(rat(x) for x in l) for l in L]
    powers = [RatMatrix.identity(R.nrows)]
    for _ in range(m):
        powers.append(powers[-1] @ R.T)
    images = [[P @ l for l in L] for P in powers]
    seen = {}
    collision = False
    for digits in itertools.product(range(len(L)), repeat=m + 1):
        p = tuple(sum(col) for col in zip(*(images[j][d] for j, d in enumerate(digits))))
        if p in seen:
            collision = True
        else:
            seen[p] = digits
    pts = tuple(sorted(seen))
    return SpectrumSet(pts, "CAL_L", {"degree": m}, tuple(seen[p] for p in pts), not collision)


def kdual_window(s, radius: int) -> list:
    """Points K° c for integer c in the cube [-radius, radius]^n."""
    Kd = s.K_dual.canonical
    return [Kd @ c for c in itertools.product(range(-radius, radius + 1), repeat=s.n)]


# ---------------------------------------------------------------------------
# orthogonality in L^2(mu)


@dataclass
class OrthogonalityReport:
    max_residual: float
    worst: Optional[dict]
    tested: int
    exact_zeros: int
    max_bound: float

    def to_json(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "worst": self.worst,
            "tested": self.tested,
            "exact_zeros": self.exact_zeros,
            "max_bound": self.max_bound,
        }


def check_lambda_orthogonality(s, radius: int = 10, evaluator: Optional[MuHatEvaluator] = None) -> OrthogonalityReport:
    """max |mu^(l - l' + R* s)| over l != l' and s in a K° window."""
    ev = evaluator or MuHatEvaluator.for_system(s)
    shifts = [s.R_star @ k for k in kdual_window(s, radius)]
    worst, best, exact, tested, max_bound = None, -1.0, 0, 0, 0.0
    for i, l in enumerate(s.L):
        for j, lp in enumerate(s.L):
            if i == j:
                continue
            d = ratlat.vsub(l, lp)
            for sh in shifts:
                t = ratlat.vadd(d, sh)
                r = ev(t)
                tested += 1
                if r.exact_zero_level is not None:
                    exact += 1
                a = abs(r.value)
                max_bound = max(max_bound, r.bound)
                if a > best:
                    best = a
                    worst = {"l": _fmt_vec(l), "l_prime": _fmt_vec(lp), "point": _fmt_vec(t), "bound": r.bound}
    return OrthogonalityReport(max(best, 0.0), worst, tested, exact, max_bound)


@dataclass
class GramReport:
    max_offdiag: float
    pair: Optional[list]
    size: int
    max_bound: float

    def to_json(self) -> dict:
        return {"max_offdiag": self.max_offdiag, "pair": self.pair, "size": self.size, "max_bound": self.max_bound}


def check_mutual_orthogonality(S, evaluator: MuHatEvaluator) -> GramReport:
    pts = list(S.points if isinstance(S, SpectrumSet) else S)
    if len(pts) < 2:
        return GramReport(0.0, None, len(pts), 0.0)
    G, bounds = evaluator.gram(pts)
    A = np.abs(G)
    np.fill_diagonal(A, -1.0)
    i, j = np.unravel_index(int(np.argmax(A)), A.shape)
    return GramReport(float(A[i, j]), [_fmt_vec(pts[i]), _fmt_vec(pts[j])], len(pts), float(bounds.max()))


@dataclass
class MaximalityReport:
    witnesses: list
    inconclusive: list
    skipped: list
    degree: int

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "witnesses": self.witnesses,
            "inconclusive": self.inconclusive,
            "skipped": self.skipped,
        }


def check_maximality(s, candidates, m: int, witness_tol: float = DEFAULT_WITNESS_TOL, evaluator=None) -> MaximalityReport:
    """Search witnesses against orthogonality to all of the degree-m fractal set.

    A candidate t outside the set is ruled out by any lambda with
    |mu^(t - lambda)| > witness_tol.  Candidates without a witness are only
    'not ruled out at depth m'; no violation is ever asserted.
    """
    ev = evaluator or MuHatEvaluator.for_system(s)
    S = cal_l(s.L, s.R, m)
    members = set(S.points)
    lam = np.array([[float(x) for x in p] for p in S.points])
    witnesses, inconclusive, skipped = [], [], []
    for t in candidates:
        t = tuple(rat(x) if not isinstance(x, float) else x for x in t)
        if all(not isinstance(x, float) for x in t) and t in members:
            skipped.append(_fmt_vec(t))
            continue
        tf = np.array([float(x) for x in t])
        vals, bnds, _ = ev.batch(tf[None, :] - lam)
        k = int(np.argmax(np.abs(vals)))
        if abs(vals[k]) > witness_tol:
            witnesses.append(
                {
                    "t": _fmt_vec(t),
                    "lambda": _fmt_vec(S.points[k]),
                    "value": abs(complex(vals[k])),
                    "bound": float(bnds[k]),
                }
            )
        else:
            inconclusive.append(_fmt_vec(t))
    return MaximalityReport(witnesses, inconclusive, skipped, m)


# ---------------------------------------------------------------------------
# unions of boxes


@dataclass(frozen=True)
class BoxRegion:
    """Finite union of axis-aligned boxes (lo, hi) with rational corners."""

    boxes: tuple

    def __post_init__(self):
        boxes = tuple((tuple(rat(x) for x in lo), tuple(rat(x) for x in hi)) for lo, hi in self.boxes)
        if not boxes:
            raise ValueError("empty region")
        for lo, hi in boxes:
            if any(h <= l for l, h in zip(lo, hi)):
                raise ValueError("degenerate box")
        for (a, b), (c, d) in itertools.combinations(boxes, 2):
            if all(max(x, z) < min(y, w) for x, y, z, w in zip(a, b, c, d)):
                raise ValueError("boxes overlap")
        object.__setattr__(self, "boxes", boxes)

    @property
    def measure(self) -> Fraction:
        return sum((math.prod(h - l for l, h in zip(lo, hi)) for lo, hi in self.boxes), Fraction(0))


def _interval_integral(w: Fraction, a: Fraction, b: Fraction) -> complex:
    """int_a^b exp(2 pi i w x) dx with exact-rational phase reduction."""
    if w == 0:
        return complex(float(b - a))
    pb = float(frac_part(w * b))
    pa = float(frac_part(w * a))
    return (cmath.exp(2j * math.pi * pb) - cmath.exp(2j * math.pi * pa)) / (2j * math.pi * float(w))


def box_inner_product(omega: BoxRegion, u, v) -> complex:
    """m(Omega)^-1 int_Omega conj(e_u) e_v dx."""
    w = [rat(b) - rat(a) for a, b in zip(u, v)]
    total = 0j
    for lo, hi in omega.boxes:
        total += math.prod(_interval_integral(wi, a, b) for wi, a, b in zip(w, lo, hi))
    return total / float(omega.measure)


def box_gram(omega: BoxRegion, freqs) -> np.ndarray:
    freqs = list(freqs)
    m = len(freqs)
    G = np.empty((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            G[i, j] = box_inner_product(omega, freqs[i], freqs[j])
    return G


# ---------------------------------------------------------------------------
# totality heuristics


@dataclass
class TotalityReport:
    digits_distinct_mod_K: bool
    frequencies_distinct_mod_RK_dual: bool
    attractor_embeds: bool
    embed_depth: int
    label: str = "heuristic: necessary conditions only, not a density proof"

    @property
    def passed(self) -> bool:
        return self.digits_distinct_mod_K and self.frequencies_distinct_mod_RK_dual and self.attractor_embeds

    def to_json(self) -> dict:
        return {
            "digits_distinct_mod_K": self.digits_distinct_mod_K,
            "frequencies_distinct_mod_RstarKdual": self.frequencies_distinct_mod_RK_dual,
            "attractor_embeds_in_torus": self.attractor_embeds,
            "embed_depth": self.embed_depth,
            "label": self.label,
        }


def _distinct_mod(points, K: Lattice) -> bool:
    keys = set()
    for p in points:
        key = tuple(frac_part(c) for c in K.coords(p))
        if key in keys:
            return False
        keys.add(key)
    return True


def totality_diagnostics(s, embed_depth: Optional[int] = None) -> TotalityReport:
    K = s.require_lattice()
    digits_ok = _distinct_mod(s.B, K)
    RKd = ratlat.image(s.R_star, s.K_dual)
    freqs_ok = _distinct_mod(s.L, RKd)
    if embed_depth is None:
        embed_depth = 0
        while s.N ** (embed_depth + 2) <= 4096 and embed_depth < 6:
            embed_depth += 1
    pts = attractor_points_exact(s.R, s.B, embed_depth)
    embeds = _distinct_mod(pts, K)
    return TotalityReport(digits_ok, freqs_ok, embeds, embed_depth)
