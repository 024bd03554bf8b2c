"""The two families of Cuntz isometries acting on exponentials.

S_b* f = N^-1/2 f o sigma_b,  T_l e_s = e_{R* s + l} (s in K°),
M_{bl} f = N^-1/2 (e_l o sigma_b) f.

Operators act symbolically on finite exponential sums; frequencies and
phases stay exact rationals and only Gram quantities go through mu^.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import ratlat
from .errors import DomainViolation
from .hadamard import frac_part
from .ratlat import dot, rat
from .transform import MuHatEvaluator


_QUARTER = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}


def _phase(q: Fraction) -> complex:
    q = frac_part(q)
    if q in _QUARTER:
        return _QUARTER[q]
    return cmath.exp(2j * math.pi * float(q))


def _fmt(v):
    return [str(x) for x in v]


class ExpFunction:
    """Finite sum sum_k c_k e_{t_k} with distinct exact frequencies."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        """``terms`` is an iterable of (coefficient, frequency) pairs."""
        acc: dict = {}
        for c, t in terms:
            key = tuple(rat(x) for x in t)
            acc[key] = acc.get(key, 0j) + complex(c)
        self.terms = {k: acc[k] for k in sorted(acc) if acc[k] != 0}

    @classmethod
    def exp(cls, t, c=1.0) -> "ExpFunction":
        return cls([(c, t)])

    def __add__(self, other: "ExpFunction") -> "ExpFunction":
        return ExpFunction([(c, t) for t, c in self.terms.items()] + [(c, t) for t, c in other.terms.items()])

    def scale(self, c) -> "ExpFunction":
        return ExpFunction([(c * v, t) for t, v in self.terms.items()])

    def frequencies(self) -> list:
        return list(self.terms)

    def __eq__(self, other):
        return isinstance(other, ExpFunction) and self.terms == other.terms

    def isclose(self, other: "ExpFunction", tol: float = 1e-14) -> bool:
        if set(self.terms) != set(other.terms):
            return False
        return all(abs(self.terms[k] - other.terms[k]) <= tol for k in self.terms)

    def __repr__(self):
        return " + ".join(f"({c:.6g})e_{_fmt(t)}" for t, c in self.terms.items()) or "0"


# ---------------------------------------------------------------------------
# single-term actions: (phase exponent, frequency), exact


def s_star_term(s, b, t):
    """S_b* e_t = N^-1/2 exp(2 pi i t.b) e_{R*^-1 t}."""
    return dot(t, b), s.R_star_inv @ t


def t_term(s, l, t):
    """T_l e_t = e_{R* t + l}."""
    return ratlat.vadd(s.R_star @ t, l)


def m_term(s, b, l, t):
    """M_{bl} e_t = N^-1/2 exp(2 pi i l.b) e_{t + R*^-1 l}."""
    return dot(l, b), ratlat.vadd(t, s.R_star_inv @ l)


# ---------------------------------------------------------------------------
# operators on ExpFunction


def apply_S_star(s, b, f: ExpFunction) -> ExpFunction:
    b = ratlat.vec(b)
    scale = 1.0 / math.sqrt(s.N)
    out = []
    for t, c in f.terms.items():
        ph, t2 = s_star_term(s, b, t)
        out.append((c * scale * _phase(ph), t2))
    return ExpFunction(out)


def apply_T(s, l, f: ExpFunction) -> ExpFunction:
    l = ratlat.vec(l)
    Kd = s.K_dual
    out = []
    for t, c in f.terms.items():
        if not Kd.contains(t):
            raise DomainViolation(f"frequency {_fmt(t)} is not in the dual lattice")
        out.append((c, t_term(s, l, t)))
    return ExpFunction(out)


def apply_M(s, b, l, f: ExpFunction) -> ExpFunction:
    b, l = ratlat.vec(b), ratlat.vec(l)
    scale = 1.0 / math.sqrt(s.N)
    out = []
    for t, c in f.terms.items():
        ph, t2 = m_term(s, b, l, t)
        out.append((c * scale * _phase(ph), t2))
    return ExpFunction(out)


def decompose(s, t):
    """Unique (l, k) with t = l + R* k, k in K°, or None when t is not in L + R*K°."""
    t = ratlat.vec(t)
    found = None
    for l in s.L:
        k = s.R_star_inv @ ratlat.vsub(t, l)
        if s.K_dual.contains(k):
            if found is not None:
                raise DomainViolation("decomposition is not unique: L repeats a class mod R*K°")
            found = (l, k)
    return found


def apply_T_star(s, l, f: ExpFunction) -> ExpFunction:
    """T_l* e_{l' + R* k} = delta_{l l'} e_k; defined on frequencies in L + R*K° only."""
    l = ratlat.vec(l)
    out = []
    for t, c in f.terms.items():
        dec = decompose(s, t)
        if dec is None:
            raise DomainViolation(f"frequency {_fmt(t)} is not in L + R*K°")
        if dec[0] == l:
            out.append((c, dec[1]))
    return ExpFunction(out)


def compose_T(s, digits: Sequence) -> tuple:
    """Frequency of T_{l_0} T_{l_1} ... T_{l_n} e_0 (applied right to left)."""
    t = ratlat.zero_vec(s.n)
    for l in reversed(list(digits)):
        t = t_term(s, ratlat.vec(l), t)
    return t


# ---------------------------------------------------------------------------
# verifications


@dataclass
class STReport:
    passed: bool
    checked: int
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "witness": self.witness}


def verify_ST_identity(s, freqs: Sequence) -> STReport:
    """Exact check of S_b* T_l e_s = M_{bl} e_s for all b, l and the given s.

    Frequencies agree identically; phases agree iff s.(R b) is an integer.
    """
    checked = 0
    for k in freqs:
        k = ratlat.vec(k)
        for b in s.B:
            for l in s.L:
                ph1, f1 = s_star_term(s, b, t_term(s, l, k))
                ph2, f2 = m_term(s, b, l, k)
                checked += 1
                if f1 != f2 or frac_part(ph1 - ph2) != 0:
                    return STReport(
                        False,
                        checked,
                        {"b": _fmt(b), "l": _fmt(l), "s": _fmt(k), "Rb_dot_s": str(dot(s.R @ b, k))},
                    )
    return STReport(True, checked)


@dataclass
class TRelationsReport:
    isometry_exact: bool
    isometry_residual: float
    orthogonality_residual: float
    orthogonality_exact_zeros: int
    completeness_residual: float
    max_bound: float
    tested: dict

    def passed(self, tol: float = 1e-8) -> bool:
        return (
            self.isometry_exact
            and self.isometry_residual < tol
            and self.orthogonality_residual < tol
            and self.completeness_residual < tol
        )

    def to_json(self) -> dict:
        return {
            "isometry_exact": self.isometry_exact,
            "isometry_residual": self.isometry_residual,
            "orthogonality_residual": self.orthogonality_residual,
            "orthogonality_exact_zeros": self.orthogonality_exact_zeros,
            "completeness_residual": self.completeness_residual,
            "max_bound": self.max_bound,
            "tested": self.tested,
        }


def mask_is_one(s, u) -> bool:
    """mask(R* u) == 1 exactly, i.e. (R b).u is an integer for every digit."""
    return all(dot(s.R @ b, u).denominator == 1 for b in s.B)


def verify_T_relations(s, freqs: Sequence, evaluator: Optional[MuHatEvaluator] = None) -> TRelationsReport:
    """Isometry, mutual orthogonality and completeness of {T_l} on a window.

    (a) <T_l e_s, T_l e_s'> = mu^(R*(s'-s)) must equal mu^(s'-s): exactly via
        mask(R* u) = 1, numerically via mu^.
    (b) <T_l e_s, T_l' e_s'> = mu^(R*(s'-s) + l' - l) must vanish for l != l'.
    (c) sum_l <T_l* e_u, T_l* e_t> must equal <e_u, e_t> for u, t in L + R*S.
    """
    ev = evaluator or MuHatEvaluator.for_system(s)
    freqs = [ratlat.vec(k) for k in freqs]
    Kd = s.K_dual
    for k in freqs:
        if not Kd.contains(k):
            raise DomainViolation(f"test frequency {_fmt(k)} is not in the dual lattice")
    diffs = sorted({ratlat.vsub(b, a) for a in freqs for b in freqs})
    iso_exact = all(mask_is_one(s, u) for u in diffs)
    D = np.array([[float(x) for x in u] for u in diffs])
    RD = np.array([[float(x) for x in s.R_star @ u] for u in diffs])
    v1, b1, _ = ev.batch(RD)
    v0, b0, _ = ev.batch(D)
    iso_res = float(np.max(np.abs(v1 - v0))) if len(diffs) else 0.0
    max_bound = float(max(b0.max(), b1.max())) if len(diffs) else 0.0

    orth_res, exact_zeros = 0.0, 0
    for i, l in enumerate(s.L):
        for j, lp in enumerate(s.L):
            if i == j:
                continue
            for u in diffs:
                r = ev(ratlat.vadd(s.R_star @ u, ratlat.vsub(lp, l)))
                exact_zeros += r.exact_zero_level is not None
                orth_res = max(orth_res, abs(r.value))
                max_bound = max(max_bound, r.bound)

    # completeness on the window L + R* freqs: each T_l* e_t is a single
    # exponential (or zero), so sum_l <T_l* e_u, T_l* e_t> only pairs equal l
    window = [ratlat.vadd(l, s.R_star @ k) for l in s.L for k in freqs]
    images = []
    for t in window:
        f = ExpFunction.exp(t)
        hits = [(i, g) for i, l in enumerate(s.L) if (g := apply_T_star(s, l, f)).terms]
        if len(hits) != 1:
            raise DomainViolation(f"{_fmt(t)} has {len(hits)} nonzero T_l* images")
        (i, g), = hits
        ((k, c),) = g.terms.items()
        images.append((i, k, c))
    lidx = np.array([i for i, _, _ in images])
    coef = np.array([c for _, _, c in images])
    Gk, Gkb = ev.gram([k for _, k, _ in images])
    lhs = np.where(lidx[:, None] == lidx[None, :], np.conj(coef)[:, None] * coef[None, :] * Gk, 0)
    G, Gb = ev.gram(window)
    comp_res = float(np.abs(lhs - G).max()) if window else 0.0
    if window:
        max_bound = max(max_bound, float(Gb.max()), float(Gkb.max()))
    return TRelationsReport(
        iso_exact,
        iso_res,
        orth_res,
        exact_zeros,
        comp_res,
        max_bound,
        {"frequencies": len(freqs), "differences": len(diffs), "window": len(window)},
    )


@dataclass
class SCompletenessReport:
    max_residual: float
    pairs: int
    max_bound: float

    def to_json(self) -> dict:
        return {"max_residual": self.max_residual, "pairs": self.pairs, "max_bound": self.max_bound}


def verify_S_completeness(s, pairs, evaluator: Optional[MuHatEvaluator] = None) -> SCompletenessReport:
    """|mask(t-u) mu^(R*^-1 (t-u)) - mu^(t-u)| over the given (u, t) pairs."""
    ev = evaluator or MuHatEvaluator.for_system(s)
    W = np.array([[float(b) - float(a) for a, b in zip(u, t)] for u, t in pairs], dtype=float)
    if W.size == 0:
        return SCompletenessReport(0.0, 0, 0.0)
    full, fb, _ = ev.batch(W)
    m = ev.mask.batch(W)
    W1 = W @ ev.Rsi_f.T
    tail, tb, _ = ev.batch(W1)
    res = np.abs(m * tail - full)
    return SCompletenessReport(float(res.max()), len(pairs), float(max(fb.max(), tb.max())))


def random_pairs(n: int, count: int, lo: float = -8.0, hi: float = 8.0, seed: int = 0) -> list:
    rng = random.Random(seed)
    return [
        (tuple(rng.uniform(lo, hi) for _ in range(n)), tuple(rng.uniform(lo, hi) for _ in range(n)))
        for _ in range(count)
    ]


def verify_composition(s, max_len: int = 5) -> tuple:
    """T_{l_0} ... T_{l_n} e_0 = e_{sum R*^j l_j} for all digit strings up to max_len.

    Returns (passed, number of strings checked).
    """
    checked = 0
    for length in range(1, max_len + 1):
        P = [ratlat.RatMatrix.identity(s.n)]
        for _ in range(length - 1):
            P.append(P[-1] @ s.R_star)
        for digits in itertools.product(s.L, repeat=length):
            expect = ratlat.zero_vec(s.n)
            for j, l in enumerate(digits):
                expect = ratlat.vadd(expect, P[j] @ l)
            f = ExpFunction.exp(ratlat.zero_vec(s.n))
            for l in reversed(digits):
                f = apply_T(s, l, f)
            checked += 1
            if f.frequencies() != [expect] or compose_T(s, digits) != expect:
                return False, checked
    return True, checked
