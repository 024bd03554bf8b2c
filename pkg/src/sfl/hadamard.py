"""Generalized Hadamard matrices built from digit sets.

Entries e^{2 pi i b.l} are kept as exponents in Q/Z, so orthogonality of two
columns becomes the question whether a multiset of roots of unity sums to
zero.  That is decided exactly by reducing the integer polynomial
sum_k c_k x^k modulo the cyclotomic polynomial Phi_d.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .errors import InternalError, NotSquare, ParseError, Unclassified
from .ratlat import dot, lcm_denominator, rat

# ---------------------------------------------------------------------------
# cyclotomic arithmetic


def _polydiv_exact(num: list, den: list) -> list:
    """Quotient of integer polynomials (coefficients low -> high), den monic."""
    num = list(num)
    dq = len(den) - 1
    out = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            out[i - dq] = c
            for j, dc in enumerate(den):
                num[i - dq + j] -= c * dc
    if any(num[:dq]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> tuple:
    """Coefficients of Phi_d, lowest degree first."""
    if d < 1:
        raise ValueError("d must be positive")
    num = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            num = _polydiv_exact(num, list(cyclotomic(e)))
    return tuple(num)


def _reduce_mod_monic(coeffs: list, mod: Sequence[int]) -> list:
    a = list(coeffs)
    dm = len(mod) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            for j, mc in enumerate(mod):
                a[i - dm + j] -= c * mc
    return a[:dm]


MAX_EXACT_ORDER = 1 << 14


def root_sum_vanishes(exponents: Sequence[Fraction]) -> Optional[bool]:
    """Decide exactly whether sum_k exp(2 pi i e_k) == 0.

    Returns None when the common order of the roots exceeds
    ``MAX_EXACT_ORDER`` (the caller then falls back to numerics).
    """
    if not exponents:
        return True
    # float error is ~1e-15 per term, so a clearly nonzero sum needs no algebra
    approx = sum(cmath.exp(2j * math.pi * float(frac_part(e))) for e in exponents)
    if abs(approx) > 1e-9 * len(exponents):
        return False
    d = lcm_denominator(exponents)
    if d > MAX_EXACT_ORDER:
        return None
    coeffs = [0] * d
    for e in exponents:
        coeffs[int((e * d) % d)] += 1
    return not any(_reduce_mod_monic(coeffs, cyclotomic(d)))


def frac_part(q: Fraction) -> Fraction:
    return q - math.floor(q)


# ---------------------------------------------------------------------------
# phase matrices


@dataclass(frozen=True)
class PhaseMatrix:
    """N x N table of exponents in [0, 1); entry (i, j) stands for exp(2 pi i e)."""

    exponents: tuple

    def __post_init__(self):
        rows = tuple(tuple(frac_part(rat(e)) for e in r) for r in self.exponents)
        if any(len(r) != len(rows) for r in rows):
            raise NotSquare("phase table must be square")
        object.__setattr__(self, "exponents", rows)

    @property
    def order(self) -> int:
        return len(self.exponents)

    @property
    def denominator(self) -> int:
        return lcm_denominator(e for r in self.exponents for e in r)

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.exponents)

    def to_complex(self):
        import numpy as np

        e = [[float(x) for x in r] for r in self.exponents]
        return np.exp(2j * np.pi * np.array(e, dtype=float))

    def permuted(self, rows: Sequence[int], cols: Sequence[int]) -> "PhaseMatrix":
        return PhaseMatrix(tuple(tuple(self.exponents[i][j] for j in cols) for i in rows))

    def dephased(self) -> "PhaseMatrix":
        """Normalize first row and column to zero via diagonal equivalence."""
        e = self.exponents
        return PhaseMatrix(
            tuple(tuple(e[i][j] - e[i][0] - e[0][j] + e[0][0] for j in range(self.order)) for i in range(self.order))
        )

    def to_json(self) -> dict:
        return {
            "n": self.order,
            "denominator": self.denominator,
            "exponents": [[str(x) for x in r] for r in self.exponents],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PhaseMatrix":
        try:
            p = cls(tuple(tuple(rat(x) for x in r) for r in data["exponents"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad phase matrix: {exc}") from exc
        if "n" in data and data["n"] != p.order:
            raise ParseError("phase matrix: 'n' does not match table size")
        return p

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def phase_table(B: Sequence, L: Sequence) -> PhaseMatrix:
    if len(B) != len(L):
        raise NotSquare(f"|B|={len(B)} differs from |L|={len(L)}")
    return PhaseMatrix(tuple(tuple(dot(b, l) for l in L) for b in B))


def _columns_orthogonal(p: PhaseMatrix, j: int, k: int) -> bool:
    diffs = [p.exponents[i][k] - p.exponents[i][j] for i in range(p.order)]
    ok = root_sum_vanishes(diffs)
    if ok is None:
        raise InternalError("phase denominators too large for exact cyclotomic reduction")
    return ok


def is_generalized_hadamard(p: PhaseMatrix) -> bool:
    n = p.order
    return all(_columns_orthogonal(p, j, k) for j in range(n) for k in range(j + 1, n))


def rows_orthogonal(p: PhaseMatrix) -> bool:
    """The row-wise test (U U* = N I), which agrees with the column-wise one."""
    return is_generalized_hadamard(PhaseMatrix(tuple(zip(*p.exponents))))


def tensor(p1: PhaseMatrix, p2: PhaseMatrix) -> PhaseMatrix:
    """Kronecker product: index (i1, i2) -> i1 * N2 + i2, exponents add."""
    e1, e2 = p1.exponents, p2.exponents
    rows = []
    for i1 in range(p1.order):
        for i2 in range(p2.order):
            rows.append(tuple(e1[i1][j1] + e2[i2][j2] for j1 in range(p1.order) for j2 in range(p2.order)))
    return PhaseMatrix(tuple(rows))


# ---------------------------------------------------------------------------
# classification for N <= 4

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class HadamardClass:
    """Equivalence class of a small generalized Hadamard matrix.

    ``form`` names the normal form: "N1", "N2" (the 2x2 sign matrix), "N3"
    (the Fourier matrix with a primitive cube root) or "N4" (the one-parameter
    family with unimodular ``u``).  ``orbit`` is the set of exponents of the
    parameter reachable by equivalence operations; ``parameter`` is the
    smallest nonzero member of the orbit (0 only if the orbit is {0}).
    """

    N: int
    form: str
    parameter: Optional[Fraction] = None
    orbit: frozenset = frozenset()

    def admits(self, exponent) -> bool:
        return frac_part(rat(exponent)) in self.orbit

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "form": self.form,
            "parameter": None if self.parameter is None else str(self.parameter),
            "orbit": sorted(str(x) for x in self.orbit),
        }


def _match_n3(e) -> Optional[Fraction]:
    z = e[1][1]
    if z not in (Fraction(1, 3), Fraction(2, 3)):
        return None
    zb = frac_part(-z)
    return z if (e[1][2], e[2][1], e[2][2]) == (zb, zb, z) else None


def _match_n4(e) -> Optional[Fraction]:
    if e[1] != (0, 0, HALF, HALF) or e[2][1] != HALF or e[3][1] != HALF:
        return None
    u = e[2][2]
    mu = frac_part(u + HALF)
    if (e[2][3], e[3][2], e[3][3]) == (mu, mu, u):
        return u
    return None


def classify_small(p: PhaseMatrix) -> HadamardClass:
    n = p.order
    if n > 4:
        raise Unclassified("no classification is known for N > 4")
    if not is_generalized_hadamard(p):
        raise Unclassified("matrix is not generalized Hadamard")
    if n == 1:
        return HadamardClass(1, "N1", None, frozenset())
    if n == 2:
        # dephasing a 2x2 Hadamard matrix always yields the sign matrix
        if p.dephased().exponents[1][1] != HALF:
            raise InternalError("2x2 Hadamard matrix did not dephase to the sign matrix")
        return HadamardClass(2, "N2", None, frozenset())
    matcher = _match_n3 if n == 3 else _match_n4
    orbit = set()
    for rows in itertools.permutations(range(n)):
        for cols in itertools.permutations(range(n)):
            q = p.permuted(rows, cols).dephased()
            hit = matcher(q.exponents)
            if hit is not None:
                orbit.add(hit)
    if not orbit:
        raise InternalError(f"N={n} Hadamard matrix matched no normal form")
    nonzero = sorted(x for x in orbit if x != 0)
    param = nonzero[0] if nonzero else Fraction(0)
    return HadamardClass(n, f"N{n}", param, frozenset(orbit))


def normal_form(N: int, u=None) -> PhaseMatrix:
    """The listed representatives for N <= 4 as exponent tables."""
    if N == 1:
        return PhaseMatrix(((0,),))
    if N == 2:
        return PhaseMatrix(((0, 0), (0, HALF)))
    if N == 3:
        z = Fraction(1, 3) if u is None else frac_part(rat(u))
        zb = frac_part(-z)
        return PhaseMatrix(((0, 0, 0), (0, z, zb), (0, zb, z)))
    if N == 4:
        u = Fraction(0) if u is None else frac_part(rat(u))
        mu = frac_part(u + HALF)
        return PhaseMatrix(((0, 0, 0, 0), (0, 0, HALF, HALF), (0, HALF, u, mu), (0, HALF, mu, u)))
    raise Unclassified("no normal form for N > 4")
