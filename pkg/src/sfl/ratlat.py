"""Exact rational linear algebra and lattice arithmetic.

Scalars are :class:`fractions.Fraction`, vectors are tuples of fractions and
matrices are :class:`RatMatrix`.  A :class:`Lattice` is a full-rank lattice in
R^n stored through a basis matrix whose *columns* generate it, together with
its column Hermite normal form, which decides equality.

Nothing in this module touches floating point.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .errors import (
    NoInvariantLattice,
    NotInvariant,
    NotSublattice,
    ParseError,
    RankDeficient,
    SingularMatrix,
)

RatVector = tuple  # tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# scalars and vectors


def rat(x) -> Fraction:
    """Coerce ints, strings ("p/q") and fractions to a Fraction.

    Floats are rejected: every rational entering the exact layer must be
    given exactly.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {x!r}") from exc
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, float):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def fmt_rat(q: Fraction) -> str:
    return str(q)


def vec(*entries) -> RatVector:
    if len(entries) == 1 and not isinstance(entries[0], (int, str, Fraction)):
        entries = tuple(entries[0])
    return tuple(rat(e) for e in entries)


def zero_vec(n: int) -> RatVector:
    return (Fraction(0),) * n


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vadd(u, v) -> RatVector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v) -> RatVector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u) -> RatVector:
    c = rat(c)
    return tuple(c * a for a in u)


def vneg(u) -> RatVector:
    return tuple(-a for a in u)


def is_integral(values: Iterable[Fraction]) -> bool:
    return all(q.denominator == 1 for q in values)


def lcm_denominator(values: Iterable[Fraction]) -> int:
    return reduce(math.lcm, (q.denominator for q in values), 1)


# ---------------------------------------------------------------------------
# matrices


class RatMatrix:
    """Immutable n x m matrix of fractions (row-major storage)."""

    __slots__ = ("_rows", "_hash")

    def __init__(self, rows):
        if isinstance(rows, RatMatrix):
            self._rows = rows._rows
        else:
            self._rows = tuple(tuple(rat(x) for x in row) for row in rows)
        widths = {len(r) for r in self._rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        self._hash = None

    # constructors ----------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.scalar(n, 1)

    @classmethod
    def scalar(cls, n: int, c) -> "RatMatrix":
        c = rat(c)
        return cls([[c if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols) -> "RatMatrix":
        cols = [tuple(rat(x) for x in c) for c in cols]
        if not cols:
            raise ValueError("no columns")
        return cls([[c[i] for c in cols] for i in range(len(cols[0]))])

    @classmethod
    def block_diag(cls, a: "RatMatrix", b: "RatMatrix") -> "RatMatrix":
        n1, n2 = a.nrows, b.nrows
        rows = [list(r) + [0] * b.ncols for r in a.rows]
        rows += [[0] * a.ncols + list(r) for r in b.rows]
        assert len(rows) == n1 + n2
        return cls(rows)

    # basic accessors -------------------------------------------------------
    @property
    def rows(self):
        return self._rows

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return len(self._rows[0]) if self._rows else 0

    @property
    def n(self) -> int:
        return self.nrows

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix(list(zip(*self._rows)))

    def columns(self) -> list:
        return [tuple(c) for c in zip(*self._rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self._rows == other._rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._rows)
        return self._hash

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"RatMatrix([{body}])"

    # arithmetic ------------------------------------------------------------
    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            cols = other.columns()
            return RatMatrix([[dot(r, c) for c in cols] for r in self._rows])
        v = tuple(other)
        if len(v) != self.ncols:
            raise ValueError("dimension mismatch")
        return tuple(dot(r, v) for r in self._rows)

    def __mul__(self, c):
        c = rat(c)
        return RatMatrix([[c * x for x in r] for r in self._rows])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __add__(self, other: "RatMatrix"):
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def __sub__(self, other: "RatMatrix"):
        return RatMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def trace(self) -> Fraction:
        return sum((self._rows[i][i] for i in range(self.nrows)), Fraction(0))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def _echelon(self):
        """Gaussian elimination; returns (reduced rows, rank, det sign-product)."""
        a = [list(r) for r in self._rows]
        m, k = self.nrows, self.ncols
        rank = 0
        det = Fraction(1)
        for col in range(k):
            piv = next((i for i in range(rank, m) if a[i][col] != 0), None)
            if piv is None:
                det = Fraction(0)
                continue
            if piv != rank:
                a[rank], a[piv] = a[piv], a[rank]
                det = -det
            p = a[rank][col]
            det *= p
            for i in range(rank + 1, m):
                if a[i][col] != 0:
                    f = a[i][col] / p
                    a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
            rank += 1
            if rank == m:
                break
        return a, rank, det

    def det(self) -> Fraction:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        _, rank, det = self._echelon()
        return det if rank == self.nrows else Fraction(0)

    def rank(self) -> int:
        return self._echelon()[1]

    def inv(self) -> "RatMatrix":
        n = self.nrows
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self._rows)]
        for col in range(n):
            piv = next((i for i in range(col, n) if a[i][col] != 0), None)
            if piv is None:
                raise SingularMatrix("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            p = a[col][col]
            a[col] = [x / p for x in a[col]]
            for i in range(n):
                if i != col and a[i][col] != 0:
                    f = a[i][col]
                    a[i] = [x - f * y for x, y in zip(a[i], a[col])]
        return RatMatrix([r[n:] for r in a])

    def power(self, k: int) -> "RatMatrix":
        if k < 0:
            return self.inv().power(-k)
        out = RatMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def charpoly(self) -> list:
        """Coefficients [c_0, ..., c_n] of det(xI - R), c_n = 1 (Faddeev-LeVerrier)."""
        n = self.nrows
        coeffs = [Fraction(0)] * (n + 1)
        coeffs[n] = Fraction(1)
        m = RatMatrix([[0] * n for _ in range(n)])
        ident = RatMatrix.identity(n)
        for k in range(1, n + 1):
            m = self @ m + ident * coeffs[n - k + 1]
            coeffs[n - k] = -(self @ m).trace() / k
        return coeffs

    def to_float(self):
        import numpy as np

        return np.array([[float(x) for x in r] for r in self._rows], dtype=float)

    def to_strings(self) -> list:
        return [[fmt_rat(x) for x in r] for r in self._rows]


def as_matrix(x) -> RatMatrix:
    """Accept a RatMatrix, a scalar (1x1) or nested rows."""
    if isinstance(x, RatMatrix):
        return x
    if isinstance(x, (int, str, Fraction)):
        return RatMatrix([[x]])
    return RatMatrix(x)


def rank_of(vectors: Sequence[RatVector], n: int) -> int:
    vectors = [v for v in vectors]
    if not vectors:
        return 0
    return RatMatrix.from_columns(vectors).rank()


# ---------------------------------------------------------------------------
# integer normal forms


def _xgcd(a: int, b: int):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf_columns(cols: list, n: int) -> list:
    """Column Hermite normal form of an integer generating set.

    ``cols`` is a list of integer column vectors (length ``n``) spanning a
    rank-``n`` lattice.  Returns ``n`` columns forming a lower-triangular
    basis with positive diagonal and ``0 <= h[i][j] < h[i][i]`` for ``j < i``.
    """
    a = [list(c) for c in cols if any(c)]
    m = len(a)
    if m < n:
        raise RankDeficient("generators do not span R^n")
    for i in range(n):
        for j in range(i + 1, m):
            if a[j][i] == 0:
                continue
            if a[i][i] == 0:
                a[i], a[j] = a[j], a[i]
                continue
            p, q = a[i][i], a[j][i]
            g, x, y = _xgcd(p, q)
            pg, qg = p // g, q // g
            ci, cj = a[i], a[j]
            a[i] = [x * u + y * v for u, v in zip(ci, cj)]
            a[j] = [pg * v - qg * u for u, v in zip(ci, cj)]
        if a[i][i] == 0:
            raise RankDeficient("generators do not span R^n")
        if a[i][i] < 0:
            a[i] = [-u for u in a[i]]
        piv = a[i][i]
        for j in range(i):
            q = a[j][i] // piv
            if q:
                a[j] = [u - q * v for u, v in zip(a[j], a[i])]
    return [tuple(c) for c in a[:n]]


def diagonalize(m: list):
    """Smith normal form of a nonsingular integer matrix (list of rows).

    Returns ``(d, U)`` with ``U`` unimodular (list of rows) and
    ``U @ M @ V = diag(d)`` for some unimodular ``V``; ``d`` is the list of
    invariant factors, each dividing the next.
    """
    n = len(m)
    a = [list(r) for r in m]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(dst, src, f):
        a[dst] = [x - f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - f * y for x, y in zip(u[dst], u[src])]

    for t in range(n):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(t, n) for j in range(t, n) if a[i][j]]
            if not entries:
                raise SingularMatrix("matrix is singular")
            _, pi, pj = min(entries)
            a[t], a[pi] = a[pi], a[t]
            u[t], u[pi] = u[pi], u[t]
            for r in a:
                r[t], r[pj] = r[pj], r[t]
            p = a[t][t]
            dirty = False
            for i in range(t + 1, n):
                q = a[i][t] // p
                if q:
                    row_op(i, t, q)
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    dirty = True
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            row_op(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return [a[i][i] for i in range(n)], u


# ---------------------------------------------------------------------------
# lattices


def _integer_hnf_of_rational(cols: Sequence[RatVector], n: int) -> RatMatrix:
    den = lcm_denominator(x for c in cols for x in c)
    icols = [[int(x * den) for x in c] for c in cols]
    h = hnf_columns(icols, n)
    return RatMatrix.from_columns([[Fraction(x, den) for x in c] for c in h])


class Lattice:
    """Full-rank lattice; equality is equality of canonical forms."""

    __slots__ = ("basis", "canonical", "_inv")

    def __init__(self, basis: RatMatrix, canonical: RatMatrix):
        self.basis = basis
        self.canonical = canonical
        self._inv = None

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    @property
    def n(self) -> int:
        return self.basis.nrows

    def contains(self, v) -> bool:
        return is_integral(self.coords(v))

    def coords(self, v) -> tuple:
        if self._inv is None:
            self._inv = self.canonical.inv()
        return self._inv @ tuple(v)

    def det(self) -> Fraction:
        return abs(self.canonical.det())

    def __repr__(self):
        return f"Lattice({self.canonical!r})"


def canonicalize(basis) -> Lattice:
    basis = as_matrix(basis)
    if not basis.is_square() or basis.det() == 0:
        raise SingularMatrix("lattice basis must be square and nonsingular")
    return Lattice(basis, _integer_hnf_of_rational(basis.columns(), basis.nrows))


def integer_lattice(n: int, scale=1) -> Lattice:
    return canonicalize(RatMatrix.scalar(n, scale))


def lattice_generated(vectors: Iterable[RatVector], n: int) -> Lattice:
    """Lattice spanned over Z by a (possibly redundant) set of rational vectors."""
    cols = [tuple(rat(x) for x in v) for v in vectors]
    cols = [c for c in cols if any(c)]
    if not cols:
        raise RankDeficient("no nonzero generators")
    h = _integer_hnf_of_rational(cols, n)
    return Lattice(h, h)


def dual_lattice(k: Lattice) -> Lattice:
    return canonicalize(k.canonical.T.inv())


def is_sublattice(k1: Lattice, k2: Lattice):
    """Return (flag, M) with K1 = K2 . M when K1 is a sublattice of K2."""
    if k1.n != k2.n:
        raise ValueError("dimension mismatch")
    m = k2.canonical.inv() @ k1.canonical
    if m.is_integral():
        return True, m
    return False, None


def in_lat(r, k: Lattice) -> bool:
    """True iff R(K) is contained in K."""
    r = as_matrix(r)
    if r.det() == 0:
        raise SingularMatrix("R must be invertible")
    return (k.canonical.inv() @ r @ k.canonical).is_integral()


def quotient_index(k1: Lattice, k2: Lattice) -> int:
    """Index [K2 : K1] for K1 contained in K2."""
    ok, m = is_sublattice(k1, k2)
    if not ok:
        raise NotSublattice("first lattice is not contained in the second")
    return int(abs(m.det()))


def preimage(r, k: Lattice) -> Lattice:
    """R^{-1}(K)."""
    r = as_matrix(r)
    return canonicalize(r.inv() @ k.canonical)


def image(r, k: Lattice) -> Lattice:
    r = as_matrix(r)
    return canonicalize(r @ k.canonical)


def direct_sum(k1: Lattice, k2: Lattice) -> Lattice:
    return canonicalize(RatMatrix.block_diag(k1.canonical, k2.canonical))


def quotient_transversal(k_lo: Lattice, k_hi: Lattice) -> list:
    """Coset representatives of K_hi / K_lo (exact rational vectors).

    Uses the Smith form of the integer matrix M with K_lo = K_hi M: if
    U M V = D then the columns of K_hi U^{-1}, cut off at d_i, give a
    transversal.
    """
    ok, m = is_sublattice(k_lo, k_hi)
    if not ok:
        raise NotSublattice("first lattice is not contained in the second")
    mi = [[int(x) for x in r] for r in m.rows]
    d, u = diagonalize(mi)
    p = k_hi.canonical @ RatMatrix(u).inv()
    reps = []
    for c in itertools.product(*(range(di) for di in d)):
        reps.append(p @ c)
    return reps


def coset_reps(r, k: Lattice) -> list:
    """Representatives of the finite group R^{-1}(K)/K."""
    r = as_matrix(r)
    if not in_lat(r, k):
        raise NotInvariant("K is not invariant under R")
    return quotient_transversal(k, preimage(r, k))


def is_integral_charpoly(r) -> bool:
    return all(c.denominator == 1 for c in as_matrix(r).charpoly())


def minimal_invariant_lattice(r, generators: Iterable[RatVector]) -> Lattice:
    """Smallest R-invariant lattice containing the given vectors.

    Generated by R^j g for g in G and 0 <= j < n; when the characteristic
    polynomial of R is monic with integer coefficients, R^n g is an integer
    combination of lower powers, so this lattice is R-invariant.
    """
    r = as_matrix(r)
    n = r.nrows
    if not is_integral_charpoly(r):
        raise NoInvariantLattice("characteristic polynomial of R is not integral")
    gens = []
    for g in generators:
        v = tuple(rat(x) for x in g)
        for _ in range(n):
            gens.append(v)
            v = r @ v
    try:
        k = lattice_generated(gens, n)
    except RankDeficient as exc:
        raise RankDeficient("R-iterates of the generators do not span R^n") from exc
    if not in_lat(r, k):
        raise NoInvariantLattice("generated lattice is not R-invariant")
    return k


def superlattices_between(k_lo: Lattice, k_hi: Lattice) -> list:
    """All lattices K with K_lo <= K <= K_hi, each once, sorted by index."""
    reps = quotient_transversal(k_lo, k_hi)
    n = k_lo.n
    found = {k_lo}
    frontier = [k_lo]
    while frontier:
        nxt = []
        for k in frontier:
            for g in reps:
                if k.contains(g):
                    continue
                bigger = lattice_generated(k.canonical.columns() + [g], n)
                if bigger not in found:
                    found.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    return sorted(found, key=lambda k: (quotient_index(k_lo, k), _sort_key(k)))


def _sort_key(k: Lattice):
    return tuple(x for r in k.canonical.rows for x in r)


def _hnf_matrices_with_det(d: int, n: int):
    """Integer lower-triangular column-HNF matrices of determinant d."""

    def diagonals(rem, slots):
        if slots == 1:
            yield (rem,)
            return
        for a in range(1, rem + 1):
            if rem % a == 0:
                for rest in diagonals(rem // a, slots - 1):
                    yield (a,) + rest

    for diag in diagonals(d, n):
        below = [(i, j) for i in range(n) for j in range(i)]
        ranges = [range(diag[i]) for i, _ in below]
        for vals in itertools.product(*ranges):
            h = [[0] * n for _ in range(n)]
            for i in range(n):
                h[i][i] = diag[i]
            for (i, j), v in zip(below, vals):
                h[i][j] = v
            yield h


def superlattices_of_index(k_lo: Lattice, max_index: int) -> list:
    """All lattices K containing K_lo with [K : K_lo] <= max_index.

    Enumerated through their duals: K contains K_lo iff the dual of K is a
    sublattice of the dual of K_lo, and sublattices of a given index are
    in bijection with column-HNF integer matrices of that determinant.
    """
    n = k_lo.n
    dual_lo = dual_lattice(k_lo).canonical
    out = []
    for d in range(1, max_index + 1):
        for h in _hnf_matrices_with_det(d, n):
            out.append(dual_lattice(canonicalize(dual_lo @ RatMatrix(h))))
    return out


# ---------------------------------------------------------------------------
# serialization helpers


def matrix_to_json(m: RatMatrix) -> list:
    return m.to_strings()


def matrix_from_json(data, where: str = "matrix") -> RatMatrix:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ParseError(f"{where}: expected a non-empty array of arrays")
    try:
        return RatMatrix([[_parse_scalar(x, where) for x in r] for r in data])
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def vectors_to_json(vs) -> list:
    return [[fmt_rat(x) for x in v] for v in vs]


def vectors_from_json(data, where: str = "vectors") -> list:
    if not isinstance(data, list):
        raise ParseError(f"{where}: expected an array of vectors")
    out = []
    for i, v in enumerate(data):
        if not isinstance(v, list):
            raise ParseError(f"{where}[{i}]: expected an array")
        out.append(tuple(_parse_scalar(x, f"{where}[{i}]") for x in v))
    return out


def _parse_scalar(x, where):
    if isinstance(x, float):
        raise ParseError(f"{where}: float literal {x!r} not allowed, use a \"p/q\" string")
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        try:
            return rat(x)
        except ParseError as exc:
            raise ParseError(f"{where}: {exc}") from exc
    raise ParseError(f"{where}: unsupported scalar {x!r}")
