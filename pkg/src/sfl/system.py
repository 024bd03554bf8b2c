"""Affine systems s = (R, B, L, K) and their structural predicates."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import ratlat
from .errors import Indeterminate, MissingLattice, ParseError, RankDeficient
from .hadamard import is_generalized_hadamard, phase_table
from .ratlat import Lattice, RatMatrix, as_matrix, vneg

EXPANSIVE_MARGIN = 1e-9


class AffineSystem:
    """The quadruple (R, B, L, K); K may be absent.

    Validated on construction.  Derived flags are cached per instance.
    """

    def __init__(self, R, B: Sequence, L: Sequence, K: Optional[Lattice | RatMatrix] = None):
        self.R = as_matrix(R)
        n = self.R.nrows
        if not self.R.is_square():
            raise ValueError("R must be square")
        if self.R.det() == 0:
            raise ratlat.SingularMatrix("R must be invertible")
        self.B = tuple(ratlat.vec(b) for b in B)
        self.L = tuple(ratlat.vec(l) for l in L)
        for name, pts in (("B", self.B), ("L", self.L)):
            if any(len(p) != n for p in pts):
                raise ValueError(f"{name} contains a vector of the wrong dimension")
            if ratlat.zero_vec(n) not in pts:
                raise ValueError(f"{name} must contain the origin")
            if len(set(pts)) != len(pts):
                raise ValueError(f"{name} has repeated points")
        if K is not None and not isinstance(K, Lattice):
            K = ratlat.canonicalize(as_matrix(K))
        if K is not None and K.n != n:
            raise ValueError("K has the wrong dimension")
        self.K = K

    @property
    def n(self) -> int:
        return self.R.nrows

    @property
    def N(self) -> int:
        return len(self.B)

    def with_lattice(self, K) -> "AffineSystem":
        return AffineSystem(self.R, self.B, self.L, K)

    def require_lattice(self) -> Lattice:
        if self.K is None:
            raise MissingLattice("system has no lattice K")
        return self.K

    def __eq__(self, other):
        return (
            isinstance(other, AffineSystem)
            and self.R == other.R
            and self.B == other.B
            and self.L == other.L
            and self.K == other.K
        )

    def __hash__(self):
        return hash((self.R, self.B, self.L, self.K))

    def __repr__(self):
        return f"AffineSystem(n={self.n}, N={self.N}, K={'-' if self.K is None else self.K.canonical})"

    @cached_property
    def R_star(self) -> RatMatrix:
        return self.R.T

    @cached_property
    def R_star_inv(self) -> RatMatrix:
        return self.R.T.inv()

    @cached_property
    def K_dual(self) -> Lattice:
        return ratlat.dual_lattice(self.require_lattice())

    # serialization -----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "R": ratlat.matrix_to_json(self.R),
            "B": ratlat.vectors_to_json(self.B),
            "L": ratlat.vectors_to_json(self.L),
            "K": None if self.K is None else ratlat.matrix_to_json(self.K.basis),
        }

    def dumps(self) -> str:
        return dumps_system(self)

    @classmethod
    def from_json(cls, data) -> "AffineSystem":
        if not isinstance(data, dict):
            raise ParseError("system: expected a JSON object")
        missing = [k for k in ("n", "R", "B", "L") if k not in data]
        if missing:
            raise ParseError(f"system: missing key(s) {', '.join(missing)}")
        R = ratlat.matrix_from_json(data["R"], "R")
        B = ratlat.vectors_from_json(data["B"], "B")
        L = ratlat.vectors_from_json(data["L"], "L")
        K = data.get("K")
        K = None if K is None else ratlat.matrix_from_json(K, "K")
        if data["n"] != R.nrows:
            raise ParseError(f"n: declared {data['n']} but R is {R.nrows}x{R.ncols}")
        try:
            return cls(R, B, L, K)
        except (ValueError, ratlat.SingularMatrix) as exc:
            raise ParseError(f"system: {exc}") from exc


_KEY_ORDER = ("n", "R", "B", "L", "K")


def dumps_system(s: AffineSystem) -> str:
    """Canonical JSON text (fixed key order, rationals as strings)."""
    d = s.to_json()
    return "{" + ", ".join(f"{json.dumps(k)}: {json.dumps(d[k])}" for k in _KEY_ORDER) + "}\n"


def loads_system(text: str) -> AffineSystem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return AffineSystem.from_json(data)


# ---------------------------------------------------------------------------
# predicates


@dataclass(frozen=True)
class Expansivity:
    expansive: bool
    margin: float  # min |eigenvalue| - 1

    def __bool__(self):
        return self.expansive


def expansivity(R) -> Expansivity:
    R = as_matrix(R)
    if R.det() == 0:
        raise ratlat.SingularMatrix("R must be invertible")
    margin = float(np.min(np.abs(np.linalg.eigvals(R.to_float())))) - 1.0
    if abs(margin) < EXPANSIVE_MARGIN:
        raise Indeterminate(f"smallest eigenvalue modulus is within {EXPANSIVE_MARGIN} of 1")
    return Expansivity(margin > 0, margin)


def is_expansive(R) -> bool:
    return expansivity(R).expansive


def is_symmetric(s: AffineSystem) -> bool:
    K = s.require_lattice()
    return all(K.contains(s.R @ b) for b in s.B) and ratlat.in_lat(s.R, K)


def dual_system(s: AffineSystem) -> AffineSystem:
    """(R*, -R*^{-1} L, -R B, K°)."""
    s.require_lattice()
    B2 = [vneg(s.R_star_inv @ l) for l in s.L]
    L2 = [vneg(s.R @ b) for b in s.B]
    return AffineSystem(s.R_star, B2, L2, s.K_dual)


@dataclass(frozen=True)
class SelfadjointReport:
    selfadjoint: bool
    invariant: bool  # (i) K in lat(R)
    digits_in_lattice: bool  # (ii) R(B) in K
    frequencies_in_dual: bool  # (iii) L in K°
    failed: tuple = field(default=())

    def __bool__(self):
        return self.selfadjoint


def selfadjoint_report(s: AffineSystem) -> SelfadjointReport:
    K = s.require_lattice()
    i = ratlat.in_lat(s.R, K)
    ii = all(K.contains(s.R @ b) for b in s.B)
    iii = all(s.K_dual.contains(l) for l in s.L)
    failed = tuple(name for name, ok in (("i", i), ("ii", ii), ("iii", iii)) if not ok)
    return SelfadjointReport(i and ii and iii, i, ii, iii, failed)


def is_selfadjoint(s: AffineSystem) -> bool:
    return selfadjoint_report(s).selfadjoint


def is_hadamard(s: AffineSystem) -> bool:
    return len(s.B) == len(s.L) and is_generalized_hadamard(phase_table(s.B, s.L))


def coset_injective(s: AffineSystem) -> bool:
    """Distinct digits lie in distinct cosets of K."""
    K = s.require_lattice()
    B = s.B
    return all(not K.contains(ratlat.vsub(B[i], B[j])) for i in range(len(B)) for j in range(i))


def is_irreducible(s: AffineSystem) -> bool:
    vecs = []
    for b in s.B:
        v = b
        for _ in range(s.n):
            vecs.append(v)
            v = s.R @ v
    return ratlat.rank_of(vecs, s.n) == s.n


# ---------------------------------------------------------------------------
# lattice search


@dataclass(frozen=True)
class LatticeSearch:
    lattices: tuple
    complete: bool
    K_min: Optional[Lattice]
    K_max: Optional[Lattice]
    note: str = ""


def _lemma_conditions(R, B, L, K: Lattice) -> bool:
    if not ratlat.in_lat(R, K):
        return False
    if not all(K.contains(R @ b) for b in B):
        return False
    Kd = ratlat.dual_lattice(K)
    return all(Kd.contains(l) for l in L)


def selfadjoint_lattices(R, B, L, index_bound: int = 8) -> LatticeSearch:
    """All lattices K making (R, B, L, K) selfadjoint.

    Complete when L spans R^n (then K lies between K_min and L°).  Otherwise
    lattices up to index ``index_bound`` over K_min are returned and the
    result is flagged incomplete.
    """
    R = as_matrix(R)
    B = [ratlat.vec(b) for b in B]
    L = [ratlat.vec(l) for l in L]
    n = R.nrows
    if not is_expansive(R):
        raise ValueError("R must be expansive")
    try:
        K_min = ratlat.minimal_invariant_lattice(R, [R @ b for b in B])
    except RankDeficient:
        # reducible digit set: lattices containing R(B) are not pinned down
        return LatticeSearch((), False, None, None, "R-orbit of R(B) does not span R^n; no minimal lattice")
    K_min_dual = ratlat.dual_lattice(K_min)
    if not all(K_min_dual.contains(l) for l in L):
        return LatticeSearch((), True, K_min, None, "L is not contained in the dual of K_min")
    spans = ratlat.rank_of(L, n) == n
    if spans:
        K_max = ratlat.dual_lattice(ratlat.lattice_generated(L, n))
        if not ratlat.is_sublattice(K_min, K_max)[0]:
            return LatticeSearch((), True, K_min, K_max, "K_min is not contained in L°")
        cands = ratlat.superlattices_between(K_min, K_max)
        good = tuple(k for k in cands if _lemma_conditions(R, B, L, k))
        return LatticeSearch(good, True, K_min, K_max)
    cands = ratlat.superlattices_of_index(K_min, index_bound)
    good = tuple(k for k in cands if _lemma_conditions(R, B, L, k))
    return LatticeSearch(good, False, K_min, None, f"L does not span R^{n}; searched index <= {index_bound}")


# ---------------------------------------------------------------------------
# tensor products


def tensor_system(s1: AffineSystem, s2: AffineSystem) -> AffineSystem:
    """Block-diagonal R, product digit sets (s1 index outer), direct-sum K."""
    R = RatMatrix.block_diag(s1.R, s2.R)
    B = [b1 + b2 for b1 in s1.B for b2 in s2.B]
    L = [l1 + l2 for l1 in s1.L for l2 in s2.L]
    K = None
    if s1.K is not None and s2.K is not None:
        K = ratlat.direct_sum(s1.K, s2.K)
    return AffineSystem(R, B, L, K)


def trivial_system(r=2) -> AffineSystem:
    return AffineSystem([[r]], [(0,)], [(0,)], [[1]])


# ---------------------------------------------------------------------------
# report used by the CLI


def check_report(s: AffineSystem) -> dict:
    from .hadamard import classify_small
    from .spectrum import totality_diagnostics

    exp = expansivity(s.R)
    out = {
        "n": s.n,
        "N": s.N,
        "expansive": exp.expansive,
        "expansive_margin": exp.margin,
        "irreducible": is_irreducible(s),
        "hadamard": is_hadamard(s),
    }
    out["class"] = None
    if out["hadamard"] and s.N <= 4:
        out["class"] = classify_small(phase_table(s.B, s.L)).to_json()
    if s.K is None:
        out.update(symmetric=None, selfadjoint=None, failed_conditions=None, coset_injective=None, totality=None)
    else:
        rep = selfadjoint_report(s)
        out["symmetric"] = is_symmetric(s)
        out["selfadjoint"] = rep.selfadjoint
        out["failed_conditions"] = list(rep.failed)
        out["coset_injective"] = coset_injective(s)
        out["totality"] = totality_diagnostics(s).to_json()
    return out


__all__ = [
    "AffineSystem",
    "Expansivity",
    "LatticeSearch",
    "SelfadjointReport",
    "coset_injective",
    "dual_system",
    "expansivity",
    "is_expansive",
    "is_hadamard",
    "is_irreducible",
    "is_selfadjoint",
    "is_symmetric",
    "selfadjoint_lattices",
    "selfadjoint_report",
    "tensor_system",
    "trivial_system",
    "dumps_system",
    "loads_system",
]
