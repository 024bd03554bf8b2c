"""Built-in example systems and the facts stated for them in the literature.

The ``expected`` records are data only; tests re-derive every fact through
the library operations instead of trusting these values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotFound
from .ratlat import RatMatrix
from .system import AffineSystem

H = Fraction(1, 2)
T = Fraction(2, 3)


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    system: AffineSystem
    expected: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    description: str = ""

    def to_json(self) -> dict:
        exp = {}
        for k, v in self.expected.items():
            if isinstance(v, RatMatrix):
                v = v.to_strings()
            elif isinstance(v, (list, tuple)) and v and isinstance(v[0], RatMatrix):
                v = [m.to_strings() for m in v]
            elif isinstance(v, Fraction):
                v = str(v)
            exp[k] = v
        return {
            "id": self.id,
            "description": self.description,
            "system": self.system.to_json(),
            "expected": exp,
            "provenance": dict(self.provenance),
        }


def _group1():
    s = AffineSystem([[4]], [(0,), (H,)], [(0,), (1,)], [[1]])
    return CatalogEntry(
        "group1",
        s,
        expected={
            "hadamard_form": "N2",
            "selfadjoint": True,
            "lattices": [RatMatrix([[1]]), RatMatrix([[2]])],
            "dimension": 0.5,
            "omega": [[0, "1/4"], ["1/2", "3/4"]],
            "lambda": "{0,1}+4Z",
        },
        provenance={
            "hadamard_form": "Group 1 examples, N=2 sign matrix",
            "lattices": "Group 1: only K=Z and K=2Z",
            "dimension": "Group 1: D = ln2/ln4 = 1/2",
            "omega": "Group 1 spectral pair",
        },
        description="R=4, B={0,1/2}, L={0,1}, K=Z",
    )


def _cantor3():
    s = AffineSystem([[3]], [(0,), (T,)], [(0,), (Fraction(3, 4),)])
    return CatalogEntry(
        "cantor3",
        s,
        expected={"hadamard_form": "N2", "selfadjoint_lattices": [], "symmetric_with": RatMatrix([[2]])},
        provenance={"selfadjoint_lattices": "middle-third Cantor: no lattice K makes s_K selfadjoint"},
        description="middle-third Cantor set: R=3, B={0,2/3}, L={0,3/4}",
    )


def _group2():
    l = (T, -T)
    s = AffineSystem(
        RatMatrix.scalar(2, 6),
        [(0, 0), (H, 0), (0, H)],
        [(0, 0), l, (-T, T)],
        RatMatrix.scalar(2, 3),
    )
    return CatalogEntry(
        "group2",
        s,
        expected={
            "hadamard_form": "N3",
            "selfadjoint": True,
            "listed_lattices": [
                RatMatrix.scalar(2, 3),
                RatMatrix([[3, 0], [3, H * 3]]),
                RatMatrix([[1, 0], [1, H * 3]]),
            ],
            "dimension": math.log(3) / math.log(6),
        },
        provenance={
            "listed_lattices": "Group 2: three lattices listed as the only choices (asserted in the source, not tool-verified complete)",
            "dimension": "Group 2: D = ln3/ln6 ~ .61",
        },
        description="R=6I, B={0,e1/2,e2/2}, L={0,+-(2/3)(1,-1)}, K=3Z^2",
    )


def _group3():
    s = AffineSystem(
        RatMatrix.scalar(3, 2),
        [(0, 0, 0), (-H, 0, 0), (0, -H, 0), (0, 0, -H)],
        [(0, 0, 0), (-1, -1, 0), (-1, 0, -1), (0, -1, -1)],
        RatMatrix.identity(3),
    )
    return CatalogEntry(
        "group3",
        s,
        expected={
            "hadamard_form": "N4",
            "u": Fraction(1, 2),
            "selfadjoint": True,
            "lattices": [RatMatrix.identity(3), RatMatrix([[1, 1, -1], [1, -1, 1], [-1, 1, 1]]) * (-H)],
            "max_lattice": RatMatrix([[1, 1, -1], [1, -1, 1], [-1, 1, 1]]) * (-H),
            "dimension": 2.0,
            "selfdual": True,
        },
        provenance={
            "u": "Group 3: N=4 form with u=-1 (exponent 1/2)",
            "lattices": "Group 3: Z^3 minimal, L° maximal",
            "dimension": "D = ln4/ln2 = 2",
        },
        description="R=2I_3, B={0} u columns of -I/2, L={0,-(1,1,0),-(1,0,1),-(0,1,1)}, K=Z^3",
    )


def _sierpinski2():
    s = AffineSystem(
        RatMatrix.scalar(2, 2),
        [(0, 0), (H, 0), (0, H)],
        [(0, 0), (T, -T), (-T, T)],
    )
    return CatalogEntry(
        "sierpinski2",
        s,
        expected={"hadamard_form": "N3", "selfadjoint_lattices": [], "dimension": math.log(3) / math.log(2)},
        provenance={"selfadjoint_lattices": "planar gasket: no lattice choice for K", "dimension": "D = ln3/ln2"},
        description="planar Sierpinski gasket: R=2I_2, B={0,e1/2,e2/2}, L={0,+-(2/3)(1,-1)}",
    )


def _quartic_u_i():
    s = AffineSystem(
        RatMatrix.scalar(3, 2),
        [(0, 0, 0), (H, 0, 0), (0, H, 0), (0, 0, H)],
        [(0, 0, 0), (H, 1, 3 * H), (1, 0, 1), (3 * H, 1, H)],
    )
    return CatalogEntry(
        "quartic_u_i",
        s,
        expected={"hadamard_form": "N4", "u": Fraction(1, 4), "selfadjoint_lattices": [], "dimension": 2.0},
        provenance={"u": "N=4 form with a primitive 4th root, u=i", "selfadjoint_lattices": "no lattice choice for K"},
        description="R=2I_3, B={0} u columns of I/2, L={0} u columns of [[1/2,1,3/2],[1,0,1],[3/2,1,1/2]]",
    )


def _reducible2():
    s = AffineSystem([[2, 1], [0, 2]], [(0, 0), (H, 0)], [(0, 0), (1, 0)], RatMatrix.identity(2))
    return CatalogEntry(
        "reducible2",
        s,
        expected={
            "irreducible": False,
            "selfadjoint": True,
            "muhat": "exp(i pi s1) sin(pi s1)/(pi s1), 1 at s1=0",
            "cal_l": "(n, N(n)), N(n) = sum_j j 2^(j-1) eps_j",
            "maximal": False,
        },
        provenance={"muhat": "closed form for the reducible planar example", "maximal": "fails for t1 negative integer"},
        description="reducible: R=[[2,1],[0,2]], B={0,(1/2,0)}, L={0,(1,0)}, K=Z^2",
    )


_BUILDERS = {
    "group1": _group1,
    "cantor3": _cantor3,
    "group2": _group2,
    "group3": _group3,
    "sierpinski2": _sierpinski2,
    "quartic_u_i": _quartic_u_i,
    "reducible2": _reducible2,
}

_CACHE: dict = {}


def ids() -> list:
    return [*_BUILDERS]


def get(id: str) -> CatalogEntry:
    if id not in _BUILDERS:
        raise NotFound(f"unknown catalog id {id!r}; known: {', '.join(_BUILDERS)}")
    if id not in _CACHE:
        _CACHE[id] = _BUILDERS[id]()
    return _CACHE[id]


def system(id: str) -> AffineSystem:
    return get(id).system


def selfadjoint_ids() -> list:
    return ["group1", "group2", "group3", "reducible2"]


def __getattr__(name):
    # catalog.list() without shadowing the builtin inside this module
    if name == "list":
        return ids
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
