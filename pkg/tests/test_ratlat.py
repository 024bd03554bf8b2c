from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from sfl import ratlat
from sfl.errors import NotInvariant, NotSublattice, ParseError, RankDeficient, SingularMatrix
from sfl.ratlat import RatMatrix, canonicalize, dual_lattice, integer_lattice

H = F(1, 2)
L74 = RatMatrix([[1, 1, -1], [1, -1, 1], [-1, 1, 1]]) * (-H)

small = st.integers(-6, 6)
rationals = st.builds(F, st.integers(-12, 12), st.integers(1, 6))


def nonsingular(n=2, elems=rationals):
    rows = st.lists(st.lists(elems, min_size=n, max_size=n), min_size=n, max_size=n)
    return rows.map(RatMatrix).filter(lambda m: m.det() != 0)


@st.composite
def unimodular(draw, n=2):
    m = RatMatrix.identity(n)
    for _ in range(draw(st.integers(0, 5))):
        i, j = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if i == j:
            continue
        c = draw(st.integers(-3, 3))
        rows = [list(r) for r in RatMatrix.identity(n).rows]
        rows[i][j] = F(c)
        m = m @ RatMatrix(rows)
    return m


# -- matrices -----------------------------------------------------------------


def test_rat_rejects_floats():
    with pytest.raises(TypeError):
        ratlat.rat(0.5)
    assert ratlat.rat("3/4") == F(3, 4)
    with pytest.raises(ParseError):
        ratlat.rat("x/2")


def test_det_inverse_charpoly():
    m = RatMatrix([[2, 1], [0, 2]])
    assert m.det() == 4
    assert m @ m.inv() == RatMatrix.identity(2)
    assert list(m.charpoly()) == [4, -4, 1]  # constant term first


def test_singular_inverse():
    with pytest.raises(SingularMatrix):
        RatMatrix([[1, 2], [2, 4]]).inv()


@given(nonsingular())
def test_inverse_property(m):
    assert m @ m.inv() == RatMatrix.identity(2)
    assert m.inv().det() == 1 / m.det()


@given(nonsingular(), nonsingular())
def test_det_multiplicative(a, b):
    assert (a @ b).det() == a.det() * b.det()


# -- lattices -----------------------------------------------------------------


def test_canonical_identity():
    assert canonicalize(RatMatrix.identity(3)).canonical == RatMatrix.identity(3)


def test_unimodular_column_change_is_same_lattice():
    a = RatMatrix.from_columns([(1, 1), (0, F(3, 2))])
    b = RatMatrix.from_columns([(1, -H), (0, F(3, 2))])
    assert canonicalize(a) == canonicalize(b)


def test_one_dimensional():
    assert canonicalize([[2]]).canonical == RatMatrix([[2]])


@given(nonsingular(), unimodular())
def test_canonical_form_invariant_under_unimodular(m, u):
    assert canonicalize(m) == canonicalize(m @ u)
    assert canonicalize(m).det() == abs(m.det())


def test_dual_examples():
    assert dual_lattice(integer_lattice(2)) == integer_lattice(2)
    assert dual_lattice(integer_lattice(1, 2)) == integer_lattice(1, H)
    k = canonicalize([[3, 0], [3, F(3, 2)]])
    assert dual_lattice(k) == canonicalize([[F(1, 3), F(-2, 3)], [0, F(2, 3)]])


@given(nonsingular())
def test_dual_involution_and_pairing(m):
    k = canonicalize(m)
    kd = dual_lattice(k)
    assert dual_lattice(kd) == k
    assert (kd.canonical.T @ k.canonical).is_integral()
    assert kd.det() * k.det() == 1


def test_sublattice_examples():
    z, z2 = integer_lattice(1), integer_lattice(1, 2)
    ok, m = ratlat.is_sublattice(z2, z)
    assert ok and m == RatMatrix([[2]])
    assert ratlat.is_sublattice(z, z2) == (False, None)
    assert ratlat.is_sublattice(integer_lattice(2, 3), canonicalize([[1, 0], [1, F(3, 2)]]))[0]


def test_in_lat_examples():
    assert ratlat.in_lat([[4]], integer_lattice(1))
    assert ratlat.in_lat([[3]], integer_lattice(1, 2))
    assert ratlat.in_lat([[2, 1], [0, 2]], integer_lattice(2))
    assert not ratlat.in_lat([[H]], integer_lattice(1))


def test_quotient_index_examples():
    z = integer_lattice(1)
    assert ratlat.quotient_index(z, z) == 1
    assert ratlat.quotient_index(z, integer_lattice(1, F(1, 4))) == 4
    assert ratlat.quotient_index(integer_lattice(3), canonicalize(L74)) == 2
    with pytest.raises(NotSublattice):
        ratlat.quotient_index(integer_lattice(1, F(1, 4)), z)


def test_coset_reps_examples():
    reps = ratlat.coset_reps([[4]], integer_lattice(1))
    assert sorted(r[0] % 1 for r in reps) == [
        0,
        F(1, 4),
        H,
        F(3, 4),
    ]
    assert len(ratlat.coset_reps(RatMatrix.scalar(3, 2), integer_lattice(3))) == 8
    with pytest.raises(NotInvariant):
        ratlat.coset_reps([[H]], integer_lattice(1))


@given(nonsingular(2, small))
def test_coset_reps_count_and_distinct(r):
    k = integer_lattice(2)
    if not r.is_integral():
        return
    reps = ratlat.coset_reps(r, k)
    assert len(reps) == abs(r.det())
    pre = ratlat.preimage(r, k)
    for i in range(len(reps)):
        assert pre.contains(reps[i])
        for j in range(i):
            assert not k.contains(ratlat.vsub(reps[i], reps[j]))


def test_minimal_invariant_lattice_examples():
    assert ratlat.minimal_invariant_lattice([[4]], [(0,), (2,)]) == integer_lattice(1, 2)
    assert ratlat.minimal_invariant_lattice(RatMatrix.scalar(2, 6), [(3, 0), (0, 3)]) == integer_lattice(2, 3)
    cols = [(-1, 0, 0), (0, -1, 0), (0, 0, -1)]
    assert ratlat.minimal_invariant_lattice(RatMatrix.scalar(3, 2), cols) == integer_lattice(3)
    with pytest.raises(RankDeficient):
        ratlat.minimal_invariant_lattice([[2, 1], [0, 2]], [(1, 0)])


def test_superlattices_examples():
    z2, z = integer_lattice(1, 2), integer_lattice(1)
    assert ratlat.superlattices_between(z, z) == [z]
    assert set(ratlat.superlattices_between(z2, z)) == {z2, z}
    out = ratlat.superlattices_between(integer_lattice(3), canonicalize(L74))
    assert len(out) == 2


def test_superlattices_of_index_matches_between():
    lo = integer_lattice(2, 2)
    between = set(ratlat.superlattices_between(lo, integer_lattice(2)))
    z2 = integer_lattice(2)
    bounded = {k for k in ratlat.superlattices_of_index(lo, 4) if ratlat.is_sublattice(k, z2)[0]}
    assert between == bounded
    # subgroups of Z/3 x Z/3 plus index-4 and index-2 ones of index <= 6 over 3Z^2
    assert len(ratlat.superlattices_of_index(integer_lattice(2, 3), 6)) == 33


@given(st.integers(1, 4), st.integers(1, 4))
def test_superlattice_count_one_dimensional(a, b):
    # lattices between (ab)Z and Z correspond to divisors of ab
    n = a * b
    out = ratlat.superlattices_between(integer_lattice(1, n), integer_lattice(1))
    assert len(out) == sum(1 for d in range(1, n + 1) if n % d == 0)


def test_json_round_trip_and_float_rejection():
    m = RatMatrix([[1, H], [F(-2, 3), 4]])
    assert ratlat.matrix_from_json(ratlat.matrix_to_json(m)) == m
    with pytest.raises(ParseError):
        ratlat.matrix_from_json([[0.5]])
