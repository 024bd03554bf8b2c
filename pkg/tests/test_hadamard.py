import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sfl import catalog, hadamard
from sfl.errors import NotSquare, Unclassified
from sfl.hadamard import PhaseMatrix, classify_small, is_generalized_hadamard, normal_form, phase_table, tensor

H = F(1, 2)


def table(id):
    s = catalog.system(id)
    return phase_table(s.B, s.L)


def numeric_hadamard(p):
    U = p.to_complex()
    return np.allclose(U.conj().T @ U, p.order * np.eye(p.order), atol=1e-12)


def test_cyclotomic_polynomials():
    assert hadamard.cyclotomic(1) == (-1, 1)
    assert hadamard.cyclotomic(3) == (1, 1, 1)
    assert hadamard.cyclotomic(4) == (1, 0, 1)
    assert hadamard.cyclotomic(12) == (1, 0, -1, 0, 1)


def test_root_sums():
    assert hadamard.root_sum_vanishes([F(0), H])
    assert hadamard.root_sum_vanishes([F(0), F(1, 3), F(2, 3)])
    assert not hadamard.root_sum_vanishes([F(0), F(1, 3)])
    # 1 + i - 1 - i
    assert hadamard.root_sum_vanishes([F(0), F(1, 4), H, F(3, 4)])
    assert hadamard.root_sum_vanishes([F(1, 5) * k for k in range(5)] + [F(0), H])


@given(st.lists(st.builds(F, st.integers(0, 23), st.just(24)), min_size=1, max_size=6))
def test_root_sum_matches_numeric(exps):
    z = sum(np.exp(2j * np.pi * float(e)) for e in exps)
    exact = hadamard.root_sum_vanishes(exps)
    assert exact == (abs(z) < 1e-9)


def test_phase_tables():
    assert table("group1").exponents == ((0, 0), (0, H))
    assert table("cantor3").exponents == ((0, 0), (0, H))
    assert PhaseMatrix(((0,),)).order == 1
    with pytest.raises(NotSquare):
        phase_table([(0,)], [(0,), (1,)])


def test_hadamard_predicate():
    assert is_generalized_hadamard(table("group1"))
    assert is_generalized_hadamard(table("group2"))
    assert not is_generalized_hadamard(PhaseMatrix(((0, 0), (0, F(1, 3)))))


@pytest.mark.parametrize("id", catalog.ids())
def test_exact_agrees_with_numeric(id):
    p = table(id)
    assert is_generalized_hadamard(p) == numeric_hadamard(p)
    assert hadamard.rows_orthogonal(p) == is_generalized_hadamard(p)


def test_tensor_examples():
    p = table("group1")
    assert tensor(p, PhaseMatrix(((0,),))) == p
    t = tensor(p, p)
    assert t.order == 4 and is_generalized_hadamard(t)
    c = classify_small(t)
    assert c.form == "N4" and c.admits(0)


@pytest.mark.parametrize("a,b", list(itertools.product(catalog.ids(), repeat=2)))
def test_tensor_hadamard_is_conjunction(a, b):
    p1, p2 = table(a), table(b)
    if p1.order * p2.order > 16:
        pytest.skip("table too large for this sweep")
    assert is_generalized_hadamard(tensor(p1, p2)) == (is_generalized_hadamard(p1) and is_generalized_hadamard(p2))


def test_classification_of_catalog():
    assert classify_small(table("group1")).form == "N2"
    assert classify_small(table("cantor3")).form == "N2"
    assert classify_small(table("group2")).form == "N3"
    g3 = classify_small(table("group3"))
    assert g3.form == "N4" and g3.admits(H) and g3.parameter == H
    q = classify_small(table("quartic_u_i"))
    assert q.form == "N4" and q.admits(F(1, 4)) and q.parameter == F(1, 4)


def test_unclassified():
    with pytest.raises(Unclassified):
        classify_small(PhaseMatrix(((0, 0), (0, F(1, 3)))))
    big = PhaseMatrix(tuple(tuple(F(i * j, 5) for j in range(5)) for i in range(5)))
    assert is_generalized_hadamard(big)
    with pytest.raises(Unclassified):
        classify_small(big)


@settings(max_examples=15)  # each classification scans 576 permutation pairs
@given(
    st.sampled_from([F(k, 12) for k in range(12)]),
    st.permutations(range(4)),
    st.permutations(range(4)),
    st.lists(st.builds(F, st.integers(0, 11), st.just(12)), min_size=8, max_size=8),
)
def test_n4_classification_is_equivalence_invariant(u, rows, cols, phases):
    base = normal_form(4, u)
    e = base.permuted(rows, cols).exponents
    # multiply rows and columns by unimodular phases
    scrambled = PhaseMatrix(tuple(tuple(e[i][j] + phases[i] + phases[4 + j] for j in range(4)) for i in range(4)))
    c0, c1 = classify_small(base), classify_small(scrambled)
    assert c0 == c1
    assert c1.admits(u)
    assert c1.orbit == {u % 1, (-u) % 1, (u + H) % 1, (-u + H) % 1}


def test_json_round_trip():
    p = table("group2")
    assert PhaseMatrix.from_json(p.to_json()) == p
