from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import minors_gcd_factors, sympy_invariant_factors
from taylortower.linalg import (GF, QQ, ZZ, Echelon, Ring, RingError, SparseMatrix, det,
                                invariant_factors, kernel_basis, rank, smith_normal_form, solve)

small_int = st.integers(-6, 6)


def matrices(max_n=4, max_m=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.integers(1, max_m).flatmap(
            lambda m: st.lists(st.lists(small_int, min_size=m, max_size=m), min_size=n, max_size=n)))


def test_ring_parse():
    assert Ring.parse("Z") == ZZ
    assert Ring.parse("Q") == QQ
    assert Ring.parse("Fp:5") == GF(5)
    with pytest.raises(RingError):
        Ring.parse("Fp:6")
    with pytest.raises(RingError):
        Ring.parse("R")


def test_field_inverse():
    F7 = GF(7)
    assert F7.norm(3 * F7.inv(3)) == 1
    assert QQ.inv(Fraction(2, 3)) == Fraction(3, 2)
    with pytest.raises(RingError):
        ZZ.inv(2)


def test_known_smith_forms():
    assert invariant_factors(SparseMatrix.from_dense([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], ZZ)) == [2, 6, 12]
    assert invariant_factors(SparseMatrix.from_dense([[0, 0], [0, 0]], ZZ)) == []
    assert invariant_factors(SparseMatrix.from_dense([[2]], ZZ)) == [2]


@given(matrices())
def test_invariant_factors_match_sympy(rows):
    M = SparseMatrix.from_dense(rows, ZZ)
    assert invariant_factors(M) == sympy_invariant_factors(rows)


@given(matrices(3, 3))
def test_invariant_factors_match_minors(rows):
    assert invariant_factors(SparseMatrix.from_dense(rows, ZZ)) == minors_gcd_factors(rows)


@given(matrices())
def test_smith_transforms(rows):
    diag, U, V = smith_normal_form(rows)
    mul = lambda A, B: [[sum(a * b for a, b in zip(r, c)) for c in zip(*B)] for r in A]
    D = mul(mul(U, rows), V)
    for i, r in enumerate(D):
        for j, x in enumerate(r):
            assert x == (diag[i] if i == j else 0)
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(matrices(), st.sampled_from([QQ, GF(2), GF(3)]))
def test_rank_nullity(rows, R):
    M = SparseMatrix.from_dense([[R.norm(x) for x in r] for r in rows], R)
    K = kernel_basis(M, R)
    assert rank(M, R) + len(K) == len(rows[0])
    for v in K:
        assert not M.apply(v, R)


@given(matrices(), st.lists(small_int, min_size=4, max_size=4))
def test_solve_recovers_image(rows, x):
    M = SparseMatrix.from_dense(rows, QQ)
    v = {j: Fraction(a) for j, a in enumerate(x[:M.ncols]) if a}
    b = M.apply(v, QQ)
    sol = solve(M, b, QQ)
    assert sol is not None
    assert M.apply(sol, QQ) == b


def test_echelon_reduce():
    E = Echelon(QQ)
    E.add({0: Fraction(1), 1: Fraction(1)}, "a")
    E.add({1: Fraction(1)}, "b")
    res, combo = E.reduce({0: Fraction(2), 1: Fraction(5)})
    assert not res
    assert combo == {"a": 2, "b": 3}


def test_det_exact():
    assert det([[2, 1], [7, 4]]) == 1
    assert det([[0, 1], [1, 0]]) == -1
    assert det([[1, 2, 3], [4, 5, 6], [7, 8, 9]]) == 0
