import pytest
from hypothesis import given, strategies as st

from oracles import dense_homology_ranks
from strategies import acyclic_inflation, complexes, complexes_with_homology
from taylortower.chain import (ChainComplex, ChainComplexError, ChainMap, BudgetExceeded, change_ring,
                               complex_from_dense, compose, cone, direct_sum, fiber, identity_map,
                               koszul_sign, scalar_map, shift, sphere, swap_map, tensor,
                               tensor_power, zero_complex)
from taylortower.homology import HomologyTable, connectivity, homology, is_acyclic, is_quasi_iso
from taylortower.linalg import GF, QQ, ZZ, SparseMatrix
from taylortower.reduction import reduce_complex, transport
from taylortower.serialize import complex_from_json, complex_to_json


def test_sphere_homology():
    assert homology(sphere(3)).describe() == "H_3 = Z"
    assert homology(zero_complex()).is_zero()


def test_rp2_cellular():
    # cells in degrees 0,1,2 with d2 = 2, d1 = 0
    C = complex_from_dense(ZZ, {0: 1, 1: 1, 2: 1}, {1: [[0]], 2: [[2]]})
    H = homology(C)
    assert H.groups == {0: (1, ()), 1: (0, (2,))}
    assert homology(change_ring(C, GF(2))).ranks() == {0: 1, 1: 1, 2: 1}
    assert homology(change_ring(C, QQ)).ranks() == {0: 1}


def test_dd_nonzero_reports_degree():
    with pytest.raises(ChainComplexError) as e:
        complex_from_dense(ZZ, {0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[1]]})
    assert e.value.degree == 2


def test_budget():
    with pytest.raises(BudgetExceeded):
        tensor_power(direct_sum(sphere(0), sphere(1), sphere(2)), 6, budget=100)


@given(complexes_with_homology())
def test_homology_of_scrambled_complex(pair):
    C, H = pair
    assert homology(C) == H


@given(complexes_with_homology(QQ))
def test_rational_betti_against_sympy(pair):
    C, H = pair
    dense = {k: C.d(k).to_dense() for k in C.diffs}
    assert dense_homology_ranks(C.ranks, dense) == H.ranks()


@given(complexes())
def test_reduction_is_homotopy_equivalence(C):
    red = reduce_complex(C)
    assert homology(red.complex) == homology(C)
    assert is_quasi_iso(red.proj) and is_quasi_iso(red.incl)
    back = compose(red.proj, red.incl)
    assert all(back.at(k) == identity_map(red.complex).at(k) for k in red.complex.ranks)


@given(complexes(QQ))
def test_reduction_minimal_over_field(C):
    red = reduce_complex(C)
    assert all(m.is_zero() for m in red.complex.diffs.values())
    assert red.complex.ranks == {k: v for k, v in homology(C).ranks().items()}


@given(complexes(), complexes())
def test_kunneth_ranks_over_q(C, D):
    HC, HD = homology(change_ring(C, QQ)), homology(change_ring(D, QQ))
    expect = {}
    for a, x in HC.ranks().items():
        for b, y in HD.ranks().items():
            expect[a + b] = expect.get(a + b, 0) + x * y
    assert homology(tensor(change_ring(C, QQ), change_ring(D, QQ))).ranks() == expect


@given(complexes(), st.integers(-3, 3))
def test_shift_moves_homology(C, j):
    assert homology(shift(C, j)) == homology(C).shifted(j)


@given(complexes())
def test_cone_of_identity_acyclic(C):
    assert is_acyclic(cone(identity_map(C)))
    assert is_acyclic(fiber(identity_map(C)))


@given(complexes())
def test_swap_squares_to_identity(C):
    s = swap_map(C, C)
    assert compose(s, s).comps == identity_map(s.source).comps


def test_koszul_sign():
    assert koszul_sign([1, 1], (1, 0)) == -1
    assert koszul_sign([1, 2], (1, 0)) == 1


@given(complexes(), st.data())
def test_inflation_is_quasi_iso(C, data):
    f = data.draw(acyclic_inflation(C))
    assert is_quasi_iso(f)


def test_connectivity_of_scalar():
    # multiplication by 2 on S^1 has cone with H_1 = Z/2
    assert connectivity(scalar_map(sphere(1), 2)) == 0
    assert connectivity(identity_map(sphere(1))) == float("inf")


@given(complexes())
def test_json_roundtrip(C):
    D = complex_from_json(complex_to_json(C))
    assert D.same_as(C)


def test_transport_identity():
    C = complex_from_dense(ZZ, {0: 2, 1: 1}, {1: [[1], [-1]]})
    red = reduce_complex(C)
    f = transport(identity_map(C), red, red)
    assert is_quasi_iso(f)
    assert homology(red.complex).ranks() == {0: 1}


def test_chainmap_checks_commutation():
    C = sphere(0)
    D = complex_from_dense(ZZ, {0: 1, 1: 1}, {1: [[1]]})
    with pytest.raises(ChainComplexError):
        ChainMap(D, D, {0: SparseMatrix.from_dense([[1]], ZZ), 1: SparseMatrix.from_dense([[0]], ZZ)})
    assert ChainMap(C, C, {0: SparseMatrix.from_dense([[1]], ZZ)})


def test_homology_table_json():
    H = HomologyTable(ZZ, {0: (1, ()), 2: (0, (2, 4))})
    assert H.to_json() == [{"degree": 0, "rank": 1, "torsion": []},
                           {"degree": 2, "rank": 0, "torsion": [2, 4]}]
    assert H.describe() == "H_0 = Z, H_2 = Z/2 + Z/4"


def test_complex_json_rejects_unknown_keys():
    from taylortower.serialize import complex_from_json
    with pytest.raises(ValueError, match="ranks"):
        complex_from_json({"ranks": {"0": 1}})
