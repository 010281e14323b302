import pytest
from hypothesis import given, strategies as st

from taylortower.homology import homology
from taylortower.linalg import ZZ
from taylortower.simplicial import (Poset, SimplicialError, SimplicialSet, boundary_simplex, builtin,
                                    circle, config_chains, epi_mono, interval, nerve,
                                    product_simplices, simplicial_from_json, surjections)

SPACES = ["circle", "interval", "boundary-simplex:2", "boundary-simplex:3"]


def euler(K):
    return sum((-1) ** d * K.count(d) for d in K.simplices)


monotone = st.integers(0, 4).flatmap(
    lambda m: st.lists(st.integers(0, 4), min_size=m + 1, max_size=m + 1).map(lambda v: tuple(sorted(v))))


@given(monotone)
def test_epi_mono_factorization(theta):
    epi, mono = epi_mono(theta)
    assert tuple(mono[e] for e in epi) == theta
    assert list(mono) == sorted(set(mono))
    assert set(epi) == set(range(len(mono)))


def test_surjection_count():
    # monotone surjections [m] -> [k] correspond to choosing k jump positions among m
    from math import comb
    for m in range(5):
        for k in range(m + 1):
            assert len(surjections(m, k)) == comb(m, k)


@pytest.mark.parametrize("name", SPACES)
@pytest.mark.parametrize("n", [1, 2])
def test_product_euler_characteristic(name, n):
    K = builtin(name)
    cells = product_simplices(K, n)
    chi = sum((-1) ** m * len(v) for m, v in cells.items())
    assert chi == euler(K) ** n


def test_square_cells():
    cells = product_simplices(interval(), 2)
    assert {m: len(v) for m, v in cells.items()} == {0: 4, 1: 5, 2: 2}
    cells = product_simplices(circle(), 2)
    assert {m: len(v) for m, v in cells.items()} == {0: 1, 1: 3, 2: 2}


@pytest.mark.parametrize("k", [1, 2, 3])
def test_sphere_chains(k):
    H = homology(config_chains(boundary_simplex(k), 1, based=False).complex)
    expect = {0: 2} if k == 1 else {0: 1, k - 1: 1}
    assert H.ranks() == expect


def test_interval_pairs_relative_to_diagonal():
    assert homology(config_chains(interval(), 2, based=False).complex).is_zero()


def test_broken_faces_rejected():
    v = ((0, 0), (0,))
    with pytest.raises(SimplicialError):
        SimplicialSet({0: ["v"], 1: ["e"]}, {(1, 0): [v]})
    # a triangle with all three faces equal to one edge from 0 to 1: d0 d2 != d1 d0
    e = ((1, 0), (0, 1))
    bad = {(1, 0): [((0, 1), (0,)), ((0, 0), (0,))], (2, 0): [e, e, e]}
    with pytest.raises(SimplicialError):
        SimplicialSet({0: ["0", "1"], 1: ["01"], 2: ["t"]}, bad)


@pytest.mark.parametrize("name", SPACES)
def test_json_roundtrip(name):
    K = builtin(name)
    L = simplicial_from_json(K.to_json())
    assert L.simplices == K.simplices and L.faces == K.faces


def test_nerve_of_chain_is_contractible():
    P = Poset([0, 1, 2], {0: {1, 2}, 1: {2}, 2: set()})
    assert homology(nerve(P, ZZ).complex).is_zero()
    assert homology(nerve(P, ZZ, augmented=False).complex).ranks() == {0: 1}


def test_nerve_of_discrete_pair():
    P = Poset(["a", "b"], {"a": set(), "b": set()})
    assert homology(nerve(P, ZZ).complex).ranks() == {0: 1}
    # empty poset: the augmented nerve is a single class in degree -1
    assert homology(nerve(Poset([], {}), ZZ).complex).ranks() == {-1: 1}


def test_poset_must_be_transitive():
    with pytest.raises(ValueError):
        Poset([0, 1, 2], {0: {1}, 1: {2}, 2: set()})
