import itertools

import pytest
from hypothesis import given, settings, strategies as st

from strategies import complexes
from taylortower.chain import (ChainComplexError, ChainMap, direct_sum, identity_map, scalar_map,
                               sphere, zero_complex, zero_map)
from taylortower.cube import (CubeDiagram, all_subsets, cube_from_function, cube_from_json, holim,
                              holim_initial_map, is_cartesian, is_strongly_cocartesian, join_cube,
                              punctured_holim, punctured_initial_map, sum_cube, total_cofiber,
                              total_fiber)
from taylortower.homology import homology, is_acyclic, is_quasi_iso
from taylortower.linalg import ZZ, SparseMatrix


def scalar_cube(C, scalars):
    """Every vertex is C; the edge in direction s multiplies by scalars[s-1]."""
    return cube_from_function(len(scalars), lambda T: C,
                              lambda T, s, A, B: scalar_map(C, scalars[s - 1]))


@settings(max_examples=50)
@given(complexes(), st.lists(st.sampled_from([0, 1, -1, 2, 3]), min_size=1, max_size=3))
def test_cartesian_iff_total_fiber_acyclic(C, scalars):
    c = scalar_cube(C, scalars)
    via_holim = is_quasi_iso(punctured_initial_map(c))
    via_fiber = is_acyclic(total_fiber(c))
    assert via_holim == via_fiber == is_cartesian(c)


def test_scalar_cube_torsion_example():
    # multiplication by 2 is an iso on Z/3, so the square is cartesian
    from taylortower.chain import complex_from_dense
    Z3 = complex_from_dense(ZZ, {0: 1, 1: 1}, {1: [[3]]})
    assert is_cartesian(scalar_cube(Z3, [2, 0]))
    assert not is_cartesian(scalar_cube(Z3, [3, 0]))


def test_one_cube_total_fiber_is_fiber():
    f = scalar_map(sphere(0), 2)
    c = cube_from_function(1, lambda T: sphere(0), lambda T, s, A, B: f)
    assert homology(total_fiber(c)).describe() == "H_-1 = Z/2"
    assert homology(total_cofiber(c)).describe() == "H_0 = Z/2"


@given(complexes(), st.integers(1, 3))
def test_sum_cube_total_fiber_acyclic(C, n):
    # the identity functor sends sum cubes to cartesian cubes for n >= 2
    c = sum_cube([C] * n)
    if n >= 2:
        assert is_cartesian(c)
    else:
        assert homology(total_fiber(c)) == homology(C)


@given(complexes(), st.integers(0, 2))
def test_join_cube_strongly_cocartesian(C, n):
    c = join_cube(C, n)
    assert is_strongly_cocartesian(c)
    # X * U carries |U| - 1 suspended copies of X
    for T in all_subsets(n + 1):
        if T:
            assert homology(c.vertices[T]).ranks() == \
                {k + 1: r * (len(T) - 1) for k, r in homology(C).ranks().items() if r * (len(T) - 1)}


def test_noncommuting_face_rejected():
    S = sphere(0)
    edges = {(frozenset(), 1): scalar_map(S, 2), (frozenset(), 2): identity_map(S),
             (frozenset({1}), 2): identity_map(S), (frozenset({2}), 1): scalar_map(S, 3)}
    verts = {T: S for T in all_subsets(2)}
    with pytest.raises(ChainComplexError):
        CubeDiagram(2, verts, edges)


def test_holim_of_discrete_poset_is_sum():
    A, B = sphere(0), sphere(2)
    vals = {"a": A, "b": B}
    H = holim(["a", "b"], lambda x, y: False, vals.__getitem__, None, ZZ)
    assert homology(H.complex) == homology(direct_sum(A, B))


def test_holim_of_span_is_pullback():
    # a -> c <- b with zero maps: holim is A + B + shift(C, -1)
    A, B, C = sphere(0), sphere(0), sphere(0)
    vals = {"a": A, "b": B, "c": C}
    less = lambda x, y: (x, y) in {("a", "c"), ("b", "c")}
    H = holim(["a", "b", "c"], less, vals.__getitem__, lambda u, v: zero_map(vals[u], vals[v]), ZZ)
    assert homology(H.complex).ranks() == {0: 2, -1: 1}


def test_punctured_holim_of_constant_square():
    S = sphere(0)
    c = scalar_cube(S, [1, 1])
    assert is_quasi_iso(punctured_initial_map(c))
    assert homology(punctured_holim(c)) == homology(S)


def test_cube_json_roundtrip():
    c = scalar_cube(sphere(1), [2, -1])
    d = cube_from_json(c.to_json())
    assert homology(total_fiber(d)) == homology(total_fiber(c))
