from math import factorial

import pytest

from oracles import bell, lie_character, partition_lattice_mobius, regular_character
from taylortower.atlas import (a_theory_coefficient, a_theory_consistency, compare_partition_lie,
                               config_compactified, cyclic_sphere, identity_derivative, lie_module,
                               lie_word_expansion, partition_complex, partition_poset, set_partitions)
from taylortower.homology import homology
from taylortower.linalg import QQ, ZZ
from taylortower.representations import character, class_keys
from taylortower.simplicial import circle


def lam(key):
    return tuple(int(x) for x in key.split("+"))


@pytest.mark.parametrize("n", range(1, 7))
def test_set_partition_count(n):
    assert len(set_partitions(n)) == bell(n)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_partition_nerve_euler_is_mobius(n):
    C = partition_complex(n).complex
    chi = sum((-1) ** k * r for k, r in C.ranks.items())
    # with the empty chain in degree -1 this is the reduced Euler characteristic
    assert chi == partition_lattice_mobius(n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_partition_homology_concentrated(n):
    H = homology(partition_complex(n).complex)
    assert H.groups == {n - 3: (factorial(n - 1), ())}


def test_partition_poset_size():
    assert len(partition_poset(4).elements) == bell(4) - 2


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_lie_character_formula(n):
    r = lie_module(n, QQ)
    assert r.rank() == factorial(n - 1)
    chi = character(r).per_degree[0]
    for key in class_keys("S", n):
        assert chi[key] == lie_character(lam(key))


def test_lie_words():
    # [x0, x1] = x0 x1 - x1 x0
    assert lie_word_expansion((0,), 2) == {(0, 1): 1, (1, 0): -1}
    assert len(lie_word_expansion((0, 1), 3)) == 4


@pytest.mark.parametrize("n", [2, 3, 4])
def test_partition_twisted_matches_lie(n):
    res = compare_partition_lie(n)
    assert res["ok"] and res["concentrated"]


def test_identity_derivative_degree():
    H = homology(identity_derivative(3).complex)
    assert H.ranks() == {2: 2}


def test_cap_enforced():
    with pytest.raises(ValueError):
        partition_complex(5, cap=4)


@pytest.mark.parametrize("n", [2, 3])
def test_based_circle_configurations(n):
    r = config_compactified(circle(), n, based=True, ring=QQ)
    assert homology(r.complex).ranks() == {n: factorial(n)}
    chi = character(r).per_degree[n]
    for key in class_keys("S", n):
        assert chi[key] == regular_character(lam(key))


@pytest.mark.parametrize("n", [2, 3])
def test_unbased_circle_configurations(n):
    H = homology(config_compactified(circle(), n, based=False).complex)
    assert H.ranks() == {n - 1: factorial(n - 1), n: factorial(n - 1)}


def test_single_point_configurations():
    assert homology(config_compactified(circle(), 1, based=True).complex).ranks() == {1: 1}
    assert homology(config_compactified(circle(), 1, based=False).complex).ranks() == {0: 1, 1: 1}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cyclic_sphere(n):
    r = cyclic_sphere(n)
    assert homology(r.complex).ranks() == {n - 1: 1}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_a_theory_ranks(n):
    H = homology(a_theory_coefficient(n).complex)
    assert H.ranks() == {n - 1: factorial(n - 1)}


def test_a_theory_character_n2():
    assert character(a_theory_coefficient(2, QQ)).per_degree[1] == {"1+1": 1, "2": -1}


@pytest.mark.parametrize("n", [2, 3])
def test_a_theory_consistency(n):
    res = a_theory_consistency(n)
    assert res["ok"] and res["homology_ok"] and res["characters_ok"]


@pytest.mark.parametrize("n,p,cap", [(3, 2, 3), (3, 5, 3), (4, 3, 1), (4, 5, 1)])
def test_lie_p_local_vanishing(n, p, cap):
    from taylortower.linalg import GF
    from taylortower.representations import group_homology
    r = group_homology(lie_module(n, GF(p)), cap)
    assert r.table.is_zero()


def test_lie_three_at_three_is_not_trivial():
    from taylortower.linalg import GF
    from taylortower.representations import group_homology
    r = group_homology(lie_module(3, GF(3)), 2)
    assert r.table.ranks() == {2: 1}
