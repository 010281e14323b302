import itertools
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from oracles import regular_character
from strategies import complexes
from taylortower.calculus import (agreement_order, cross_effect, cross_effect_representation,
                                  delta_n, derivative_compose_check, layer_coefficient,
                                  multilinearize, roundtrip_check, taylor_T)
from taylortower.chain import (change_ring, direct_sum, identity_map, scalar_map, shift, sphere,
                               tensor, zero_complex)
from taylortower.functors import (CoefMap, CoefSmash, Compose, Const, FiberF, Id, IdentityNat,
                                  ShiftF, Sum, SumInclusion, TensorPower, TruncTensorAlg, ZeroNat)
from taylortower.homology import homology, is_acyclic, is_quasi_iso
from taylortower.linalg import GF, QQ, ZZ
from taylortower.representations import (GModule, character, class_keys, trivial_rep)

S0, S1 = sphere(0), sphere(1)


def test_cross_effect_of_square_is_both_orders():
    X, Y = S0, S1
    H = homology(cross_effect(TensorPower(2), 2, [X, Y]))
    assert H == homology(direct_sum(tensor(X, Y), tensor(Y, X)))


@settings(max_examples=15)
@given(complexes(max_pieces=2, lo=0, hi=1), complexes(max_pieces=2, lo=0, hi=1))
def test_cross_effect_of_square_random(X, Y):
    H = homology(cross_effect(TensorPower(2), 2, [X, Y]))
    assert H == homology(direct_sum(tensor(X, Y), tensor(Y, X)))


def test_cross_effect_order_one_is_reduction():
    C = direct_sum(S0, S1)
    F = Sum((Const(C), Id()))
    # cr_1 F(X) = fiber(F(X) -> F(0))
    assert homology(cross_effect(F, 1, [S1])) == homology(S1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cross_effect_tensor_power_regular(n):
    rep = cross_effect_representation(TensorPower(n), n, sphere(0, QQ))
    assert homology(rep.complex).ranks() == {0: factorial(n)}
    vals = character(rep).per_degree[0]
    assert set(vals) == set(class_keys("S", n))
    for key, v in vals.items():
        assert v == regular_character(tuple(int(x) for x in key.split("+")))


VANISHING = [
    (Id(), 1), (TensorPower(2), 2), (TruncTensorAlg(2), 2), (CoefSmash(S1, 1), 1),
    (Compose(TensorPower(2), ShiftF(1)), 2), (FiberF(CoefMap(scalar_map(S0, 2), 2)), 2),
]


@pytest.mark.parametrize("F,d", VANISHING, ids=lambda v: str(v) if isinstance(v, int) else type(v).__name__)
def test_cross_effect_above_degree_vanishes(F, d):
    assert is_acyclic(cross_effect(F, d + 1, [S0] * (d + 1)))
    assert is_acyclic(cross_effect(F, d + 1, [S1, S0] + [S0] * (d - 1)))


def test_multilinearize_identity_and_constant():
    ml = multilinearize(Id(), [S0])
    assert ml.stabilized and ml.homology.ranks() == {0: 1}
    assert multilinearize(Const(S1), [S0]).homology.is_zero()


def test_layer_coefficients():
    r = layer_coefficient(Id(), 1)
    assert homology(r.complex).ranks() == {0: 1}
    r2 = layer_coefficient(TensorPower(2), 2, QQ)
    assert homology(r2.complex).ranks() == {0: 2}
    assert character(r2).per_degree[0] == {"1+1": 2, "2": 0}
    assert homology(layer_coefficient(Const(S1), 2).complex).is_zero()


def test_layer_coefficient_of_suspended_square_carries_sign():
    # (Sigma X)^{(x)2}: the multilinearized swap picks up sign^k at each level,
    # so the stable coefficient is S^2 with the regular action
    r = layer_coefficient(Compose(TensorPower(2), ShiftF(1)), 2, QQ)
    assert homology(r.complex).ranks() == {2: 2}
    assert character(r).per_degree[2] == {"1+1": 2, "2": 0}


SHIFT_FUNCTORS = [TensorPower(2), Sum((Id(), TensorPower(2))), CoefSmash(direct_sum(S0, S1), 2)]


@pytest.mark.parametrize("F", SHIFT_FUNCTORS, ids=["square", "id_plus_square", "coef_smash"])
@settings(max_examples=5)
@given(X=complexes(max_pieces=2, lo=0, hi=1).filter(lambda C: bool(C.ranks)))
def test_shift_identity(F, X):
    n = 2
    a = multilinearize(F, [X] * n)
    b = multilinearize(F, [shift(X, 1)] * n)
    lo, hi = a.window
    assert homology(a.complex).restrict(lo, hi) == homology(b.complex).shifted(-n).restrict(lo, hi)


def test_delta_examples():
    t = trivial_rep(2, QQ)
    assert homology(delta_n(t, sphere(0, QQ)).complex).ranks() == {0: 1}
    assert is_acyclic(delta_n(t, sphere(1, QQ)).complex)
    F2 = GF(2)
    d = delta_n(trivial_rep(2, F2), sphere(0, F2), degree_cap=4)
    H = homology(d.complex).restrict(-10, 4)
    assert H.ranks() == {i: 1 for i in range(5)}
    with pytest.raises(ValueError):
        delta_n(trivial_rep(2, F2), sphere(0, F2))
    with pytest.raises(ValueError):
        delta_n(trivial_rep(2, F2), sphere(3, F2), degree_cap=2)


def test_roundtrip_examples():
    res = roundtrip_check(trivial_rep(2, QQ), [sphere(0, QQ), sphere(1, QQ)])
    assert res["ok"]
    assert res["permutation_sum"] == [{"degree": 1, "rank": 2, "torsion": []}]
    assert roundtrip_check(trivial_rep(1, QQ), [sphere(1, QQ)])["ok"]


def test_derivative_compose():
    assert derivative_compose_check(TensorPower(2), 1, 1)["ok"]
    r = derivative_compose_check(TensorPower(3), 1, 2)
    assert r["ok"] and r["direct"] == [{"degree": 0, "rank": 6, "torsion": []}]
    r = derivative_compose_check(Id(), 1, 1)
    assert r["ok"] and r["direct"] == []


def test_agreement_order_examples():
    u = SumInclusion(TruncTensorAlg(2), TruncTensorAlg(3))
    res = agreement_order(u, 2)
    assert res["connectivity"] == {1: 2, 2: 5, 3: 8}
    assert res["holds"] and res["c"] == 1
    res = agreement_order(IdentityNat(TensorPower(2)), 2)
    assert res["infinite"] == [1, 2, 3]
    res = agreement_order(ZeroNat(Const(S0), Const(zero_complex())), 0)
    assert res["connectivity"] == {1: 0, 2: 0, 3: 0}
    assert not res["holds"]


def test_taylor_T_examples():
    r = taylor_T(TensorPower(2), 1, S1)
    assert homology(r.complex).ranks() == {3: 1}
    C = direct_sum(S0, S1)
    for n in (0, 1, 2):
        assert homology(taylor_T(Const(C), n, S1).complex) == homology(C)


@pytest.mark.parametrize("X", [S0, S1], ids=["S0", "S1"])
def test_t2_fixed_point_on_2_excisive(X):
    F = Sum((Const(S1), CoefSmash(S0, 1), CoefSmash(S1, 2)))
    assert is_quasi_iso(taylor_T(F, 2, X).t)
