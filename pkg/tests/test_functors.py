import pytest
from hypothesis import given, settings, strategies as st

from strategies import acyclic_inflation, complexes
from taylortower.calculus import TnFunctor
from taylortower.chain import direct_sum, scalar_map, sphere, tensor_many, zero_complex
from taylortower.functors import (CoefMap, CoefSmash, Compose, Const, ExtPower, FiberF, Id, ShiftF,
                                  Sum, SumInclusion, SymPower, TensorPower, TruncTensorAlg,
                                  evaluate, evaluate_map, functor_from_json)
from taylortower.homology import homology, is_quasi_iso
from taylortower.linalg import QQ, ZZ, RingError

two = scalar_map(sphere(1), 2)

CONSTRUCTORS = {
    "const": Const(sphere(1)),
    "id": Id(),
    "coef_smash": CoefSmash(direct_sum(sphere(0), sphere(1)), 1),
    "tensor_power": TensorPower(2),
    "sum": Sum((Id(), TensorPower(2))),
    "trunc_tensor_alg": TruncTensorAlg(2),
    "shift": ShiftF(-1),
    "compose": Compose(TensorPower(2), ShiftF(1)),
    "fiber": FiberF(CoefMap(two, 1)),
    "inclusion_fiber": FiberF(SumInclusion(Sum((Id(),)), Sum((Id(), TensorPower(2))))),
    "t1": TnFunctor(Id(), 1),
}

small = complexes(max_pieces=2, lo=0, hi=1)


@pytest.mark.parametrize("name", sorted(CONSTRUCTORS))
@settings(max_examples=10)
@given(X=small, data=st.data())
def test_homotopy_invariance(name, X, data):
    F = CONSTRUCTORS[name]
    f = data.draw(acyclic_inflation(X))
    assert is_quasi_iso(evaluate_map(F, f))


@settings(max_examples=10)
@given(X=complexes(QQ, max_pieces=2, lo=0, hi=1), data=st.data())
def test_homotopy_invariance_orbits(X, data):
    f = data.draw(acyclic_inflation(X))
    for F in (SymPower(2), ExtPower(2)):
        assert is_quasi_iso(evaluate_map(F, f))


@pytest.mark.parametrize("name", sorted(set(CONSTRUCTORS) - {"t1"}))
@settings(max_examples=8)
@given(X=small)
def test_normal_form_matches_evaluation(name, X):
    F = CONSTRUCTORS[name]
    nf = F.normal_form(ZZ)
    parts = [tensor_many([C] + [X] * k) for k, C in nf.items()]
    assert homology(evaluate(F, X)) == homology(direct_sum(*parts) if parts else zero_complex())


def test_symmetric_and_exterior_squares():
    S0, S1 = sphere(0, QQ), sphere(1, QQ)
    assert homology(SymPower(2)(S0)).ranks() == {0: 1}
    assert homology(SymPower(2)(S1)).is_zero()
    assert homology(ExtPower(2)(S1)).ranks() == {2: 1}
    assert homology(ExtPower(2)(S0)).is_zero()


def test_orbits_need_rationals():
    with pytest.raises(RingError):
        SymPower(2)(sphere(0))


def test_tensor_power_of_sphere():
    assert homology(TensorPower(3)(sphere(2))).ranks() == {6: 1}


def test_degree():
    assert TruncTensorAlg(3).degree() == 3
    assert Compose(TensorPower(2), TensorPower(3)).degree() == 6
    assert Const(sphere(0)).degree() == 0


@pytest.mark.parametrize("name", sorted(set(CONSTRUCTORS) - {"t1"}))
def test_json_roundtrip(name):
    F = CONSTRUCTORS[name]
    G = functor_from_json(F.to_json())
    X = direct_sum(sphere(0), sphere(1))
    assert homology(G(X)) == homology(F(X))


def test_shorthand():
    assert isinstance(functor_from_json("tensor_power:2"), TensorPower)
    assert isinstance(functor_from_json("id"), Id)
    with pytest.raises(ValueError):
        functor_from_json("nonsense:1")
