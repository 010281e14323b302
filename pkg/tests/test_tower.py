import pytest
from hypothesis import given, settings

from strategies import complexes
from taylortower.calculus import multilinearize
from taylortower.chain import direct_sum, scalar_map, shift, sphere, tensor_power
from taylortower.functors import (CoefMap, CoefSmash, Compose, FiberF, Id, ShiftF, Sum,
                                  SumInclusion, TensorPower, TruncTensorAlg, ZeroNat)
from taylortower.homology import homology, is_acyclic
from taylortower.linalg import ZZ
from taylortower.tower import TowerNotStable, layer_D, stage_layer, taylor_P

S0, S1 = sphere(0), sphere(1)
T2 = TensorPower(2)


def ranks(rep):
    return rep.final.ranks()


def test_p0_of_square_is_value_at_zero():
    rep = taylor_P(T2, 0, S1)
    assert rep.verdict == "stabilized-to-zero"


def test_p1_of_square_vanishes():
    rep = taylor_P(T2, 1, S1)
    assert rep.verdict == "stabilized-to-zero"
    assert rep.iterations <= 4


def test_p2_of_square_is_fixed():
    rep = taylor_P(T2, 2, S1)
    assert rep.verdict == "stabilized" and rep.iterations == 1
    assert ranks(rep) == {2: 1}


def test_budget_verdict():
    rep = taylor_P(TruncTensorAlg(3), 1, direct_sum(S0, S1), budget=50, model="generic")
    assert rep.verdict == "budget-exhausted"


def test_report_json_shape():
    doc = taylor_P(T2, 2, S1).to_json()
    assert doc["verdict"] == "stabilized" and doc["iterations"] == 1
    assert doc["final"] == [{"degree": 2, "rank": 1, "torsion": []}]


def test_layer_examples():
    assert layer_D(Sum((Id(), T2)), 1, S0).homology.ranks() == {0: 1}
    assert layer_D(T2, 2, S0).homology.ranks() == {0: 1}
    assert is_acyclic(layer_D(CoefSmash(S1, 1), 2, S0).complex)


@pytest.mark.parametrize("k,expect", [(1, {1: 1}), (2, {2: 1}), (3, {})])
def test_layers_of_truncated_tensor_algebra(k, expect):
    assert layer_D(TruncTensorAlg(2), k, S1).homology.ranks() == expect


def test_layer_functor_is_reduced():
    L = layer_D(T2, 2, S0).as_functor(ZZ)
    assert multilinearize(L, [S0]).homology.is_zero()
    ml = multilinearize(L, [S0, S0])
    assert ml.homology.ranks() == {0: 2}


@pytest.mark.parametrize("F", [T2, Sum((Id(), T2))], ids=["square", "id_plus_square"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_precomposition_with_suspension(F, n):
    a = taylor_P(Compose(F, ShiftF(1)), n, S0, window=(-2, 4))
    b = taylor_P(F, n, S1, window=(-2, 4))
    assert a.final == b.final


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_tower_commutes_with_fiber(n):
    u = SumInclusion(TruncTensorAlg(2), TruncTensorAlg(3))
    win = (-1, 5)
    P_fib = taylor_P(FiberF(u), n, S1, window=win).final
    top = taylor_P(TruncTensorAlg(3), n, S1, window=win).final.ranks()
    bottom = taylor_P(TruncTensorAlg(2), n, S1, window=win).final.ranks()
    # the inclusion is split, so the fiber is the loop of the cokernel
    expect = {d - 1: top[d] - bottom.get(d, 0) for d in top if top[d] - bottom.get(d, 0)}
    assert {d: r for d, r in P_fib.ranks().items() if win[0] <= d + 1 <= win[1]} == \
        {d: r for d, r in expect.items() if win[0] <= d + 1 <= win[1]}


def test_tower_commutes_with_fiber_of_scalar():
    u = CoefMap(scalar_map(S0, 2), 2)
    P = taylor_P(FiberF(u), 2, S1).final
    assert P.groups == {1: (0, (2,))}
    assert taylor_P(FiberF(u), 1, S1).verdict == "stabilized-to-zero"


def test_two_layer_example():
    # fiber of a map from a 1-homogeneous to a 2-homogeneous functor
    F = FiberF(ZeroNat(CoefSmash(S0, 1), T2))
    assert taylor_P(F, 0, S1).verdict == "stabilized-to-zero"
    assert ranks(taylor_P(F, 1, S1)) == {1: 1}
    assert ranks(taylor_P(F, 2, S1)) == {1: 2}


@pytest.mark.parametrize("F,m", [(T2, 2), (CoefSmash(S1, 3), 3)], ids=["square", "cubic"])
def test_reduced_below_m_gives_acyclic_stage(F, m):
    for j in range(1, m):
        assert multilinearize(F, [S0] * j).homology.is_zero()
    assert taylor_P(F, m - 1, S1).verdict == "stabilized-to-zero"


def test_not_reduced_control():
    F = Sum((Id(), T2))
    assert not multilinearize(F, [S0]).homology.is_zero()
    assert taylor_P(F, 1, S1).verdict == "stabilized"


@pytest.mark.parametrize("F", [T2, Sum((Id(), T2)), TruncTensorAlg(2)],
                         ids=["square", "id_plus_square", "tta2"])
@pytest.mark.parametrize("n,i", [(1, 0), (1, 1), (1, 2), (2, 1)])
@pytest.mark.parametrize("X", [S0, S1], ids=["S0", "S1"])
def test_stage_layer_models_agree(F, n, i, X):
    a = homology(stage_layer(F, n, X, i, model="coefficient"))
    b = homology(stage_layer(F, n, X, i, model="generic"))
    assert a == b


def test_generic_tower_matches_coefficient_model():
    g = taylor_P(T2, 2, S1, model="generic")
    c = taylor_P(T2, 2, S1, model="coefficient")
    assert g.verdict == c.verdict == "stabilized"
    assert g.final == c.final and g.iterations == c.iterations


def test_layer_needs_stable_towers():
    with pytest.raises(TowerNotStable):
        layer_D(TruncTensorAlg(3), 1, S1, i_max=1)


@settings(max_examples=5)
@given(complexes(max_pieces=2, lo=0, hi=1).filter(lambda C: bool(C.ranks)))
def test_top_stage_of_homogeneous_square_is_itself(X):
    rep = taylor_P(T2, 2, X)
    lo, hi = rep.window
    assert rep.final == homology(tensor_power(X, 2)).restrict(lo, hi)


@pytest.mark.parametrize("F", [T2, TruncTensorAlg(3), Sum((Id(), T2))], ids=["square", "tta3", "id_plus_square"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_q_commutes_with_t_on_the_nose(F, n):
    from taylortower.chain import compose
    from taylortower.tower import PolyTower, coefficient_q
    tu, tl = PolyTower(F, n, ZZ), PolyTower(F, n - 1, ZZ)
    tu.ensure(3)
    tl.ensure(3)
    for k in tu.coef:
        cu, cl, cache = tu.coef[k], tl.coef[k], {}
        for i in range(3):
            a = compose(coefficient_q(cu, cl, i + 1, ZZ, cache), cu.t[i])
            b = compose(cl.t[i], coefficient_q(cu, cl, i, ZZ, cache))
            assert all(a.at(d) == b.at(d) for d in set(a.comps) | set(b.comps))
