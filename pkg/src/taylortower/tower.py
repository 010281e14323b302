"""The Taylor tower ``P_n F`` and its layers ``D_n F``.

Fast path (polynomial functors).  A functor in normal form
``F(X) = sum_k C_k (x) X^{(x)k}`` satisfies

    T_n F(X) = sum_k C_k (x) W_{n,k} (x) X^{(x)k},
    W_{n,k}  = T_n(X -> X^{(x)k})(S^0),

because the join ``X * U`` is ``J_U (x) X`` and the homotopy limit is a
finite product.  Iterating only changes the coefficient, so the i-th stage
has coefficient ``C_k (x) W^{(x)i}``.  Coefficients are shrunk after every
step by Gaussian elimination; the maps ``t`` and ``q`` are carried across
the reductions.

Generic path (everything else).  ``T_n`` is applied literally through
:class:`TnFunctor`, under the generator budget.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .calculus import TnFunctor, default_window, taylor_T
from .chain import (DEFAULT_BUDGET, BudgetExceeded, ChainComplex, ChainMap, compose, cone, direct_sum_data,
                    direct_sum_maps, fiber, identity_map, sphere, tensor_many, tensor_maps,
                    tensor_power, zero_complex)
from .cube import holim_restriction
from .functors import Const, CoefSmash, Ctx, FunctorExpr, NotPolynomial, Sum, TensorPower, _cx
from .homology import HomologyTable, homology
from .linalg import Ring
from .reduction import reduce_complex

DEFAULT_IMAX = 8


# ---------------------------------------------------------------------------
# the coefficient W_{n,k}


@dataclass(eq=False)
class WData:
    n: int
    k: int
    complex: ChainComplex  # reduced
    omega: ChainMap  # S^0 -> complex
    raw: object  # TResult before reduction
    proj: ChainMap
    incl: ChainMap


@lru_cache(maxsize=None)
def w_data(n: int, k: int, ring: Ring) -> WData:
    G = TensorPower(k) if k >= 1 else Const(sphere(0, ring))
    r = taylor_T(G, n, sphere(0, ring))
    red = reduce_complex(r.complex)
    omega = compose(red.proj, r.t)
    S0 = sphere(0, ring)
    omega = ChainMap(S0, red.complex, omega.comps)
    return WData(n, k, red.complex, omega, r, red.proj, red.incl)


@lru_cache(maxsize=None)
def w_restriction(n: int, k: int, ring: Ring) -> ChainMap:
    """Reduced model of the restriction ``W_{n,k} -> W_{n-1,k}``."""
    big, small = w_data(n, k, ring), w_data(n - 1, k, ring)
    r = holim_restriction(big.raw.holim, small.raw.holim)
    return compose(small.proj, compose(r, big.incl))


# ---------------------------------------------------------------------------
# coefficient towers


@dataclass(eq=False)
class CoefLevels:
    """``A_0 -> A_1 -> ...`` for one k (reduced), with the structure maps."""

    n: int
    k: int
    levels: list = field(default_factory=list)
    t: list = field(default_factory=list)
    _steps: list = field(default_factory=list)  # (tensor complex, basis, reduction) per step

    def extend(self, ring: Ring):
        A = self.levels[-1]
        W = w_data(self.n, self.k, ring)
        P, PB = tensor_many([A, W.complex], with_basis=True)
        S0 = sphere(0, ring)
        src = tensor_many([A, S0], with_basis=True)
        m = tensor_maps([identity_map(A), W.omega], src, (P, PB))
        m = ChainMap(A, P, m.comps)
        red = reduce_complex(P)
        self.t.append(compose(red.proj, m))
        self.levels.append(red.complex)
        self._steps.append((P, PB, red))


def coefficient_q(upper: CoefLevels, lower: CoefLevels, i: int, ring: Ring, cache: dict) -> ChainMap:
    """``q_i : A^(n)_i -> A^(n-1)_i`` built from restrictions of W."""
    key = i
    if key in cache:
        return cache[key]
    if i == 0:
        q = identity_map(upper.levels[0])
        q = ChainMap(upper.levels[0], lower.levels[0], q.comps)
    else:
        prev = coefficient_q(upper, lower, i - 1, ring, cache)
        r = w_restriction(upper.n, upper.k, ring)
        P1, PB1, red1 = upper._steps[i - 1]
        P2, PB2, red2 = lower._steps[i - 1]
        r = ChainMap(w_data(upper.n, upper.k, ring).complex, w_data(lower.n, lower.k, ring).complex, r.comps)
        mid = tensor_maps([prev, r], (P1, PB1), (P2, PB2))
        q = compose(red2.proj, compose(mid, red1.incl))
    cache[key] = q
    return q


# ---------------------------------------------------------------------------
# reports


@dataclass(eq=False)
class TowerReport:
    n: int
    window: tuple
    levels: list  # HomologyTable per stage (restricted to the window)
    verdict: str  # stabilized | stabilized-to-zero | not-stabilized | budget-exhausted
    stable_level: int | None
    model: str
    stages: list = field(default_factory=list, repr=False)  # complexes
    t_maps: list = field(default_factory=list, repr=False)
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def final(self) -> HomologyTable | None:
        if self.stable_level is None:
            return None
        return self.levels[self.stable_level]

    @property
    def iterations(self) -> int | None:
        return None if self.stable_level is None else self.stable_level + 1

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "window": list(self.window),
            "model": self.model,
            "verdict": self.verdict,
            "stable_level": self.stable_level,
            "iterations": self.iterations,
            "levels": [{"i": i, "homology": t.to_json()} for i, t in enumerate(self.levels)],
            "final": None if self.final is None else self.final.to_json(),
            "certified": "window",
        }


def _stable_pair(E0: ChainComplex, E1: ChainComplex, t: ChainMap, window) -> tuple[bool, HomologyTable, HomologyTable]:
    lo, hi = window
    H0 = homology(E0).restrict(lo, hi)
    H1 = homology(E1).restrict(lo, hi)
    if H0 != H1:
        return False, H0, H1
    Hc = homology(cone(t)).restrict(lo, hi + 1)
    return Hc.is_zero(), H0, H1


class PolyTower:
    """Tower data of a polynomial functor at level n (fast path)."""

    def __init__(self, F: FunctorExpr, n: int, ring: Ring):
        self.n = n
        self.ring = ring
        self.nf = F.normal_form(ring)
        self.coef: dict[int, CoefLevels] = {}
        for k, C in self.nf.items():
            red = reduce_complex(C)
            self.coef[k] = CoefLevels(n, k, [red.complex])

    def ensure(self, i: int):
        for cl in self.coef.values():
            while len(cl.levels) <= i:
                cl.extend(self.ring)

    def at(self, X: ChainComplex, i: int, powers: dict) -> tuple[ChainComplex, object]:
        self.ensure(i)
        parts = []
        for k in sorted(self.coef):
            A = self.coef[k].levels[i]
            if k == 0:
                parts.append(A)
            else:
                parts.append(tensor_many([A, powers[k][0]]))
        ds = direct_sum_data(parts, self.ring)
        return ds.complex, ds

    def t_at(self, X, i, powers, src, tgt) -> ChainMap:
        self.ensure(i + 1)
        maps = []
        for k in sorted(self.coef):
            t = self.coef[k].t[i]
            if k == 0:
                maps.append(t)
            else:
                Xk = powers[k][0]
                maps.append(tensor_maps([t, identity_map(Xk)]))
        return direct_sum_maps(maps, src, tgt)


def _powers(X: ChainComplex, ks, budget) -> dict:
    return {k: tensor_power(X, k, budget, with_basis=True) for k in ks if k >= 1}


def taylor_P(F: FunctorExpr, n: int, X: ChainComplex, i_max: int = DEFAULT_IMAX,
             window: tuple | None = None, budget: int | None = DEFAULT_BUDGET,
             model: str = "auto") -> TowerReport:
    """Iterate ``T_n`` until the window homology and the map ``t`` settle.

    ``model`` is "auto", "coefficient" or "generic"; auto picks the
    coefficient model whenever ``F`` has a normal form.
    """
    if n < 0 or i_max < 1:
        raise ValueError("taylor_P needs n >= 0 and i_max >= 1")
    if model not in ("auto", "coefficient", "generic"):
        raise ValueError(f"unknown tower model {model!r}")
    F.check_ring(X.ring)
    if model == "generic":
        return _taylor_P_generic(F, n, X, i_max, window, budget)
    try:
        F.normal_form(X.ring)
    except NotPolynomial:
        if model == "coefficient":
            raise
        return _taylor_P_generic(F, n, X, i_max, window, budget)
    return _taylor_P_fast(F, n, X, i_max, window, budget)


def _taylor_P_fast(F, n, X, i_max, window, budget) -> TowerReport:
    tw = PolyTower(F, n, X.ring)
    powers = _powers(X, tw.coef, budget)
    E0, ds0 = tw.at(X, 0, powers)
    if window is None:
        window = default_window(_cx(Ctx(budget), F, X))
    levels, stages, tmaps = [], [E0], []
    verdict, stable = "not-stabilized", None
    try:
        for i in range(i_max):
            E1, ds1 = tw.at(X, i + 1, powers)
            t = tw.t_at(X, i, powers, ds0, ds1)
            ok, H0, H1 = _stable_pair(E0, E1, t, window)
            if not levels:
                levels.append(H0)
            levels.append(H1)
            stages.append(E1)
            tmaps.append(t)
            if ok:
                stable = i
                verdict = "stabilized-to-zero" if H0.is_zero() else "stabilized"
                break
            E0, ds0 = E1, ds1
    except BudgetExceeded:
        verdict = "budget-exhausted"
    rep = TowerReport(n, tuple(window), levels, verdict, stable, "coefficient", stages, tmaps)
    rep.extra["tower"] = tw
    rep.extra["powers"] = powers
    return rep


def _generic_nodes(F: FunctorExpr, n: int, count: int) -> list:
    nodes = [F]
    for _ in range(count):
        nodes.append(TnFunctor(nodes[-1], n))
    return nodes


def _taylor_P_generic(F, n, X, i_max, window, budget) -> TowerReport:
    ctx = Ctx(budget)
    nodes = _generic_nodes(F, n, i_max)
    levels, stages, tmaps = [], [], []
    verdict, stable = "not-stabilized", None
    try:
        E0 = _cx(ctx, F, X)
        stages.append(E0)
        if window is None:
            window = default_window(E0)
        for i in range(i_max):
            r = ctx.obj(nodes[i + 1], X)[1]
            E1, t = r.complex, r.t
            ok, H0, H1 = _stable_pair(E0, E1, t, window)
            if not levels:
                levels.append(H0)
            levels.append(H1)
            stages.append(E1)
            tmaps.append(t)
            if ok:
                stable = i
                verdict = "stabilized-to-zero" if H0.is_zero() else "stabilized"
                break
            E0 = E1
    except BudgetExceeded:
        verdict = "budget-exhausted"
    if window is None:
        window = default_window(None)
    rep = TowerReport(n, tuple(window), levels, verdict, stable, "generic", stages, tmaps)
    rep.extra.update({"ctx": ctx, "nodes": nodes})
    return rep


# ---------------------------------------------------------------------------
# layers


@dataclass(eq=False)
class LayerResult:
    complex: ChainComplex
    level: int
    window: tuple  # degrees where the homology of ``complex`` is certified
    upper: TowerReport
    lower: TowerReport
    coefficients: dict | None  # k -> fiber of the coefficient q (fast path only)
    q: ChainMap

    @property
    def homology(self) -> HomologyTable:
        lo, hi = self.window
        return homology(self.complex).restrict(lo, hi)

    def as_functor(self, ring: Ring, through: int | None = None, i_max: int = 4 * DEFAULT_IMAX) -> FunctorExpr:
        """``X -> sum_{k<=n} fib_k (x) X^{(x)k}``, the layer as a functor.

        Exact in coefficient degrees ``<= through`` (default: top of the
        window).  The stage is pushed up until the coefficients that die in
        the colimit sit above ``through + 1``; they are then dropped.
        """
        if self.coefficients is None:
            raise NotPolynomial("the layer functor is only available for polynomial inputs")
        tu, tl = self.upper.extra["tower"], self.lower.extra["tower"]
        c = (self.window[1] if through is None else through) + 1
        i = self.level
        while not (_excess_clear(tu, i, c, 0) and _excess_clear(tl, i, c, 0)):
            i += 1
            if i > i_max:
                raise TowerNotStable("layer coefficients did not clear the requested range")
            tu.ensure(i)
            tl.ensure(i)
        parts = []
        for k in sorted(tu.coef):
            if k > tu.n:
                continue
            q = coefficient_q(tu.coef[k], tl.coef[k], i, ring, {})
            if k == tu.n:
                q = ChainMap(q.source, zero_complex(ring), {})  # target lies above c
            C = fiber(q)
            if homology(C).is_zero():
                continue
            parts.append(Const(C) if k == 0 else CoefSmash(C, k))
        if not parts:
            return Const(zero_complex(ring))
        return Sum(tuple(parts))

    def to_json(self) -> dict:
        return {"level": self.level, "window": list(self.window),
                "homology": self.homology.to_json(),
                "upper": self.upper.to_json(), "lower": self.lower.to_json()}


class TowerNotStable(RuntimeError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


def layer_D(F: FunctorExpr, n: int, X: ChainComplex, i_max: int = DEFAULT_IMAX,
            window: tuple | None = None, budget: int | None = DEFAULT_BUDGET,
            model: str = "auto") -> LayerResult:
    """``fiber(q : P_n F(X) -> P_{n-1} F(X))`` at a common stable stage."""
    if n < 1:
        raise ValueError("layer_D needs n >= 1")
    up = taylor_P(F, n, X, i_max, window, budget, model)
    lo_ = taylor_P(F, n - 1, X, i_max, up.window, budget, model)
    for rep in (up, lo_):
        if rep.stable_level is None:
            raise TowerNotStable(f"P_{rep.n} tower did not stabilize ({rep.verdict})", rep)
    i = max(up.stable_level, lo_.stable_level)
    if up.model == "coefficient" and lo_.model == "coefficient":
        return _layer_fast(up, lo_, i, X, i_max)
    return _layer_generic(F, n, X, i, up, lo_, budget)


def _excess_clear(tw: PolyTower, i: int, floor: int, xmin: int) -> bool:
    """Terms of degree above the tower level must sit above ``floor``."""
    for k, cl in tw.coef.items():
        if k <= tw.n:
            continue
        sup = cl.levels[i].support
        if sup is not None and sup[0] + k * xmin <= floor:
            return False
    return True


def _layer_fast(up: TowerReport, lo_: TowerReport, i: int, X: ChainComplex, i_max: int) -> LayerResult:
    tu, tl = up.extra["tower"], lo_.extra["tower"]
    ring = X.ring
    lo, hi = up.window
    xmin = X.support[0] if X.support else 0
    # the stages agree with the colimit in the window, but the terms killed by
    # P_{n-1} only leave it gradually; the fiber would shift them down by one
    while True:
        tu.ensure(i)
        tl.ensure(i)
        if _excess_clear(tu, i, hi + 1, xmin) and _excess_clear(tl, i, hi + 1, xmin):
            break
        i += 1
        if i > i_max:
            raise TowerNotStable("layer did not clear the window within the iteration cap")
    powers = up.extra["powers"]
    fibs, maps = {}, []
    _, dsu = tu.at(X, i, powers)
    _, dsl = tl.at(X, i, powers)
    for k in sorted(tu.coef):
        q = coefficient_q(tu.coef[k], tl.coef[k], i, ring, {})
        if k <= tu.n:
            fibs[k] = fiber(q)
        maps.append(q if k == 0 else tensor_maps([q, identity_map(powers[k][0])]))
    Q = direct_sum_maps(maps, dsu, dsl)
    return LayerResult(fiber(Q), i, (lo, hi), up, lo_, fibs, Q)


def generic_q(up_nodes, lo_nodes, i: int, Y: ChainComplex, ctx: Ctx, n: int, mids: dict) -> ChainMap:
    """``q_i : T_n^i F(Y) -> T_{n-1}^i F(Y)`` by restriction along the poset inclusion."""
    from .cube import holim_map
    if i == 0:
        return identity_map(_cx(ctx, up_nodes[0], Y))
    rn = ctx.obj(up_nodes[i], Y)[1]
    rm = ctx.obj(lo_nodes[i], Y)[1]
    mid_node = mids.setdefault(i, TnFunctor(lo_nodes[i - 1], n))
    mid = ctx.obj(mid_node, Y)[1]
    vm = {}
    for U in rn.join.subsets():
        if U:
            vm[U] = generic_q(up_nodes, lo_nodes, i - 1, rn.join.vertices[U], ctx, n, mids)
    m1 = holim_map(rn.holim, mid.holim, lambda U: vm[U])
    m2 = holim_restriction(mid.holim, rm.holim)
    return compose(m2, m1)


def _layer_generic(F, n, X, i, up, lo_, budget) -> LayerResult:
    ctx = Ctx(budget)
    un = _generic_nodes(F, n, i)
    ln = _generic_nodes(F, n - 1, i)
    # T_0 of a functor is a holim over a single vertex; share the F node
    ln[0] = un[0]
    q = generic_q(un, ln, i, X, ctx, n, {})
    lo, hi = up.window
    # only the stages' window homology is certified; the fiber loses the top degree
    return LayerResult(fiber(q), i, (lo, hi - 1), up, lo_, None, q)


def stage_layer(F: FunctorExpr, n: int, X: ChainComplex, i: int, model: str = "coefficient",
                budget: int | None = DEFAULT_BUDGET) -> ChainComplex:
    """``fiber(q_i : T_n^i F(X) -> T_{n-1}^i F(X))`` at a fixed stage ``i``.

    Both models compute this complex up to quasi-isomorphism, which makes it
    the natural point of comparison when the towers are too large to run to
    stability generically.
    """
    if model == "coefficient":
        tu, tl = PolyTower(F, n, X.ring), PolyTower(F, n - 1, X.ring)
        tu.ensure(i)
        tl.ensure(i)
        powers = _powers(X, tu.coef, budget)
        _, dsu = tu.at(X, i, powers)
        _, dsl = tl.at(X, i, powers)
        maps = []
        for k in sorted(tu.coef):
            q = coefficient_q(tu.coef[k], tl.coef[k], i, X.ring, {})
            maps.append(q if k == 0 else tensor_maps([q, identity_map(powers[k][0])]))
        return fiber(direct_sum_maps(maps, dsu, dsl))
    if model != "generic":
        raise ValueError(f"unknown tower model {model!r}")
    ctx = Ctx(budget)
    un = _generic_nodes(F, n, i)
    ln = _generic_nodes(F, n - 1, i)
    return fiber(generic_q(un, ln, i, X, ctx, n, {}))


__all__ = ["stage_layer", "taylor_P", "layer_D", "TowerReport", "LayerResult", "w_data", "w_restriction",
           "PolyTower", "TowerNotStable", "DEFAULT_IMAX", "generic_q"]
