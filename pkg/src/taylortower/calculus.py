"""Cross-effects, multilinearization, the T_n construction and the
operators built from them (layer coefficients, homotopy orbits, agreement
order).  The iterated tower lives in :mod:`taylortower.tower`."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .chain import (ChainComplex, ChainMap, compose, cone_of_maps, direct_sum,
                    direct_sum_maps, scalar_map, shift, shift_map, sphere,
                    tensor_many)
from .cube import (CubeDiagram, Holim, all_subsets, cube_automorphism, holim_initial_map,
                   holim_map, join_cube, join_vertex, punctured_holim_data, sum_cube,
                   sum_cube_permutation, total_fiber_data)
from .functors import Ctx, FunctorExpr, NatMap, Orbits, _cx, evaluate_cube, evaluate_map
from .homology import INF, HomologyTable, connectivity, homology
from .linalg import QQ, ZZ, Ring
from .representations import (Representation, bar_complex, group_gens, invariant_subcomplex,
                              perm_sign, restrict_to_invariants, tensor_rep)

DEFAULT_CAP = 8


def default_window(C: ChainComplex | None, center: int | None = None) -> tuple[int, int]:
    """Six degrees around the middle of the support."""
    if center is None:
        if C is None or not C.ranks:
            center = 0
        else:
            lo, hi = C.support
            center = (lo + hi) // 2
    return center - 3, center + 2


# ---------------------------------------------------------------------------
# cross-effects


@dataclass(eq=False)
class CrossEffect:
    complex: ChainComplex
    cube: CubeDiagram
    inputs: list
    functor: FunctorExpr
    total: object
    ctx: Ctx


def cross_effect_data(F: FunctorExpr, Xs: list[ChainComplex], budget: int | None = None) -> CrossEffect:
    if not Xs:
        raise ValueError("cross_effect needs n >= 1")
    ctx = Ctx(budget)
    sc = sum_cube(list(Xs))
    Fc = evaluate_cube(F, sc, ctx=ctx)
    tf = total_fiber_data(Fc, budget)
    return CrossEffect(tf.complex, sc, list(Xs), F, tf, ctx)


def cross_effect(F: FunctorExpr, n: int, Xs: list[ChainComplex], budget: int | None = None) -> ChainComplex:
    if len(Xs) != n:
        raise ValueError(f"cross_effect of order {n} needs {n} inputs")
    return cross_effect_data(F, Xs, budget).complex


def cross_effect_action(ce: CrossEffect, perm: tuple) -> ChainMap:
    """Automorphism of the cross-effect at equal inputs induced by permuting
    them (``perm`` is 0-based one-line notation)."""
    n = len(ce.inputs)
    sc = ce.cube
    pd = {s: perm[s - 1] + 1 for s in range(1, n + 1)}
    vmaps = sum_cube_permutation(ce.inputs, sc, pd)
    Fc_maps = {}
    for V, m in vmaps.items():
        W = frozenset(pd[v] for v in V)
        m = ChainMap(sc.vertices[V], sc.vertices[W], m.comps)
        Fc_maps[V] = evaluate_map(ce.functor, m, ctx=ce.ctx)
    Fc = CubeDiagram(n, {V: _cx(ce.ctx, ce.functor, X) for V, X in sc.vertices.items()}, {}, check=False)
    return cube_automorphism(Fc, pd, Fc_maps, ce.total)


def cross_effect_representation(F: FunctorExpr, n: int, X: ChainComplex,
                                budget: int | None = None, twist: int = 1) -> Representation:
    """Cross-effect at ``(X, .., X)`` with the input-permutation action; the
    generators are multiplied by ``sign(g)`` when ``twist == -1``."""
    ce = cross_effect_data(F, [X] * n, budget)
    gens = {}
    for name, a in group_gens("S", n).items():
        g = cross_effect_action(ce, a)
        if twist == -1 and perm_sign(a) == -1:
            g = compose(scalar_map(ce.complex, -1), g)
        gens[name] = g
    return Representation("S", n, ce.complex, gens)


# ---------------------------------------------------------------------------
# multilinearization


@dataclass(eq=False)
class Multilinear:
    complex: ChainComplex
    level: int
    stabilized: bool
    window: tuple
    levels: list  # homology tables restricted to the window, per k
    representation: Representation | None = None

    @property
    def homology(self) -> HomologyTable:
        """Homology of the level complex in the window (the certified part)."""
        return homology(self.complex).restrict(*self.window)

    def to_json(self) -> dict:
        return {
            "stabilized": self.stabilized,
            "level": self.level,
            "window": list(self.window),
            "levels": [t.to_json() for t in self.levels],
            "homology": self.homology.to_json(),
        }


class NotStabilized(RuntimeError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


def _ml_level(F, Xs, k, budget, with_action):
    n = len(Xs)
    shifted = [shift(X, k) for X in Xs]
    if with_action:
        rep = cross_effect_representation(F, n, shifted[0], budget)
        C = shift(rep.complex, -n * k)
        gens = {}
        for name, a in group_gens("S", n).items():
            g = shift_map(rep.gens[name], -n * k, C, C)
            if k % 2 and perm_sign(a) == -1:
                g = compose(scalar_map(C, -1), g)
            gens[name] = g
        return C, Representation("S", n, C, gens, meta={"level": k})
    ce = cross_effect_data(F, shifted, budget)
    return shift(ce.complex, -n * k), None


def multilinearize(F: FunctorExpr, Xs: list[ChainComplex], window: tuple | None = None,
                   cap: int = DEFAULT_CAP, budget: int | None = None, with_action: bool = False,
                   strict: bool = False) -> Multilinear:
    """Stabilize ``shift(cr_n F(X_1[k], .., X_n[k]), -nk)`` over k = 0, 1, ..

    Returns the first level k whose window homology agrees with level k+1.
    With ``with_action`` the inputs must be equal and the level carries the
    permutation action, corrected by ``sign^k`` for the loop coordinates."""
    if window is None:
        center = sum(((X.support[0] + X.support[1]) // 2) if X.ranks else 0 for X in Xs)
        window = default_window(None, center)
    lo, hi = window
    tables, comps = [], []
    for k in range(cap + 1):
        C, rep = _ml_level(F, Xs, k, budget, with_action)
        tables.append(homology(C).restrict(lo, hi))
        comps.append((C, rep))
        if k >= 1 and tables[k] == tables[k - 1]:
            C0, rep0 = comps[k - 1]
            return Multilinear(C0, k - 1, True, window, tables, rep0)
    if strict:
        raise NotStabilized(f"multilinearization did not stabilize within cap {cap}")
    C0, rep0 = comps[-1]
    return Multilinear(C0, cap, False, window, tables, rep0)


def layer_coefficient(F: FunctorExpr, n: int, ring: Ring = ZZ, window: tuple | None = None,
                      cap: int = DEFAULT_CAP, budget: int | None = None) -> Representation:
    """The n-th derivative at a point: multilinearized cross-effect at
    ``(S^0, .., S^0)`` with its symmetric-group action."""
    if n < 1:
        raise ValueError("layer_coefficient needs n >= 1")
    ml = multilinearize(F, [sphere(0, ring)] * n, window, cap, budget, with_action=True, strict=True)
    rep = ml.representation
    rep.meta.update({"level": ml.level, "window": list(ml.window), "stabilized": ml.stabilized})
    return rep


def multilinearize_nested(F: FunctorExpr, p: int, q: int, ring: Ring = ZZ, cap: int = DEFAULT_CAP,
                          budget: int | None = None) -> tuple[HomologyTable, dict]:
    """Stabilize the last q slots first (for each suspension level of the
    first p), then the first p slots."""
    window = default_window(None, 0)
    lo, hi = window
    S = sphere(0, ring)
    outer_tables = []
    info = {"inner_levels": []}
    for k1 in range(cap + 1):
        first = [shift(S, k1)] * p
        prev = None
        found = None
        for k2 in range(cap + 1):
            C = cross_effect(F, p + q, first + [shift(S, k2)] * q, budget)
            H = homology(shift(C, -p * k1 - q * k2)).restrict(lo, hi)
            if prev is not None and H == prev:
                found = prev
                info["inner_levels"].append(k2 - 1)
                break
            prev = H
        if found is None:
            raise NotStabilized("inner multilinearization did not stabilize")
        outer_tables.append(found)
        if k1 >= 1 and outer_tables[k1] == outer_tables[k1 - 1]:
            info["outer_level"] = k1 - 1
            return outer_tables[k1 - 1], info
    raise NotStabilized("outer multilinearization did not stabilize")


def derivative_compose_check(F: FunctorExpr, p: int, q: int, ring: Ring = ZZ,
                             cap: int = DEFAULT_CAP, budget: int | None = None) -> dict:
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    direct = multilinearize(F, [sphere(0, ring)] * (p + q), cap=cap, budget=budget, strict=True)
    Hd = direct.homology
    Hn, info = multilinearize_nested(F, p, q, ring, cap, budget)
    return {"ok": Hd.ranks() == Hn.ranks(), "direct": Hd.to_json(), "nested": Hn.to_json(),
            "direct_level": direct.level, **info}


# ---------------------------------------------------------------------------
# T_n


@dataclass(eq=False)
class TResult:
    complex: ChainComplex
    t: ChainMap
    holim: Holim
    cube: CubeDiagram  # F applied to the join cube
    join: CubeDiagram


def taylor_T(F: FunctorExpr, n: int, X: ChainComplex, budget: int | None = None,
             ctx: Ctx | None = None) -> TResult:
    """Punctured homotopy limit of ``F`` on the join cube, with ``t : F(X) -> T_n F(X)``."""
    if n < 0:
        raise ValueError("taylor_T needs n >= 0")
    ctx = ctx or Ctx(budget)
    jc = join_cube(X, n)
    Fc = evaluate_cube(F, jc, ctx=ctx)
    H = punctured_holim_data(Fc, budget)
    e = frozenset()
    t = holim_initial_map(H, Fc.vertices[e], lambda U: Fc.map(e, U))
    if t.source is not _cx(ctx, F, X):
        t = ChainMap(_cx(ctx, F, X), H.complex, t.comps)
    return TResult(H.complex, t, H, Fc, jc)


def _join_map(f: ChainMap, n: int, J1: CubeDiagram, J2: CubeDiagram) -> dict:
    """Vertexwise maps ``X*U -> Y*U`` induced by ``f : X -> Y``."""
    out = {}
    for U in all_subsets(n + 1):
        m = len(U)
        A, B = J1.vertices[U], J2.vertices[U]
        if m == 0:
            out[U] = ChainMap(A, B, f.comps)
            continue
        fsum = direct_sum_maps([f] * m)
        X, Y = f.source, f.target
        _, fold1, _ = join_vertex(X, U)
        _, fold2, _ = join_vertex(Y, U)
        top = ChainMap(fold1.source, fold2.source, fsum.comps)
        out[U] = ChainMap(A, B, cone_of_maps(fold1, fold2, top, f).comps)
    return out


@dataclass(frozen=True, eq=False)
class TnFunctor(FunctorExpr):
    """``T_n F`` as a functor (generic model; sizes grow quickly)."""

    inner: FunctorExpr
    n: int

    def _build(self, X, ctx):
        r = taylor_T(self.inner, self.n, X, ctx.budget, ctx)
        return r.complex, r

    def _map(self, f, ctx):
        rs = ctx.obj(self, f.source)[1]
        rt = ctx.obj(self, f.target)[1]
        jm = _join_map(f, self.n, rs.join, rt.join)
        vm = {}
        for U in all_subsets(self.n + 1):
            if U:
                vm[U] = evaluate_map(self.inner, jm[U], ctx=ctx)
        return holim_map(rs.holim, rt.holim, lambda U: vm[U])

    def check_ring(self, ring):
        self.inner.check_ring(ring)

    def degree(self):
        return min(self.n, self.inner.degree())

    def to_json(self):
        return {"op": "T", "n": self.n, "inner": self.inner.to_json()}


def tn_t_map(F: FunctorExpr, n: int, X: ChainComplex, ctx: Ctx) -> ChainMap:
    """``t : F(X) -> T_n F(X)`` with endpoints memoised in ``ctx``."""
    T = TnFunctor(F, n)
    return ctx.obj(T, X)[1].t


# ---------------------------------------------------------------------------
# homotopy orbits and the round trip


@dataclass(eq=False)
class DeltaResult:
    complex: ChainComplex
    exact: bool
    certified_through: int | None

    def to_json(self) -> dict:
        H = homology(self.complex)
        if self.certified_through is not None:
            H = H.restrict(-10 ** 9, self.certified_through)
        return {"homology": H.to_json(), "exact": self.exact,
                "certified_through_degree": self.certified_through}


def delta_n(rep: Representation, X: ChainComplex, degree_cap: int | None = None,
            budget: int | None = None) -> DeltaResult:
    """Homotopy orbits of ``C (x) X^{(x)n}`` under the diagonal action."""
    if rep.ring != X.ring:
        raise ValueError("representation and input over different rings")
    M = tensor_rep(rep, X, budget)
    if rep.ring == QQ:
        basis, ech = invariant_subcomplex(M)
        return DeltaResult(restrict_to_invariants(M.complex, basis, ech), True, None)
    if degree_cap is None:
        raise ValueError("degree_cap is required away from the rationals")
    if not M.complex.ranks:
        return DeltaResult(M.complex, False, degree_cap)
    lo = min(M.complex.ranks)
    if degree_cap < lo:
        raise ValueError(f"degree_cap {degree_cap} cannot certify any degree (bottom degree {lo})")
    top = degree_cap - lo + 1
    return DeltaResult(bar_complex(M, top, budget), False, degree_cap)


def _multi_tensor_homology(C: ChainComplex, Xs: list[ChainComplex]) -> HomologyTable:
    return homology(tensor_many([C] + list(Xs)))


def roundtrip_check(rep: Representation, Xs: list[ChainComplex], budget: int | None = None) -> dict:
    """Compare cross-effects of ``L(X,..,X)`` and of its orbits with the
    explicit permutation sum, over the rationals."""
    n = rep.n
    if len(Xs) != n:
        raise ValueError(f"roundtrip needs {n} inputs")
    if rep.ring != QQ:
        raise ValueError("roundtrip_check runs over Q")
    from .functors import CoefSmash
    L = CoefSmash(rep.complex, n)
    pre = homology(cross_effect(L, n, Xs, budget))
    summed = homology(direct_sum(*[tensor_many([rep.complex] + [Xs[p[i]] for i in range(n)])
                                   for p in itertools.permutations(range(n))]))
    orb = homology(cross_effect(Orbits(rep), n, Xs, budget))
    single = _multi_tensor_homology(rep.complex, Xs)
    ok_pre = pre == summed
    ok_orb = orb == single
    return {"ok": ok_pre and ok_orb, "pre_orbit": pre.to_json(), "permutation_sum": summed.to_json(),
            "orbit": orb.to_json(), "multilinear": single.to_json(),
            "pre_orbit_ok": ok_pre, "orbit_ok": ok_orb}


# ---------------------------------------------------------------------------
# agreement order


def agreement_order(u: NatMap, n: int, ks=(1, 2, 3), ring: Ring = ZZ,
                    budget: int | None = None) -> dict:
    """Connectivity of ``u`` at spheres ``S^k``; O_n holds on the samples
    when ``conn_k - (n+1) k`` never decreases, and then ``c`` is the least
    constant with ``conn_k >= (n+1) k - c``."""
    table = {}
    for k in ks:
        ctx = Ctx(budget)
        table[k] = connectivity(u.at(sphere(k, ring), ctx))
    finite = {k: v for k, v in table.items() if v != INF}
    excess = [table[k] - (n + 1) * k for k in ks]
    holds = all(b >= a for a, b in zip(excess, excess[1:]))
    c = max(((n + 1) * k - v for k, v in finite.items()), default=None)
    return {"connectivity": {k: (None if v == INF else int(v)) for k, v in table.items()},
            "infinite": [k for k, v in table.items() if v == INF], "n": n,
            "holds": holds, "c": c}


__all__ = [
    "cross_effect", "cross_effect_data", "cross_effect_action", "cross_effect_representation",
    "multilinearize", "Multilinear", "layer_coefficient", "derivative_compose_check",
    "taylor_T", "TResult", "TnFunctor", "delta_n", "DeltaResult", "roundtrip_check",
    "agreement_order", "NotStabilized", "default_window", "DEFAULT_CAP",
]
