"""A small language of homotopy functors on chain complexes.

Each node evaluates on objects and on maps; ``evaluate_cube`` applies a
functor vertexwise and edgewise.  Evaluations are memoised per call on the
identity of the input complex, so cube edges line up with their vertices.

Polynomial nodes also expose a normal form ``{k: C_k}`` meaning
``X -> sum_k C_k (x) X^{(x)k}``, used by the fast tower model.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .chain import (ChainComplex, ChainComplexError, ChainMap, cone_of_maps, direct_sum_data,
                    direct_sum_maps, fiber, identity_map, shift, shift_map, sphere,
                    tensor_many, tensor_maps, zero_complex, zero_map)
from .cube import CubeDiagram
from .linalg import QQ, Ring, RingError, SparseMatrix
from .representations import (Representation, invariant_subcomplex, map_on_invariants,
                              restrict_to_invariants, sign_rep, tensor_rep, trivial_rep)


class NotPolynomial(ValueError):
    """The functor has no coefficient normal form (orbit constructions)."""


class Ctx:
    """Evaluation memo and budget for one top-level call."""

    def __init__(self, budget: int | None = None):
        self.budget = budget
        self.memo: dict = {}

    def obj(self, F: "FunctorExpr", X: ChainComplex):
        key = (id(F), id(X))
        hit = self.memo.get(key)
        if hit is None:
            hit = (X, F._build(X, self))
            self.memo[key] = hit
        return hit[1]


@dataclass(frozen=True, eq=False)
class FunctorExpr:
    def _build(self, X: ChainComplex, ctx: Ctx):
        """Return ``(complex, aux)``."""
        raise NotImplementedError

    def _map(self, f: ChainMap, ctx: Ctx) -> ChainMap:
        raise NotImplementedError

    def normal_form(self, ring: Ring) -> dict:
        raise NotPolynomial(type(self).__name__)

    def degree(self) -> int:
        """Polynomial degree (upper bound)."""
        raise NotImplementedError

    def check_ring(self, ring: Ring):
        pass

    def to_json(self) -> dict:
        raise NotImplementedError

    # convenience
    def __call__(self, X: ChainComplex, budget: int | None = None) -> ChainComplex:
        return evaluate(self, X, budget)


def _cx(ctx: Ctx, F: FunctorExpr, X: ChainComplex) -> ChainComplex:
    return ctx.obj(F, X)[0]


@dataclass(frozen=True, eq=False)
class Const(FunctorExpr):
    C: ChainComplex

    def _build(self, X, ctx):
        if X.ring != self.C.ring:
            raise RingError("constant functor over a different ring")
        return self.C, None

    def _map(self, f, ctx):
        return identity_map(self.C)

    def normal_form(self, ring):
        return {0: self.C} if self.C.ranks else {}

    def degree(self):
        return 0

    def to_json(self):
        from .serialize import complex_to_json
        return {"op": "const", "complex": complex_to_json(self.C)}


@dataclass(frozen=True, eq=False)
class Id(FunctorExpr):
    def _build(self, X, ctx):
        return X, None

    def _map(self, f, ctx):
        return f

    def normal_form(self, ring):
        return {1: sphere(0, ring)}

    def degree(self):
        return 1

    def to_json(self):
        return {"op": "id"}


@dataclass(frozen=True, eq=False)
class CoefSmash(FunctorExpr):
    """``X -> C (x) X^{(x)n}``."""

    C: ChainComplex
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("CoefSmash needs n >= 1")

    def _build(self, X, ctx):
        return tensor_many([self.C] + [X] * self.n, ctx.budget, with_basis=True)

    def _map(self, f, ctx):
        S = ctx.obj(self, f.source)
        T = ctx.obj(self, f.target)
        return tensor_maps([identity_map(self.C)] + [f] * self.n, S, T)

    def normal_form(self, ring):
        return {self.n: self.C} if self.C.ranks else {}

    def degree(self):
        return self.n if self.C.ranks else 0

    def to_json(self):
        from .serialize import complex_to_json
        return {"op": "coef_smash", "n": self.n, "complex": complex_to_json(self.C)}


@dataclass(frozen=True, eq=False)
class TensorPower(FunctorExpr):
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("TensorPower needs n >= 1")

    def _build(self, X, ctx):
        return tensor_many([X] * self.n, ctx.budget, with_basis=True)

    def _map(self, f, ctx):
        return tensor_maps([f] * self.n, ctx.obj(self, f.source), ctx.obj(self, f.target))

    def normal_form(self, ring):
        return {self.n: sphere(0, ring)}

    def degree(self):
        return self.n

    def to_json(self):
        return {"op": "tensor_power", "n": self.n}


@dataclass(frozen=True, eq=False)
class Orbits(FunctorExpr):
    """``X -> (C (x) X^{(x)n})_{S_n}`` over the rationals, modelled by the
    invariant subcomplex (isomorphic to the coinvariants over Q)."""

    rep: Representation
    label: str = "orbits"

    @property
    def n(self) -> int:
        return self.rep.n

    def check_ring(self, ring):
        if ring != QQ or self.rep.ring != QQ:
            raise RingError(f"{self.label} is only defined over Q")

    def _build(self, X, ctx):
        self.check_ring(X.ring)
        R = tensor_rep(self.rep, X, ctx.budget)
        basis, ech = invariant_subcomplex(R)
        inv = restrict_to_invariants(R.complex, basis, ech)
        return inv, (R, basis, ech)

    def _map(self, f, ctx):
        S, (RS, bS, eS) = ctx.obj(self, f.source)
        T, (RT, bT, eT) = ctx.obj(self, f.target)
        full = tensor_maps([identity_map(self.rep.complex)] + [f] * self.n)
        full = ChainMap(RS.complex, RT.complex, full.comps)
        return map_on_invariants(full, (bS, eS), (bT, eT), S, T)

    def degree(self):
        return self.n if self.rep.complex.ranks else 0

    def to_json(self):
        if self.label in ("sym_power", "ext_power"):
            return {"op": self.label, "n": self.n}
        return {"op": "orbits", "representation": self.rep.to_json()}


def SymPower(n: int) -> Orbits:
    return Orbits(trivial_rep(n, QQ), "sym_power")


def ExtPower(n: int) -> Orbits:
    return Orbits(sign_rep(n, QQ), "ext_power")


@dataclass(frozen=True, eq=False)
class Sum(FunctorExpr):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("Sum needs at least one summand")

    def _build(self, X, ctx):
        ds = direct_sum_data([_cx(ctx, a, X) for a in self.args], X.ring)
        return ds.complex, ds

    def _map(self, f, ctx):
        S = ctx.obj(self, f.source)[1]
        T = ctx.obj(self, f.target)[1]
        return direct_sum_maps([a._map(f, ctx) for a in self.args], S, T)

    def normal_form(self, ring):
        forms = [a.normal_form(ring) for a in self.args]
        ks = sorted(set().union(*forms))
        out = {}
        for k in ks:
            C = direct_sum_data([fm.get(k, zero_complex(ring)) for fm in forms], ring).complex
            if C.ranks:
                out[k] = C
        return out

    def check_ring(self, ring):
        for a in self.args:
            a.check_ring(ring)

    def degree(self):
        return max(a.degree() for a in self.args)

    def to_json(self):
        return {"op": "sum", "args": [a.to_json() for a in self.args]}


def TruncTensorAlg(m: int) -> Sum:
    """``X -> sum_{1 <= k <= m} X^{(x)k}``."""
    if m < 1:
        raise ValueError("TruncTensorAlg needs m >= 1")
    return TTA(tuple(TensorPower(k) for k in range(1, m + 1)), m)


@dataclass(frozen=True, eq=False)
class TTA(Sum):
    m: int = 1

    def to_json(self):
        return {"op": "trunc_tensor_alg", "m": self.m}


@dataclass(frozen=True, eq=False)
class ShiftF(FunctorExpr):
    """``X -> shift(X, j)``; ShiftF(1) is the suspension."""

    j: int

    def _build(self, X, ctx):
        return shift(X, self.j), None

    def _map(self, f, ctx):
        return shift_map(f, self.j, _cx(ctx, self, f.source), _cx(ctx, self, f.target))

    def normal_form(self, ring):
        return {1: sphere(self.j, ring)}

    def degree(self):
        return 1

    def to_json(self):
        return {"op": "shift", "j": self.j}


@dataclass(frozen=True, eq=False)
class Compose(FunctorExpr):
    """``X -> outer(inner(X))``."""

    outer: FunctorExpr
    inner: FunctorExpr

    def _build(self, X, ctx):
        Y = _cx(ctx, self.inner, X)
        return _cx(ctx, self.outer, Y), Y

    def _map(self, f, ctx):
        g = self.inner._map(f, ctx)
        # make the inner map's endpoints the memoised objects
        src = ctx.obj(self, f.source)[1]
        tgt = ctx.obj(self, f.target)[1]
        g = ChainMap(src, tgt, g.comps) if (g.source is not src or g.target is not tgt) else g
        return self.outer._map(g, ctx)

    def normal_form(self, ring):
        F = self.outer.normal_form(ring)
        G = self.inner.normal_form(ring)
        out: dict[int, list] = {}
        for k, Ck in F.items():
            if k == 0:
                out.setdefault(0, []).append(Ck)
                continue
            for js in itertools.product(sorted(G), repeat=k):
                parts = [Ck] + [G[j] for j in js]
                out.setdefault(sum(js), []).append(tensor_many(parts))
        res = {}
        for k, lst in out.items():
            C = direct_sum_data(lst, ring).complex
            if C.ranks:
                res[k] = C
        return res

    def check_ring(self, ring):
        self.outer.check_ring(ring)
        self.inner.check_ring(ring)

    def degree(self):
        return self.outer.degree() * max(self.inner.degree(), 1)

    def to_json(self):
        return {"op": "compose", "outer": self.outer.to_json(), "inner": self.inner.to_json()}


@dataclass(frozen=True, eq=False)
class FiberF(FunctorExpr):
    """``X -> fiber(u_X)`` for a natural map ``u``."""

    u: "NatMap"

    def _build(self, X, ctx):
        uX = self.u.at(X, ctx)
        return fiber(uX), uX

    def _map(self, f, ctx):
        S, uS = ctx.obj(self, f.source)
        T, uT = ctx.obj(self, f.target)
        top = self.u.source._map(f, ctx)
        bot = self.u.target._map(f, ctx)
        top = ChainMap(uS.source, uT.source, top.comps)
        bot = ChainMap(uS.target, uT.target, bot.comps)
        c = cone_of_maps(uS, uT, top, bot)
        return shift_map(c, -1, S, T)

    def normal_form(self, ring):
        coefs = self.u.coefficient_maps(ring)
        out = {}
        for k, m in coefs.items():
            C = fiber(m)
            if C.ranks:
                out[k] = C
        return out

    def check_ring(self, ring):
        self.u.source.check_ring(ring)
        self.u.target.check_ring(ring)

    def degree(self):
        return max(self.u.source.degree(), self.u.target.degree())

    def to_json(self):
        return {"op": "fiber", "map": self.u.to_json()}


# ---------------------------------------------------------------------------
# natural maps


@dataclass(frozen=True, eq=False)
class NatMap:
    source: FunctorExpr
    target: FunctorExpr

    def at(self, X: ChainComplex, ctx: Ctx | None = None) -> ChainMap:
        raise NotImplementedError

    def coefficient_maps(self, ring: Ring) -> dict:
        """``{k: C_k -> C'_k}`` between normal-form coefficients."""
        raise NotPolynomial(type(self).__name__)

    def to_json(self) -> dict:
        raise NotImplementedError


def _nf_pair(u: NatMap, ring: Ring):
    A = u.source.normal_form(ring)
    B = u.target.normal_form(ring)
    return A, B, sorted(set(A) | set(B))


@dataclass(frozen=True, eq=False)
class IdentityNat(NatMap):
    def __init__(self, F: FunctorExpr):
        object.__setattr__(self, "source", F)
        object.__setattr__(self, "target", F)

    def at(self, X, ctx=None):
        ctx = ctx or Ctx()
        return identity_map(_cx(ctx, self.source, X))

    def coefficient_maps(self, ring):
        return {k: identity_map(C) for k, C in self.source.normal_form(ring).items()}

    def to_json(self):
        return {"kind": "identity", "functor": self.source.to_json()}


@dataclass(frozen=True, eq=False)
class ZeroNat(NatMap):
    def at(self, X, ctx=None):
        ctx = ctx or Ctx()
        return zero_map(_cx(ctx, self.source, X), _cx(ctx, self.target, X))

    def coefficient_maps(self, ring):
        A, B, ks = _nf_pair(self, ring)
        z = zero_complex(ring)
        return {k: zero_map(A.get(k, z), B.get(k, z)) for k in ks}

    def to_json(self):
        return {"kind": "zero", "source": self.source.to_json(), "target": self.target.to_json()}


def _prefix_inclusion(A: ChainComplex, B: ChainComplex) -> ChainMap:
    return ChainMap(A, B, {k: SparseMatrix(B.rank(k), r, {j: {j: 1} for j in range(r)})
                           for k, r in A.ranks.items()})


@dataclass(frozen=True, eq=False)
class SumInclusion(NatMap):
    """Inclusion of ``Sum(a_1..a_p)`` into ``Sum(a_1..a_q)`` (same leading summands)."""

    def __post_init__(self):
        a, b = self.source, self.target
        if not (isinstance(a, Sum) and isinstance(b, Sum)):
            raise ValueError("SumInclusion needs two sums")
        if len(a.args) > len(b.args) or any(x is not y and x.to_json() != y.to_json()
                                            for x, y in zip(a.args, b.args)):
            raise ValueError("source summands must be a prefix of the target summands")

    def at(self, X, ctx=None):
        ctx = ctx or Ctx()
        return _prefix_inclusion(_cx(ctx, self.source, X), _cx(ctx, self.target, X))

    def coefficient_maps(self, ring):
        A, B, ks = _nf_pair(self, ring)
        z = zero_complex(ring)
        return {k: _prefix_inclusion(A.get(k, z), B.get(k, z)) for k in ks}

    def to_json(self):
        return {"kind": "inclusion", "source": self.source.to_json(), "target": self.target.to_json()}


@dataclass(frozen=True, eq=False)
class CoefMap(NatMap):
    """``f (x) id : C (x) X^n -> C' (x) X^n``."""

    f: ChainMap = None
    n: int = 1

    def __init__(self, f: ChainMap, n: int):
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "source", CoefSmash(f.source, n))
        object.__setattr__(self, "target", CoefSmash(f.target, n))

    def at(self, X, ctx=None):
        ctx = ctx or Ctx()
        S = ctx.obj(self.source, X)
        T = ctx.obj(self.target, X)
        return tensor_maps([self.f] + [identity_map(X)] * self.n, S, T)

    def coefficient_maps(self, ring):
        A, B, ks = _nf_pair(self, ring)
        if not ks:
            return {}
        return {self.n: ChainMap(A.get(self.n, zero_complex(ring)), B.get(self.n, zero_complex(ring)),
                                 self.f.comps)}

    def to_json(self):
        from .serialize import complex_to_json, map_to_json
        return {"kind": "coef", "n": self.n, "source": complex_to_json(self.f.source),
                "target": complex_to_json(self.f.target), "map": map_to_json(self.f)}


@dataclass(frozen=True, eq=False)
class SumNat(NatMap):
    """Blockwise ``Sum(u_i)`` between ``Sum(sources)`` and ``Sum(targets)``."""

    maps: tuple = ()

    def __init__(self, maps):
        maps = tuple(maps)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "source", Sum(tuple(u.source for u in maps)))
        object.__setattr__(self, "target", Sum(tuple(u.target for u in maps)))

    def at(self, X, ctx=None):
        ctx = ctx or Ctx()
        S = ctx.obj(self.source, X)[1]
        T = ctx.obj(self.target, X)[1]
        comps = []
        for u, a, b in zip(self.maps, self.source.args, self.target.args):
            m = u.at(X, ctx)
            comps.append(ChainMap(_cx(ctx, a, X), _cx(ctx, b, X), m.comps))
        return direct_sum_maps(comps, S, T)

    def coefficient_maps(self, ring):
        per = [u.coefficient_maps(ring) for u in self.maps]
        srcs = [u.source.normal_form(ring) for u in self.maps]
        tgts = [u.target.normal_form(ring) for u in self.maps]
        z = zero_complex(ring)
        ks = sorted(set().union(*per, *srcs, *tgts))
        out = {}
        for k in ks:
            parts = []
            for p, A, B in zip(per, srcs, tgts):
                m = p.get(k)
                if m is None:
                    m = zero_map(A.get(k, z), B.get(k, z))
                parts.append(m)
            S = direct_sum_data([m.source for m in parts], ring)
            T = direct_sum_data([m.target for m in parts], ring)
            out[k] = direct_sum_maps(parts, S, T)
        return out

    def to_json(self):
        return {"kind": "sum", "maps": [u.to_json() for u in self.maps]}


# ---------------------------------------------------------------------------
# evaluation entry points


def evaluate(F: FunctorExpr, X: ChainComplex, budget: int | None = None, ctx: Ctx | None = None):
    F.check_ring(X.ring)
    ctx = ctx or Ctx(budget)
    return _cx(ctx, F, X)


def evaluate_map(F: FunctorExpr, f: ChainMap, budget: int | None = None, ctx: Ctx | None = None):
    F.check_ring(f.ring)
    ctx = ctx or Ctx(budget)
    S = _cx(ctx, F, f.source)
    T = _cx(ctx, F, f.target)
    m = F._map(f, ctx)
    if m.source is not S or m.target is not T:
        m = ChainMap(S, T, m.comps)
    return m


def evaluate_cube(F: FunctorExpr, c: CubeDiagram, budget: int | None = None,
                  ctx: Ctx | None = None) -> CubeDiagram:
    F.check_ring(c.ring)
    ctx = ctx or Ctx(budget)
    verts = {T: _cx(ctx, F, X) for T, X in c.vertices.items()}
    edges = {}
    for (T, s), f in c.edges.items():
        src, tgt = c.vertices[T], c.vertices[T | {s}]
        if f.source is not src or f.target is not tgt:
            f = ChainMap(src, tgt, f.comps)
        edges[(T, s)] = evaluate_map(F, f, ctx=ctx)
    return CubeDiagram(c.dim, verts, edges, check=False)


# ---------------------------------------------------------------------------
# JSON


def functor_from_json(doc, ring: Ring | None = None) -> FunctorExpr:
    from .serialize import complex_from_json
    if isinstance(doc, str):
        doc = doc.strip()
        if doc.startswith("{"):
            return functor_from_json(json.loads(doc), ring)
        name, _, arg = doc.partition(":")
        short = {"tensor_power": "n", "sym_power": "n", "ext_power": "n",
                 "trunc_tensor_alg": "m", "shift": "j"}
        if name == "id":
            return Id()
        if name in short and arg:
            return functor_from_json({"op": name, short[name]: int(arg)}, ring)
        raise ValueError(f"cannot parse functor shorthand {doc!r}")
    op = doc.get("op")
    if op == "id":
        return Id()
    if op == "const":
        return Const(complex_from_json(doc["complex"], ring))
    if op == "tensor_power":
        return TensorPower(int(doc["n"]))
    if op == "coef_smash":
        return CoefSmash(complex_from_json(doc["complex"], ring), int(doc["n"]))
    if op == "sym_power":
        return SymPower(int(doc["n"]))
    if op == "ext_power":
        return ExtPower(int(doc["n"]))
    if op == "sum":
        return Sum(tuple(functor_from_json(a, ring) for a in doc["args"]))
    if op == "shift":
        return ShiftF(int(doc["j"]))
    if op == "compose":
        return Compose(functor_from_json(doc["outer"], ring), functor_from_json(doc["inner"], ring))
    if op == "trunc_tensor_alg":
        return TruncTensorAlg(int(doc["m"]))
    if op == "fiber":
        return FiberF(natmap_from_json(doc["map"], ring))
    raise ValueError(f"unknown functor op {op!r}")


def natmap_from_json(doc, ring: Ring | None = None) -> NatMap:
    from .serialize import complex_from_json, map_from_json
    kind = doc.get("kind")
    if kind == "identity":
        return IdentityNat(functor_from_json(doc["functor"], ring))
    if kind == "zero":
        return ZeroNat(functor_from_json(doc["source"], ring), functor_from_json(doc["target"], ring))
    if kind == "inclusion":
        return SumInclusion(functor_from_json(doc["source"], ring), functor_from_json(doc["target"], ring))
    if kind == "coef":
        A = complex_from_json(doc["source"], ring)
        B = complex_from_json(doc["target"], ring)
        return CoefMap(map_from_json(doc["map"], A, B), int(doc["n"]))
    if kind == "sum":
        return SumNat([natmap_from_json(d, ring) for d in doc["maps"]])
    raise ValueError(f"unknown natural map kind {kind!r}")


__all__ = [
    "FunctorExpr", "Const", "Id", "TensorPower", "CoefSmash", "SymPower", "ExtPower", "Orbits",
    "Sum", "TruncTensorAlg", "ShiftF", "Compose", "FiberF", "NatMap", "IdentityNat", "ZeroNat",
    "SumInclusion", "CoefMap", "SumNat", "evaluate", "evaluate_map", "evaluate_cube",
    "functor_from_json", "natmap_from_json", "NotPolynomial", "Ctx", "ChainComplexError",
]
