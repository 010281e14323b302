"""Cubical diagrams, total (co)fibers, the join cube and homotopy limits over
finite posets.

Subsets of ``{1..k}`` are ``frozenset``s.  Sign conventions:

* total fiber: generator ``e_T (x) x`` sits in degree ``|x| - |T|`` and
  ``D(e_T x) = (-1)^|T| e_T dx - sum_{s not in T} eps(s, T) e_{T+s} f(x)``
  with ``eps(s, T) = (-1)^#{t in T : t < s}``.  The 1-cube gives fiber(f).
* total cofiber: ``e_T x`` in degree ``|x| + k - |T|``, internal sign
  ``(-1)^(k-|T|)``, edge sign counted over the complement.  1-cube: cone(f).
* holim over a poset: generator ``(U_0 < ... < U_m, v)`` with ``v`` in the
  value at ``U_m``, degree ``|v| - m``, ``D = delta + (-1)^m d`` where delta
  inserts an element at position i with sign ``(-1)^i``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .chain import (ChainComplex, ChainComplexError, ChainMap, DirectSum, check_budget,
                    compose, cone, cone_of_maps, direct_sum_data, identity_map)
from .homology import is_acyclic
from .linalg import Ring, SparseMatrix


def subset_key(T) -> tuple:
    return (len(T), tuple(sorted(T)))


def subset_str(T) -> str:
    return "{" + ",".join(str(t) for t in sorted(T)) + "}"


def all_subsets(k: int) -> list[frozenset]:
    out = [frozenset(c) for r in range(k + 1) for c in itertools.combinations(range(1, k + 1), r)]
    return sorted(out, key=subset_key)


# ---------------------------------------------------------------------------
# total complexes assembled from blocks


@dataclass(eq=False)
class TotalComplex:
    """A complex glued from labelled blocks ``C_b`` placed at shift ``h_b``."""

    complex: ChainComplex
    blocks: list  # (label, complex, shift, internal sign)
    offsets: dict = field(default_factory=dict)  # label -> {internal degree: offset}

    def block(self, label):
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = self.__dict__["_index"] = {b[0]: b for b in self.blocks}
        return idx[label]

    def labels(self):
        return [b[0] for b in self.blocks]


def assemble(ring: Ring, blocks: list, arrows: list, budget: int | None = None,
             what: str = "total complex") -> TotalComplex:
    """Glue blocks ``(label, C, h, s)`` with differential pieces
    ``(src, tgt, map_or_None, sign)``; maps are degree preserving on internal
    degrees and must connect blocks with ``h_tgt = h_src - 1``."""
    check_budget(sum(C.size() for _, C, _, _ in blocks), budget, what)
    ranks: dict[int, int] = {}
    offsets: dict = {}
    info = {}
    for label, C, h, s in blocks:
        offs = {}
        for j, r in C.ranks.items():
            deg = j + h
            offs[j] = ranks.get(deg, 0)
            ranks[deg] = offs[j] + r
        offsets[label] = offs
        info[label] = (C, h, s)
    cols: dict[int, dict] = {}

    def put(deg, col, row, v):
        c = cols.setdefault(deg, {}).setdefault(col, {})
        c[row] = c.get(row, 0) + v

    for label, C, h, s in blocks:
        offs = offsets[label]
        for k, m in C.diffs.items():
            oc, orow = offs[k], offs[k - 1]
            for j, col in m.cols.items():
                for i, v in col.items():
                    put(k + h, oc + j, orow + i, s * v)
    for src, tgt, f, sgn in arrows:
        Cs, hs, _ = info[src]
        Ct, ht, _ = info[tgt]
        if ht != hs - 1:
            raise ChainComplexError(f"arrow {src}->{tgt} has wrong degree")
        os_, ot = offsets[src], offsets[tgt]
        if f is None:
            for j, r in Cs.ranks.items():
                for i in range(r):
                    put(j + hs, os_[j] + i, ot[j] + i, sgn)
        else:
            for j, m in f.comps.items():
                for c, col in m.cols.items():
                    for i, v in col.items():
                        put(j + hs, os_[j] + c, ot[j] + i, sgn * v)
    diffs = {}
    for deg, cc in cols.items():
        clean = {}
        for j, col in cc.items():
            col = {i: ring.norm(v) for i, v in col.items() if ring.norm(v)}
            if col:
                clean[j] = col
        diffs[deg] = SparseMatrix(ranks.get(deg - 1, 0), ranks.get(deg, 0), clean)
    return TotalComplex(ChainComplex(ring, ranks, diffs), list(blocks), offsets)


def block_map(src: TotalComplex, tgt: TotalComplex, pieces: list) -> ChainMap:
    """Map assembled from ``(src_label, tgt_label, map_or_None, sign)`` pieces
    between blocks at the same shift (no checking beyond ChainMap's own)."""
    S, T = src.complex, tgt.complex
    R = S.ring
    acc: dict[int, dict] = {}
    for a, b, f, sgn in pieces:
        Ca, ha, _ = src.block(a)[1:]
        hb = tgt.block(b)[2]
        oa, ob = src.offsets[a], tgt.offsets[b]
        if f is None:
            items = [(j, {i: {i: 1} for i in range(r)}) for j, r in Ca.ranks.items()]
        else:
            items = [(j, m.cols) for j, m in f.comps.items()]
        for j, mcols in items:
            deg = j + ha
            jt = deg - hb
            cc = acc.setdefault(deg, {})
            for c, col in mcols.items():
                dst = cc.setdefault(oa[j] + c, {})
                for i, v in col.items():
                    r = ob[jt] + i
                    dst[r] = dst.get(r, 0) + sgn * v
    comps = {}
    for deg, cc in acc.items():
        clean = {}
        for j, col in cc.items():
            col = {i: R.norm(v) for i, v in col.items() if R.norm(v)}
            if col:
                clean[j] = col
        comps[deg] = SparseMatrix(T.rank(deg), S.rank(deg), clean)
    return ChainMap(S, T, comps)


# ---------------------------------------------------------------------------
# cubes


@dataclass(eq=False)
class CubeDiagram:
    """A commuting k-cube: ``vertices[T]`` and ``edges[(T, s)] : T -> T+{s}``."""

    dim: int
    vertices: dict
    edges: dict
    check: bool = True
    _maps: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.check:
            self.validate()

    @property
    def ring(self) -> Ring:
        return self.vertices[frozenset()].ring

    def subsets(self) -> list[frozenset]:
        return all_subsets(self.dim)

    def validate(self):
        k = self.dim
        subs = all_subsets(k)
        R = None
        for T in subs:
            if T not in self.vertices:
                raise ChainComplexError(f"cube is missing vertex {subset_str(T)}")
            R = R or self.vertices[T].ring
            if self.vertices[T].ring != R:
                raise ChainComplexError("cube vertices over different rings")
        for T in subs:
            for s in range(1, k + 1):
                if s in T:
                    continue
                f = self.edges.get((T, s))
                if f is None:
                    raise ChainComplexError(f"cube is missing edge {subset_str(T)}->{s}")
                if not (f.source is self.vertices[T] or f.source.same_as(self.vertices[T])):
                    raise ChainComplexError(f"edge {subset_str(T)}->{s} has the wrong source")
                U = T | {s}
                if not (f.target is self.vertices[U] or f.target.same_as(self.vertices[U])):
                    raise ChainComplexError(f"edge {subset_str(T)}->{s} has the wrong target")
        for T in subs:
            free = [s for s in range(1, k + 1) if s not in T]
            for a, b in itertools.combinations(free, 2):
                p1 = compose(self.edges[(T | {a}, b)], self.edges[(T, a)])
                p2 = compose(self.edges[(T | {b}, a)], self.edges[(T, b)])
                for deg in set(p1.comps) | set(p2.comps):
                    if p1.at(deg) != p2.at(deg):
                        raise ChainComplexError(
                            f"face at {subset_str(T)} in directions {a},{b} does not commute", deg)

    def map(self, U: frozenset, V: frozenset) -> ChainMap:
        """Composite of edges ``U -> V`` for ``U`` a subset of ``V``."""
        if not U <= V:
            raise ValueError("map needs U contained in V")
        if U == V:
            return identity_map(self.vertices[U])
        key = (U, V)
        if key not in self._maps:
            s = max(V - U)
            W = V - {s}
            self._maps[key] = compose(self.edges[(W, s)], self.map(U, W))
        return self._maps[key]

    def face(self, base: frozenset, dirs: tuple) -> "CubeDiagram":
        """The sub-cube at ``base`` spanned by ``dirs`` (renumbered 1..m)."""
        m = len(dirs)
        verts, edges = {}, {}
        for S in all_subsets(m):
            verts[S] = self.vertices[base | {dirs[i - 1] for i in S}]
        for S in all_subsets(m):
            for i in range(1, m + 1):
                if i not in S:
                    T = base | {dirs[j - 1] for j in S}
                    edges[(S, i)] = self.edges[(T, dirs[i - 1])]
        return CubeDiagram(m, verts, edges, check=False)

    def faces2(self):
        k = self.dim
        for T in all_subsets(k):
            free = [s for s in range(1, k + 1) if s not in T]
            for a, b in itertools.combinations(free, 2):
                yield T, (a, b), self.face(T, (a, b))

    def to_json(self) -> dict:
        from .serialize import complex_to_json, map_to_json
        return {
            "dimension": self.dim,
            "vertices": {subset_str(T): complex_to_json(self.vertices[T]) for T in self.subsets()},
            "edges": {f"{subset_str(T)}->{subset_str(T | {s})}": map_to_json(self.edges[(T, s)])
                      for T in self.subsets() for s in range(1, self.dim + 1) if s not in T},
        }


def _eps(s: int, T) -> int:
    return -1 if sum(1 for t in T if t < s) % 2 else 1


def total_fiber_data(c: CubeDiagram, budget: int | None = None) -> TotalComplex:
    k = c.dim
    subs = sorted(all_subsets(k), key=lambda T: (-len(T), tuple(sorted(T))))
    blocks = [(T, c.vertices[T], -len(T), -1 if len(T) % 2 else 1) for T in subs]
    arrows = [(T, T | {s}, c.edges[(T, s)], -_eps(s, T))
              for T in subs for s in range(1, k + 1) if s not in T]
    return assemble(c.ring, blocks, arrows, budget, "total fiber")


def total_fiber(c: CubeDiagram, budget: int | None = None) -> ChainComplex:
    return total_fiber_data(c, budget).complex


def total_cofiber_data(c: CubeDiagram, budget: int | None = None) -> TotalComplex:
    k = c.dim
    full = set(range(1, k + 1))
    subs = sorted(all_subsets(k), key=lambda T: (-len(T), tuple(sorted(T))))
    blocks = [(T, c.vertices[T], k - len(T), -1 if (k - len(T)) % 2 else 1) for T in subs]
    arrows = [(T, T | {s}, c.edges[(T, s)], _eps(s, full - T))
              for T in subs for s in range(1, k + 1) if s not in T]
    return assemble(c.ring, blocks, arrows, budget, "total cofiber")


def total_cofiber(c: CubeDiagram, budget: int | None = None) -> ChainComplex:
    return total_cofiber_data(c, budget).complex


def is_cartesian(c: CubeDiagram, budget: int | None = None) -> bool:
    return is_acyclic(total_fiber(c, budget))


def is_strongly_cocartesian(c: CubeDiagram, budget: int | None = None) -> bool:
    if c.dim <= 1:
        return True
    return all(is_acyclic(total_fiber(f, budget)) for _, _, f in c.faces2())


def cube_automorphism(c: CubeDiagram, perm: dict, vertex_maps: dict,
                      tf: TotalComplex | None = None) -> ChainMap:
    """Map on the total fiber induced by relabelling directions by ``perm``
    (a dict s -> perm[s]) together with ``vertex_maps[T] : c[T] -> c[perm T]``
    commuting with the edges."""
    tf = tf or total_fiber_data(c)
    pieces = []
    for T in c.subsets():
        img = [perm[t] for t in sorted(T)]
        # sign of sorting the image sequence
        inv = sum(1 for a, b in itertools.combinations(img, 2) if a > b)
        pieces.append((T, frozenset(img), vertex_maps[T], -1 if inv % 2 else 1))
    return block_map(tf, tf, pieces)


# ---------------------------------------------------------------------------
# standard cubes


def cube_from_function(k: int, vertex, edge) -> CubeDiagram:
    verts = {T: vertex(T) for T in all_subsets(k)}
    edges = {(T, s): edge(T, s, verts[T], verts[T | {s}])
             for T in all_subsets(k) for s in range(1, k + 1) if s not in T}
    return CubeDiagram(k, verts, edges)


def join_vertex(X: ChainComplex, U) -> tuple[ChainComplex, ChainMap, DirectSum]:
    """Reduced model of the join ``X * U``: the cone of the fold map
    ``X^(+U) -> X``.  For ``U`` empty this is ``X`` itself."""
    U = sorted(U)
    ds = direct_sum_data([X] * len(U), X.ring)
    comps = {}
    for k, r in X.ranks.items():
        cols = {}
        for a in range(len(U)):
            off = ds.offsets[k][a]
            for j in range(r):
                cols[off + j] = {j: 1}
        comps[k] = SparseMatrix(r, ds.complex.rank(k), cols)
    fold = ChainMap(ds.complex, X, comps)
    return cone(fold), fold, ds


def join_cube(X: ChainComplex, n: int) -> CubeDiagram:
    """The (n+1)-cube ``U -> X * U`` over subsets of ``{1..n+1}``."""
    if n < 0:
        raise ValueError("join_cube needs n >= 0")
    k = n + 1
    data = {T: join_vertex(X, T) for T in all_subsets(k)}
    verts = {T: data[T][0] for T in data}
    edges = {}
    for T in all_subsets(k):
        C1, f1, ds1 = data[T]
        for s in range(1, k + 1):
            if s in T:
                continue
            V = T | {s}
            C2, f2, ds2 = data[V]
            # summand a of T goes to the summand of the same element in V
            Vl = sorted(V)
            Tl = sorted(T)
            comps = {}
            for deg in ds1.complex.ranks:
                cols = {}
                r = X.rank(deg)
                for a, t in enumerate(Tl):
                    b = Vl.index(t)
                    for j in range(r):
                        cols[ds1.offsets[deg][a] + j] = {ds2.offsets[deg][b] + j: 1}
                comps[deg] = SparseMatrix(ds2.complex.rank(deg), ds1.complex.rank(deg), cols)
            top = ChainMap(ds1.complex, ds2.complex, comps)
            edges[(T, s)] = cone_of_maps(f1, f2, top, identity_map(X), C1, C2)
    return CubeDiagram(k, verts, edges)


def sum_cube(Xs: list[ChainComplex]) -> CubeDiagram:
    """Vertex ``V`` is the sum of the ``X_s`` with ``s`` not in ``V``; edges
    are the projections killing the new direction."""
    n = len(Xs)
    if n == 0:
        raise ValueError("sum_cube needs at least one input")
    R = Xs[0].ring
    data = {}
    for V in all_subsets(n):
        idx = [s for s in range(1, n + 1) if s not in V]
        data[V] = (direct_sum_data([Xs[s - 1] for s in idx], R), idx)
    verts = {V: d[0].complex for V, d in data.items()}
    edges = {}
    for V in all_subsets(n):
        ds1, idx1 = data[V]
        for s in range(1, n + 1):
            if s in V:
                continue
            ds2, idx2 = data[V | {s}]
            edges[(V, s)] = summand_map(ds1, idx1, ds2, idx2, {t: t for t in idx2})
    return CubeDiagram(n, verts, edges)


def summand_map(ds1: DirectSum, idx1: list, ds2: DirectSum, idx2: list, assign: dict) -> ChainMap:
    """Map between labelled direct sums: target summand ``t`` receives source
    summand ``assign[t]`` by the identity; unassigned source summands die."""
    comps = {}
    src_pos = {a: i for i, a in enumerate(idx1)}
    for deg in ds1.complex.ranks:
        cols = {}
        for b, t in enumerate(idx2):
            a = assign.get(t)
            if a is None or a not in src_pos:
                continue
            i = src_pos[a]
            r = ds1.summands[i].rank(deg)
            for j in range(r):
                cols[ds1.offsets[deg][i] + j] = {ds2.offsets[deg][b] + j: 1}
        comps[deg] = SparseMatrix(ds2.complex.rank(deg), ds1.complex.rank(deg), cols)
    return ChainMap(ds1.complex, ds2.complex, comps)


def sum_cube_permutation(Xs: list[ChainComplex], c: CubeDiagram, perm: dict) -> dict:
    """Vertex maps ``c[V] -> c[perm V]`` relabelling summands, for equal inputs."""
    n = len(Xs)
    out = {}
    for V in all_subsets(n):
        W = frozenset(perm[v] for v in V)
        idx1 = [s for s in range(1, n + 1) if s not in V]
        idx2 = [s for s in range(1, n + 1) if s not in W]
        inv = {perm[s]: s for s in perm}
        ds1 = direct_sum_data([Xs[s - 1] for s in idx1], c.ring)
        ds2 = direct_sum_data([Xs[s - 1] for s in idx2], c.ring)
        out[V] = summand_map(ds1, idx1, ds2, idx2, {t: inv[t] for t in idx2})
    return out


# ---------------------------------------------------------------------------
# homotopy limits over finite posets


def poset_chains(elements: list, less) -> list[tuple]:
    """All nonempty strictly increasing chains, ordered by length then by the
    positions of their elements."""
    n = len(elements)
    up = {i: [j for j in range(n) if less(elements[i], elements[j])] for i in range(n)}
    out = []

    def grow(ch):
        out.append(ch)
        for j in up[ch[-1]]:
            grow(ch + (j,))

    for i in range(n):
        grow((i,))
    out.sort(key=lambda ch: (len(ch), ch))
    return [tuple(elements[i] for i in ch) for ch in out]


@dataclass(eq=False)
class Holim:
    """Cobar model of a homotopy limit over a finite poset."""

    total: TotalComplex
    elements: list
    chains: list
    value: object  # element -> ChainComplex
    mapfn: object  # (U, V) -> ChainMap

    @property
    def complex(self) -> ChainComplex:
        return self.total.complex


def holim(elements: list, less, value, mapfn, ring: Ring, budget: int | None = None) -> Holim:
    chains = poset_chains(elements, less)
    size = sum(value(ch[-1]).size() for ch in chains)
    check_budget(size, budget, "homotopy limit")
    blocks = [(ch, value(ch[-1]), -(len(ch) - 1), -1 if (len(ch) - 1) % 2 else 1) for ch in chains]
    chainset = set(chains)
    arrows = []
    for tau in chains:
        if len(tau) < 2:
            continue
        m1 = len(tau) - 1
        for i in range(len(tau)):
            sigma = tau[:i] + tau[i + 1:]
            if sigma not in chainset:
                continue
            sgn = -1 if i % 2 else 1
            f = mapfn(sigma[-1], tau[-1]) if i == m1 else None
            arrows.append((sigma, tau, f, sgn))
    order = {ch: i for i, ch in enumerate(chains)}
    arrows.sort(key=lambda a: (order[a[0]], order[a[1]]))
    tot = assemble(ring, blocks, arrows, budget, "homotopy limit")
    return Holim(tot, list(elements), chains, value, mapfn)


def holim_initial_map(H: Holim, X0: ChainComplex, maps_from_initial) -> ChainMap:
    """``X0 -> holim`` sending ``v`` to the family ``(U, f_U v)`` on length-0 chains."""
    T = H.complex
    R = T.ring
    comps = {}
    for ch in H.chains:
        if len(ch) != 1:
            continue
        f = maps_from_initial(ch[0])
        offs = H.total.offsets[ch]
        for j, m in f.comps.items():
            cc = comps.setdefault(j, {})
            for c, col in m.cols.items():
                dst = cc.setdefault(c, {})
                for i, v in col.items():
                    dst[offs[j] + i] = dst.get(offs[j] + i, 0) + v
    mats = {j: SparseMatrix(T.rank(j), X0.rank(j),
                            {c: {i: R.norm(v) for i, v in col.items() if R.norm(v)}
                             for c, col in cc.items()})
            for j, cc in comps.items()}
    return ChainMap(X0, T, mats)


def holim_map(H1: Holim, H2: Holim, vertex_map) -> ChainMap:
    """Map of holims over the same poset induced by ``vertex_map(U)``."""
    pieces = [(ch, ch, vertex_map(ch[-1]), 1) for ch in H1.chains]
    return block_map(H1.total, H2.total, pieces)


def holim_restriction(H_big: Holim, H_small: Holim) -> ChainMap:
    """Projection onto the chains of a sub-poset (values agree there)."""
    S, T = H_big.complex, H_small.complex
    comps = {}
    for ch in H_small.chains:
        Cb = H_big.total.block(ch)[1]
        hb = H_big.total.block(ch)[2]
        ob, os_ = H_big.total.offsets[ch], H_small.total.offsets[ch]
        for j, r in Cb.ranks.items():
            cc = comps.setdefault(j + hb, {})
            for i in range(r):
                cc[ob[j] + i] = {os_[j] + i: 1}
    mats = {deg: SparseMatrix(T.rank(deg), S.rank(deg), cc) for deg, cc in comps.items()}
    return ChainMap(S, T, mats)


def punctured_holim_data(c: CubeDiagram, budget: int | None = None) -> Holim:
    elements = [T for T in c.subsets() if T]
    return holim(elements, lambda a, b: a < b, lambda U: c.vertices[U], c.map, c.ring, budget)


def punctured_holim(c: CubeDiagram, budget: int | None = None) -> ChainComplex:
    return punctured_holim_data(c, budget).complex


def punctured_initial_map(c: CubeDiagram, H: Holim | None = None) -> ChainMap:
    H = H or punctured_holim_data(c)
    e = frozenset()
    return holim_initial_map(H, c.vertices[e], lambda U: c.map(e, U))


def cube_from_json(doc: dict) -> CubeDiagram:
    from .serialize import complex_from_json, map_from_json
    k = int(doc["dimension"])

    def parse(s):
        s = s.strip().strip("{}")
        return frozenset(int(x) for x in s.split(",") if x.strip())

    verts = {parse(key): complex_from_json(v) for key, v in doc["vertices"].items()}
    edges = {}
    for key, v in doc["edges"].items():
        a, b = key.split("->")
        T, V = parse(a), parse(b)
        (s,) = tuple(V - T)
        edges[(T, s)] = map_from_json(v, verts[T], verts[V])
    return CubeDiagram(k, verts, edges)


__all__ = [
    "CubeDiagram", "TotalComplex", "Holim", "assemble", "block_map", "total_fiber",
    "total_fiber_data", "total_cofiber", "total_cofiber_data", "is_cartesian",
    "is_strongly_cocartesian", "join_cube", "join_vertex", "sum_cube", "punctured_holim",
    "punctured_holim_data", "punctured_initial_map", "holim", "holim_initial_map", "holim_map",
    "holim_restriction", "cube_automorphism", "sum_cube_permutation", "all_subsets",
    "subset_str", "cube_from_function",
]
