"""Representations of symmetric and cyclic groups on chain complexes.

Permutations are tuples in one-line notation on ``0..n-1``; ``p[i]`` is the
image of ``i`` and ``compose(a, b)`` is ``a o b``.  The symmetric group is
generated by ``s = (1 2)`` and ``c = (1 2 ... n)``; the cyclic subgroup
``C_n`` by ``c`` alone.  Conjugacy classes of ``S_n`` are keyed by partitions
written ``"2+1"``, each represented by the permutation whose cycles run over
consecutive blocks, e.g. ``2+1 -> (1 0 2)``.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field

from .chain import (ChainComplex, ChainComplexError, ChainMap, check_budget,
                    compose as compose_maps, direct_sum_data, identity_map, permute_slots,
                    scalar_map, tensor_many, tensor_maps)
from .homology import HomologyBasis, HomologyTable, homology, induced_matrix
from .linalg import ZZ, Ring, SparseMatrix, field_of


# ---------------------------------------------------------------------------
# permutations


def perm_compose(a: tuple, b: tuple) -> tuple:
    return tuple(a[i] for i in b)


def perm_inverse(a: tuple) -> tuple:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def perm_identity(n: int) -> tuple:
    return tuple(range(n))


def perm_sign(a: tuple) -> int:
    seen, s = set(), 1
    for i in range(len(a)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = a[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def cycle_type(a: tuple) -> tuple:
    seen, parts = set(), []
    for i in range(len(a)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = a[j]
            length += 1
        parts.append(length)
    return tuple(sorted(parts, reverse=True))


def partitions(n: int) -> list[tuple]:
    """Partitions of n in ascending lexicographic order: (1,..,1) first."""
    out = []

    def gen(rest, maxpart, pre):
        if rest == 0:
            out.append(tuple(pre))
            return
        for p in range(min(rest, maxpart), 0, -1):
            gen(rest - p, p, pre + [p])

    gen(n, n, [])
    return sorted(out)


def partition_str(lam: tuple) -> str:
    return "+".join(str(x) for x in lam)


def class_rep(lam: tuple) -> tuple:
    """Canonical permutation of cycle type ``lam``."""
    n = sum(lam)
    out = list(range(n))
    start = 0
    for p in lam:
        for i in range(p):
            out[start + i] = start + (i + 1) % p
        start += p
    return tuple(out)


def gen_s(n: int) -> tuple:
    if n < 2:
        return perm_identity(n)
    return (1, 0) + tuple(range(2, n))


def gen_c(n: int) -> tuple:
    return tuple((i + 1) % n for i in range(n))


def group_gens(group: str, n: int) -> dict:
    if group == "S":
        return {"s": gen_s(n), "c": gen_c(n)}
    if group == "C":
        return {"c": gen_c(n)}
    raise ValueError(f"unknown group {group!r}")


def group_elements(group: str, n: int) -> list[tuple]:
    """All elements, breadth first from the identity (deterministic)."""
    gens = list(group_gens(group, n).values())
    e = perm_identity(n)
    seen = {e}
    out = [e]
    q = deque([e])
    while q:
        h = q.popleft()
        for a in gens:
            g = perm_compose(a, h)
            if g not in seen:
                seen.add(g)
                out.append(g)
                q.append(g)
    return out


def group_order(group: str, n: int) -> int:
    return math.factorial(n) if group == "S" else n


# ---------------------------------------------------------------------------
# representations


class RepresentationError(ChainComplexError):
    pass


@dataclass(eq=False)
class Representation:
    """A group (``"S"`` for S_n, ``"C"`` for C_n) acting on a complex through
    chain automorphisms given on the standard generators."""

    group: str
    n: int
    complex: ChainComplex
    gens: dict  # generator name -> ChainMap complex -> complex
    check: bool = True
    meta: dict = field(default_factory=dict)
    _elements: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        names = set(group_gens(self.group, self.n))
        if set(self.gens) != names:
            raise RepresentationError(f"expected generators {sorted(names)}, got {sorted(self.gens)}")
        if self.check:
            self.element_maps()

    @property
    def ring(self) -> Ring:
        return self.complex.ring

    def rank(self) -> int:
        return self.complex.size()

    def element_maps(self) -> dict:
        """Matrix of every group element, verifying ``rho(a) rho(h) = rho(a h)``."""
        if self._elements is not None:
            return self._elements
        gens = group_gens(self.group, self.n)
        C, R = self.complex, self.ring
        e = perm_identity(self.n)
        mats = {e: {k: SparseMatrix.identity(r) for k, r in C.ranks.items()}}
        gm = {name: {k: self.gens[name].at(k) for k in C.ranks} for name in gens}
        q = deque([e])
        while q:
            h = q.popleft()
            for name, a in gens.items():
                g = perm_compose(a, h)
                prod = {k: gm[name][k].matmul(mats[h][k], R) for k in C.ranks}
                if g in mats:
                    for k in C.ranks:
                        if prod[k] != mats[g][k]:
                            raise RepresentationError(
                                f"group relation fails in degree {k} (element {g})", k)
                else:
                    mats[g] = prod
                    q.append(g)
        if len(mats) != group_order(self.group, self.n):
            raise RepresentationError("generators do not generate the expected group")
        self._elements = mats
        return mats

    def element(self, g: tuple) -> ChainMap:
        m = self.element_maps()[tuple(g)]
        return ChainMap(self.complex, self.complex, m)

    def to_json(self) -> dict:
        from .serialize import complex_to_json, matrix_entries
        return {
            "group": self.group,
            "n": self.n,
            "complex": complex_to_json(self.complex),
            "generators": {name: [{"degree": k, "entries": matrix_entries(f.at(k))}
                                  for k in sorted(self.complex.ranks)]
                           for name, f in sorted(self.gens.items())},
        }


def rep_from_json(doc: dict, ring: Ring | None = None) -> Representation:
    """Inverse of :meth:`Representation.to_json`."""
    from .serialize import complex_from_json, _parse_num
    C = complex_from_json(doc["complex"], ring)
    gens = {}
    for name, comps in doc["generators"].items():
        mats = {}
        for e in comps:
            k = int(e["degree"])
            mats[k] = SparseMatrix.from_entries(C.rank(k), C.rank(k),
                                                [(int(i), int(j), _parse_num(v, C.ring))
                                                 for i, j, v in e["entries"]], C.ring)
        gens[name] = ChainMap(C, C, mats)
    return Representation(doc.get("group", "S"), int(doc["n"]), C, gens)


def GModule(group: str, n: int, rank: int, gens: dict, ring: Ring = ZZ) -> Representation:
    """Degree-zero module with generator matrices given densely (row lists)."""
    C = ChainComplex(ring, {0: rank})
    maps = {name: ChainMap(C, C, {0: SparseMatrix.from_dense(M, ring, ncols=rank)})
            for name, M in gens.items()}
    return Representation(group, n, C, maps)


def rep_from_perm_action(group: str, n: int, C: ChainComplex, signed_perms: dict) -> Representation:
    """Generators acting by signed permutations of the basis:
    ``signed_perms[name][degree] = [(target index, sign), ...]``."""
    maps = {}
    for name, per_deg in signed_perms.items():
        comps = {k: SparseMatrix(C.rank(k), C.rank(k), {j: {t: sg} for j, (t, sg) in enumerate(lst)})
                 for k, lst in per_deg.items()}
        maps[name] = ChainMap(C, C, comps)
    return Representation(group, n, C, maps)


def trivial_rep(n: int, ring: Ring = ZZ, degree: int = 0, group: str = "S") -> Representation:
    C = ChainComplex(ring, {degree: 1})
    return Representation(group, n, C, {k: identity_map(C) for k in group_gens(group, n)})


def sign_rep(n: int, ring: Ring = ZZ, degree: int = 0) -> Representation:
    return sign_twist(trivial_rep(n, ring, degree))


def regular_rep(group: str, n: int, ring: Ring = ZZ) -> Representation:
    els = group_elements(group, n)
    idx = {g: i for i, g in enumerate(els)}
    C = ChainComplex(ring, {0: len(els)})
    perms = {name: {0: [(idx[perm_compose(a, g)], 1) for g in els]}
             for name, a in group_gens(group, n).items()}
    return rep_from_perm_action(group, n, C, perms)


def sign_of_gen(group: str, n: int, name: str) -> int:
    return perm_sign(group_gens(group, n)[name])


def sign_twist(r: Representation) -> Representation:
    gens = {name: compose_maps(scalar_map(r.complex, sign_of_gen(r.group, r.n, name)), f)
            for name, f in r.gens.items()}
    return Representation(r.group, r.n, r.complex, gens, meta=dict(r.meta))


def change_rep_ring(r: Representation, ring: Ring) -> Representation:
    from .chain import change_ring, change_ring_map
    if r.ring == ring:
        return r
    C = change_ring(r.complex, ring)
    gens = {name: change_ring_map(f, ring, C, C) for name, f in r.gens.items()}
    return Representation(r.group, r.n, C, gens, meta=dict(r.meta))


def shift_rep(r: Representation, j: int) -> Representation:
    from .chain import shift, shift_map
    C = shift(r.complex, j)
    return Representation(r.group, r.n, C, {k: shift_map(f, j, C, C) for k, f in r.gens.items()},
                          meta=dict(r.meta))


def tensor_rep(r: Representation, X: ChainComplex, budget: int | None = None) -> Representation:
    """``r (x) X^{(x)n}`` with the diagonal action (Koszul signs on X^{(x)n})."""
    n = r.n
    P, TB = tensor_many([r.complex] + [X] * n, budget, with_basis=True)
    idX = identity_map(X)
    gens = {}
    for name, a in group_gens(r.group, n).items():
        rho = tensor_maps([r.gens[name]] + [idX] * n, (P, TB), (P, TB))
        perm = (0,) + tuple(1 + a[i] for i in range(n))
        gens[name] = compose_maps(rho, permute_slots(P, TB, perm))
    return Representation(r.group, n, P, gens, meta={"tensor": True})


def induce(m: Representation) -> Representation:
    """Induction from the cyclic subgroup C_n = <c> to S_n."""
    if m.group != "C":
        raise RepresentationError("induce expects a C_n-module")
    n = m.n
    G = group_elements("S", n)
    H = group_elements("C", n)
    cpow = {}
    x = perm_identity(n)
    for e in range(n):
        cpow[x] = e
        x = perm_compose(gen_c(n), x)
    reps, seen = [], set()
    for g in sorted(G):
        if g in seen:
            continue
        reps.append(g)
        for h in H:
            seen.add(perm_compose(g, h))
    coset_of = {}
    for i, g in enumerate(reps):
        for h in H:
            coset_of[perm_compose(g, h)] = (i, cpow[h])
    ds = direct_sum_data([m.complex] * len(reps), m.ring)
    C = ds.complex
    cmaps = m.element_maps()
    cmat = {e: cmaps[h] for h, e in cpow.items()}
    gens = {}
    for name, a in group_gens("S", n).items():
        comps = {}
        for k in m.complex.ranks:
            cols = {}
            for i, g in enumerate(reps):
                j, e = coset_of[perm_compose(a, g)]
                M = cmat[e][k]
                for col in range(m.complex.rank(k)):
                    cols[ds.offsets[k][i] + col] = {ds.offsets[k][j] + row: v
                                                     for row, v in M.col(col).items()}
            comps[k] = SparseMatrix(C.rank(k), C.rank(k), cols)
        gens[name] = ChainMap(C, C, comps)
    return Representation("S", n, C, gens, meta={"induced_from": "C", "cosets": len(reps)})


def restrict_to_cyclic(r: Representation) -> Representation:
    return Representation("C", r.n, r.complex, {"c": r.gens["c"]})


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class Character:
    group: str
    n: int
    per_degree: dict  # degree -> {class key: value}
    euler: dict  # class key -> value

    def classes(self) -> list[str]:
        return class_keys(self.group, self.n)

    def values(self, degree: int | None = None) -> tuple:
        table = self.euler if degree is None else self.per_degree.get(degree, {})
        return tuple(table.get(k, 0) for k in self.classes())

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "n": self.n,
            "classes": self.classes(),
            "per_degree": {str(k): {c: _jnum(v) for c, v in t.items()}
                           for k, t in sorted(self.per_degree.items())},
            "euler": {c: _jnum(v) for c, v in self.euler.items()},
        }


def _jnum(v):
    try:
        return int(v)
    except (TypeError, ValueError):
        return str(v)


def class_keys(group: str, n: int) -> list[str]:
    if group == "S":
        return [partition_str(l) for l in partitions(n)]
    return [f"c^{e}" for e in range(n)]


def class_representatives(group: str, n: int) -> dict:
    if group == "S":
        return {partition_str(l): class_rep(l) for l in partitions(n)}
    out, x = {}, perm_identity(n)
    for e in range(n):
        out[f"c^{e}"] = x
        x = perm_compose(gen_c(n), x)
    return out


def class_sizes(group: str, n: int) -> dict:
    if group == "C":
        return {k: 1 for k in class_keys("C", n)}
    out = {}
    for g in group_elements("S", n):
        key = partition_str(cycle_type(g))
        out[key] = out.get(key, 0) + 1
    return out


def character(r: Representation) -> Character:
    """Traces on rational homology, per degree and alternating."""
    r.element_maps()
    reps = class_representatives(r.group, r.n)
    per_degree = {}
    F = field_of(r.ring)
    for k in r.complex.ranks:
        if not r.complex.diffs:
            table = {key: r.element_maps()[g][k].trace(r.ring) for key, g in reps.items()}
        else:
            basis = HomologyBasis(r.complex, k)
            if basis.rank == 0:
                continue
            table = {}
            for key, g in reps.items():
                M = induced_matrix(r.element(g), k, basis, basis)
                table[key] = F.norm(sum(M[i][i] for i in range(len(M))))
        per_degree[k] = table
    euler = {key: sum((-1) ** (k % 2) * t[key] for k, t in per_degree.items()) for key in reps}
    return Character(r.group, r.n, per_degree, euler)


def chain_character(r: Representation) -> dict:
    """Lefschetz numbers computed on chains (equals the Euler character)."""
    reps = class_representatives(r.group, r.n)
    return {key: sum((-1) ** (k % 2) * r.element_maps()[g][k].trace(r.ring)
                     for k in r.complex.ranks) for key, g in reps.items()}


def sign_character(n: int) -> dict:
    return {partition_str(l): perm_sign(class_rep(l)) for l in partitions(n)}


def inner_product(chi: dict, psi: dict, n: int) -> object:
    """``<chi, psi>`` for S_n class functions (real characters)."""
    from fractions import Fraction
    sizes = class_sizes("S", n)
    tot = sum(sizes[k] * chi.get(k, 0) * psi.get(k, 0) for k in sizes)
    v = Fraction(tot, math.factorial(n))
    return v.numerator if v.denominator == 1 else v


# ---------------------------------------------------------------------------
# invariants and coinvariants


def invariant_subcomplex(r: Representation):
    """Over a field: basis of the invariant subcomplex per degree, the
    restricted complex, and an echelon for reading coordinates."""
    from .linalg import Echelon, kernel_basis
    R = r.ring
    if not R.is_field:
        raise RepresentationError("invariants are computed over a field")
    C = r.complex
    basis, ech = {}, {}
    for k, n_k in C.ranks.items():
        stacked = {}
        for gi, (name, f) in enumerate(sorted(r.gens.items())):
            M = f.at(k)
            for j in range(n_k):
                col = dict(M.col(j))
                col[j] = R.norm(col.get(j, 0) - 1)
                for i, v in col.items():
                    if v:
                        stacked.setdefault(j, {})[gi * n_k + i] = v
        A = SparseMatrix(len(r.gens) * n_k, n_k, stacked)
        vecs = kernel_basis(A, R)
        E = Echelon(R)
        for i, v in enumerate(vecs):
            E.add(v, i)
        basis[k], ech[k] = vecs, E
    return basis, ech


def coordinates(E, v: dict, R: Ring, size: int) -> dict:
    res, combo = E.reduce(v)
    if res:
        raise RepresentationError("vector is not in the invariant subspace")
    return {i: x for i, x in combo.items() if R.norm(x)}


def restrict_to_invariants(C: ChainComplex, basis: dict, ech: dict) -> ChainComplex:
    R = C.ring
    ranks = {k: len(v) for k, v in basis.items() if v}
    diffs = {}
    for k in ranks:
        if k - 1 not in ranks:
            continue
        d = C.d(k)
        cols = {}
        for j, v in enumerate(basis[k]):
            img = d.apply(v, R)
            if img:
                cols[j] = coordinates(ech[k - 1], img, R, ranks[k - 1])
        diffs[k] = SparseMatrix(ranks[k - 1], ranks[k], cols)
    return ChainComplex(R, ranks, diffs)


def map_on_invariants(f: ChainMap, src, tgt, S: ChainComplex, T: ChainComplex) -> ChainMap:
    R = f.ring
    comps = {}
    for k, vecs in src[0].items():
        if not vecs or not T.rank(k):
            continue
        m = f.at(k)
        cols = {}
        for j, v in enumerate(vecs):
            img = m.apply(v, R)
            if img:
                cols[j] = coordinates(tgt[1][k], img, R, T.rank(k))
        comps[k] = SparseMatrix(T.rank(k), S.rank(k), cols)
    return ChainMap(S, T, comps)


def coinvariant_relations(r: Representation, degree: int = 0) -> SparseMatrix:
    """Columns ``(g - 1) e_j`` for the generators; the coinvariants are the
    cokernel of this matrix."""
    n_k = r.complex.rank(degree)
    cols, j0 = {}, 0
    for name, f in sorted(r.gens.items()):
        M = f.at(degree)
        for j in range(n_k):
            col = dict(M.col(j))
            col[j] = r.ring.norm(col.get(j, 0) - 1)
            col = {i: v for i, v in col.items() if v}
            if col:
                cols[j0 + j] = col
        j0 += n_k
    return SparseMatrix(n_k, j0, cols)


# ---------------------------------------------------------------------------
# group homology via the normalized bar construction


@dataclass(eq=False)
class GroupHomologyResult:
    table: HomologyTable
    certified_through: int
    bar_degree: int
    complex: ChainComplex

    def to_json(self) -> dict:
        return {"homology": self.table.to_json(), "certified_through_degree": self.certified_through,
                "bar_degree": self.bar_degree, "ring": self.table.ring.name}


def bar_complex(r: Representation, top: int, budget: int | None = None) -> ChainComplex:
    """Total complex of ``M (x)_G B_*(G)`` for bar degrees ``0..top`` where
    ``m . g = rho(g^{-1}) m`` and ``D(w (x) x) = d_bar + (-1)^p w (x) dx``."""
    G = group_elements(r.group, r.n)
    e = perm_identity(r.n)
    nonid = [g for g in G if g != e]
    gi = {g: i for i, g in enumerate(nonid)}
    M = r.complex
    Rg = r.ring
    rho = r.element_maps()
    inv_act = {g: rho[perm_inverse(g)] for g in nonid}
    size = sum(len(nonid) ** p for p in range(top + 1)) * M.size()
    check_budget(size, budget, "bar construction")
    # generator (p, word index, internal degree j, basis index)
    blocks = []
    for p in range(top + 1):
        nw = len(nonid) ** p
        for j, r_j in M.ranks.items():
            blocks.append((p, j, nw, r_j))
    ranks: dict[int, int] = {}
    offs = {}
    for p, j, nw, r_j in blocks:
        deg = p + j
        offs[(p, j)] = ranks.get(deg, 0)
        ranks[deg] = ranks.get(deg, 0) + nw * r_j
    cols: dict[int, dict] = {}

    def widx(word):
        x = 0
        for g in word:
            x = x * len(nonid) + gi[g]
        return x

    def gen_index(p, word_i, j, b):
        return offs[(p, j)] + word_i * M.rank(j) + b

    for p in range(top + 1):
        for word in itertools.product(nonid, repeat=p):
            wi = widx(word)
            for j, r_j in M.ranks.items():
                deg = p + j
                dcol = cols.setdefault(deg, {})
                for b in range(r_j):
                    col = {}

                    def add(q, w2, jj, vec, sgn):
                        if q < 0 or (q, jj) not in offs:
                            return
                        w2i = widx(w2)
                        for bb, v in vec.items():
                            t = gen_index(q, w2i, jj, bb)
                            col[t] = col.get(t, 0) + sgn * v

                    unit = {b: 1}
                    if p >= 1:
                        add(p - 1, word[1:], j, inv_act[word[0]][j].apply(unit, Rg), 1)
                        for i in range(1, p):
                            prod = perm_compose(word[i - 1], word[i])
                            if prod == e:
                                continue
                            add(p - 1, word[:i - 1] + (prod,) + word[i + 1:], j, unit, (-1) ** i)
                        add(p - 1, word[:-1], j, unit, (-1) ** p)
                    dm = M.d(j).col(b)
                    if dm:
                        add(p, word, j - 1, dm, (-1) ** p)
                    col = {t: Rg.norm(v) for t, v in col.items() if Rg.norm(v)}
                    if col:
                        dcol[gen_index(p, wi, j, b)] = col
    diffs = {deg: SparseMatrix(ranks.get(deg - 1, 0), ranks[deg], cc)
             for deg, cc in cols.items() if cc}
    return ChainComplex(Rg, ranks, diffs)


def group_homology(r: Representation, degree_cap: int, budget: int | None = None) -> GroupHomologyResult:
    """``H_*(G; M)`` certified in total degrees ``<= degree_cap``."""
    if not r.complex.ranks:
        return GroupHomologyResult(HomologyTable(r.ring, {}), degree_cap, 0, r.complex)
    lo = min(r.complex.ranks)
    if degree_cap < lo:
        raise ValueError(f"degree_cap {degree_cap} is below the bottom degree {lo} of the module")
    top = degree_cap - lo + 1
    B = bar_complex(r, top, budget)
    H = homology(B).restrict(-10 ** 9, degree_cap)
    return GroupHomologyResult(H, degree_cap, top, B)


__all__ = [
    "Representation", "GModule", "Character", "character", "chain_character", "induce",
    "sign_twist", "group_homology", "bar_complex", "trivial_rep", "sign_rep", "regular_rep",
    "tensor_rep", "perm_sign", "perm_compose", "perm_inverse", "cycle_type", "partitions",
    "partition_str", "class_rep", "group_elements", "gen_s", "gen_c",
    "invariant_subcomplex", "restrict_to_invariants", "map_on_invariants", "coinvariant_relations",
    "shift_rep", "change_rep_ring", "restrict_to_cyclic", "sign_character", "inner_product",
    "RepresentationError",
]
