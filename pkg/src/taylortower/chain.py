"""Bounded, finitely generated chain complexes and chain maps.

A complex is a rank table ``degree -> r`` plus differentials
``d_k : C_k -> C_{k-1}`` stored as ``rank(k-1) x rank(k)`` sparse matrices.
Negative degrees are allowed, so the same type models spectra.

Sign conventions, fixed once:

* tensor: ``d(a (x) b) = da (x) b + (-1)^|a| a (x) db``
* shift by j: ``(C[j])_k = C_{k-j}`` with differential multiplied by ``(-1)^j``
* cone(f: A -> B): ``B_k + A_{k-1}``, ``d(b, a) = (db + f a, -da)``
* fiber(f) = shift(cone(f), -1)
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .linalg import ZZ, Ring, RingError, SparseMatrix, block_diag, place_blocks

DEFAULT_BUDGET = 200_000


class ChainComplexError(ValueError):
    """Invalid complex or map; ``degree`` names the failing degree if known."""

    def __init__(self, msg, degree=None):
        super().__init__(msg)
        self.degree = degree


class BudgetExceeded(RuntimeError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


def check_budget(size: int, budget: int | None, what: str):
    b = DEFAULT_BUDGET if budget is None else budget
    if size > b:
        raise BudgetExceeded(f"{what}: {size} generators exceeds budget {b}")


@dataclass(frozen=True, eq=False)
class ChainComplex:
    ring: Ring
    ranks: dict  # degree -> rank (only nonzero ranks kept)
    diffs: dict = field(default_factory=dict)  # degree k -> d_k

    def __post_init__(self):
        ranks = {int(k): int(r) for k, r in self.ranks.items() if r}
        if any(r < 0 for r in ranks.values()):
            raise ChainComplexError("negative rank")
        object.__setattr__(self, "ranks", dict(sorted(ranks.items())))
        diffs = {}
        for k, d in self.diffs.items():
            shape = (ranks.get(k - 1, 0), ranks.get(k, 0))
            if d.shape != shape:
                raise ChainComplexError(f"d_{k} has shape {d.shape}, expected {shape}", k)
            if not d.is_zero():
                diffs[int(k)] = d
        object.__setattr__(self, "diffs", dict(sorted(diffs.items())))
        for k in self.diffs:
            if k - 1 in self.diffs:
                if not self.diffs[k - 1].matmul(self.diffs[k], self.ring).is_zero():
                    raise ChainComplexError(f"d_{k - 1} o d_{k} != 0", k)

    # ------------------------------------------------------------------
    def rank(self, k: int) -> int:
        return self.ranks.get(k, 0)

    def d(self, k: int) -> SparseMatrix:
        m = self.diffs.get(k)
        if m is None:
            return SparseMatrix.zero(self.rank(k - 1), self.rank(k))
        return m

    @property
    def degrees(self) -> list[int]:
        return list(self.ranks)

    @property
    def support(self) -> tuple[int, int] | None:
        if not self.ranks:
            return None
        return min(self.ranks), max(self.ranks)

    def size(self) -> int:
        return sum(self.ranks.values())

    def is_zero(self) -> bool:
        return not self.ranks

    def __repr__(self):
        return f"ChainComplex({self.ring}, ranks={self.ranks})"

    def same_as(self, other: "ChainComplex") -> bool:
        return (self.ring == other.ring and self.ranks == other.ranks
                and self.diffs == other.diffs)


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    comps: dict  # degree -> matrix rank_target(k) x rank_source(k)

    def __post_init__(self):
        if self.source.ring != self.target.ring:
            raise RingError("chain map between complexes over different rings")
        comps = {}
        for k, m in self.comps.items():
            shape = (self.target.rank(k), self.source.rank(k))
            if m.shape != shape:
                raise ChainComplexError(f"component {k} has shape {m.shape}, expected {shape}", k)
            if not m.is_zero():
                comps[int(k)] = m
        object.__setattr__(self, "comps", dict(sorted(comps.items())))
        R = self.ring
        degs = set(self.source.ranks) | set(self.target.ranks)
        for k in degs:
            lhs = self.target.d(k).matmul(self.at(k), R)
            rhs = self.at(k - 1).matmul(self.source.d(k), R)
            if lhs != rhs:
                raise ChainComplexError(f"chain map does not commute with d in degree {k}", k)

    @property
    def ring(self) -> Ring:
        return self.source.ring

    def at(self, k: int) -> SparseMatrix:
        m = self.comps.get(k)
        if m is None:
            return SparseMatrix.zero(self.target.rank(k), self.source.rank(k))
        return m

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        return compose(self, other)

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"


# ---------------------------------------------------------------------------
# basic objects


def zero_complex(ring: Ring = ZZ) -> ChainComplex:
    return ChainComplex(ring, {})


def sphere(i: int, ring: Ring = ZZ) -> ChainComplex:
    """Rank one in degree ``i``; S^0 is the unit for the tensor product."""
    return ChainComplex(ring, {i: 1})


def complex_from_dense(ring: Ring, ranks: dict, diffs: dict) -> ChainComplex:
    """Convenience constructor taking dense nested lists for the differentials."""
    mats = {}
    for k, rows in diffs.items():
        mats[k] = SparseMatrix.from_dense(rows, ring, ncols=ranks.get(k, 0)) if rows else \
            SparseMatrix.zero(ranks.get(k - 1, 0), ranks.get(k, 0))
        if mats[k].shape != (ranks.get(k - 1, 0), ranks.get(k, 0)):
            mats[k] = SparseMatrix.from_entries(
                ranks.get(k - 1, 0), ranks.get(k, 0),
                [(i, j, v) for i, r in enumerate(rows) for j, v in enumerate(r) if v], ring)
    return ChainComplex(ring, ranks, mats)


def identity_map(C: ChainComplex) -> ChainMap:
    return ChainMap(C, C, {k: SparseMatrix.identity(r) for k, r in C.ranks.items()})


def zero_map(A: ChainComplex, B: ChainComplex) -> ChainMap:
    return ChainMap(A, B, {})


def scalar_map(C: ChainComplex, s) -> ChainMap:
    R = C.ring
    return ChainMap(C, C, {k: SparseMatrix.identity(r, R.norm(s)) for k, r in C.ranks.items()})


def compose(f: ChainMap, g: ChainMap) -> ChainMap:
    """``f o g``."""
    if g.target is not f.source and not g.target.same_as(f.source):
        raise ChainComplexError("composing maps with mismatched complexes")
    R = f.ring
    comps = {k: f.at(k).matmul(g.at(k), R) for k in g.source.ranks if f.source.rank(k)}
    return ChainMap(g.source, f.target, comps)


def add_maps(f: ChainMap, g: ChainMap, scale=1) -> ChainMap:
    R = f.ring
    comps = {k: f.at(k).add(g.at(k), R, scale) for k in set(f.source.ranks)}
    return ChainMap(f.source, f.target, comps)


def change_ring(C: ChainComplex, ring: Ring) -> ChainComplex:
    """Base change of an integral complex (Z -> Q or Z -> F_p)."""
    if C.ring == ring:
        return C
    if C.ring != ZZ:
        raise RingError(f"can only change ring from Z, not {C.ring}")
    diffs = {k: SparseMatrix.from_entries(m.nrows, m.ncols, m.entries(), ring)
             for k, m in C.diffs.items()}
    return ChainComplex(ring, C.ranks, diffs)


def change_ring_map(f: ChainMap, ring: Ring, source=None, target=None) -> ChainMap:
    src = source or change_ring(f.source, ring)
    tgt = target or change_ring(f.target, ring)
    comps = {k: SparseMatrix.from_entries(m.nrows, m.ncols, m.entries(), ring)
             for k, m in f.comps.items()}
    return ChainMap(src, tgt, comps)


# ---------------------------------------------------------------------------
# shift, sums, cones


def shift(C: ChainComplex, j: int) -> ChainComplex:
    """``shift(C, j)_k = C_{k-j}``; differential signs multiplied by ``(-1)^j``."""
    if j == 0:
        return C
    R = C.ring
    ranks = {k + j: r for k, r in C.ranks.items()}
    s = -1 if j % 2 else 1
    diffs = {k + j: (d if s == 1 else d.scale(-1, R)) for k, d in C.diffs.items()}
    return ChainComplex(R, ranks, diffs)


def shift_map(f: ChainMap, j: int, source=None, target=None) -> ChainMap:
    src = source if source is not None else shift(f.source, j)
    tgt = target if target is not None else shift(f.target, j)
    return ChainMap(src, tgt, {k + j: m for k, m in f.comps.items()})


@dataclass(frozen=True, eq=False)
class DirectSum:
    """A direct sum with its block offsets per degree."""

    complex: ChainComplex
    summands: tuple
    offsets: dict  # degree -> list of offsets (one per summand)

    def inclusion(self, i: int) -> ChainMap:
        S = self.summands[i]
        comps = {}
        for k, r in S.ranks.items():
            off = self.offsets[k][i]
            comps[k] = SparseMatrix(self.complex.rank(k), r, {j: {off + j: 1} for j in range(r)})
        return ChainMap(S, self.complex, comps)

    def projection(self, i: int) -> ChainMap:
        S = self.summands[i]
        comps = {}
        for k, r in S.ranks.items():
            off = self.offsets[k][i]
            comps[k] = SparseMatrix(r, self.complex.rank(k), {off + j: {j: 1} for j in range(r)})
        return ChainMap(self.complex, S, comps)


def direct_sum_data(complexes: list[ChainComplex], ring: Ring | None = None) -> DirectSum:
    if not complexes:
        R = ring or ZZ
        return DirectSum(zero_complex(R), (), {})
    R = complexes[0].ring
    if any(c.ring != R for c in complexes):
        raise RingError("direct sum of complexes over different rings")
    degs = sorted(set().union(*[c.ranks for c in complexes]))
    ranks, offsets, diffs = {}, {}, {}
    for k in degs:
        offs, tot = [], 0
        for c in complexes:
            offs.append(tot)
            tot += c.rank(k)
        offsets[k] = offs
        ranks[k] = tot
    for k in degs:
        if k - 1 in ranks:
            diffs[k] = block_diag([c.d(k) for c in complexes])
    return DirectSum(ChainComplex(R, ranks, diffs), tuple(complexes), offsets)


def direct_sum(*complexes: ChainComplex) -> ChainComplex:
    return direct_sum_data(list(complexes)).complex


def direct_sum_maps(maps: list[ChainMap], source: DirectSum | None = None,
                    target: DirectSum | None = None) -> ChainMap:
    src = source or direct_sum_data([f.source for f in maps])
    tgt = target or direct_sum_data([f.target for f in maps])
    degs = set(src.complex.ranks)
    comps = {k: block_diag([f.at(k) for f in maps]) for k in degs}
    return ChainMap(src.complex, tgt.complex, comps)


def cone(f: ChainMap) -> ChainComplex:
    """Mapping cone ``B_k + A_{k-1}`` with ``d(b, a) = (db + f a, -da)``."""
    A, B, R = f.source, f.target, f.ring
    degs = sorted(set(B.ranks) | {k + 1 for k in A.ranks})
    ranks = {k: B.rank(k) + A.rank(k - 1) for k in degs}
    diffs = {}
    for k in degs:
        if not ranks.get(k - 1):
            continue
        rs = [B.rank(k - 1), A.rank(k - 2)]
        cs = [B.rank(k), A.rank(k - 1)]
        blocks = {(0, 0): B.d(k), (0, 1): f.at(k - 1), (1, 1): A.d(k - 1).scale(-1, R)}
        diffs[k] = place_blocks(rs, cs, blocks, R)
    return ChainComplex(R, ranks, diffs)


def cone_inclusion(f: ChainMap, C: ChainComplex | None = None) -> ChainMap:
    """The inclusion ``B -> cone(f)``."""
    C = C or cone(f)
    B = f.target
    return ChainMap(B, C, {k: SparseMatrix(C.rank(k), r, {j: {j: 1} for j in range(r)})
                           for k, r in B.ranks.items()})


def fiber(f: ChainMap) -> ChainComplex:
    return shift(cone(f), -1)


def fiber_projection(f: ChainMap, F: ChainComplex | None = None) -> ChainMap:
    """The natural map ``fiber(f) -> source``.

    ``fiber(f)_k = B_{k+1} + A_k``; projection onto the A block.
    """
    F = F or fiber(f)
    A, B = f.source, f.target
    comps = {}
    for k, r in A.ranks.items():
        off = B.rank(k + 1)
        comps[k] = SparseMatrix(r, F.rank(k), {off + j: {j: 1} for j in range(r)})
    return ChainMap(F, A, comps)


def cone_of_maps(f: ChainMap, g: ChainMap, top: ChainMap, bottom: ChainMap,
                 C1: ChainComplex | None = None, C2: ChainComplex | None = None) -> ChainMap:
    """Map ``cone(f) -> cone(g)`` induced by a strictly commuting square
    ``g o top = bottom o f`` (top on sources, bottom on targets)."""
    C1 = C1 or cone(f)
    C2 = C2 or cone(g)
    R = f.ring
    comps = {}
    for k in C1.ranks:
        rs = [g.target.rank(k), g.source.rank(k - 1)]
        cs = [f.target.rank(k), f.source.rank(k - 1)]
        comps[k] = place_blocks(rs, cs, {(0, 0): bottom.at(k), (1, 1): top.at(k - 1)}, R)
    return ChainMap(C1, C2, comps)


# ---------------------------------------------------------------------------
# tensor products


class TensorBasis:
    """Basis of ``C_1 (x) ... (x) C_m``: per total degree, the sorted list of
    tuples ``((deg_1, idx_1), ..., (deg_m, idx_m))`` and a position lookup."""

    def __init__(self, factors: list[ChainComplex]):
        self.factors = factors
        by_deg: dict[int, list] = {}
        lists = [[(k, i) for k, r in C.ranks.items() for i in range(r)] for C in factors]
        for combo in itertools.product(*lists):
            deg = sum(k for k, _ in combo)
            by_deg.setdefault(deg, []).append(combo)
        self.basis = {k: sorted(v) for k, v in sorted(by_deg.items())}
        self.pos = {k: {t: i for i, t in enumerate(v)} for k, v in self.basis.items()}

    @staticmethod
    def count(factors: list[ChainComplex]) -> int:
        n = 1
        for C in factors:
            n *= C.size()
        return n

    def index(self, combo) -> tuple[int, int]:
        deg = sum(k for k, _ in combo)
        return deg, self.pos[deg][combo]


def tensor_many(factors: list[ChainComplex], budget: int | None = None,
                with_basis: bool = False):
    """Iterated tensor product with Koszul signs; returns the complex (and the
    TensorBasis if ``with_basis``)."""
    if not factors:
        raise ValueError("empty tensor product")
    R = factors[0].ring
    if any(C.ring != R for C in factors):
        raise RingError("tensor of complexes over different rings")
    check_budget(TensorBasis.count(factors), budget, "tensor product")
    TB = TensorBasis(factors)
    ranks = {k: len(v) for k, v in TB.basis.items()}
    cols: dict[int, dict] = {k: {} for k in ranks}
    dcols = [{k: C.d(k).cols for k in C.diffs} for C in factors]
    for deg, blist in TB.basis.items():
        if deg - 1 not in ranks:
            continue
        tpos = TB.pos[deg - 1]
        c = cols[deg]
        for j, combo in enumerate(blist):
            col = {}
            sgn = 1
            for f, (k, i) in enumerate(combo):
                dc = dcols[f].get(k)
                if dc:
                    for i2, v in dc.get(i, {}).items():
                        new = combo[:f] + ((k - 1, i2),) + combo[f + 1:]
                        r = tpos[new]
                        col[r] = col.get(r, 0) + sgn * v
                if k % 2:
                    sgn = -sgn
            if col:
                c[j] = col
    diffs = {k: SparseMatrix(ranks.get(k - 1, 0), ranks[k], {j: {i: R.norm(v) for i, v in cc.items() if R.norm(v)}
                                                            for j, cc in cols[k].items()})
             for k in ranks if k - 1 in ranks}
    C = ChainComplex(R, ranks, diffs)
    return (C, TB) if with_basis else C


def tensor(C: ChainComplex, D: ChainComplex, budget: int | None = None) -> ChainComplex:
    return tensor_many([C, D], budget)


def tensor_power(C: ChainComplex, n: int, budget: int | None = None, with_basis=False):
    if n < 1:
        raise ValueError("tensor power needs n >= 1")
    return tensor_many([C] * n, budget, with_basis)


def tensor_maps(maps: list[ChainMap], source=None, target=None, budget=None) -> ChainMap:
    """``f_1 (x) ... (x) f_m`` (degree-zero maps: no signs)."""
    R = maps[0].ring
    if source is None:
        source = tensor_many([f.source for f in maps], budget, with_basis=True)
    if target is None:
        target = tensor_many([f.target for f in maps], budget, with_basis=True)
    S, SB = source
    T, TB = target
    comps = {}
    mcols = [{k: f.at(k).cols for k in f.comps} for f in maps]
    for deg, blist in SB.basis.items():
        if deg not in T.ranks:
            continue
        tpos = TB.pos[deg]
        cols = {}
        for j, combo in enumerate(blist):
            images = []
            for f, (k, i) in enumerate(combo):
                col = mcols[f].get(k, {}).get(i)
                if not col:
                    images = None
                    break
                images.append([((k, i2), v) for i2, v in col.items()])
            if images is None:
                continue
            out = {}
            for choice in itertools.product(*images):
                v = 1
                for _, x in choice:
                    v *= x
                r = tpos[tuple(c for c, _ in choice)]
                out[r] = out.get(r, 0) + v
            out = {r: R.norm(v) for r, v in out.items() if R.norm(v)}
            if out:
                cols[j] = out
        comps[deg] = SparseMatrix(T.rank(deg), S.rank(deg), cols)
    return ChainMap(S, T, comps)


def permute_tensor(C: ChainComplex, n: int, perm: tuple, TB: TensorBasis | None = None,
                   complex_: ChainComplex | None = None) -> ChainMap:
    """Automorphism of ``C^{(x)n}`` sending the factor in slot i to slot perm[i],
    with the Koszul sign of the reordering."""
    if complex_ is None or TB is None:
        complex_, TB = tensor_power(C, n, with_basis=True)
    return permute_slots(complex_, TB, perm)


def permute_slots(P: ChainComplex, TB: TensorBasis, perm: tuple) -> ChainMap:
    """Reorder the factors of a tensor product whose factors are pairwise equal
    wherever ``perm`` mixes them: slot i moves to slot perm[i] (Koszul sign)."""
    n = len(perm)
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    comps = {}
    for deg, blist in TB.basis.items():
        cols = {}
        pos = TB.pos[deg]
        for j, combo in enumerate(blist):
            new = tuple(combo[inv[s]] for s in range(n))
            cols[j] = {pos[new]: koszul_sign([k for k, _ in combo], perm)}
        comps[deg] = SparseMatrix(P.rank(deg), P.rank(deg), cols)
    return ChainMap(P, P, comps)


def koszul_sign(degrees: list[int], perm: tuple) -> int:
    """Sign of moving graded factors of the given degrees from slot i to perm[i]."""
    s = 1
    n = len(perm)
    for a in range(n):
        if degrees[a] % 2 == 0:
            continue
        for b in range(a + 1, n):
            if degrees[b] % 2 and perm[a] > perm[b]:
                s = -s
    return s


def swap_map(C: ChainComplex, D: ChainComplex) -> ChainMap:
    """Symmetry isomorphism ``C (x) D -> D (x) C``."""
    S, SB = tensor_many([C, D], with_basis=True)
    T, TB = tensor_many([D, C], with_basis=True)
    comps = {}
    for deg, blist in SB.basis.items():
        cols = {}
        for j, (a, b) in enumerate(blist):
            sgn = -1 if (a[0] % 2 and b[0] % 2) else 1
            cols[j] = {TB.pos[deg][(b, a)]: sgn}
        comps[deg] = SparseMatrix(T.rank(deg), S.rank(deg), cols)
    return ChainMap(S, T, comps)


def truncate_ranks(C: ChainComplex, lo: int, hi: int) -> dict:
    return {k: r for k, r in C.ranks.items() if lo <= k <= hi}
