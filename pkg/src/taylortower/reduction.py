"""Gaussian elimination of chain complexes.

Cancelling a unit entry ``phi`` of ``d: b -> b'`` replaces ``C`` by a smaller
homotopy equivalent complex.  Both halves of the equivalence are tracked:

    proj : C -> C'     proj(b) = 0,  proj(b') = -phi^{-1} (d b - phi b')
    incl : C' -> C     incl(x) = x - phi^{-1} <d x, b'> b

so that chain maps can be transported across reductions.
"""
from __future__ import annotations

from dataclasses import dataclass

from .chain import ChainComplex, ChainMap, compose
from .linalg import SparseMatrix


@dataclass(frozen=True, eq=False)
class Reduction:
    original: ChainComplex
    complex: ChainComplex
    proj: ChainMap
    incl: ChainMap


def _axpy(dst: dict, a, src: dict, R, skip=None):
    for k, v in src.items():
        if k == skip:
            continue
        y = R.norm(dst.get(k, 0) + a * v)
        if y:
            dst[k] = y
        else:
            dst.pop(k, None)


def reduce_complex(C: ChainComplex) -> Reduction:
    """Cancel unit pivots until none remain (a minimal complex over a field)."""
    R = C.ring
    d: dict[tuple, dict] = {}
    rows: dict[tuple, set] = {}
    for k, r in C.ranks.items():
        for j in range(r):
            d[(k, j)] = {}
    for k, m in C.diffs.items():
        for j, col in m.cols.items():
            d[(k, j)] = {(k - 1, i): v for i, v in col.items()}
            for i in col:
                rows.setdefault((k - 1, i), set()).add((k, j))
    f = {g: {g: 1} for g in d}
    frows = {g: {g} for g in d}
    g_ = {g: {g: 1} for g in d}

    def pick():
        best = None
        for b in sorted(d):
            col = d[b]
            for bp, v in col.items():
                if not R.is_unit(v):
                    continue
                cost = (len(col) - 1) * (len(rows.get(bp, ())) - 1)
                if best is None or cost < best[0]:
                    best = (cost, b, bp)
                    if cost == 0:
                        return best
        return best

    while True:
        choice = pick()
        if choice is None:
            break
        _, b, bp = choice
        col_b = d[b]
        phi = col_b[bp]
        phinv = R.inv(phi)
        # update differentials of the other generators hitting b'
        for x in list(rows.get(bp, ())):
            if x == b:
                continue
            lam = d[x][bp]
            fac = R.norm(-lam * phinv)
            old = set(d[x])
            _axpy(d[x], fac, col_b, R)
            d[x].pop(bp, None)
            new = set(d[x])
            for y in old - new:
                rows[y].discard(x)
            for y in new - old:
                rows.setdefault(y, set()).add(x)
            _axpy(g_[x], fac, g_[b], R)
        # proj: b' -> -phi^{-1} gamma, b -> 0
        gamma = {k: v for k, v in col_b.items() if k != bp}
        for z in list(frows.get(bp, ())):
            mu = f[z].pop(bp)
            frows[bp].discard(z)
            before = set(f[z])
            _axpy(f[z], R.norm(-mu * phinv), gamma, R)
            after = set(f[z])
            for y in before - after:
                frows[y].discard(z)
            for y in after - before:
                frows.setdefault(y, set()).add(z)
        for z in list(frows.get(b, ())):
            f[z].pop(b, None)
        # b disappears from the differentials one degree up
        for y in list(rows.get(b, ())):
            d[y].pop(b, None)
        for y in d[bp]:
            rows[y].discard(bp)
        for y in col_b:
            rows[y].discard(b)
        for gen in (b, bp):
            del d[gen]
            del g_[gen]
            rows.pop(gen, None)
            frows.pop(gen, None)

    # assemble
    alive: dict[int, list] = {}
    for gen in sorted(d):
        alive.setdefault(gen[0], []).append(gen)
    pos = {gen: i for k, lst in alive.items() for i, gen in enumerate(lst)}
    ranks = {k: len(v) for k, v in alive.items()}
    diffs = {}
    for k, lst in alive.items():
        if k - 1 not in ranks:
            continue
        cols = {}
        for j, gen in enumerate(lst):
            c = {pos[y]: v for y, v in d[gen].items()}
            if c:
                cols[j] = c
        diffs[k] = SparseMatrix(ranks[k - 1], ranks[k], cols)
    Cr = ChainComplex(R, ranks, diffs)
    pcomps, icomps = {}, {}
    for k, r in C.ranks.items():
        if k not in ranks:
            continue
        cols = {}
        for j in range(r):
            c = {pos[y]: v for y, v in f[(k, j)].items()}
            if c:
                cols[j] = c
        pcomps[k] = SparseMatrix(ranks[k], r, cols)
        icols = {}
        for j, gen in enumerate(alive[k]):
            icols[j] = {i: v for (_, i), v in g_[gen].items()}
        icomps[k] = SparseMatrix(r, ranks[k], icols)
    return Reduction(C, Cr, ChainMap(C, Cr, pcomps), ChainMap(Cr, C, icomps))


def transport(f: ChainMap, src: Reduction | None, tgt: Reduction | None) -> ChainMap:
    """``tgt.proj o f o src.incl``, the map induced between reduced models."""
    if src is not None:
        f = compose(f, src.incl)
    if tgt is not None:
        f = compose(tgt.proj, f)
    return f
