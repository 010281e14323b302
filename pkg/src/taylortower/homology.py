"""Homology tables, homology bases, induced maps and connectivity."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .chain import ChainComplex, ChainMap, change_ring, change_ring_map, cone
from .linalg import Echelon, Ring, SparseMatrix, field_of, invariant_factors, rank

INF = math.inf


@dataclass(frozen=True)
class HomologyTable:
    """Per degree: free rank and (over Z) torsion coefficients d_1 | d_2 | ..."""

    ring: Ring
    groups: dict  # degree -> (rank, tuple of torsion)

    def betti(self, k: int) -> int:
        return self.groups.get(k, (0, ()))[0]

    def torsion(self, k: int) -> tuple:
        return self.groups.get(k, (0, ()))[1]

    def is_zero(self) -> bool:
        return not self.groups

    def restrict(self, lo: int, hi: int) -> "HomologyTable":
        return HomologyTable(self.ring, {k: v for k, v in self.groups.items() if lo <= k <= hi})

    def shifted(self, j: int) -> "HomologyTable":
        return HomologyTable(self.ring, {k + j: v for k, v in self.groups.items()})

    def total_rank(self) -> int:
        return sum(r for r, _ in self.groups.values())

    def ranks(self) -> dict:
        return {k: r for k, (r, _) in self.groups.items() if r}

    def __eq__(self, other):
        if not isinstance(other, HomologyTable):
            return NotImplemented
        return self.ring == other.ring and self.groups == other.groups

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.groups.items()))))

    def to_json(self) -> list:
        out = []
        for k, (r, t) in sorted(self.groups.items()):
            out.append({"degree": k, "rank": r, "torsion": list(t)})
        return out

    def describe(self) -> str:
        if not self.groups:
            return "0"
        parts = []
        for k, (r, t) in sorted(self.groups.items()):
            terms = []
            base = {"Z": "Z", "Q": "Q"}.get(self.ring.kind, f"F{self.ring.p}")
            if r:
                terms.append(base if r == 1 else f"{base}^{r}")
            terms += [f"Z/{d}" for d in t]
            parts.append(f"H_{k} = " + " + ".join(terms))
        return ", ".join(parts)


def homology(C: ChainComplex) -> HomologyTable:
    R = C.ring
    groups = {}
    if R.kind == "Z":
        facs = {k: invariant_factors(d) for k, d in C.diffs.items()}
        for k, n in C.ranks.items():
            rk_out = len(facs.get(k, ()))
            inc = facs.get(k + 1, ())
            betti = n - rk_out - len(inc)
            tors = tuple(x for x in inc if x > 1)
            if betti or tors:
                groups[k] = (betti, tors)
    else:
        rks = {k: rank(d, R) for k, d in C.diffs.items()}
        for k, n in C.ranks.items():
            betti = n - rks.get(k, 0) - rks.get(k + 1, 0)
            if betti:
                groups[k] = (betti, ())
    return HomologyTable(R, groups)


def is_acyclic(C: ChainComplex) -> bool:
    return homology(C).is_zero()


def connectivity(f: ChainMap):
    """Largest m with H_i(cone f) = 0 for all i <= m (``inf`` if the cone is
    acyclic)."""
    H = homology(cone(f))
    if H.is_zero():
        return INF
    return min(H.groups) - 1


def is_quasi_iso(f: ChainMap) -> bool:
    return homology(cone(f)).is_zero()


# ---------------------------------------------------------------------------
# homology with explicit bases (over a field)


class HomologyBasis:
    """Representative cycles for ``H_k(C; field)`` and a coordinate map."""

    def __init__(self, C: ChainComplex, k: int):
        self.ring = field_of(C.ring)
        if C.ring != self.ring:
            C = change_ring(C, self.ring)
        self.complex = C
        self.degree = k
        R = self.ring
        E = Echelon(R)
        for j, col in sorted(C.d(k + 1).cols.items()):
            E.add(col, ("B", j))
        self.reps: list[dict] = []
        d = C.d(k)
        # cycles: dependencies among the columns of d_k
        K = Echelon(R)
        for j in range(C.rank(k)):
            ok, rel = K.add(d.col(j), j)
            if ok:
                continue
            z = {t: R.norm(-x) for t, x in rel.items()}
            z[j] = 1
            z = {t: x for t, x in z.items() if x}
            ind, _ = E.add(z, ("H", len(self.reps)))
            if ind:
                self.reps.append(z)
        self._E = E

    @property
    def rank(self) -> int:
        return len(self.reps)

    def coords(self, z: dict) -> list:
        res, combo = self._E.reduce(z)
        if res:
            raise ValueError("vector is not a cycle in this degree")
        out = [0] * self.rank
        for t, x in combo.items():
            if t[0] == "H":
                out[t[1]] = x
        return out


def induced_matrix(f: ChainMap, k: int, src: HomologyBasis | None = None,
                   tgt: HomologyBasis | None = None) -> list[list]:
    """Matrix of ``H_k(f)`` (over Q for integral maps) in the chosen bases."""
    F = field_of(f.ring)
    if f.ring != F:
        f = change_ring_map(f, F)
    src = src or HomologyBasis(f.source, k)
    tgt = tgt or HomologyBasis(f.target, k)
    m = f.at(k)
    cols = [tgt.coords(m.apply(z, F)) for z in src.reps]
    return [[cols[j][i] for j in range(len(cols))] for i in range(tgt.rank)]


def induced_rank(f: ChainMap, k: int) -> int:
    M = induced_matrix(f, k)
    if not M or not M[0]:
        return 0
    F = field_of(f.ring)
    return rank(SparseMatrix.from_dense(M, F), F)
