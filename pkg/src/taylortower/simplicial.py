"""Finite posets, their nerves, and finite simplicial sets.

A simplex of a simplicial set is stored as ``(y, sigma)``: a nondegenerate
simplex ``y = (dim, index)`` and a monotone surjection ``sigma`` from
``[m]`` onto ``[dim]`` written as a tuple of length ``m + 1``.  By the
Eilenberg-Zilber lemma this representation is unique, so equality of
simplices is equality of pairs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .chain import ChainComplex, ChainComplexError, check_budget
from .linalg import ZZ, Ring, SparseMatrix


# ---------------------------------------------------------------------------
# posets and nerves


@dataclass(eq=False)
class Poset:
    elements: list
    less: dict  # element -> set of strictly larger elements

    def __post_init__(self):
        for a in self.elements:
            if a in self.less.get(a, ()):
                raise ValueError("poset relation is not irreflexive")
            for b in self.less.get(a, ()):
                if not self.less.get(b, set()) <= self.less[a]:
                    raise ValueError("poset relation is not transitive")

    def lt(self, a, b) -> bool:
        return b in self.less.get(a, ())

    def chains(self) -> list[tuple]:
        """Nonempty chains, listed by length and then lexicographically by index."""
        idx = {a: i for i, a in enumerate(self.elements)}
        up = {a: sorted(self.less.get(a, ()), key=idx.get) for a in self.elements}
        out, layer = [], [(a,) for a in self.elements]
        while layer:
            out.extend(layer)
            layer = [ch + (b,) for ch in layer for b in up[ch[-1]]]
        return out


@dataclass(eq=False)
class Nerve:
    """Augmented simplicial chains of the order complex (empty chain in degree -1)."""

    complex: ChainComplex
    basis: dict  # degree -> list of chains
    index: dict  # chain -> (degree, position)


def nerve(P: Poset, ring: Ring = ZZ, augmented: bool = True, budget: int | None = None) -> Nerve:
    chains = P.chains()
    check_budget(len(chains), budget, "order complex")
    basis: dict = {}
    if augmented:
        basis[-1] = [()]
    for ch in chains:
        basis.setdefault(len(ch) - 1, []).append(ch)
    index = {ch: (k, i) for k, lst in basis.items() for i, ch in enumerate(lst)}
    ranks = {k: len(v) for k, v in basis.items()}
    diffs = {}
    for k, lst in basis.items():
        if k - 1 not in basis:
            continue
        cols = {}
        for j, ch in enumerate(lst):
            col = {}
            for i in range(len(ch)):
                face = ch[:i] + ch[i + 1:]
                col[index[face][1]] = ring.norm(-1 if i % 2 else 1)
            cols[j] = col
        diffs[k] = SparseMatrix(ranks[k - 1], ranks[k], cols)
    return Nerve(ChainComplex(ring, ranks, diffs), basis, index)


# ---------------------------------------------------------------------------
# monotone maps


def epi_mono(theta: tuple) -> tuple[tuple, tuple]:
    """Factor a monotone map ``[a] -> [m]`` as ``mono o epi``."""
    image = sorted(set(theta))
    pos = {v: i for i, v in enumerate(image)}
    return tuple(pos[v] for v in theta), tuple(image)


def coface(m: int, i: int) -> tuple:
    """``delta_i : [m-1] -> [m]`` skipping ``i``."""
    return tuple(j if j < i else j + 1 for j in range(m))


def surjections(m: int, k: int) -> list[tuple]:
    """Monotone surjections ``[m] -> [k]``."""
    out = []
    for cuts in itertools.combinations(range(m), k):
        # value increases right after each chosen position
        v, sig = 0, []
        cs = set(cuts)
        for i in range(m + 1):
            sig.append(v)
            if i in cs:
                v += 1
        out.append(tuple(sig))
    return out


# ---------------------------------------------------------------------------
# simplicial sets


class SimplicialError(ChainComplexError):
    pass


@dataclass(eq=False)
class SimplicialSet:
    """Nondegenerate simplices per dimension and their faces.

    ``faces[(d, j)][i]`` is ``d_i`` of simplex ``j`` in dimension ``d``, given
    as ``((d', j'), sigma)``.
    """

    simplices: dict  # dim -> list of names
    faces: dict
    basepoint: int | None = None  # index of a vertex
    name: str = ""
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.validate()

    @property
    def dim(self) -> int:
        return max((d for d, v in self.simplices.items() if v), default=-1)

    def count(self, d: int) -> int:
        return len(self.simplices.get(d, ()))

    def nondegenerate(self):
        for d in sorted(self.simplices):
            for j in range(self.count(d)):
                yield (d, j)

    def act(self, x: tuple, theta: tuple) -> tuple:
        """``theta^* x`` for a simplex ``x = (y, sigma)`` and monotone ``theta``."""
        y, sigma = x
        comp = tuple(sigma[t] for t in theta)
        epi, mono = epi_mono(comp)
        z, rho = self.restrict(y, mono)
        return z, tuple(rho[t] for t in epi)

    def restrict(self, y: tuple, mono: tuple) -> tuple:
        """``mono^* y`` for nondegenerate ``y`` (iterated faces)."""
        d = y[0]
        if len(mono) == d + 1:
            return y, tuple(range(d + 1))
        key = (y, mono)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        missing = [i for i in range(d + 1) if i not in set(mono)]
        i = missing[-1]
        z, rho = self.faces[y][i]
        # mono factors through delta_i; express the rest in the face's coordinates
        rest = tuple(t if t < i else t - 1 for t in mono)
        out = self.act((z, rho), rest)
        self._memo[key] = out
        return out

    def face(self, x: tuple, i: int) -> tuple:
        m = len(x[1]) - 1
        return self.act(x, coface(m, i))

    def validate(self):
        for (d, j), fl in self.faces.items():
            if len(fl) != d + 1:
                raise SimplicialError(f"simplex {(d, j)} needs {d + 1} faces", d)
            for z, rho in fl:
                if len(rho) != d or (rho and rho[-1] != z[0]):
                    raise SimplicialError(f"face of {(d, j)} has a bad degeneracy", d)
        for d in self.simplices:
            for j in range(self.count(d)):
                if d >= 1 and (d, j) not in self.faces:
                    raise SimplicialError(f"simplex {(d, j)} has no faces", d)
        # d_i d_j = d_{j-1} d_i for i < j
        for d in sorted(self.simplices):
            if d < 2:
                continue
            for j0 in range(self.count(d)):
                x = ((d, j0), tuple(range(d + 1)))
                for j in range(d + 1):
                    for i in range(j):
                        a = self.face(self.face(x, j), i)
                        b = self.face(self.face(x, i), j - 1)
                        if a != b:
                            raise SimplicialError(f"simplicial identity fails in dimension {d}", d)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "simplices": {str(d): list(v) for d, v in sorted(self.simplices.items())},
            "faces": [{"simplex": [d, j], "faces": [[z[0], z[1], list(r)] for z, r in fl]}
                      for (d, j), fl in sorted(self.faces.items())],
            "basepoint": self.basepoint,
        }


def simplicial_from_json(doc: dict) -> SimplicialSet:
    simplices = {int(d): list(v) for d, v in doc["simplices"].items()}
    faces = {}
    for ent in doc.get("faces", []):
        d, j = ent["simplex"]
        faces[(d, j)] = [((a, b), tuple(r)) for a, b, r in ent["faces"]]
    return SimplicialSet(simplices, faces, doc.get("basepoint"), doc.get("name", ""))


def circle() -> SimplicialSet:
    """One vertex and one edge."""
    v = ((0, 0), (0,))
    return SimplicialSet({0: ["v"], 1: ["e"]}, {(1, 0): [v, v]}, basepoint=0, name="circle")


def interval() -> SimplicialSet:
    return SimplicialSet({0: ["0", "1"], 1: ["01"]},
                         {(1, 0): [((0, 1), (0,)), ((0, 0), (0,))]}, basepoint=0, name="interval")


def boundary_simplex(k: int) -> SimplicialSet:
    """The boundary of the k-simplex: proper nonempty vertex subsets."""
    if k < 1:
        raise ValueError("boundary-simplex needs k >= 1")
    simplices, index = {}, {}
    for size in range(1, k + 1):
        lst = list(itertools.combinations(range(k + 1), size))
        simplices[size - 1] = ["".join(map(str, s)) for s in lst]
        for j, s in enumerate(lst):
            index[s] = (size - 1, j)
    faces = {}
    for s, (d, j) in index.items():
        if d >= 1:
            faces[(d, j)] = [(index[s[:i] + s[i + 1:]], tuple(range(d))) for i in range(d + 1)]
    return SimplicialSet(simplices, faces, basepoint=0, name=f"boundary-simplex:{k}")


def builtin(name: str) -> SimplicialSet:
    if name == "circle":
        return circle()
    if name == "interval":
        return interval()
    if name.startswith("boundary-simplex:"):
        return boundary_simplex(int(name.split(":", 1)[1]))
    raise ValueError(f"unknown simplicial set {name!r}")


# ---------------------------------------------------------------------------
# products and the fat diagonal


def product_simplices(K: SimplicialSet, n: int, budget: int | None = None) -> dict:
    """Nondegenerate simplices of ``K^n`` by dimension.

    A tuple of simplices ``(y_j, sigma_j)`` is nondegenerate when no index
    ``i`` is collapsed by every ``sigma_j``.
    """
    top = n * K.dim
    nd = list(K.nondegenerate())
    out = {}
    total = 0
    for m in range(top + 1):
        options = []
        for y in nd:
            if y[0] > m:
                continue
            for sig in surjections(m, y[0]):
                options.append((y, sig))
        lst = []
        for combo in itertools.product(options, repeat=n):
            if all(any(s[i] != s[i + 1] for _, s in combo) for i in range(m)):
                lst.append(tuple(combo))
        total += len(lst)
        check_budget(total, budget, "product simplicial set")
        if lst:
            out[m] = lst
    return out


@dataclass(eq=False)
class RelativeChains:
    complex: ChainComplex
    basis: dict  # degree -> list of product simplices
    index: dict


def in_fat_diagonal(x: tuple) -> bool:
    return len(set(x)) < len(x)


def touches_basepoint(K: SimplicialSet, x: tuple) -> bool:
    return K.basepoint is not None and any(y == (0, K.basepoint) for y, _ in x)


def config_chains(K: SimplicialSet, n: int, based: bool, ring: Ring = ZZ,
                  budget: int | None = None) -> RelativeChains:
    """Normalized chains of ``K^n`` relative to the fat diagonal (and, when
    based, to the tuples with a coordinate at the basepoint)."""
    if based and K.basepoint is None:
        raise ValueError("based configuration space needs a basepoint")
    cells = product_simplices(K, n, budget)

    def killed(x):
        return in_fat_diagonal(x) or (based and touches_basepoint(K, x))

    basis = {m: [x for x in lst if not killed(x)] for m, lst in cells.items()}
    basis = {m: v for m, v in basis.items() if v}
    index = {x: (m, i) for m, lst in basis.items() for i, x in enumerate(lst)}
    ranks = {m: len(v) for m, v in basis.items()}
    diffs = {}
    for m, lst in basis.items():
        if m - 1 not in basis:
            continue
        cols = {}
        for j, x in enumerate(lst):
            col = {}
            for i in range(m + 1):
                fx = tuple(K.face(c, i) for c in x)
                hit = index.get(fx)
                if hit is None:
                    continue  # degenerate, or inside the collapsed subcomplex
                r = hit[1]
                col[r] = ring.norm(col.get(r, 0) + (-1 if i % 2 else 1))
            cols[j] = {r: v for r, v in col.items() if v}
        diffs[m] = SparseMatrix(ranks[m - 1], ranks[m], cols)
    return RelativeChains(ChainComplex(ring, ranks, diffs), basis, index)


__all__ = ["Poset", "Nerve", "nerve", "SimplicialSet", "SimplicialError", "simplicial_from_json",
           "circle", "interval", "boundary_simplex", "builtin", "product_simplices",
           "config_chains", "RelativeChains", "epi_mono", "coface", "surjections"]
