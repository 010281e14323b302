"""Worked derivatives: partition complexes, Lie(n), compactified configuration
spaces and the cyclic-sphere coefficient.

Every constructor returns a :class:`Representation` of ``S_n`` (or, before
induction, of ``C_n``) on an explicit chain complex, so homology and
characters come from the generic machinery.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from .chain import ChainComplex, tensor_many
from .homology import homology
from .linalg import QQ, ZZ, Echelon, Ring, SparseMatrix
from .representations import (GModule, Representation, RepresentationError, character,
                              group_gens, induce, perm_sign, rep_from_perm_action,
                              shift_rep, sign_character)
from .simplicial import Poset, SimplicialSet, config_chains, nerve

DEFAULT_CAP = 7


def _check_cap(n: int, cap: int, lo: int = 1):
    if n < lo:
        raise ValueError(f"n must be at least {lo}")
    if n > cap:
        raise ValueError(f"n = {n} exceeds the cap {cap}")


# ---------------------------------------------------------------------------
# partitions


def set_partitions(n: int) -> list[frozenset]:
    """All partitions of ``{0..n-1}`` as frozensets of frozenset blocks."""
    out = []

    def grow(i, blocks):
        if i == n:
            out.append(frozenset(frozenset(b) for b in blocks))
            return
        for b in blocks:
            b.append(i)
            grow(i + 1, blocks)
            b.pop()
        blocks.append([i])
        grow(i + 1, blocks)
        blocks.pop()

    grow(0, [])
    return out


def _partition_key(p: frozenset) -> tuple:
    return (-len(p), sorted(sorted(b) for b in p))


def refines(p: frozenset, q: frozenset) -> bool:
    """Every block of p lies inside a block of q."""
    return all(any(b <= c for c in q) for b in p)


def partition_poset(n: int) -> Poset:
    """Proper nontrivial partitions ordered by strict refinement (finer below)."""
    parts = [p for p in set_partitions(n) if 1 < len(p) < n]
    parts.sort(key=_partition_key)
    less = {p: {q for q in parts if q != p and refines(p, q)} for p in parts}
    return Poset(parts, less)


def _act_partition(g: tuple, p: frozenset) -> frozenset:
    return frozenset(frozenset(g[i] for i in b) for b in p)


def partition_complex(n: int, ring: Ring = ZZ, cap: int = DEFAULT_CAP,
                      budget: int | None = None) -> Representation:
    """Augmented chains of the partition nerve with ``S_n`` relabelling blocks.

    The empty chain sits in degree -1, so for ``n = 2`` the homology is one
    class in degree -1.
    """
    _check_cap(n, cap, 2)
    P = partition_poset(n)
    N = nerve(P, ring, augmented=True, budget=budget)
    perms = {}
    for name, g in group_gens("S", n).items():
        per = {}
        for k, lst in N.basis.items():
            per[k] = [(N.index[tuple(_act_partition(g, p) for p in ch)][1], 1) for ch in lst]
        perms[name] = per
    r = rep_from_perm_action("S", n, N.complex, perms)
    r.meta.update({"homology_degree": n - 3, "suspended_degree": n - 1, "dual_degree": 1 - n,
                   "elements": len(P.elements)})
    return r


# ---------------------------------------------------------------------------
# Lie(n)


def _bracket(a: dict, b: dict) -> dict:
    out: dict = {}
    for u, x in a.items():
        for v, y in b.items():
            out[u + v] = out.get(u + v, 0) + x * y
            out[v + u] = out.get(v + u, 0) - x * y
    return {w: c for w, c in out.items() if c}


def lie_basis(n: int) -> list[tuple]:
    """Orders ``(pi(1), .., pi(n-1))`` of the letters ``0..n-2``; the bracket
    ``[x_pi1,[x_pi2,[...,[x_pi(n-1), x_n]]]]`` ends in the last letter."""
    return list(itertools.permutations(range(n - 1)))


def lie_word_expansion(order: tuple, n: int) -> dict:
    """Left-normed bracket expanded into words of the tensor algebra."""
    acc = {(n - 1,): 1}
    for a in reversed(order):
        acc = _bracket({(a,): 1}, acc)
    return acc


def lie_module(n: int, ring: Ring = ZZ, cap: int = DEFAULT_CAP) -> Representation:
    """Lie(n) in degree 0 with ``S_n`` permuting letters; coordinates by exact solve."""
    _check_cap(n, cap, 1)
    basis = lie_basis(n)
    words = sorted(itertools.permutations(range(n)))
    widx = {w: i for i, w in enumerate(words)}
    vecs = [{widx[w]: c for w, c in lie_word_expansion(o, n).items()} for o in basis]
    E = Echelon(QQ)
    for j, v in enumerate(vecs):
        ok, _ = E.add({i: Fraction(c) for i, c in v.items()}, j)
        if not ok:
            raise RepresentationError("Lie basis expansion is not injective")
    gens = {}
    for name, g in group_gens("S", n).items():
        M = [[0] * len(basis) for _ in basis]
        for j, o in enumerate(basis):
            img = {}
            for w, c in lie_word_expansion(o, n).items():
                gw = tuple(g[a] for a in w)
                img[widx[gw]] = img.get(widx[gw], 0) + c
            res, combo = E.reduce({i: Fraction(c) for i, c in img.items() if c})
            if res:
                raise RepresentationError("permuted bracket left the span of Lie(n)")
            for i, x in combo.items():
                if x.denominator != 1:
                    raise RepresentationError("Lie(n) coordinates are not integral")
                M[i][j] = int(x)
        gens[name] = M
    r = GModule("S", n, len(basis), gens, ring)
    r.meta.update({"basis": [list(o) + [n - 1] for o in basis], "words": len(words)})
    return r


def compare_partition_lie(n: int, cap: int = DEFAULT_CAP) -> dict:
    """Partition homology twisted by the sign character against Lie(n)."""
    P = partition_complex(n, QQ, cap)
    L = lie_module(n, QQ, cap)
    chi_p = character(P)
    chi_l = character(L)
    sgn = sign_character(n)
    pdeg = chi_p.per_degree.get(n - 3, {k: 0 for k in sgn})
    twisted = {k: pdeg[k] * sgn[k] for k in sgn}
    lie = chi_l.per_degree.get(0, {k: 0 for k in sgn})
    concentrated = set(chi_p.per_degree) <= {n - 3}
    return {"n": n, "ok": concentrated and twisted == lie,
            "partition_twisted": twisted, "lie": lie, "concentrated": concentrated}


def identity_derivative(n: int, ring: Ring = ZZ, cap: int = DEFAULT_CAP) -> Representation:
    """The partition complex regraded by the double suspension (degree n-1)."""
    r = shift_rep(partition_complex(n, ring, cap), 2)
    r.meta.update({"homology_degree": n - 1, "dual_degree": 1 - n})
    return r


# ---------------------------------------------------------------------------
# configuration spaces


def config_compactified(K: SimplicialSet, n: int, based: bool, ring: Ring = ZZ,
                        budget: int | None = None) -> Representation:
    """Chains of ``K^n`` modulo the fat diagonal, with ``S_n`` permuting coordinates."""
    if n < 1:
        raise ValueError("n must be positive")
    RC = config_chains(K, n, based, ring, budget)
    perms = {}
    for name, g in group_gens("S", n).items():
        inv = tuple(sorted(range(n), key=lambda i: g[i]))  # g^{-1}
        per = {}
        for m, lst in RC.basis.items():
            # coordinate i of g.x is coordinate g^{-1}(i) of x
            per[m] = [(RC.index[tuple(x[inv[i]] for i in range(n))][1], 1) for x in lst]
        perms[name] = per
    r = rep_from_perm_action("S", n, RC.complex, perms)
    r.meta.update({"space": K.name, "based": based,
                   "cells": {str(m): len(v) for m, v in sorted(RC.basis.items())}})
    return r


# ---------------------------------------------------------------------------
# the cyclic-sphere coefficient


def cyclic_sphere(n: int, ring: Ring = ZZ) -> Representation:
    """Augmented chains of the boundary of the (n-1)-simplex shifted up by one,
    with ``C_n`` rotating the vertices."""
    faces = [s for size in range(0, n) for s in itertools.combinations(range(n), size)]
    basis: dict = {}
    for s in faces:
        basis.setdefault(len(s), []).append(s)
    index = {s: (k, i) for k, lst in basis.items() for i, s in enumerate(lst)}
    ranks = {k: len(v) for k, v in basis.items()}
    diffs = {}
    for k, lst in basis.items():
        if k - 1 not in basis:
            continue
        cols = {}
        for j, s in enumerate(lst):
            cols[j] = {index[s[:i] + s[i + 1:]][1]: ring.norm(-1 if i % 2 else 1) for i in range(len(s))}
        diffs[k] = SparseMatrix(ranks[k - 1], ranks[k], cols)
    C = ChainComplex(ring, ranks, diffs)
    c = tuple((i + 1) % n for i in range(n))
    per = {}
    for k, lst in basis.items():
        out = []
        for s in lst:
            img = [c[v] for v in s]
            sgn = perm_sign(tuple(sorted(range(len(img)), key=lambda t: img[t])))
            out.append((index[tuple(sorted(img))][1], sgn))
        per[k] = out
    return rep_from_perm_action("C", n, C, {"c": per})


def a_theory_coefficient(n: int, ring: Ring = ZZ, cap: int = DEFAULT_CAP) -> Representation:
    """Induction of the cyclic sphere from ``C_n`` to ``S_n``."""
    _check_cap(n, cap, 1)
    r = induce(cyclic_sphere(n, ring))
    r.meta.update({"homology_degree": n - 1, "dual_degree": 1 - n})
    return r


def circle_plus(ring: Ring = ZZ) -> ChainComplex:
    """Reduced chains of the circle with a disjoint basepoint."""
    return ChainComplex(ring, {0: 1, 1: 1})


def a_theory_consistency(n: int, ring: Ring = ZZ) -> dict:
    """Unbased circle configuration space against the circle (with a disjoint
    basepoint) tensored with the cyclic-sphere coefficient.

    Homology tables are compared directly; characters are compared with the
    circle factor acting trivially.
    """
    from .simplicial import circle
    conf = config_compactified(circle(), n, based=False, ring=ring)
    A = a_theory_coefficient(n, ring)
    h_conf = homology(conf.complex)
    h_prod = homology(tensor_many([circle_plus(ring), A.complex]))
    chi_c = character(change_to_q(conf))
    chi_a = character(change_to_q(A))
    keys = list(sign_character(n))
    zero = {k: 0 for k in keys}
    degs = set(chi_c.per_degree) | {d + e for d in chi_a.per_degree for e in (0, 1)}
    chars_ok = all(
        {k: chi_c.per_degree.get(d, zero)[k] for k in keys}
        == {k: chi_a.per_degree.get(d, zero)[k] + chi_a.per_degree.get(d - 1, zero)[k] for k in keys}
        for d in degs)
    return {"n": n, "ok": h_conf == h_prod and chars_ok, "homology_ok": h_conf == h_prod,
            "characters_ok": chars_ok, "config": h_conf.to_json(), "product": h_prod.to_json()}


def change_to_q(r: Representation) -> Representation:
    from .representations import change_rep_ring
    return r if r.ring == QQ else change_rep_ring(r, QQ)


__all__ = ["partition_complex", "partition_poset", "set_partitions", "lie_module", "lie_basis",
           "lie_word_expansion", "compare_partition_lie", "identity_derivative",
           "config_compactified", "cyclic_sphere", "a_theory_coefficient", "a_theory_consistency",
           "circle_plus", "change_to_q", "DEFAULT_CAP"]
