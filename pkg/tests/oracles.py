"""Independent reference computations used to freeze expected values.

Nothing here imports the reduction or Smith code of the package; matrices go
through sympy or through closed formulas instead.
"""
from __future__ import annotations

import itertools
import math
from math import factorial, gcd

import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf


def sympy_invariant_factors(rows: list[list[int]]) -> list[int]:
    """Nonzero invariant factors via sympy, normalised positive and sorted."""
    if not rows or not rows[0]:
        return []
    M = sympy.Matrix(rows)
    D = sympy_snf(M, domain=sympy.ZZ)
    out = [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]
    return sorted(out)


def minors_gcd_factors(rows: list[list[int]]) -> list[int]:
    """Invariant factors as ratios of successive gcds of k x k minors."""
    if not rows or not rows[0]:
        return []
    n, m = len(rows), len(rows[0])
    d_prev, out = 1, []
    for k in range(1, min(n, m) + 1):
        g = 0
        for R in itertools.combinations(range(n), k):
            for C in itertools.combinations(range(m), k):
                g = gcd(g, int(sympy.Matrix([[rows[i][j] for j in C] for i in R]).det()))
        if g == 0:
            break
        out.append(g // d_prev)
        d_prev = g
    return out


def dense_homology_ranks(ranks: dict, diffs: dict) -> dict:
    """Betti numbers over Q from dense boundary matrices, via sympy ranks."""
    def rk(k):
        M = diffs.get(k)
        if M is None or not M or not M[0]:
            return 0
        return sympy.Matrix(M).rank()
    return {k: r - rk(k) - rk(k + 1) for k, r in ranks.items() if r - rk(k) - rk(k + 1)}


def mobius(n: int) -> int:
    if n == 1:
        return 1
    res, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    return -res if m > 1 else res


def lie_character(cycle_type: tuple) -> int:
    """Character of Lie(n): nonzero only on classes d^(n/d), where it is
    mu(d) (n/d)! d^(n/d) / n."""
    n = sum(cycle_type)
    d = cycle_type[0]
    if any(c != d for c in cycle_type):
        return 0
    m = n // d
    return mobius(d) * factorial(m) * d ** m // n


def partition_lattice_mobius(n: int) -> int:
    return (-1) ** (n - 1) * factorial(n - 1)


def regular_character(cycle_type: tuple) -> int:
    n = sum(cycle_type)
    return factorial(n) if all(c == 1 for c in cycle_type) else 0


def fixed_points(perm: tuple, objects) -> int:
    return sum(1 for x in objects if perm(x) == x)


def bell(n: int) -> int:
    return sum(int(sympy.functions.combinatorial.numbers.stirling(n, k)) for k in range(n + 1))


def s3_lie_f2_group_homology(top: int) -> list[int]:
    """F_2-dimensions of H_i(S_3; Lie(3) (x) F_2), i <= top.

    Restricted to the transposition (12) the module is free of rank one (the
    two basis brackets are swapped), so transfer kills every positive degree.
    In degree zero the 3-cycle acts with minimal polynomial x^2 + x + 1, so
    c - 1 is invertible and the coinvariants vanish."""
    return [0] * (top + 1)


def c2_trivial_f2_homology(top: int) -> list[int]:
    """Periodic resolution of C_2 with F_2 coefficients: F_2 in every degree."""
    return [1] * (top + 1)


def binom(n, k):
    return math.comb(n, k)
