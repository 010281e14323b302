"""Exact sparse linear algebra over Z, Q and F_p.

Matrices are stored column-major as ``{col: {row: value}}`` with no explicit
zeros.  Values are Python ints (Z, F_p) or ints/Fractions (Q); nothing here
ever touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator


class RingError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: ``Z``, ``Q`` or ``Fp`` with prime ``p``."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp"):
            raise RingError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Fp":
            if self.p is None or not _is_prime(self.p):
                raise RingError(f"Fp needs a prime, got {self.p!r}")
        elif self.p is not None:
            raise RingError(f"ring {self.kind} takes no characteristic")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def name(self) -> str:
        return f"Fp:{self.p}" if self.kind == "Fp" else self.kind

    @classmethod
    def parse(cls, s: str) -> "Ring":
        s = s.strip()
        if s in ("Z", "Q"):
            return cls(s)
        if s.startswith("Fp:"):
            return cls("Fp", int(s[3:]))
        if s.startswith("F") and s[1:].isdigit():
            return cls("Fp", int(s[1:]))
        raise RingError(f"cannot parse ring {s!r}")

    def __str__(self):
        return self.name

    def norm(self, x):
        if self.kind == "Fp":
            return int(x) % self.p
        if self.kind == "Q":
            if isinstance(x, Fraction) and x.denominator == 1:
                return x.numerator
            return x
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise RingError(f"non-integral value {x} over Z")
            return x.numerator
        return int(x)

    def is_unit(self, x) -> bool:
        if self.kind == "Z":
            return x in (1, -1)
        return x != 0

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "Fp":
            return pow(int(x), -1, self.p)
        if self.kind == "Q":
            return self.norm(Fraction(1) / x)
        if x in (1, -1):
            return x
        raise RingError(f"{x} is not a unit in Z")

    def div(self, a, b):
        return self.norm(a * self.inv(b)) if self.kind != "Q" else self.norm(Fraction(a) / b)


ZZ = Ring("Z")
QQ = Ring("Q")


def GF(p: int) -> Ring:
    return Ring("Fp", p)


def field_of(ring: Ring) -> Ring:
    """The field used for Betti numbers / actions: Q for Z, else the ring."""
    return QQ if ring.kind == "Z" else ring


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Immutable-by-convention sparse matrix, column major."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols: dict | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols if cols is not None else {}

    # construction ---------------------------------------------------------
    @classmethod
    def from_entries(cls, nrows, ncols, entries: Iterable, ring: Ring):
        cols: dict[int, dict[int, object]] = {}
        for i, j, v in entries:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry ({i},{j}) outside {nrows}x{ncols}")
            c = cols.setdefault(j, {})
            c[i] = c.get(i, 0) + v
        return cls(nrows, ncols, _clean(cols, ring))

    @classmethod
    def from_dense(cls, rows, ring: Ring, ncols: int | None = None):
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else (ncols or 0)
        ents = ((i, j, v) for i, r in enumerate(rows) for j, v in enumerate(r) if v != 0)
        return cls.from_entries(nr, nc, ents, ring)

    @classmethod
    def from_columns(cls, nrows, columns: list[dict], ring: Ring):
        cols = {j: dict(c) for j, c in enumerate(columns) if c}
        return cls(nrows, len(columns), _clean(cols, ring))

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols, {})

    @classmethod
    def identity(cls, n, scale=1):
        return cls(n, n, {j: {j: scale} for j in range(n)} if scale else {})

    # access ---------------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def col(self, j) -> dict:
        return self.cols.get(j, {})

    def __getitem__(self, ij):
        i, j = ij
        return self.cols.get(j, {}).get(i, 0)

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def entries(self) -> list[tuple[int, int, object]]:
        """Triplets sorted lexicographically by (row, col)."""
        return sorted((i, j, v) for j, c in self.cols.items() for i, v in c.items())

    def rows(self) -> dict[int, dict[int, object]]:
        out: dict[int, dict[int, object]] = {}
        for j, c in self.cols.items():
            for i, v in c.items():
                out.setdefault(i, {})[j] = v
        return out

    def to_dense(self) -> list[list]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, c in self.cols.items():
            for i, v in c.items():
                out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return not self.cols

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # algebra --------------------------------------------------------------
    def apply(self, vec: dict, ring: Ring) -> dict:
        out: dict[int, object] = {}
        for j, a in vec.items():
            for i, v in self.cols.get(j, {}).items():
                out[i] = out.get(i, 0) + a * v
        return _clean_vec(out, ring)

    def matmul(self, other: "SparseMatrix", ring: Ring) -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = {}
        for j, c in other.cols.items():
            v = self.apply(c, ring)
            if v:
                cols[j] = v
        return SparseMatrix(self.nrows, other.ncols, cols)

    def add(self, other: "SparseMatrix", ring: Ring, scale=1) -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        cols = {j: dict(c) for j, c in self.cols.items()}
        for j, c in other.cols.items():
            t = cols.setdefault(j, {})
            for i, v in c.items():
                t[i] = t.get(i, 0) + scale * v
        return SparseMatrix(self.nrows, self.ncols, _clean(cols, ring))

    def scale(self, s, ring: Ring) -> "SparseMatrix":
        cols = {j: {i: s * v for i, v in c.items()} for j, c in self.cols.items()}
        return SparseMatrix(self.nrows, self.ncols, _clean(cols, ring))

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows, self.rows())

    def submatrix(self, rows: list[int], cols: list[int]) -> "SparseMatrix":
        rpos = {r: a for a, r in enumerate(rows)}
        out = {}
        for b, j in enumerate(cols):
            c = {rpos[i]: v for i, v in self.cols.get(j, {}).items() if i in rpos}
            if c:
                out[b] = c
        return SparseMatrix(len(rows), len(cols), out)

    def trace(self, ring: Ring):
        return ring.norm(sum(self.cols.get(j, {}).get(j, 0) for j in range(min(self.shape))))


def _clean_vec(v: dict, ring: Ring) -> dict:
    out = {}
    for k, x in v.items():
        x = ring.norm(x)
        if x != 0:
            out[k] = x
    return out


def _clean(cols: dict, ring: Ring) -> dict:
    out = {}
    for j, c in cols.items():
        c = _clean_vec(c, ring)
        if c:
            out[j] = c
    return out


def block_diag(blocks: list[SparseMatrix]) -> SparseMatrix:
    r0 = c0 = 0
    cols = {}
    for b in blocks:
        for j, c in b.cols.items():
            cols[c0 + j] = {r0 + i: v for i, v in c.items()}
        r0 += b.nrows
        c0 += b.ncols
    return SparseMatrix(r0, c0, cols)


def place_blocks(row_sizes: list[int], col_sizes: list[int],
                 blocks: dict[tuple[int, int], SparseMatrix], ring: Ring) -> SparseMatrix:
    """Assemble a block matrix from ``{(block_row, block_col): matrix}``."""
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    cols: dict[int, dict[int, object]] = {}
    for (bi, bj), m in blocks.items():
        if m.shape != (row_sizes[bi], col_sizes[bj]):
            raise ValueError(f"block {(bi, bj)} has shape {m.shape}")
        for j, c in m.cols.items():
            t = cols.setdefault(coff[bj] + j, {})
            for i, v in c.items():
                t[roff[bi] + i] = t.get(roff[bi] + i, 0) + v
    return SparseMatrix(roff[-1], coff[-1], _clean(cols, ring))


# ---------------------------------------------------------------------------
# elimination over a field


class Echelon:
    """Incremental echelon basis over a field, tracking how each stored row is
    expressed through the tagged vectors that were inserted.

    Rows never contain the pivots of earlier rows, so reducing against them in
    insertion order terminates.
    """

    def __init__(self, ring: Ring):
        if not ring.is_field:
            raise RingError("Echelon needs a field")
        self.ring = ring
        self._rows: list[tuple[int, dict, dict]] = []  # (pivot, vector, combo)
        self._pivots: set[int] = set()

    def __len__(self):
        return len(self._rows)

    def reduce(self, v: dict) -> tuple[dict, dict]:
        """Return ``(residual, combo)`` with ``v = residual + sum combo[t]*tagged_t``."""
        R = self.ring
        res = dict(v)
        combo: dict = {}
        if not res:
            return res, combo
        for piv, row, rc in self._rows:
            a = res.get(piv)
            if not a:
                continue
            # row is normalised to 1 at its pivot
            for k, x in row.items():
                y = R.norm(res.get(k, 0) - a * x)
                if y:
                    res[k] = y
                else:
                    res.pop(k, None)
            for t, x in rc.items():
                y = R.norm(combo.get(t, 0) + a * x)
                if y:
                    combo[t] = y
                else:
                    combo.pop(t, None)
        return res, combo

    def add(self, v: dict, tag) -> tuple[bool, dict]:
        """Insert ``v`` under ``tag``.

        Returns ``(independent, relation)``; when ``v`` is dependent the
        relation is the combo with ``v = sum relation[t]*tagged_t``.
        """
        R = self.ring
        res, combo = self.reduce(v)
        if not res:
            return False, combo
        piv = min(res)
        a = R.inv(res[piv])
        row = {k: R.norm(x * a) for k, x in res.items()}
        rc = {t: R.norm(-x * a) for t, x in combo.items()}
        rc = {t: x for t, x in rc.items() if x}
        rc[tag] = a
        self._rows.append((piv, row, rc))
        self._pivots.add(piv)
        return True, {}


def rank(M: SparseMatrix, ring: Ring) -> int:
    if M.is_zero():
        return 0
    if ring.kind == "Z":
        return len(invariant_factors(M))
    return _field_rank(M, ring)


def _field_rank(M: SparseMatrix, ring: Ring) -> int:
    rows = M.rows() if M.nrows <= M.ncols else {j: dict(c) for j, c in M.cols.items()}
    return _eliminate_count(rows, ring)


def _eliminate_count(rows: dict[int, dict], ring: Ring) -> int:
    """Rank of a row-dict matrix over a field via sparse Gaussian elimination."""
    colidx: dict[int, set] = {}
    for r, row in rows.items():
        for c in row:
            colidx.setdefault(c, set()).add(r)
    rk = 0
    alive = dict(rows)
    while alive:
        # pick shortest row
        r = min(alive, key=lambda k: (len(alive[k]), k))
        row = alive.pop(r)
        for c in row:
            colidx[c].discard(r)
        if not row:
            continue
        c = min(row, key=lambda k: (len(colidx.get(k, ())), k))
        inv = ring.inv(row[c])
        rk += 1
        for r2 in list(colidx.get(c, ())):
            row2 = alive[r2]
            f = ring.norm(row2[c] * inv)
            for k, x in row.items():
                y = ring.norm(row2.get(k, 0) - f * x)
                if y:
                    if k not in row2:
                        colidx.setdefault(k, set()).add(r2)
                    row2[k] = y
                elif k in row2:
                    del row2[k]
                    colidx[k].discard(r2)
    return rk


def kernel_basis(M: SparseMatrix, ring: Ring) -> list[dict]:
    """Basis of the null space of ``M`` over a field (as sparse vectors)."""
    E = Echelon(ring)
    out = []
    for j in range(M.ncols):
        ok, rel = E.add(M.col(j), j)
        if not ok:
            z = {t: ring.norm(-x) for t, x in rel.items()}
            z[j] = 1
            out.append(_clean_vec(z, ring))
    return out


def solve(A: SparseMatrix, b: dict, ring: Ring) -> dict | None:
    """Some ``x`` with ``A x = b`` over a field, or None."""
    E = Echelon(ring)
    for j in range(A.ncols):
        E.add(A.col(j), j)
    res, combo = E.reduce(b)
    if res:
        return None
    return combo


# ---------------------------------------------------------------------------
# integer Smith normal form


def invariant_factors(M: SparseMatrix) -> list[int]:
    """Nonzero Smith invariant factors of an integer matrix, ascending.

    Unit entries are eliminated sparsely first (each contributes a factor 1);
    the remainder is handed to the dense algorithm.
    """
    rows = {i: dict(r) for i, r in M.rows().items()}
    colidx: dict[int, set] = {}
    for r, row in rows.items():
        for c in row:
            colidx.setdefault(c, set()).add(r)
    ones = 0
    progress = True
    while progress:
        progress = False
        for r in sorted(rows, key=lambda k: (len(rows[k]), k)):
            if r not in rows:
                continue
            row = rows[r]
            units = [c for c, v in row.items() if v == 1 or v == -1]
            if not units:
                continue
            c = min(units, key=lambda k: (len(colidx[k]), k))
            pv = row[c]
            del rows[r]
            for k in row:
                colidx[k].discard(r)
            for r2 in list(colidx[c]):
                row2 = rows[r2]
                f = row2[c] * pv
                for k, x in row.items():
                    y = row2.get(k, 0) - f * x
                    if y:
                        if k not in row2:
                            colidx.setdefault(k, set()).add(r2)
                        row2[k] = y
                    elif k in row2:
                        del row2[k]
                        colidx[k].discard(r2)
            ones += 1
            progress = True
    rest_rows = [r for r in sorted(rows) if rows[r]]
    if not rest_rows:
        return [1] * ones
    rest_cols = sorted({c for r in rest_rows for c in rows[r]})
    cpos = {c: k for k, c in enumerate(rest_cols)}
    dense = [[0] * len(rest_cols) for _ in rest_rows]
    for a, r in enumerate(rest_rows):
        for c, v in rows[r].items():
            dense[a][cpos[c]] = v
    diag = _snf_diagonal(dense)
    return [1] * ones + diag


def _snf_diagonal(A: list[list[int]]) -> list[int]:
    D, _, _ = _snf_dense(A, track=False)
    m, n = len(D), (len(D[0]) if D else 0)
    return [abs(D[i][i]) for i in range(min(m, n)) if D[i][i] != 0]


def _snf_dense(A: list[list[int]], track: bool = True):
    """Dense Smith normal form ``D = U A V``; transforms only if ``track``."""
    A = [list(r) for r in A]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        if track:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def row_op(dst, src, f):  # row dst -= f * row src
        if f:
            A[dst] = [a - f * b for a, b in zip(A[dst], A[src])]
            if track:
                U[dst] = [a - f * b for a, b in zip(U[dst], U[src])]

    def col_op(dst, src, f):  # col dst -= f * col src
        if f:
            for r in A:
                r[dst] -= f * r[src]
            if track:
                for r in V:
                    r[dst] -= f * r[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero |entry| in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    row_op(i, t, q)
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    col_op(j, t, q)
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: pivot must divide the rest of the block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % A[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(t, bad, -1)  # row t += row bad
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            if track:
                U[t] = [-a for a in U[t]]
        t += 1
    return A, U, V


def smith_normal_form(M: SparseMatrix | list[list[int]]):
    """Smith normal form of an integer matrix.

    Returns ``(diagonal, U, V)`` with ``U @ M @ V`` diagonal, ``U`` and ``V``
    unimodular, and each diagonal entry dividing the next.
    """
    dense = M.to_dense() if isinstance(M, SparseMatrix) else [list(r) for r in M]
    D, U, V = _snf_dense(dense, track=True)
    k = min(len(D), len(D[0]) if D else 0)
    return [D[i][i] for i in range(k)], U, V


def det(A: list[list[int]]) -> int:
    """Exact integer determinant (Bareiss)."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def dense_matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def iter_vec(v: dict) -> Iterator:
    return iter(sorted(v.items()))
