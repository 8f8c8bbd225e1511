"""
Exact linear algebra over the integers and prime fields.

Matrices are stored as sparse triplets with arbitrary-precision integer
entries. Smith normal form runs on a dense copy; the large, very sparse
differentials of bar complexes go through `rank_fp` instead.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import sympy

from barcalc.errors import CompositionNotZero, ShapeMismatch, InvalidInput

logger = logging.getLogger("barcalc")


class IntMatrix:
    """
    Immutable sparse integer matrix.

    Parameters
    ----------
    rows, cols: int
        shape
    entries: iterable of (row, col, value) or dict {(row, col): value}
        zero values are dropped, duplicate positions are rejected
    """
    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries=()):
        if rows < 0 or cols < 0:
            raise ShapeMismatch(f"negative shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        if isinstance(entries, dict):
            items = ((r, c, v) for (r, c), v in entries.items())
        else:
            items = entries
        stored = {}
        for r, c, v in items:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ShapeMismatch(f"entry ({r}, {c}) outside {rows}x{cols}")
            if (r, c) in stored:
                raise ShapeMismatch(f"duplicate entry ({r}, {c})")
            if v:
                stored[(r, c)] = int(v)
        self._entries = stored

    # construction

    @classmethod
    def _trusted(cls, rows, cols, stored):
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m._entries = {k: v for k, v in stored.items() if v}
        return m

    @classmethod
    def zero(cls, rows, cols):
        return cls._trusted(rows, cols, {})

    @classmethod
    def identity(cls, n):
        return cls._trusted(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, rows_list, cols=None):
        nrows = len(rows_list)
        ncols = cols if cols is not None else (len(rows_list[0]) if nrows else 0)
        stored = {}
        for r, row in enumerate(rows_list):
            if len(row) != ncols:
                raise ShapeMismatch("ragged dense matrix")
            for c, v in enumerate(row):
                if v:
                    stored[(r, c)] = int(v)
        return cls._trusted(nrows, ncols, stored)

    @classmethod
    def from_columns(cls, rows, columns):
        """Build from a list of sparse columns {row: value}."""
        stored = {}
        for c, column in enumerate(columns):
            for r, v in column.items():
                if not 0 <= r < rows:
                    raise ShapeMismatch(f"row {r} outside {rows}")
                if v:
                    stored[(r, c)] = int(v)
        return cls._trusted(rows, len(columns), stored)

    # access

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, key):
        return self._entries.get(key, 0)

    def triplets(self):
        return sorted((r, c, v) for (r, c), v in self._entries.items())

    def nnz(self):
        return len(self._entries)

    def is_zero(self):
        return not self._entries

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def columns(self):
        cols = [dict() for _ in range(self.cols)]
        for (r, c), v in self._entries.items():
            cols[c][r] = v
        return cols

    def row_dicts(self):
        rows = [dict() for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            rows[r][c] = v
        return rows

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.triplets())))

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    # arithmetic

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        other_rows = other.row_dicts()
        out = {}
        for (r, k), v in self._entries.items():
            for c, w in other_rows[k].items():
                out[(r, c)] = out.get((r, c), 0) + v * w
        return IntMatrix._trusted(self.rows, other.cols, out)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ShapeMismatch(f"cannot add {self.shape} and {other.shape}")
        out = dict(self._entries)
        for k, v in other._entries.items():
            out[k] = out.get(k, 0) + v
        return IntMatrix._trusted(self.rows, self.cols, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        return IntMatrix._trusted(self.rows, self.cols, {key: k * v for key, v in self._entries.items()})

    def transpose(self):
        return IntMatrix._trusted(self.cols, self.rows, {(c, r): v for (r, c), v in self._entries.items()})

    def mod(self, m):
        """Entries reduced to canonical representatives 0..m-1 (m = 0 leaves Z untouched)."""
        if not m:
            return self
        return IntMatrix._trusted(self.rows, self.cols, {k: v % m for k, v in self._entries.items()})

    def hstack(self, other):
        if self.rows != other.rows:
            raise ShapeMismatch("hstack needs equal row counts")
        out = dict(self._entries)
        for (r, c), v in other._entries.items():
            out[(r, self.cols + c)] = v
        return IntMatrix._trusted(self.rows, self.cols + other.cols, out)

    def kron(self, other):
        """Kronecker product, the left factor indexing the outer block."""
        out = {}
        for (r1, c1), v1 in self._entries.items():
            for (r2, c2), v2 in other._entries.items():
                out[(r1 * other.rows + r2, c1 * other.cols + c2)] = v1 * v2
        return IntMatrix._trusted(self.rows * other.rows, self.cols * other.cols, out)

    def submatrix(self, row_index, col_index):
        """Restrict to the given rows and columns (lists of original indices, in order)."""
        rpos = {r: i for i, r in enumerate(row_index)}
        cpos = {c: j for j, c in enumerate(col_index)}
        out = {}
        for (r, c), v in self._entries.items():
            if r in rpos and c in cpos:
                out[(rpos[r], cpos[c])] = v
        return IntMatrix._trusted(len(row_index), len(col_index), out)

    def apply(self, vector):
        """Multiply a sparse vector {col: value}; returns {row: value}."""
        out = {}
        cols = self.columns()
        for c, x in vector.items():
            for r, v in cols[c].items():
                out[r] = out.get(r, 0) + v * x
        return {r: v for r, v in out.items() if v}

    def reduce(self, p):
        return FpMatrix(p, self.rows, self.cols, self.mod(p).triplets())


class FpMatrix:
    """
    Sparse matrix over the prime field F_p, entries in [1, p-1].
    """
    __slots__ = ("prime", "rows", "cols", "_entries")

    def __init__(self, prime: int, rows: int, cols: int, entries: Iterable = ()):
        if not sympy.isprime(prime):
            raise InvalidInput(f"{prime} is not prime")
        self.prime = prime
        self.rows = rows
        self.cols = cols
        stored = {}
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ShapeMismatch(f"entry ({r}, {c}) outside {rows}x{cols}")
            if (r, c) in stored:
                raise ShapeMismatch(f"duplicate entry ({r}, {c})")
            v %= prime
            if v:
                stored[(r, c)] = v
        self._entries = stored

    @classmethod
    def identity(cls, p, n):
        return cls(p, n, n, [(i, i, 1) for i in range(n)])

    @classmethod
    def from_dense(cls, p, rows_list):
        ncols = len(rows_list[0]) if rows_list else 0
        return cls(p, len(rows_list), ncols,
                   [(r, c, v) for r, row in enumerate(rows_list) for c, v in enumerate(row) if v % p])

    def triplets(self):
        return sorted((r, c, v) for (r, c), v in self._entries.items())

    def row_dicts(self):
        rows = [dict() for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            rows[r][c] = v
        return rows

    def col_dicts(self):
        cols = [dict() for _ in range(self.cols)]
        for (r, c), v in self._entries.items():
            cols[c][r] = v
        return cols

    def __repr__(self):
        return f"FpMatrix(p={self.prime}, {self.rows}x{self.cols}, nnz={len(self._entries)})"


@dataclass(frozen=True)
class SNFResult:
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self):
        n = min(self.S.rows, self.S.cols)
        return [self.S[i, i] for i in range(n)]

    @property
    def invariants(self):
        return [d for d in self.diagonal if d]


@dataclass(frozen=True)
class FGAbelianGroup:
    """
    Finitely generated abelian group Z^free_rank + Z/m_1 + ... with m_1 | m_2 | ...
    """
    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(m) for m in self.torsion))
        if self.free_rank < 0:
            raise InvalidInput("negative free rank")
        for i, m in enumerate(self.torsion):
            if m < 2:
                raise InvalidInput(f"invariant factor {m} < 2")
            if i and m % self.torsion[i - 1]:
                raise InvalidInput(f"invariant factors {self.torsion} break the divisibility chain")

    @classmethod
    def from_cyclic(cls, orders):
        """Canonical form of a direct sum of cyclic groups (0 stands for Z)."""
        free = sum(1 for m in orders if m == 0)
        finite = [abs(m) for m in orders if abs(m) > 1]
        if not finite:
            return cls(free, ())
        diag = IntMatrix._trusted(len(finite), len(finite), {(i, i): m for i, m in enumerate(finite)})
        return cls(free, tuple(d for d in invariant_factors(diag) if d > 1))

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text == "0":
            return cls()
        orders = []
        for term in text.split("+"):
            term = term.strip()
            if term == "Z":
                orders.append(0)
            elif term.startswith("Z/") and term[2:].isdigit():
                orders.append(int(term[2:]))
            else:
                raise InvalidInput(f"cannot parse group term '{term}'")
        return cls.from_cyclic(orders)

    def direct_sum(self, other):
        return FGAbelianGroup.from_cyclic([0] * (self.free_rank + other.free_rank)
                                          + list(self.torsion) + list(other.torsion))

    def cyclic_factors(self):
        return [0] * self.free_rank + list(self.torsion)

    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self):
        """Number of elements, None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for m in self.torsion:
            n *= m
        return n

    def dimension(self):
        """Number of cyclic summands; the F_p-dimension of an elementary abelian p-group."""
        return self.free_rank + len(self.torsion)

    def __str__(self):
        terms = ["Z"] * self.free_rank + [f"Z/{m}" for m in self.torsion]
        return " + ".join(terms) if terms else "0"


########
# Smith normal form
########
def _pivot(A, t, rows, cols):
    best = None
    for i in rows:
        row = A[i]
        for j in cols:
            v = row[j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
    return best


def _snf_dense(A, n, track):
    m = len(A)
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        if track:
            U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in A:
            row[dst] += k * row[src]
        if track:
            for row in V:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        # global pivot: minimal |entry|, ties by lowest (row, col)
        best = _pivot(A, t, range(t, m), range(t, n))
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
            rest = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, i, j = min(rest)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            if track:
                U[t] = [-a for a in U[t]]
    return A, U, V


def snf(A: IntMatrix) -> SNFResult:
    """
    Smith normal form U·A·V = S with unimodular U, V and diagonal d_1 | d_2 | ...
    """
    dense = A.to_dense()
    S, U, V = _snf_dense(dense, A.cols, track=True)
    if A.rows == 0:
        S = []
    return SNFResult(U=IntMatrix.from_dense(U, cols=A.rows),
                     S=IntMatrix.from_dense(S, cols=A.cols),
                     V=IntMatrix.from_dense(V, cols=A.cols))


def invariant_factors(A: IntMatrix):
    """Nonzero diagonal of the Smith form, without tracking the transforms."""
    if A.is_zero():
        return []
    # drop empty rows and columns, they do not change the invariants
    used_rows = sorted({r for r, _, _ in A.triplets()})
    used_cols = sorted({c for _, c, _ in A.triplets()})
    dense = A.submatrix(used_rows, used_cols).to_dense()
    S, _, _ = _snf_dense(dense, len(used_cols), track=False)
    return [S[i][i] for i in range(min(len(used_rows), len(used_cols))) if S[i][i]]


def rank_z(A: IntMatrix):
    return len(invariant_factors(A))


def _check_composable(d_in, d_out):
    if d_out.cols != d_in.rows:
        raise ShapeMismatch(f"differentials {d_out.shape} and {d_in.shape} are not composable")


def homology_z(d_in: IntMatrix, d_out: IntMatrix) -> FGAbelianGroup:
    """ker(d_out) / im(d_in) over the integers."""
    _check_composable(d_in, d_out)
    if not (d_out @ d_in).is_zero():
        raise CompositionNotZero("d_out · d_in is not zero")
    rank_out = rank_z(d_out)
    inv_in = invariant_factors(d_in)
    free = d_in.rows - rank_out - len(inv_in)
    return FGAbelianGroup.from_cyclic([0] * free + [d for d in inv_in if d > 1])


def homology_mod(d_in: IntMatrix, d_out: IntMatrix, m: int) -> FGAbelianGroup:
    """
    Homology of the complex reduced mod m.

    Cycles are the lattice K = {x : d_out·x ≡ 0 mod m}, read off the kernel of
    [d_out | m·I]; boundaries are the lattice spanned by [d_in | m·I]. The
    result is K / boundaries, expressed in a basis of K.
    """
    if m < 2:
        raise InvalidInput(f"modulus {m} < 2")
    _check_composable(d_in, d_out)
    if not (d_out @ d_in).mod(m).is_zero():
        raise CompositionNotZero(f"d_out · d_in is not zero mod {m}")
    n = d_in.rows
    k = d_out.rows

    cycles = snf(d_out.hstack(IntMatrix.identity(k).scale(m)))
    rank = len(cycles.invariants)
    V = cycles.V.to_dense()
    # the projection of ker [d_out | mI] to the first n coordinates is injective
    kernel_cols = list(range(rank, n + k))
    K = IntMatrix.from_dense([[V[r][c] for c in kernel_cols] for r in range(n)], cols=len(kernel_cols))

    boundaries = d_in.hstack(IntMatrix.identity(n).scale(m))
    if n == 0:
        return FGAbelianGroup()

    # solve K·C = boundaries through the Smith form of K
    ks = snf(K)
    W = (ks.U @ boundaries).to_dense()
    diag = ks.diagonal
    for r in range(n):
        for c in range(len(W[r])):
            q, rem = divmod(W[r][c], diag[r])
            if rem:
                raise ArithmeticError("boundary lattice not contained in cycle lattice")
            W[r][c] = q
    C = ks.V @ IntMatrix.from_dense(W, cols=boundaries.cols)
    inv = invariant_factors(C)
    return FGAbelianGroup.from_cyclic([0] * (n - len(inv)) + [d for d in inv if d > 1])


########
# Prime field elimination
########
def _rank_gf2(rows):
    basis = {}
    for bits in rows:
        while bits:
            top = bits.bit_length() - 1
            if top in basis:
                bits ^= basis[top]
            else:
                basis[top] = bits
                break
    return len(basis)


def _reduce_fp(vector, pivots, p):
    """Reduce a sparse vector against normalized pivot rows; returns the remainder."""
    v = dict(vector)
    while v:
        c = min(v)
        if c not in pivots:
            return v
        factor = v[c]
        for j, w in pivots[c].items():
            x = (v.get(j, 0) - factor * w) % p
            if x:
                v[j] = x
            else:
                v.pop(j, None)
    return v


def rank_fp(A: FpMatrix) -> int:
    """Rank over F_p by sparse elimination along the shorter dimension."""
    p = A.prime
    lines = A.row_dicts() if A.rows <= A.cols else A.col_dicts()
    if p == 2:
        return _rank_gf2([sum(1 << j for j in line) for line in lines])
    pivots = {}
    for line in lines:
        v = _reduce_fp(line, pivots, p)
        if v:
            c = min(v)
            inv = pow(v[c], -1, p)
            pivots[c] = {j: (w * inv) % p for j, w in v.items()}
    return len(pivots)


def kernel_fp(A: FpMatrix):
    """
    Basis of the right kernel of A over F_p as sparse vectors, one per free
    column in increasing order.
    """
    p = A.prime
    pivots = {}
    for line in A.row_dicts():
        v = _reduce_fp(line, pivots, p)
        if v:
            c = min(v)
            inv = pow(v[c], -1, p)
            pivots[c] = {j: (w * inv) % p for j, w in v.items()}
    # back substitution to reduced row echelon form
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for other in pivots:
            if other != c and c in pivots[other]:
                factor = pivots[other][c]
                merged = dict(pivots[other])
                for j, w in row.items():
                    x = (merged.get(j, 0) - factor * w) % p
                    if x:
                        merged[j] = x
                    else:
                        merged.pop(j, None)
                pivots[other] = merged
    basis = []
    for f in range(A.cols):
        if f in pivots:
            continue
        vec = {f: 1}
        for c, row in pivots.items():
            if f in row:
                vec[c] = (-row[f]) % p
        basis.append(vec)
    return basis


def homology_dims_fp(d_in: IntMatrix, d_out: IntMatrix, p: int) -> int:
    """dim ker(d_out) - rank(d_in) over F_p."""
    _check_composable(d_in, d_out)
    return d_in.rows - rank_fp(d_out.reduce(p)) - rank_fp(d_in.reduce(p))


class FpEchelon:
    """
    Incremental echelon basis over F_p whose rows carry tag vectors, so that a
    vector in the span can be written back in terms of tagged generators.
    """

    def __init__(self, p):
        self.p = p
        self.rows = {}

    def _reduce(self, vector, tag):
        p = self.p
        v = {j: x % p for j, x in vector.items() if x % p}
        tag = dict(tag)
        while v:
            c = min(v)
            if c not in self.rows:
                break
            row, row_tag = self.rows[c]
            factor = v[c]
            for j, w in row.items():
                x = (v.get(j, 0) - factor * w) % p
                if x:
                    v[j] = x
                else:
                    v.pop(j, None)
            for j, w in row_tag.items():
                x = (tag.get(j, 0) - factor * w) % p
                if x:
                    tag[j] = x
                else:
                    tag.pop(j, None)
        return v, tag

    def insert(self, vector, tag=None):
        """Add a vector; returns False when it was already in the span."""
        v, t = self._reduce(vector, tag or {})
        if not v:
            return False
        c = min(v)
        inv = pow(v[c], -1, self.p)
        self.rows[c] = ({j: (w * inv) % self.p for j, w in v.items()},
                        {j: (w * inv) % self.p for j, w in t.items()})
        return True

    def contains(self, vector):
        v, _ = self._reduce(vector, {})
        return not v

    def express(self, vector):
        """
        Tag coordinates of a vector in the span: v = Σ coeff·(tagged generator)
        modulo untagged rows. Raises ValueError when v is outside the span.
        """
        v, t = self._reduce(vector, {})
        if v:
            raise ValueError("vector outside the span")
        return {j: (-w) % self.p for j, w in t.items() if w % self.p}
