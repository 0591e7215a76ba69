"""Dense exact linear algebra: rank, kernel, row-space membership, intersections.

Elimination uses the deterministic first-nonzero pivot rule (scan columns left
to right, take the first remaining row with a nonzero entry) and produces the
reduced row echelon form, so bases and pivot sequences are reproducible and
row spaces have a canonical representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from .fields import Field, Scalar

Vector = Tuple[Scalar, ...]


class LinAlgError(ValueError):
    pass


@dataclass(frozen=True)
class Matrix:
    """Immutable rectangular matrix over an exact field.

    ncols is stored explicitly so 0-row matrices keep their shape.
    """

    field: Field
    rows: Tuple[Vector, ...]
    ncols: int

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence[Scalar]], ncols=None) -> "Matrix":
        rows = tuple(tuple(r) for r in rows)
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise LinAlgError("ragged rows")
        elif ncols is None:
            raise LinAlgError("ncols required for an empty matrix")
        return cls(field, rows, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def stack(self, other: "Matrix") -> "Matrix":
        if other.ncols != self.ncols:
            raise LinAlgError("column count mismatch")
        return Matrix(self.field, self.rows + other.rows, self.ncols)

    def with_row(self, v: Sequence[Scalar]) -> "Matrix":
        v = tuple(v)
        if len(v) != self.ncols:
            raise LinAlgError("row length mismatch")
        return Matrix(self.field, self.rows + (v,), self.ncols)


@dataclass(frozen=True)
class RankProfile:
    rank: int
    pivots: Tuple[int, ...]
    kernel: Tuple[Vector, ...]
    rref: Tuple[Vector, ...]  # nonzero rows only; canonical for the row space


def _rref(field: Field, rows):
    """In-place RREF on a list of row lists; returns pivot column list."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        sel = None
        for i in range(r, nrows):
            if not field.is_zero(rows[i][c]):
                sel = i
                break
        if sel is None:
            continue
        if sel != r:
            rows[r], rows[sel] = rows[sel], rows[r]
        piv_inv = field.inv(rows[r][c])
        rows[r] = [field.mul(piv_inv, x) for x in rows[r]]
        for i in range(nrows):
            if i != r and not field.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def rank_profile(M: Matrix) -> RankProfile:
    """Rank, pivot columns and a right-kernel basis of M.

    rank + len(kernel) == ncols always holds; the kernel basis is the standard
    one read off the RREF (one vector per free column, unit in that column).
    """
    K = M.field
    rows = [list(r) for r in M.rows]
    pivots = _rref(K, rows)
    rank = len(pivots)
    rref = tuple(tuple(r) for r in rows[:rank])
    pivot_set = set(pivots)
    kernel = []
    for free in range(M.ncols):
        if free in pivot_set:
            continue
        v = [K.zero] * M.ncols
        v[free] = K.one
        for i, pc in enumerate(pivots):
            v[pc] = K.neg(rref[i][free])
        kernel.append(tuple(v))
    return RankProfile(rank, tuple(pivots), tuple(kernel), rref)


def reduce_against(field: Field, rref_rows, pivots, v) -> Vector:
    """Residual of v after elimination by RREF rows (pivot entries are 1)."""
    v = list(v)
    for row, c in zip(rref_rows, pivots):
        f = v[c]
        if not field.is_zero(f):
            v = [field.sub(x, field.mul(f, y)) for x, y in zip(v, row)]
    return tuple(v)


def in_row_space(M: Matrix, v: Sequence[Scalar]) -> bool:
    if len(v) != M.ncols:
        raise LinAlgError("vector length mismatch")
    prof = rank_profile(M)
    res = reduce_against(M.field, prof.rref, prof.pivots, v)
    return all(M.field.is_zero(x) for x in res)


def row_space_intersection(A: Matrix, B: Matrix) -> Tuple[Vector, ...]:
    """Basis of rowspace(A) /\\ rowspace(B) by the Zassenhaus block trick.

    Reduce [[A A], [B 0]]; rows whose left half vanished carry intersection
    vectors in their right half. Deterministic elimination makes the returned
    basis reproducible, and its size satisfies the Grassmann formula.
    """
    if A.ncols != B.ncols:
        raise LinAlgError("column count mismatch")
    K = A.field
    n = A.ncols
    zero = [K.zero] * n
    block = [list(r) + list(r) for r in A.rows] + [list(r) + zero for r in B.rows]
    if not block:
        return ()
    _rref(K, block)
    basis = []
    for row in block:
        left, right = row[:n], row[n:]
        if all(K.is_zero(x) for x in left) and not all(K.is_zero(x) for x in right):
            basis.append(tuple(right))
    return tuple(basis)


def row_spaces_equal(A: Matrix, B: Matrix) -> bool:
    """Exact row-space equality via the canonical RREF representative."""
    if A.ncols != B.ncols:
        raise LinAlgError("column count mismatch")
    return rank_profile(A).rref == rank_profile(B).rref
