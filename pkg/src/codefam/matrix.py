"""
Dense linear algebra over finite fields.

Matrices are numpy int64 arrays of field-element encodings paired with a
FieldSpec.  Everything here is exact; there is no floating point anywhere.

Two performance paths:
  * GF(2): rows are packed into Python ints (arbitrary-precision bitmasks)
    and elimination works with XOR on whole rows at once.
  * general q: vectorized elimination, clearing a whole pivot column per
    step with one table-lookup broadcast.
"""

from __future__ import annotations

import numpy as np

from codefam.gf import FieldSpec


class NoSolution:
    """Sentinel: the linear system is inconsistent."""

    def __repr__(self):
        return "NO_SOLUTION"


class Underdetermined:
    """Sentinel: the system is consistent but the solution is not unique."""

    def __repr__(self):
        return "UNDERDETERMINED"


NO_SOLUTION = NoSolution()
UNDERDETERMINED = Underdetermined()


def as_matrix(spec: FieldSpec, rows) -> np.ndarray:
    a = np.asarray(rows, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if a.size and (a.min() < 0 or a.max() >= spec.q):
        raise ValueError("entry out of field range")
    return a


def pack_rows(a: np.ndarray) -> list[int]:
    """Pack GF(2) rows into ints; bit j of the int is column j."""
    out = []
    for row in a:
        v = 0
        for j in range(len(row) - 1, -1, -1):
            v = (v << 1) | int(row[j])
        out.append(v)
    return out


def rank_packed(rows: list[int]) -> int:
    """Rank of bit-packed GF(2) rows.  Destroys nothing; copies the list."""
    pivots: list[int] = []
    r = 0
    for row in rows:
        for piv in pivots:
            low = piv & -piv
            if row & low:
                row ^= piv
        if row:
            pivots.append(row)
            r += 1
    return r


def _eliminate(spec: FieldSpec, a: np.ndarray):
    """Row-reduce a copy of `a` to row echelon form.

    Returns (echelon matrix, pivot column list).  Rows below the last
    pivot are zero.
    """
    m = a.copy()
    nrows, ncols = m.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        col = m[r:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        inv = spec.inv(int(m[r, c]))
        m[r] = spec.mul(m[r], inv)
        below = m[r + 1:, c]
        rows_nz = np.nonzero(below)[0]
        if len(rows_nz):
            factors = below[rows_nz]
            update = spec.mul(factors[:, None], m[r][None, :])
            m[r + 1 + rows_nz] = spec.sub(m[r + 1 + rows_nz], update)
        pivots.append(c)
        r += 1
    return m, pivots


def rank(spec: FieldSpec, a) -> int:
    a = as_matrix(spec, a)
    if a.shape[0] == 0 or a.shape[1] == 0:
        return 0
    if spec.p == 2 and spec.m == 1:
        return rank_packed(pack_rows(a))
    _, pivots = _eliminate(spec, a)
    return len(pivots)


def select(a, rows=None, cols=None) -> np.ndarray:
    """Submatrix by row/column index lists (order preserved)."""
    a = np.asarray(a, dtype=np.int64)
    if rows is not None:
        a = a[np.asarray(rows, dtype=np.int64)]
    if cols is not None:
        a = a[:, np.asarray(cols, dtype=np.int64)]
    return a


def matmul(spec: FieldSpec, a, b) -> np.ndarray:
    a = as_matrix(spec, a)
    b = as_matrix(spec, b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        colk = a[:, k]
        nz = np.nonzero(colk)[0]
        if len(nz) == 0:
            continue
        term = spec.mul(colk[nz][:, None], b[k][None, :])
        out[nz] = spec.add(out[nz], term)
    return out


def matvec(spec: FieldSpec, a, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    return matmul(spec, a, x[:, None])[:, 0]


def solve(spec: FieldSpec, a, b):
    """Solve a @ x = b.

    Returns the unique solution vector, NO_SOLUTION if inconsistent, or
    UNDERDETERMINED if many solutions exist.
    """
    a = as_matrix(spec, a)
    b = np.asarray(b, dtype=np.int64)
    if b.ndim != 1 or b.shape[0] != a.shape[0]:
        raise ValueError("right-hand side shape mismatch")
    aug = np.concatenate([a, b[:, None]], axis=1)
    ech, pivots = _eliminate(spec, aug)
    ncols = a.shape[1]
    if pivots and pivots[-1] == ncols:
        return NO_SOLUTION
    if len(pivots) < ncols:
        return UNDERDETERMINED
    # back substitution on the echelon form
    x = np.zeros(ncols, dtype=np.int64)
    for r in range(ncols - 1, -1, -1):
        c = pivots[r]
        acc = int(ech[r, ncols])
        row = ech[r, c + 1: ncols]
        nz = np.nonzero(row)[0]
        if len(nz):
            dots = spec.mul(row[nz], x[c + 1 + nz])
            for d in np.atleast_1d(dots):
                acc = spec.sub(acc, int(d))
        x[c] = acc
    return x


def kernel_basis(spec: FieldSpec, a) -> np.ndarray:
    """Basis (rows) of the right null space {x : a @ x = 0}."""
    a = as_matrix(spec, a)
    ncols = a.shape[1]
    ech, pivots = _eliminate(spec, a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for bi, fc in enumerate(free):
        x = basis[bi]
        x[fc] = 1
        # pivots in increasing column order; solve bottom-up
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            acc = 0
            row = ech[r, c + 1:]
            nz = np.nonzero(row)[0]
            for off in nz:
                acc = spec.add(acc, spec.mul(int(row[off]), int(x[c + 1 + off])))
            x[c] = spec.neg(acc)
    return basis


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)
