"""Compressed sparse row matrices.

Only what the feature pipeline and the classifiers need: construction,
horizontal stacking, row normalization and a few products.  Instances are
treated as immutable; every operation returns a new matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


class ShapeError(ValueError):
    pass


@njit(cache=True, nogil=True)
def _csr_dot(offsets, cols, vals, w):
    n = offsets.shape[0] - 1
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for k in range(offsets[i], offsets[i + 1]):
            acc += vals[k] * w[cols[k]]
        out[i] = acc
    return out


@njit(cache=True, nogil=True)
def _csr_tdot(offsets, cols, vals, v, n_cols):
    out = np.zeros(n_cols)
    for i in range(offsets.shape[0] - 1):
        vi = v[i]
        if vi == 0.0:
            continue
        for k in range(offsets[i], offsets[i + 1]):
            out[cols[k]] += vals[k] * vi
    return out


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row_offsets", np.asarray(self.row_offsets, dtype=np.int64))
        object.__setattr__(self, "col_indices", np.asarray(self.col_indices, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if len(self.row_offsets) != self.n_rows + 1:
            raise ShapeError("row_offsets must have n_rows + 1 entries")
        if len(self.col_indices) != len(self.values):
            raise ShapeError("col_indices and values differ in length")
        if self.row_offsets[0] != 0 or self.row_offsets[-1] != len(self.values):
            raise ShapeError("row_offsets must start at 0 and end at nnz")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return len(self.values)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Column indices and values stored in row ``i``."""
        if not 0 <= i < self.n_rows:
            raise IndexError(f"row {i} out of range for {self.n_rows} rows")
        lo, hi = self.row_offsets[i], self.row_offsets[i + 1]
        return self.col_indices[lo:hi], self.values[lo:hi]

    def row_ids(self) -> np.ndarray:
        """Row index of every stored entry."""
        return np.repeat(np.arange(self.n_rows), np.diff(self.row_offsets))

    def check(self) -> None:
        """Raise ShapeError if the structural invariants do not hold."""
        if np.any(np.diff(self.row_offsets) < 0):
            raise ShapeError("row_offsets must be non-decreasing")
        if self.nnz:
            if self.col_indices.min() < 0 or self.col_indices.max() >= self.n_cols:
                raise ShapeError("column index out of range")
            same_row = np.diff(self.row_ids()) == 0
            if np.any(np.diff(self.col_indices)[same_row] <= 0):
                raise ShapeError("column indices must increase within each row")

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.row_ids(), self.col_indices] = self.values
        return out

    def take_rows(self, rows) -> "CsrMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        starts = self.row_offsets[rows]
        lengths = self.row_offsets[rows + 1] - starts
        offsets = np.concatenate([[0], np.cumsum(lengths)])
        # gather index: for each output slot, the source position
        src = np.repeat(starts - offsets[:-1], lengths) + np.arange(offsets[-1])
        return CsrMatrix(len(rows), self.n_cols, offsets,
                         self.col_indices[src], self.values[src])

    def dot(self, w: np.ndarray) -> np.ndarray:
        """Matrix-vector product ``X @ w``."""
        w = np.asarray(w, dtype=np.float64)
        if w.shape[0] != self.n_cols:
            raise ShapeError(f"vector length {w.shape[0]} != n_cols {self.n_cols}")
        return _csr_dot(self.row_offsets, self.col_indices, self.values, w)

    def tdot(self, v: np.ndarray) -> np.ndarray:
        """Transposed product ``X.T @ v``."""
        v = np.asarray(v, dtype=np.float64)
        if v.shape[0] != self.n_rows:
            raise ShapeError(f"vector length {v.shape[0]} != n_rows {self.n_rows}")
        return _csr_tdot(self.row_offsets, self.col_indices, self.values, v, self.n_cols)

    def column_sums(self, row_weights: np.ndarray | None = None) -> np.ndarray:
        vals = self.values if row_weights is None else self.values * row_weights[self.row_ids()]
        return np.bincount(self.col_indices, weights=vals, minlength=self.n_cols)

    def to_csc(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Column-major view as (col_offsets, row_indices, values), rows sorted per column."""
        order = np.lexsort((self.row_ids(), self.col_indices))
        counts = np.bincount(self.col_indices, minlength=self.n_cols)
        offsets = np.concatenate([[0], np.cumsum(counts)])
        return offsets, self.row_ids()[order], self.values[order]


def from_dense(d) -> CsrMatrix:
    """Build a CsrMatrix from a 2-D array; zeros are not stored."""
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2:
        raise ShapeError("expected a 2-D array")
    rows, cols = np.nonzero(d)
    counts = np.bincount(rows, minlength=d.shape[0])
    offsets = np.concatenate([[0], np.cumsum(counts)])
    return CsrMatrix(d.shape[0], d.shape[1], offsets, cols, d[rows, cols])


to_csr = from_dense


def from_rows(rows, n_cols: int) -> CsrMatrix:
    """Build from a sequence of ``{col: value}`` dicts, one per row.

    Zero values are dropped and columns are sorted within each row.
    """
    offsets = [0]
    cols: list[int] = []
    vals: list[float] = []
    for row in rows:
        for c in sorted(row):
            v = row[c]
            if v != 0:
                cols.append(c)
                vals.append(v)
        offsets.append(len(cols))
    return CsrMatrix(len(offsets) - 1, n_cols, offsets, cols, vals)


def hstack(blocks) -> CsrMatrix:
    """Concatenate matrices side by side."""
    blocks = list(blocks)
    if not blocks:
        raise ShapeError("hstack needs at least one block")
    n_rows = blocks[0].n_rows
    if any(b.n_rows != n_rows for b in blocks):
        raise ShapeError("all blocks must have the same number of rows")
    if len(blocks) == 1:
        return blocks[0]

    widths = np.array([b.n_cols for b in blocks])
    col_base = np.concatenate([[0], np.cumsum(widths)[:-1]])
    # sort key: row first, then block, then position within the block row
    rows = np.concatenate([b.row_ids() for b in blocks])
    cols = np.concatenate([b.col_indices + base for b, base in zip(blocks, col_base)])
    vals = np.concatenate([b.values for b in blocks])
    order = np.lexsort((cols, rows))
    counts = sum(np.diff(b.row_offsets) for b in blocks)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    return CsrMatrix(n_rows, int(widths.sum()), offsets, cols[order], vals[order])


def hsplit(m: CsrMatrix, widths) -> list[CsrMatrix]:
    """Inverse of hstack for the given block widths."""
    widths = list(widths)
    if sum(widths) != m.n_cols:
        raise ShapeError("widths must sum to n_cols")
    row_ids = m.row_ids()
    out = []
    lo = 0
    for w in widths:
        keep = (m.col_indices >= lo) & (m.col_indices < lo + w)
        counts = np.bincount(row_ids[keep], minlength=m.n_rows)
        offsets = np.concatenate([[0], np.cumsum(counts)])
        out.append(CsrMatrix(m.n_rows, w, offsets, m.col_indices[keep] - lo, m.values[keep]))
        lo += w
    return out


def l2_normalize_rows(m: CsrMatrix) -> CsrMatrix:
    """Scale each nonzero row to unit Euclidean norm; zero rows stay zero."""
    sq = np.zeros(m.n_rows)
    np.add.at(sq, m.row_ids(), m.values ** 2)
    norms = np.sqrt(sq)
    norms[norms == 0] = 1.0
    return CsrMatrix(m.n_rows, m.n_cols, m.row_offsets, m.col_indices,
                     m.values / norms[m.row_ids()])


def row_dot_dense(m: CsrMatrix, row: int, w) -> float:
    w = np.asarray(w, dtype=np.float64)
    if w.shape[0] != m.n_cols:
        raise ShapeError(f"vector length {w.shape[0]} != n_cols {m.n_cols}")
    cols, vals = m.row(row)
    return float(np.dot(vals, w[cols]))
