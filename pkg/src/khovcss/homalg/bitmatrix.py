"""Dense bit-packed matrices over GF(2)."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatch
from . import _kernels as K


def _nwords(ncols: int) -> int:
    return max(1, (ncols + 63) >> 6)


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array of shape (rows, cols) into uint64 words."""
    dense = np.asarray(dense, dtype=np.uint8) & 1
    if dense.ndim != 2:
        raise DimensionMismatch("expected a 2-d array")
    rows, cols = dense.shape
    if rows == 0:
        return np.zeros((0, _nwords(cols)), dtype=np.uint64)
    nbytes = _nwords(cols) * 8
    packed = np.packbits(dense, axis=1, bitorder="little")
    out = np.zeros((rows, nbytes), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8").astype(np.uint64, copy=False).reshape(rows, -1)


def unpack_rows(data: np.ndarray, ncols: int) -> np.ndarray:
    rows = data.shape[0]
    if rows == 0:
        return np.zeros((0, ncols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(data).view(np.uint8).reshape(rows, -1)
    return np.unpackbits(as_bytes, axis=1, count=ncols, bitorder="little")


def pack_vector(v: Sequence[int] | np.ndarray) -> np.ndarray:
    return pack_rows(np.asarray(v, dtype=np.uint8).reshape(1, -1))[0]


class BitMatrix:
    """A GF(2) matrix stored as packed rows.

    Parameters
    ----------
    data : ndarray of uint64, shape (rows, words)
        Packed rows. Bits beyond ``cols`` must be zero.
    cols : int
        Number of columns.
    """

    __slots__ = ("data", "cols")

    def __init__(self, data: np.ndarray, cols: int):
        data = np.ascontiguousarray(data, dtype=np.uint64)
        if data.ndim != 2 or data.shape[1] != _nwords(cols):
            raise DimensionMismatch(
                f"packed data of shape {data.shape} does not hold {cols} columns"
            )
        self.data = data
        self.cols = int(cols)

    # construction -----------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, _nwords(cols)), dtype=np.uint64), cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.asarray(dense, dtype=np.uint8)
        if dense.ndim == 1:
            dense = dense.reshape(1, -1)
        return cls(pack_rows(dense), dense.shape[1])

    @classmethod
    def from_sparse(cls, m: sp.spmatrix) -> "BitMatrix":
        m = sp.csr_matrix(m)
        rows, cols = m.shape
        out = np.zeros((rows, _nwords(cols)), dtype=np.uint64)
        coo = m.tocoo()
        keep = (coo.data.astype(np.int64) & 1).astype(bool)
        r, c = coo.row[keep], coo.col[keep]
        if r.size:
            words = c >> 6
            bits = np.left_shift(np.uint64(1), (c & 63).astype(np.uint64))
            # duplicates cancel mod 2
            np.bitwise_xor.at(out, (r, words), bits)
        return cls(out, cols)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int) -> "BitMatrix":
        """Build from per-row column index lists (repeated indices cancel)."""
        rows = list(rows)
        out = np.zeros((len(rows), _nwords(cols)), dtype=np.uint64)
        for i, idx in enumerate(rows):
            for j in idx:
                if not 0 <= j < cols:
                    raise DimensionMismatch(f"column index {j} out of range")
                out[i, j >> 6] ^= np.uint64(1) << np.uint64(j & 63)
        return cls(out, cols)

    # views ------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.data, self.cols)

    def to_sparse(self) -> sp.csr_matrix:
        dense = self.to_dense()
        return sp.csr_matrix(dense, dtype=np.uint8)

    def row_support(self, i: int) -> list[int]:
        return np.flatnonzero(unpack_rows(self.data[i : i + 1], self.cols)[0]).tolist()

    def row_lists(self) -> list[list[int]]:
        dense = self.to_dense()
        return [np.flatnonzero(row).tolist() for row in dense]

    def row_weights(self) -> np.ndarray:
        return K.popcount_rows(self.data)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0, dtype=np.int64)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.data.copy(), self.cols)

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        return BitMatrix(K.matmul(self.data, other.data, other.data.shape[1]), other.cols)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return BitMatrix(self.data ^ other.data, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))

    def is_zero(self) -> bool:
        return not self.data.any()

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.cols:
            raise DimensionMismatch("column counts differ")
        return BitMatrix(np.vstack([self.data, other.data]), self.cols)

    def permute_columns(self, perm: Sequence[int]) -> "BitMatrix":
        """Column ``j`` of the result is column ``perm[j]`` of ``self``."""
        return BitMatrix.from_dense(self.to_dense()[:, np.asarray(perm, dtype=np.int64)])


def rref(m: BitMatrix) -> tuple[BitMatrix, np.ndarray]:
    """Reduced row echelon form and pivot columns; zero rows are dropped."""
    work = m.data.copy()
    pivots = K.rref_inplace(work, m.cols, True)
    return BitMatrix(work[: len(pivots)].copy(), m.cols), pivots


def rank(m: BitMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    work = m.data.copy()
    return int(len(K.rref_inplace(work, m.cols, False)))


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Basis of {x : m x = 0}, as rows of a matrix in reduced echelon form."""
    if m.cols == 0:
        return BitMatrix.zeros(0, 0)
    red, pivots = rref(m)
    ker = K.kernel_from_rref(red.data, pivots, m.cols)
    out, _ = rref(BitMatrix(ker, m.cols))
    return out


def rowspace_basis(m: BitMatrix) -> BitMatrix:
    return rref(m)[0]


def in_rowspace(m: BitMatrix, v) -> bool:
    v = np.asarray(v)
    if v.dtype != np.uint64:
        if v.shape[-1] != m.cols:
            raise DimensionMismatch(f"vector of length {v.shape[-1]} vs {m.cols} columns")
        v = pack_vector(v)
    red, pivots = rref(m)
    work = v.reshape(1, -1).copy()
    K.reduce_by_rref(red.data, pivots, work)
    return not work.any()


def complement_basis(sub: BitMatrix, space: BitMatrix) -> BitMatrix:
    """Rows of ``space`` extending a basis of rowspace(``sub``) to rowspace(``space``).

    Deterministic: candidates are scanned in row order of the reduced ``space``.
    """
    red, pivots = rref(sub)
    chosen = []
    basis = red.data.copy()
    piv = list(pivots)
    for row in rref(space)[0].data:
        work = row.reshape(1, -1).copy()
        K.reduce_by_rref(basis, np.asarray(piv, dtype=np.int64), work)
        if work.any():
            chosen.append(row)
            merged = BitMatrix(np.vstack([basis, row.reshape(1, -1)]), sub.cols)
            red2, piv2 = rref(merged)
            basis, piv = red2.data, list(piv2)
    if not chosen:
        return BitMatrix.zeros(0, sub.cols)
    return BitMatrix(np.vstack(chosen), sub.cols)
