"""Cochain complexes over GF(2) with sparse differentials."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatch, IntegrityError, PreconditionError
from .bitmatrix import BitMatrix, kernel_basis, rank, rref


def mod2(m) -> sp.csr_matrix:
    """Reduce a sparse integer matrix mod 2 and store it as uint8 CSR."""
    m = sp.csr_matrix(m)
    m.data = (m.data.astype(np.int64) & 1).astype(np.uint8)
    m.eliminate_zeros()
    m.sort_indices()
    return m


def spmul2(a, b) -> sp.csr_matrix:
    a = sp.csr_matrix(a, dtype=np.int64)
    b = sp.csr_matrix(b, dtype=np.int64)
    return mod2(a @ b)


def zero_map(rows: int, cols: int) -> sp.csr_matrix:
    return sp.csr_matrix((rows, cols), dtype=np.uint8)


def sparse_equal(a, b) -> bool:
    if a.shape != b.shape:
        return False
    return mod2(sp.csr_matrix(a, dtype=np.int64) + sp.csr_matrix(b, dtype=np.int64)).nnz == 0


@dataclass
class HomologySummary:
    """Per-degree dimensions, differential ranks and homology dimensions."""

    min_degree: int
    dims: list[int]
    ranks: list[int]
    homology: list[int]

    @property
    def max_degree(self) -> int:
        return self.min_degree + len(self.dims) - 1

    @property
    def degrees(self) -> range:
        return range(self.min_degree, self.max_degree + 1)

    def kh(self, i: int) -> int:
        j = i - self.min_degree
        return self.homology[j] if 0 <= j < len(self.homology) else 0

    @property
    def euler_chain(self) -> int:
        return sum((-1) ** i * d for i, d in zip(self.degrees, self.dims))

    @property
    def euler(self) -> int:
        return sum((-1) ** i * h for i, h in zip(self.degrees, self.homology))

    def to_dict(self) -> dict:
        return {
            "min_degree": self.min_degree,
            "dims": self.dims,
            "ranks": self.ranks,
            "homology": self.homology,
            "euler": self.euler,
        }


class ChainComplex:
    """Increasing complex ``C^min -> ... -> C^max`` over GF(2).

    ``differentials[i]`` is a sparse matrix of shape ``(dim C^{i+1}, dim C^i)``.
    An optional ``grading`` assigns an integer to every generator; when the
    differential preserves it, ranks are computed block by block.
    ``basis`` is either a mapping degree -> list of descriptors or a callable
    producing that list on demand.
    """

    def __init__(
        self,
        min_degree: int,
        dims: Sequence[int],
        differentials: Mapping[int, sp.spmatrix] | None = None,
        basis: Mapping[int, list] | Callable[[int], list] | None = None,
        grading: Mapping[int, np.ndarray] | None = None,
        name: str = "",
    ):
        self.min_degree = int(min_degree)
        self.dims = [int(d) for d in dims]
        self.name = name
        diffs: dict[int, sp.csr_matrix] = {}
        differentials = differentials or {}
        for i in range(self.min_degree, self.max_degree):
            m = differentials.get(i)
            shape = (self.dim(i + 1), self.dim(i))
            if m is None:
                m = zero_map(*shape)
            m = mod2(m)
            if m.shape != shape:
                raise DimensionMismatch(f"differential {i} has shape {m.shape}, expected {shape}")
            diffs[i] = m
        extra = set(differentials) - set(diffs)
        if any(differentials[i].nnz for i in extra if sp.issparse(differentials[i])):
            raise DimensionMismatch("differential outside the degree range")
        self.differentials = diffs
        self._basis = basis
        self.grading = dict(grading) if grading is not None else None

    # shape ------------------------------------------------------------
    @property
    def max_degree(self) -> int:
        return self.min_degree + len(self.dims) - 1

    @property
    def degrees(self) -> range:
        return range(self.min_degree, self.max_degree + 1)

    def dim(self, i: int) -> int:
        j = i - self.min_degree
        return self.dims[j] if 0 <= j < len(self.dims) else 0

    def d(self, i: int) -> sp.csr_matrix:
        """Differential ``C^i -> C^{i+1}`` (zero outside the stored range)."""
        if i in self.differentials:
            return self.differentials[i]
        return zero_map(self.dim(i + 1), self.dim(i))

    def d_bits(self, i: int) -> BitMatrix:
        return BitMatrix.from_sparse(self.d(i))

    def basis(self, i: int) -> list:
        if self._basis is None:
            return list(range(self.dim(i)))
        if callable(self._basis):
            return self._basis(i)
        return list(self._basis.get(i, []))

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"ChainComplex{label}(degrees {self.min_degree}..{self.max_degree}, dims {self.dims})"

    # checks -----------------------------------------------------------
    def d_squared_zero(self) -> bool:
        for i in range(self.min_degree, self.max_degree - 1):
            if spmul2(self.d(i + 1), self.d(i)).nnz:
                return False
        return True

    def check(self) -> None:
        if not self.d_squared_zero():
            raise IntegrityError("d∘d is not zero")

    def grading_preserved(self) -> bool:
        if self.grading is None:
            return False
        for i in range(self.min_degree, self.max_degree):
            coo = self.d(i).tocoo()
            if np.any(self.grading[i + 1][coo.row] != self.grading[i][coo.col]):
                return False
        return True

    # ranks ------------------------------------------------------------
    def rank_d(self, i: int) -> int:
        m = self.d(i)
        if m.nnz == 0:
            return 0
        if self.grading is None:
            return rank(BitMatrix.from_sparse(m))
        src, dst = self.grading[i], self.grading[i + 1]
        total = 0
        m = m.tocsc()
        for q in np.unique(src):
            cols = np.flatnonzero(src == q)
            rows = np.flatnonzero(dst == q)
            if len(cols) == 0 or len(rows) == 0:
                continue
            block = m[:, cols].tocsr()[rows, :]
            if block.nnz:
                total += rank(BitMatrix.from_sparse(block))
        return total

    def homology_dims(self, check: bool = True) -> HomologySummary:
        if check:
            self.check()
        ranks = [self.rank_d(i) for i in self.degrees]
        homology = []
        for k, i in enumerate(self.degrees):
            prev = ranks[k - 1] if k > 0 else 0
            h = self.dims[k] - ranks[k] - prev
            if h < 0:
                raise IntegrityError(f"negative homology dimension in degree {i}")
            homology.append(h)
        return HomologySummary(self.min_degree, list(self.dims), ranks, homology)


def homology_dims(c: ChainComplex, check: bool = True) -> HomologySummary:
    return c.homology_dims(check=check)


# constructions ---------------------------------------------------------


def point_complex(degree: int = 0) -> ChainComplex:
    """One generator in a single degree, zero differential."""
    return ChainComplex(degree, [1])


def shift(c: ChainComplex, k: int) -> ChainComplex:
    """Same data with every degree raised by ``k``."""
    diffs = {i + k: m for i, m in c.differentials.items()}
    basis = None
    if c._basis is not None:
        basis = lambda i, b=c.basis: b(i - k)  # noqa: E731
    grading = None if c.grading is None else {i + k: g for i, g in c.grading.items()}
    return ChainComplex(c.min_degree + k, c.dims, diffs, basis, grading, c.name)


def tensor(a: ChainComplex, b: ChainComplex) -> ChainComplex:
    """Graded tensor product; degree-k basis lists blocks by the ``a`` degree, pairs lexicographic."""
    lo = a.min_degree + b.min_degree
    hi = a.max_degree + b.max_degree
    # blocks[k] = list of (i, j) with i + j = k and both groups nonzero-sized slots
    blocks: dict[int, list[tuple[int, int]]] = {}
    offsets: dict[tuple[int, int], int] = {}
    dims = []
    for k in range(lo, hi + 1):
        pairs = [(i, k - i) for i in a.degrees if b.min_degree <= k - i <= b.max_degree]
        blocks[k] = pairs
        off = 0
        for p in pairs:
            offsets[p] = off
            off += a.dim(p[0]) * b.dim(p[1])
        dims.append(off)

    diffs = {}
    for k in range(lo, hi):
        rows = dims[k + 1 - lo]
        cols = dims[k - lo]
        parts = []
        for i, j in blocks[k]:
            na, nb = a.dim(i), b.dim(j)
            c0 = offsets[(i, j)]
            if na * nb == 0:
                continue
            if (i + 1, j) in offsets and a.dim(i + 1):
                m = sp.kron(a.d(i), sp.identity(nb, dtype=np.uint8, format="csr"), format="coo")
                parts.append((m, offsets[(i + 1, j)], c0))
            if (i, j + 1) in offsets and b.dim(j + 1):
                m = sp.kron(sp.identity(na, dtype=np.uint8, format="csr"), b.d(j), format="coo")
                parts.append((m, offsets[(i, j + 1)], c0))
        if parts:
            r = np.concatenate([m.row + ro for m, ro, _ in parts])
            c = np.concatenate([m.col + co for m, _, co in parts])
            v = np.concatenate([m.data.astype(np.int64) for m, _, _ in parts])
            diffs[k] = mod2(sp.coo_matrix((v, (r, c)), shape=(rows, cols)))

    def basis(k: int) -> list:
        out = []
        for i, j in blocks.get(k, []):
            ba, bb = a.basis(i), b.basis(j)
            out.extend((x, y) for x in ba for y in bb)
        return out

    grading = None
    if a.grading is not None and b.grading is not None:
        grading = {}
        for k in range(lo, hi + 1):
            parts = [
                np.add.outer(a.grading[i], b.grading[j]).ravel()
                for i, j in blocks[k]
            ]
            grading[k] = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return ChainComplex(lo, dims, diffs, basis, grading, name=f"({a.name})⊗({b.name})")


ChainMap = Mapping[int, sp.spmatrix]


def is_chain_map(a: ChainComplex, b: ChainComplex, f: ChainMap) -> bool:
    """Check shapes and ``d_b f = f d_a`` in every degree."""
    lo = min(a.min_degree, b.min_degree)
    hi = max(a.max_degree, b.max_degree)

    def fm(i):
        m = f.get(i)
        return zero_map(b.dim(i), a.dim(i)) if m is None else mod2(m)

    for i in range(lo, hi + 1):
        if fm(i).shape != (b.dim(i), a.dim(i)):
            return False
    for i in range(lo, hi):
        if not sparse_equal(spmul2(b.d(i), fm(i)), spmul2(fm(i + 1), a.d(i))):
            return False
    return True


@dataclass
class ConeReport:
    """Long exact sequence check: dim H^n(cone) = dim ker f*_n + dim coker f*_{n-1}."""

    degrees: list[int]
    cone_homology: list[int]
    predicted: list[int]
    induced_ranks: dict[int, int] = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.cone_homology == self.predicted


def cone(a: ChainComplex, b: ChainComplex, f: ChainMap, check: bool = True) -> ChainComplex:
    """Cone of ``f : a -> b``; degree i holds ``a^i`` then ``b^{i-1}``."""
    if check and not is_chain_map(a, b, f):
        raise PreconditionError("f does not commute with the differentials")
    lo = min(a.min_degree, b.min_degree + 1)
    hi = max(a.max_degree, b.max_degree + 1)
    dims = [a.dim(i) + b.dim(i - 1) for i in range(lo, hi + 1)]

    def fm(i):
        m = f.get(i)
        return zero_map(b.dim(i), a.dim(i)) if m is None else mod2(m)

    diffs = {}
    for i in range(lo, hi):
        top = sp.hstack([a.d(i), zero_map(a.dim(i + 1), b.dim(i - 1))])
        bottom = sp.hstack([fm(i), b.d(i - 1)])
        diffs[i] = mod2(sp.vstack([top, bottom]))

    def basis(i: int) -> list:
        return [("a", x) for x in a.basis(i)] + [("b", y) for y in b.basis(i - 1)]

    return ChainComplex(lo, dims, diffs, basis, name=f"cone({a.name}->{b.name})")


def _image_basis(m: sp.spmatrix) -> BitMatrix:
    """Rows spanning the column space of ``m``."""
    return BitMatrix.from_sparse(sp.csr_matrix(m).T)


def induced_rank(a: ChainComplex, b: ChainComplex, f: ChainMap, n: int) -> int:
    """Rank of the map ``H^n(a) -> H^n(b)`` induced by ``f``."""
    if a.dim(n) == 0 or b.dim(n) == 0:
        return 0
    z = kernel_basis(a.d_bits(n))  # rows: cycles of a
    if z.rows == 0:
        return 0
    fn = f.get(n)
    if fn is None:
        return 0
    fz = BitMatrix.from_sparse(sp.csr_matrix(z.to_sparse(), dtype=np.int64) @ sp.csr_matrix(fn, dtype=np.int64).T)
    bnd = _image_basis(b.d(n - 1)) if b.dim(n - 1) else BitMatrix.zeros(0, b.dim(n))
    return rank(fz.vstack(bnd)) - rank(bnd)


def cone_report(a: ChainComplex, b: ChainComplex, f: ChainMap) -> ConeReport:
    c = cone(a, b, f)
    hc = c.homology_dims()
    ha, hb = a.homology_dims(), b.homology_dims()
    ranks = {n: induced_rank(a, b, f, n) for n in range(c.min_degree - 1, c.max_degree + 1)}
    predicted = []
    for n in c.degrees:
        ker = ha.kh(n) - ranks.get(n, 0)
        coker = hb.kh(n - 1) - ranks.get(n - 1, 0)
        predicted.append(ker + coker)
    return ConeReport(list(c.degrees), hc.homology, predicted, ranks)


def dual(c: ChainComplex) -> ChainComplex:
    """Transpose every differential; degree i of the dual is degree min+max-i of ``c``."""
    lo, hi = c.min_degree, c.max_degree
    flip = lambda i: lo + hi - i  # noqa: E731
    dims = [c.dim(flip(i)) for i in c.degrees]
    diffs = {i: c.d(flip(i) - 1).T.tocsr() for i in range(lo, hi)}
    basis = None
    if c._basis is not None:
        basis = lambda i: c.basis(flip(i))  # noqa: E731
    grading = None
    if c.grading is not None:
        grading = {i: -c.grading[flip(i)] for i in c.degrees}
    return ChainComplex(lo, dims, diffs, basis, grading, name=f"dual({c.name})")


def complexes_equal(a: ChainComplex, b: ChainComplex) -> bool:
    if a.min_degree != b.min_degree or a.dims != b.dims:
        return False
    return all(sparse_equal(a.d(i), b.d(i)) for i in a.degrees)


def random_complex(rng: np.random.Generator, dims: Sequence[int], density: float = 0.5,
                   min_degree: int = 0) -> ChainComplex:
    """Random complex with the given dimensions (d∘d = 0 by construction).

    Each ``C^i`` is split as ``B ⊕ H ⊕ R`` with ``d`` an isomorphism ``R^i -> B^{i+1}``,
    then conjugated by random invertible matrices.
    """
    dims = list(dims)
    n = len(dims)
    # choose ranks r_i of d^i greedily
    ranks = []
    prev = 0
    for i in range(n - 1):
        cap = min(dims[i] - prev, dims[i + 1])
        r = int(rng.integers(0, cap + 1)) if cap > 0 else 0
        ranks.append(r)
        prev = r
    ranks.append(0)

    def rand_invertible(k):
        while True:
            m = (rng.random((k, k)) < density).astype(np.uint8)
            if rank(BitMatrix.from_dense(m)) == k:
                return m

    changes = [rand_invertible(d) if d else np.zeros((0, 0), np.uint8) for d in dims]
    diffs = {}
    for i in range(n - 1):
        r = ranks[i]
        base = np.zeros((dims[i + 1], dims[i]), dtype=np.int64)
        # R^i is the last r coordinates, B^{i+1} the first r coordinates
        for t in range(r):
            base[t, dims[i] - r + t] = 1
        inv = _inverse(changes[i])
        m = (changes[i + 1].astype(np.int64) @ base @ inv) % 2
        diffs[min_degree + i] = sp.csr_matrix(m.astype(np.uint8))
    return ChainComplex(min_degree, dims, diffs, name="random")


def _inverse(m: np.ndarray) -> np.ndarray:
    k = m.shape[0]
    if k == 0:
        return np.zeros((0, 0), dtype=np.int64)
    aug = np.concatenate([m.astype(np.uint8), np.eye(k, dtype=np.uint8)], axis=1)
    bm = BitMatrix.from_dense(aug)
    red, piv = rref(bm)
    if len(piv) < k or int(piv[k - 1]) != k - 1:
        raise PreconditionError("matrix is singular")
    return red.to_dense()[:, k:].astype(np.int64)
