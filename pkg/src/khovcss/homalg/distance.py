"""Minimum weight of nontrivial (co)homology classes.

Given ``A : C^i -> C^{i+1}`` and ``B : C^{i-1} -> C^i`` with ``AB = 0``, the
quantity is ``min |x|`` over ``x`` in ``ker A`` but not in ``im B``.  Vectors of
``ker A`` are tested for nontriviality against a basis ``P`` of ``ker B^T``
taken modulo ``rowspace A``: ``x`` is a boundary iff ``P x = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels as K
from .bitmatrix import BitMatrix, complement_basis, kernel_basis, unpack_rows

DEFAULT_BUDGET = 24
DEFAULT_WMAX = 6


@dataclass
class MinWeight:
    """Result of a minimum-weight search.

    ``upper`` is the weight of the best vector found (``inf`` if none),
    ``lower`` a certified lower bound.  The search is exact iff they agree.
    """

    upper: float
    lower: float
    vector: np.ndarray | None = None
    method: str = ""
    kernel_dim: int = 0
    homology_dim: int = 0
    work: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.upper == self.lower

    @property
    def value(self) -> float:
        if not self.exact:
            raise ValueError("search was not exhaustive; use upper/lower")
        return self.upper

    def to_dict(self) -> dict:
        enc = lambda x: None if math.isinf(x) else int(x)  # noqa: E731
        return {
            "upper": enc(self.upper),
            "lower": enc(self.lower),
            "exact": self.exact,
            "method": self.method,
            "kernel_dim": self.kernel_dim,
            "homology_dim": self.homology_dim,
        }


def _as_bits(m, rows: int, cols: int) -> BitMatrix:
    if m is None:
        return BitMatrix.zeros(rows, cols)
    if isinstance(m, BitMatrix):
        return m
    return BitMatrix.from_sparse(sp.csr_matrix(m))


def bz_lower_bound(t: int, k: int, ranks: list[int]) -> int:
    """Weight bound for codewords not produced by any sum of at most ``t`` rows."""
    return sum(max(0, t + 1 - (k - r)) for r in ranks)


def _information_sets(gen: np.ndarray, ncols: int) -> list[tuple[np.ndarray, int]]:
    """Systematic generators over disjoint column sets (greedy, deterministic)."""
    out = []
    remaining = np.arange(ncols, dtype=np.int64)
    while remaining.size:
        work = gen.copy()
        piv = K.systematic_inplace(work, remaining)
        r = len(piv)
        if r == 0:
            break
        out.append((work, r))
        used = np.zeros(ncols, dtype=bool)
        used[piv] = True
        remaining = remaining[~used[remaining]]
    return out


def min_weight_in_kernel(
    a: BitMatrix,
    b: BitMatrix,
    budget: int = DEFAULT_BUDGET,
    mode: str = "exact",
    w_max: int = DEFAULT_WMAX,
    max_work: int | None = None,
    stop_at: int | None = None,
) -> MinWeight:
    """Minimum weight of ``x`` with ``a x = 0`` and ``x`` outside the column space of ``b``.

    Parameters
    ----------
    a : BitMatrix, shape (m, n)
    b : BitMatrix, shape (n, p)
    budget : int
        Kernels of dimension up to ``budget`` are enumerated completely in Gray-code order.
    mode : {"exact", "bound"}
        Larger kernels use Brouwer-Zimmermann enumeration over disjoint
        information sets.  In ``"exact"`` mode it runs until the lower bound
        meets the best weight; in ``"bound"`` mode it stops once all vectors of
        weight at most ``w_max`` have been excluded or one was found.
    max_work : int, optional
        Cap on enumerated sums; hitting it yields an inexact result.
    stop_at : int, optional
        Stop as soon as the certified lower bound reaches this value.
    """
    n = a.cols
    if b.rows != n:
        raise ValueError("a and b are not composable")
    ker = kernel_basis(a)
    kdim = ker.rows
    # P: cocycles of b^T that are not in rowspace(a)
    if b.cols:
        cocyc = kernel_basis(b.T)
    else:
        cocyc = BitMatrix.identity(n) if n else BitMatrix.zeros(0, 0)
    p = complement_basis(a, cocyc) if n else BitMatrix.zeros(0, 0)
    hdim = p.rows
    res = MinWeight(math.inf, math.inf, None, "", kdim, hdim)
    if hdim == 0 or n == 0:
        res.method = "trivial"
        return res

    best_vec = np.zeros(ker.data.shape[1], dtype=np.uint64)
    best_w = n + 1
    if kdim <= budget:
        best_w = K.gray_min_weight(ker.data, p.data, best_w, best_vec)
        res.method = "gray"
        res.work = (1 << kdim) - 1
        res.upper = res.lower = float(best_w)
        res.vector = unpack_rows(best_vec.reshape(1, -1), n)[0]
        return res

    sets = _information_sets(ker.data, n)
    ranks = [r for _, r in sets]
    res.method = "bz"
    res.notes.append(f"information set ranks {ranks}")
    lower = 1
    t = 0
    work = 0
    complete = True
    while True:
        t += 1
        if t > kdim:
            lower = best_w
            break
        for gen, r in sets:
            if t + 1 - (kdim - r) <= 0 and t > 1:
                continue
            cap = -1 if max_work is None else max(0, max_work - work)
            if cap == 0:
                complete = False
                break
            best_w, steps, done = K.combo_min_weight(gen, t, p.data, best_w, best_vec, cap)
            work += steps
            if not done:
                complete = False
                break
        if not complete:
            break
        lower = max(lower, bz_lower_bound(t, kdim, ranks))
        if lower >= best_w:
            lower = best_w
            break
        if mode == "bound" and lower > w_max:
            break
        if stop_at is not None and lower >= stop_at:
            break
    res.work = work
    res.lower = float(lower)
    if best_w <= n:
        res.upper = float(best_w)
        res.vector = unpack_rows(best_vec.reshape(1, -1), n)[0]
    if not complete:
        res.notes.append("work cap reached")
    return res


def min_homology_weight(c, i: int, budget: int = DEFAULT_BUDGET, mode: str = "exact",
                        w_max: int = DEFAULT_WMAX, max_work: int | None = None,
                        stop_at: int | None = None) -> MinWeight:
    """``d^i_C``: least weight of a cocycle in degree ``i`` that is not a coboundary."""
    n = c.dim(i)
    a = _as_bits(c.d(i), c.dim(i + 1), n)
    b = _as_bits(c.d(i - 1), n, c.dim(i - 1))
    return min_weight_in_kernel(a, b, budget, mode, w_max, max_work, stop_at)


def brute_force_min_weight(a: BitMatrix, b: BitMatrix) -> float:
    """Reference oracle over all ``2^n`` vectors (small ``n`` only)."""
    from .bitmatrix import in_rowspace

    n = a.cols
    ad = a.to_dense().astype(np.int64)
    bt = b.T
    best = math.inf
    for x in range(1, 1 << n):
        v = np.array([(x >> j) & 1 for j in range(n)], dtype=np.uint8)
        if ((ad @ v) % 2).any():
            continue
        w = int(v.sum())
        if w >= best:
            continue
        if bt.rows and in_rowspace(bt, v):
            continue
        best = w
    return float(best)
