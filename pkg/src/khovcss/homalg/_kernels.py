"""Numba kernels for packed GF(2) rows.

Rows are ``uint64`` arrays; bit ``j`` of a row lives in word ``j >> 6`` at
position ``j & 63``.
"""

from __future__ import annotations

import numpy as np
from llvmlite import ir
from numba import njit, types
from numba.extending import intrinsic


@intrinsic
def _ctpop(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        fn = builder.module.declare_intrinsic("llvm.ctpop", [ir.IntType(64)])
        return builder.call(fn, args)

    return sig, codegen


@intrinsic
def _cttz(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        fn = builder.module.declare_intrinsic("llvm.cttz", [ir.IntType(64), ir.IntType(1)])
        return builder.call(fn, [args[0], ir.Constant(ir.IntType(1), 0)])

    return sig, codegen


@njit(cache=True)
def popcount_row(row):
    total = 0
    for w in range(row.shape[0]):
        total += _ctpop(row[w])
    return total


@njit(cache=True)
def popcount_rows(data):
    out = np.zeros(data.shape[0], dtype=np.int64)
    for i in range(data.shape[0]):
        out[i] = popcount_row(data[i])
    return out


@njit(cache=True)
def lex_less(a, b):
    """True when ``a`` precedes ``b`` as 0/1 tuples (first difference has a 0 in ``a``)."""
    for w in range(a.shape[0]):
        diff = a[w] ^ b[w]
        if diff != 0:
            low = diff & (~diff + np.uint64(1))
            return (a[w] & low) == 0
    return False


@njit(cache=True)
def _get_bit(row, j):
    return (row[j >> 6] >> np.uint64(j & 63)) & np.uint64(1)


@njit(cache=True)
def rref_inplace(data, ncols, full):
    """Row-reduce ``data`` in place (natural column order).

    Returns the pivot columns; rows ``[0, len(pivots))`` are the nonzero rows.
    With ``full`` the form is reduced (pivot columns are unit vectors);
    otherwise only echelon form is produced.
    """
    nrows = data.shape[0]
    nwords = data.shape[1]
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    npiv = 0
    tmp = np.empty(nwords, dtype=np.uint64)
    for c in range(ncols):
        if npiv == nrows:
            break
        w = c >> 6
        mask = np.uint64(1) << np.uint64(c & 63)
        piv = -1
        for r in range(npiv, nrows):
            if data[r, w] & mask:
                piv = r
                break
        if piv < 0:
            continue
        if piv != npiv:
            for k in range(nwords):
                tmp[k] = data[piv, k]
                data[piv, k] = data[npiv, k]
                data[npiv, k] = tmp[k]
        start = 0 if full else npiv + 1
        for r in range(start, nrows):
            if r != npiv and (data[r, w] & mask):
                for k in range(w, nwords):
                    data[r, k] ^= data[npiv, k]
        pivots[npiv] = c
        npiv += 1
    return pivots[:npiv].copy()


@njit(cache=True)
def systematic_inplace(data, col_order):
    """Reduce ``data`` so the chosen pivot columns (searched in ``col_order``) are unit.

    Pivot rows are moved to the top.  Returns the pivot columns in row order.
    Rows below the pivots are zero on every column of ``col_order``.
    """
    nrows = data.shape[0]
    nwords = data.shape[1]
    pivots = np.empty(min(nrows, col_order.shape[0]), dtype=np.int64)
    npiv = 0
    tmp = np.empty(nwords, dtype=np.uint64)
    for idx in range(col_order.shape[0]):
        if npiv == nrows:
            break
        c = col_order[idx]
        w = c >> 6
        mask = np.uint64(1) << np.uint64(c & 63)
        piv = -1
        for r in range(npiv, nrows):
            if data[r, w] & mask:
                piv = r
                break
        if piv < 0:
            continue
        if piv != npiv:
            for k in range(nwords):
                tmp[k] = data[piv, k]
                data[piv, k] = data[npiv, k]
                data[npiv, k] = tmp[k]
        for r in range(nrows):
            if r != npiv and (data[r, w] & mask):
                for k in range(nwords):
                    data[r, k] ^= data[npiv, k]
        pivots[npiv] = c
        npiv += 1
    return pivots[:npiv].copy()


@njit(cache=True)
def kernel_from_rref(rref, pivots, ncols):
    """Kernel basis of a reduced matrix, one vector per free column (ascending)."""
    nwords = (ncols + 63) >> 6
    is_pivot = np.zeros(ncols, dtype=np.bool_)
    for p in pivots:
        is_pivot[p] = True
    nfree = ncols - pivots.shape[0]
    out = np.zeros((nfree, nwords), dtype=np.uint64)
    row = 0
    for f in range(ncols):
        if is_pivot[f]:
            continue
        out[row, f >> 6] |= np.uint64(1) << np.uint64(f & 63)
        for r in range(pivots.shape[0]):
            if _get_bit(rref[r], f):
                p = pivots[r]
                out[row, p >> 6] |= np.uint64(1) << np.uint64(p & 63)
        row += 1
    return out


@njit(cache=True)
def reduce_by_rref(rref, pivots, vecs):
    """Reduce each row of ``vecs`` in place against a reduced basis."""
    for i in range(vecs.shape[0]):
        for r in range(pivots.shape[0]):
            p = pivots[r]
            if _get_bit(vecs[i], p):
                for k in range(vecs.shape[1]):
                    vecs[i, k] ^= rref[r, k]


@njit(cache=True)
def matmul(a, b, b_words):
    """Packed product: rows of ``a`` select and XOR rows of ``b``."""
    m = a.shape[0]
    out = np.zeros((m, b_words), dtype=np.uint64)
    k = b.shape[0]
    for i in range(m):
        for j in range(k):
            if _get_bit(a[i], j):
                for w in range(b_words):
                    out[i, w] ^= b[j, w]
    return out


@njit(cache=True)
def parity_any(p_rows, x):
    """True when some row of ``p_rows`` has odd overlap with ``x``."""
    for j in range(p_rows.shape[0]):
        acc = np.uint64(0)
        for w in range(x.shape[0]):
            acc ^= p_rows[j, w] & x[w]
        if _ctpop(acc) & 1:
            return True
    return False


@njit(cache=True)
def gray_min_weight(basis, checks, best_w, best_vec):
    """Enumerate the span of ``basis`` in Gray-code order.

    Tracks the lightest vector with odd overlap against some row of ``checks``
    (ties resolved towards the lexicographically smallest vector).  Returns the
    updated ``best_w``; ``best_vec`` is overwritten in place.
    """
    k = basis.shape[0]
    nwords = basis.shape[1]
    x = np.zeros(nwords, dtype=np.uint64)
    total = np.uint64(1) << np.uint64(k)
    step = np.uint64(1)
    while step < total:
        j = _cttz(step)
        for w in range(nwords):
            x[w] ^= basis[j, w]
        wt = popcount_row(x)
        if wt <= best_w:
            if wt < best_w or lex_less(x, best_vec):
                if parity_any(checks, x):
                    best_w = wt
                    for w in range(nwords):
                        best_vec[w] = x[w]
        step += np.uint64(1)
    return best_w


@njit(cache=True)
def combo_min_weight(gen, t, checks, best_w, best_vec, max_steps):
    """Enumerate all sums of exactly ``t`` rows of ``gen``.

    Same selection rule as :func:`gray_min_weight`.  Returns
    ``(best_w, steps, completed)``; enumeration stops early once ``max_steps``
    sums were visited (``max_steps < 0`` disables the cap).
    """
    k = gen.shape[0]
    nwords = gen.shape[1]
    if t > k or t <= 0:
        return best_w, 0, True
    idx = np.empty(t, dtype=np.int64)
    partial = np.zeros((t + 1, nwords), dtype=np.uint64)
    for i in range(t):
        idx[i] = i
        for w in range(nwords):
            partial[i + 1, w] = partial[i, w] ^ gen[i, w]
    steps = 0
    while True:
        x = partial[t]
        wt = popcount_row(x)
        if wt <= best_w:
            if wt < best_w or lex_less(x, best_vec):
                if parity_any(checks, x):
                    best_w = wt
                    for w in range(nwords):
                        best_vec[w] = x[w]
        steps += 1
        if max_steps >= 0 and steps >= max_steps:
            return best_w, steps, False
        # advance to the next combination in lexicographic order
        pos = t - 1
        while pos >= 0 and idx[pos] == k - t + pos:
            pos -= 1
        if pos < 0:
            return best_w, steps, True
        idx[pos] += 1
        for i in range(pos + 1, t):
            idx[i] = idx[i - 1] + 1
        for i in range(pos, t):
            r = idx[i]
            for w in range(nwords):
                partial[i + 1, w] = partial[i, w] ^ gen[r, w]
