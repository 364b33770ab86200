from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from khovcss.errors import IntegrityError, PreconditionError
from khovcss.homalg import BitMatrix, in_rowspace, kernel_basis, rank, rref
from khovcss.homalg.bitmatrix import complement_basis, pack_rows, rowspace_basis, unpack_rows
from khovcss.homalg.complex import (
    ChainComplex,
    cone,
    cone_report,
    complexes_equal,
    dual,
    homology_dims,
    is_chain_map,
    point_complex,
    random_complex,
    shift,
    tensor,
)
from khovcss.homalg.distance import (
    bz_lower_bound,
    brute_force_min_weight,
    min_homology_weight,
    min_weight_in_kernel,
)


def dense_rank(a: np.ndarray) -> int:
    """Reference rank over F2 by naive elimination."""
    a = a.copy() % 2
    r = 0
    for c in range(a.shape[1]):
        piv = next((i for i in range(r, a.shape[0]) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


# bit matrices ------------------------------------------------------------------


def test_rank_single_row():
    m = BitMatrix.from_dense([[1, 1, 1, 1]])
    assert rank(m) == 1
    assert kernel_basis(m).rows == 3


def test_in_rowspace_example():
    m = BitMatrix.from_dense([[1, 1, 1, 1]])
    assert not in_rowspace(m, [1, 1, 0, 0])
    assert in_rowspace(m, [1, 1, 1, 1])
    assert in_rowspace(m, [0, 0, 0, 0])


def test_in_rowspace_length_mismatch():
    m = BitMatrix.from_dense([[1, 1, 1, 1]])
    with pytest.raises(ValueError):
        in_rowspace(m, [1, 1, 0])


@pytest.mark.parametrize("cols", [1, 63, 64, 65, 130])
def test_pack_roundtrip(cols, rng):
    a = rng.integers(0, 2, size=(7, cols)).astype(np.uint8)
    assert np.array_equal(unpack_rows(pack_rows(a), cols), a)
    assert np.array_equal(BitMatrix.from_dense(a).to_dense(), a)
    assert np.array_equal(BitMatrix.from_sparse(BitMatrix.from_dense(a).to_sparse()).to_dense(), a)


def test_rank_and_kernel_random(rng):
    for _ in range(40):
        m, n = rng.integers(1, 30, size=2)
        a = (rng.random((m, n)) < 0.3).astype(np.uint8)
        bm = BitMatrix.from_dense(a)
        r = rank(bm)
        assert r == dense_rank(a)
        ker = kernel_basis(bm)
        assert ker.rows == n - r
        assert rank(ker) == ker.rows
        assert not ((a.astype(np.int64) @ ker.to_dense().T.astype(np.int64)) % 2).any()
        assert rowspace_basis(bm).rows == r


def test_rref_pivots(rng):
    a = (rng.random((8, 20)) < 0.4).astype(np.uint8)
    red, piv = rref(BitMatrix.from_dense(a))
    d = red.to_dense()
    for i, p in enumerate(piv):
        assert d[i, p] == 1
        assert d[:, p].sum() == 1


def test_matmul_add_transpose(rng):
    a = rng.integers(0, 2, size=(5, 70)).astype(np.uint8)
    b = rng.integers(0, 2, size=(70, 9)).astype(np.uint8)
    A, B = BitMatrix.from_dense(a), BitMatrix.from_dense(b)
    assert np.array_equal((A @ B).to_dense(), (a.astype(np.int64) @ b) % 2)
    assert np.array_equal(A.T.to_dense(), a.T)
    assert (A + A).is_zero()
    assert A == BitMatrix.from_dense(a)


def test_complement_basis(rng):
    a = (rng.random((4, 12)) < 0.5).astype(np.uint8)
    sub = BitMatrix.from_dense(a)
    space = BitMatrix.identity(12)
    comp = complement_basis(sub, space)
    assert comp.rows == 12 - rank(sub)
    assert rank(sub.vstack(comp)) == 12


# complexes ----------------------------------------------------------------------


def clasp_complex() -> ChainComplex:
    d0 = np.ones((4, 1), dtype=np.uint8)
    d1 = np.ones((1, 4), dtype=np.uint8)
    return ChainComplex(0, [1, 4, 1], {0: d0, 1: d1})


def test_clasp_homology():
    c = clasp_complex()
    assert homology_dims(c).homology == [0, 2, 0]
    assert rank(BitMatrix.from_sparse(c.d(0))) == 1


def test_zero_complex_homology():
    c = ChainComplex(0, [0, 0], {})
    assert homology_dims(c).homology == [0, 0]


def test_d_squared_nonzero_rejected():
    with pytest.raises(IntegrityError):
        ChainComplex(0, [1, 1, 1], {0: np.ones((1, 1)), 1: np.ones((1, 1))}).check()


def test_tensor_clasp_clasp():
    c = clasp_complex()
    t = tensor(c, c)
    assert list(t.dims) == [1, 8, 18, 8, 1]
    assert t.d_squared_zero()
    assert homology_dims(t).homology == [0, 0, 4, 0, 0]


def test_tensor_with_point_is_identity():
    c = clasp_complex()
    assert complexes_equal(tensor(c, point_complex(0)), c)
    assert complexes_equal(tensor(point_complex(0), c), c)


def test_kunneth_random(rng):
    for _ in range(25):
        a = random_complex(rng, rng.integers(0, 4, size=rng.integers(1, 4)).tolist())
        b = random_complex(rng, rng.integers(0, 4, size=rng.integers(1, 4)).tolist())
        t = tensor(a, b)
        assert t.d_squared_zero()
        ha, hb, ht = homology_dims(a), homology_dims(b), homology_dims(t)
        for k in t.degrees:
            expect = sum(ha.kh(i) * hb.kh(k - i) for i in a.degrees)
            assert ht.kh(k) == expect


def test_euler_conservation(rng):
    for _ in range(20):
        c = random_complex(rng, rng.integers(0, 6, size=4).tolist())
        h = homology_dims(c)
        assert h.euler == h.euler_chain


def test_shift_moves_degrees():
    c = shift(clasp_complex(), 3)
    assert c.min_degree == 3
    assert homology_dims(c).kh(4) == 2


def test_cone_of_identity_is_acyclic(rng):
    for _ in range(10):
        a = random_complex(rng, rng.integers(1, 5, size=3).tolist())
        f = {i: np.eye(a.dim(i), dtype=np.uint8) for i in a.degrees}
        c = cone(a, a, f)
        assert all(v == 0 for v in homology_dims(c).homology)


def test_cone_of_zero_map_adds_homology(rng):
    a = random_complex(rng, [2, 3, 2])
    b = random_complex(rng, [1, 3, 1])
    f = {i: np.zeros((b.dim(i), a.dim(i)), dtype=np.uint8) for i in a.degrees}
    c = cone(a, b, f)
    ha, hb, hc = homology_dims(a), homology_dims(b), homology_dims(c)
    for i in c.degrees:
        assert hc.kh(i) == ha.kh(i) + hb.kh(i - 1) or hc.kh(i) == ha.kh(i - 1) + hb.kh(i)
    assert sum(hc.homology) == sum(ha.homology) + sum(hb.homology)


def test_cone_rejects_non_chain_map():
    a = clasp_complex()
    f = {0: np.ones((1, 1), dtype=np.uint8), 1: np.zeros((4, 4), dtype=np.uint8),
         2: np.zeros((1, 1), dtype=np.uint8)}
    assert not is_chain_map(a, a, f)
    with pytest.raises(PreconditionError):
        cone(a, a, f)


def test_cone_report_long_exact_sequence(rng):
    for _ in range(10):
        a = random_complex(rng, [2, 3, 2])
        f = {i: np.eye(a.dim(i), dtype=np.uint8) for i in a.degrees}
        assert cone_report(a, a, f).consistent


def test_dual_involution(rng):
    for _ in range(10):
        c = random_complex(rng, rng.integers(0, 5, size=4).tolist())
        assert complexes_equal(dual(dual(c)), c)


def test_dual_clasp_self_dual():
    c = clasp_complex()
    assert complexes_equal(dual(c), c)


def test_dual_homology_reversed(rng):
    c = random_complex(rng, [2, 4, 3, 1])
    h, hd = homology_dims(c), homology_dims(dual(c))
    lo, hi = c.min_degree, c.max_degree
    for i in c.degrees:
        assert h.kh(i) == hd.kh(lo + hi - i)


def test_cocycle_vanishing_on_homology_is_coboundary(rng):
    # a cocycle pairing to zero with every cycle is a coboundary
    for _ in range(15):
        c = random_complex(rng, [3, 5, 3])
        a = BitMatrix.from_sparse(c.d(1)) if c.dim(2) else BitMatrix.zeros(0, c.dim(1))
        b = BitMatrix.from_sparse(c.d(0))
        cycles = kernel_basis(a)
        for x in range(1 << c.dim(1)):
            v = np.array([(x >> j) & 1 for j in range(c.dim(1))], dtype=np.uint8)
            if ((b.to_dense().T.astype(np.int64) @ v) % 2).any():
                continue  # not a cocycle of the dual
            pairs = (cycles.to_dense().astype(np.int64) @ v) % 2
            if not pairs.any():
                assert in_rowspace(a, v)


# minimum weight -----------------------------------------------------------------


def test_bz_lower_bound_formula():
    assert bz_lower_bound(1, 10, [10, 10]) == 4
    assert bz_lower_bound(2, 10, [10, 8]) == 4


def test_distance_matches_oracle(rng):
    for _ in range(60):
        c = random_complex(rng, [int(rng.integers(0, 5)), int(rng.integers(1, 13)), int(rng.integers(0, 5))],
                           density=float(rng.uniform(0.2, 0.7)))
        a = c.d_bits(1)
        b = c.d_bits(0)
        got = min_weight_in_kernel(a, b)
        assert got.exact
        assert got.upper == brute_force_min_weight(a, b)


def test_bz_matches_gray(rng):
    for _ in range(25):
        n = int(rng.integers(8, 16))
        c = random_complex(rng, [int(rng.integers(0, 4)), n, int(rng.integers(0, 5))], density=0.4)
        a, b = c.d_bits(1), c.d_bits(0)
        g = min_weight_in_kernel(a, b, budget=24)
        z = min_weight_in_kernel(a, b, budget=0)
        assert z.exact and z.upper == g.upper
        if not math.isinf(z.upper):
            assert z.method == "bz"
            v = z.vector
            assert v.sum() == z.upper
            assert not ((a.to_dense().astype(np.int64) @ v) % 2).any()


def test_stop_at_and_work_cap(rng):
    c = random_complex(rng, [2, 30, 3], density=0.3)
    a, b = c.d_bits(1), c.d_bits(0)
    full = min_weight_in_kernel(a, b, budget=0)
    capped = min_weight_in_kernel(a, b, budget=0, max_work=5)
    assert capped.lower <= full.upper <= capped.upper
    stopped = min_weight_in_kernel(a, b, budget=0, stop_at=1)
    assert stopped.lower <= full.upper


def test_trivial_homology_gives_inf():
    c = ChainComplex(0, [1, 1], {0: np.ones((1, 1), dtype=np.uint8)})
    mw = min_homology_weight(c, 1)
    assert math.isinf(mw.upper) and mw.homology_dim == 0


def test_clasp_distance():
    assert min_homology_weight(clasp_complex(), 1).value == 2


def test_value_requires_exact(rng):
    c = random_complex(rng, [1, 40, 1], density=0.5)
    mw = min_weight_in_kernel(c.d_bits(1), c.d_bits(0), budget=0, max_work=1)
    if not mw.exact:
        with pytest.raises(ValueError):
            mw.value


def test_exhaustive_small_kernel_enumeration():
    # all nonzero vectors of length 5 with even weight: min weight 2
    a = BitMatrix.from_dense([[1, 1, 1, 1, 1]])
    b = BitMatrix.zeros(5, 0)
    assert min_weight_in_kernel(a, b).value == 2
    weights = [sum(v) for v in itertools.product([0, 1], repeat=5) if sum(v) % 2 == 0 and sum(v)]
    assert min(weights) == 2
