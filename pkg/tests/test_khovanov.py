from __future__ import annotations

import numpy as np
import pytest

from khovcss.diagram import (
    PlanarDiagram,
    add_kink,
    clasp,
    connected_sum,
    curl,
    gen_torus,
    gen_unknot,
    gen_unlink,
    mirror,
    unknot_circle,
)
from khovcss.errors import CapacityError, PreconditionError
from khovcss.homalg.complex import homology_dims, sparse_equal, tensor
from khovcss.khovanov import (
    KhovanovCube,
    build_complex,
    chain_dims,
    change_basis,
    change_of_basis,
    crossing_cone_check,
    khovanov_homology,
    mirror_duality_check,
    slice_weight_ranges,
    unreduced_splitting_check,
)


def images(cube, s, c, word, basis):
    _, _, dst = cube.edge_images(s, c, np.array([word]), basis)
    out = {}
    for x in dst.tolist():
        out[x] = out.get(x, 0) ^ 1
    return sorted(x for x, v in out.items() if v)


# local rules ------------------------------------------------------------------------


def test_pm_merge_table():
    cube = KhovanovCube(PlanarDiagram(curl("right").crossings), reduced=False)
    # two circles merge into one; minus = 0, plus = 1
    table = {(0, 0): [0], (0, 1): [1], (1, 0): [1], (1, 1): [0]}
    for (a, b), expect in table.items():
        assert images(cube, 0, 0, (a << 1) | b, "pm") == expect


def test_pm_split_table():
    cube = KhovanovCube(PlanarDiagram(curl("left").crossings), reduced=False)
    assert images(cube, 0, 0, 0, "pm") == [0b01, 0b10]
    assert images(cube, 0, 0, 1, "pm") == [0b00, 0b11]


def test_one_x_rules():
    merge = KhovanovCube(PlanarDiagram(curl("right").crossings), reduced=False)
    # 1 = 0, X = 1: 1*1 = 1, 1*X = X, X*X = 0
    assert images(merge, 0, 0, 0b00, "one_x") == [0]
    assert images(merge, 0, 0, 0b01, "one_x") == [1]
    assert images(merge, 0, 0, 0b11, "one_x") == []
    split = KhovanovCube(PlanarDiagram(curl("left").crossings), reduced=False)
    assert images(split, 0, 0, 0, "one_x") == [0b01, 0b10]
    assert images(split, 0, 0, 1, "one_x") == [0b11]


# complexes -------------------------------------------------------------------------


def test_clasp_pm_differentials():
    c = build_complex(clasp(), True, "pm")
    assert list(c.dims) == [1, 4, 1]
    assert c.d(0).toarray().ravel().tolist() == [1, 1, 1, 1]
    assert c.d(1).toarray().ravel().tolist() == [1, 1, 1, 1]


def test_point_complex():
    c = build_complex(unknot_circle(), True, "pm")
    assert list(c.dims) == [1]
    assert homology_dims(c).homology == [1]


def test_reduced_needs_point():
    with pytest.raises(PreconditionError):
        build_complex(PlanarDiagram(clasp().crossings), True)


def test_capacity():
    with pytest.raises(CapacityError):
        build_complex(gen_torus(6), True, capacity=10)


@pytest.mark.parametrize(
    "diagram, dims",
    [
        (gen_torus(3), [2, 3, 6, 4]),
        (gen_torus(1), [2, 1]),
        (gen_unknot(1), [2, 5, 2]),
        (gen_unlink(1), [1, 4, 1]),
    ],
)
def test_chain_dims(diagram, dims):
    assert chain_dims(diagram) == dims
    assert list(build_complex(diagram).dims) == dims


def test_chain_dims_formulas():
    assert chain_dims(gen_unknot(2))[2] == 33
    assert chain_dims(gen_unlink(2))[2] == 18
    assert chain_dims(gen_torus(5))[3] == 40


def test_basis_order_is_lexicographic():
    c = build_complex(gen_torus(3), True, "pm")
    for i in c.degrees:
        keys = [(st.bits, tuple("-+".index(x) for x in st.labels))
                for st in (c.state(i, j) for j in range(c.dim(i)))]
        assert keys == sorted(keys)
        assert all(c.index(c.state(i, j)) == j for j in range(c.dim(i)))


def test_state_labels_and_degree():
    c = build_complex(gen_torus(3), True, "pm")
    st = c.state(2, 0)
    assert st.degree == 2
    assert str(st) == "011|-"
    assert len(st.labels) == c.cube.info(c.cube.int_of(st.bits)).u


@pytest.mark.parametrize("d", [clasp(), gen_torus(3), gen_unknot(1), gen_unlink(2)])
@pytest.mark.parametrize("basis", ["pm", "one_x"])
@pytest.mark.parametrize("reduced", [True, False])
def test_d_squared_zero(d, basis, reduced):
    assert build_complex(d, reduced, basis).d_squared_zero()


def test_matrix_free_apply_matches_matrix():
    c = build_complex(gen_torus(4), True, "pm")
    cube = c.cube
    rng = np.random.default_rng(3)
    for _ in range(10):
        i = int(rng.integers(0, 4))
        j = int(rng.integers(0, c.dim(i)))
        st = c.state(i, j)
        s = cube.int_of(st.bits)
        w = cube.int_of(["-+".index(x) for x in st.labels])
        out = cube.apply([(s, w)], "pm")
        col = c.d(i)[:, j].toarray().ravel()
        got = np.zeros_like(col)
        off, _ = cube.offsets(i + 1)
        for s2, w2 in out:
            got[off[s2] + w2] = 1
        assert np.array_equal(col % 2, got)


# homology ----------------------------------------------------------------------------


def test_clasp_homology():
    assert khovanov_homology(clasp()).homology == [0, 2, 0]


@pytest.mark.parametrize("l", range(1, 8))
def test_torus_homology(l):
    h = khovanov_homology(gen_torus(l))
    expect = [1, 0] + [1] * (l - 1)
    assert h.homology == expect[: l + 1]


@pytest.mark.parametrize("l", [1, 2, 3])
def test_unknot_homology(l):
    h = khovanov_homology(gen_unknot(l))
    assert sum(h.homology) == 1 and h.kh(l) == 1


@pytest.mark.parametrize("l", [1, 2, 3])
def test_unlink_homology(l):
    h = khovanov_homology(gen_unlink(l))
    assert sum(h.homology) == 2**l and h.kh(l) == 2**l


def test_homology_same_in_both_bases(random_diagrams):
    for d in random_diagrams[:10]:
        a = build_complex(d, True, "pm").homology_dims()
        b = build_complex(d, True, "one_x").homology_dims()
        assert a.homology == b.homology


def test_grading_preserved(random_diagrams):
    for d in random_diagrams[:10]:
        assert build_complex(d, True, "one_x").grading_preserved()


# change of basis ----------------------------------------------------------------------


def test_change_of_basis_self_inverse():
    cube = KhovanovCube(unknot_circle(False), reduced=False)
    t = change_of_basis(cube, 0).toarray()
    assert t.tolist() == [[1, 1], [0, 1]] or t.tolist() == [[1, 0], [1, 1]]
    assert np.array_equal((t @ t) % 2, np.eye(2, dtype=t.dtype))


@pytest.mark.parametrize("d", [clasp(), gen_torus(3), gen_unknot(1)])
def test_change_basis_reproduces_pm(d):
    for reduced in (True, False):
        pm = build_complex(d, reduced, "pm")
        conv = change_basis(build_complex(d, reduced, "one_x"))
        for i in range(pm.min_degree, pm.max_degree):
            assert sparse_equal(conv.d(i), pm.d(i))


# splitting, duality, cone ---------------------------------------------------------------


@pytest.mark.parametrize("d", [clasp(), unknot_circle(), gen_torus(3)])
def test_unreduced_splitting(d):
    assert unreduced_splitting_check(d)


def test_clasp_unreduced_rank():
    assert khovanov_homology(clasp(), reduced=False).kh(1) == 4


def test_mirror_dims():
    d = gen_torus(3)
    a, b = chain_dims(d), chain_dims(mirror(d))
    assert a == b[::-1]


@pytest.mark.parametrize("d", [clasp(), gen_torus(3), gen_torus(4), gen_unknot(1)])
def test_mirror_duality(d):
    assert mirror_duality_check(d, True)
    assert mirror_duality_check(d, False)


def test_cone_torus_last_crossing():
    assert crossing_cone_check(gen_torus(3), 2, True, "pm")
    assert crossing_cone_check(gen_torus(3), 0, False, "one_x")


def test_connected_sum_is_tensor():
    a, b = gen_torus(3), clasp()
    ca, cb = build_complex(a), build_complex(b)
    cs = build_complex(connected_sum(a, b))
    t = tensor(ca, cb)
    assert list(cs.dims) == list(t.dims)
    assert homology_dims(cs).homology == homology_dims(t).homology


def test_kink_shifts():
    d = gen_torus(3)
    h = khovanov_homology(d)
    hl = khovanov_homology(add_kink(d, 1, "left"))
    hr = khovanov_homology(add_kink(d, 1, "right"))
    for i in h.degrees:
        assert hl.kh(i + 1) == h.kh(i)
        assert hr.kh(i) == h.kh(i)


# structural weights ----------------------------------------------------------------------


def test_structural_weights_match_matrices():
    from khovcss.csscode import from_complex_slice, sparseness_audit

    for d, i0 in [(gen_torus(5), 3), (gen_unknot(2), 2), (gen_unlink(2), 2)]:
        w = slice_weight_ranges(d, i0)
        audit = sparseness_audit(from_complex_slice(build_complex(d), i0))
        assert w["h_x_rows"] == sorted(audit["h_x"]["row_hist"])
        assert w["h_z_rows"] == sorted(audit["h_z"]["row_hist"])
        assert w["h_x_cols"] == sorted(audit["h_x"]["col_hist"])
        assert w["h_z_cols"] == sorted(audit["h_z"]["col_hist"])
