from __future__ import annotations

import itertools

import numpy as np
import pytest

from khovcss.diagram import (
    PlanarDiagram,
    add_kink,
    braid_closure,
    braid_r2,
    braid_r3,
    clasp,
    connected_sum,
    curl,
    gen_torus,
    gen_unknot,
    gen_unlink,
    mirror,
    normalize,
    r3_windows,
    resolve_crossing,
    structurally_equal,
    trace_circles,
    unknot_circle,
)
from khovcss.errors import DiagramError, PreconditionError


def n_circles(d, bits):
    return trace_circles(d, bits).n_circles


# validation ---------------------------------------------------------------------


def test_edge_must_appear_twice():
    with pytest.raises(DiagramError):
        PlanarDiagram(((0, 1, 2, 2),))


def test_sparse_ids_rejected():
    with pytest.raises(DiagramError):
        PlanarDiagram(((0, 1, 5, 0),))


def test_marked_edge_must_exist():
    with pytest.raises(DiagramError):
        PlanarDiagram(((0, 1, 1, 0),), 0, 7)


def test_json_roundtrip():
    d = gen_unlink(2)
    assert PlanarDiagram.from_json(d.to_json()) == d
    with pytest.raises(DiagramError):
        PlanarDiagram.from_dict({"free_circles": 1})


# circles -------------------------------------------------------------------------


def test_clasp_circles():
    d = clasp()
    assert n_circles(d, (0, 0)) == 1
    assert n_circles(d, (0, 1)) == 2
    assert n_circles(d, (1, 0)) == 2


def test_zero_crossing_circle():
    res = trace_circles(unknot_circle(), ())
    assert res.n_circles == 1 and res.dotted_circle == 0


def test_torus3_all_ones():
    assert n_circles(gen_torus(3), (1, 1, 1)) == 3


def test_bad_bits_rejected():
    with pytest.raises(PreconditionError):
        trace_circles(clasp(), (0, 2))
    with pytest.raises(PreconditionError):
        trace_circles(clasp(), (0,))


def test_circles_partition_and_order(random_diagrams):
    for d in random_diagrams[:20]:
        for bits in itertools.islice(itertools.product([0, 1], repeat=d.n_crossings), 16):
            res = trace_circles(d, bits)
            flat = sorted(e for c in res.circles for e in c)
            assert flat == list(range(d.n_ids))
            mins = [min(c) for c in res.circles]
            assert mins == sorted(mins)
            assert trace_circles(d, bits) == res


def test_single_bit_change_is_merge_or_split(random_diagrams):
    for d in random_diagrams[:30]:
        for bits in itertools.islice(itertools.product([0, 1], repeat=d.n_crossings), 8):
            k = n_circles(d, bits)
            for c in range(d.n_crossings):
                flipped = list(bits)
                flipped[c] ^= 1
                assert abs(n_circles(d, flipped) - k) == 1


def test_crossing_reindexing_stable(random_diagrams, rng):
    for d in random_diagrams[:10]:
        perm = rng.permutation(d.n_crossings)
        d2 = PlanarDiagram(tuple(d.crossings[p] for p in perm), d.free_circles, d.marked_edge)
        for bits in itertools.islice(itertools.product([0, 1], repeat=d.n_crossings), 8):
            b2 = tuple(bits[p] for p in perm)
            assert trace_circles(d, bits).circles == trace_circles(d2, b2).circles


# families --------------------------------------------------------------------------


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_unknot_certificates(l):
    d = gen_unknot(l)
    assert d.n_crossings == 2 * l and d.n_components() == 1 and d.pointed
    base = (0,) * (2 * l)
    res = trace_circles(d, base)
    assert res.n_circles == l + 1
    for c in range(2 * l):
        bits = list(base)
        bits[c] = 1
        delta = n_circles(d, bits) - res.n_circles
        assert delta == (1 if c < l else -1)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_unlink_structure(l):
    d = gen_unlink(l)
    assert d.n_crossings == 2 * l
    assert d.n_components() == l + 1


def test_unlink2_is_clasp_sum():
    assert structurally_equal(connected_sum(clasp(), clasp()), gen_unlink(2))


@pytest.mark.parametrize("l", [1, 2, 5, 8])
def test_torus_circle_counts(l):
    d = gen_torus(l)
    assert n_circles(d, (0,) * l) == 2
    for k in range(1, l + 1):
        bits = [1] * k + [0] * (l - k)
        assert n_circles(d, bits) == k


def test_families_reject_zero():
    for g in (gen_unknot, gen_unlink, gen_torus):
        with pytest.raises(PreconditionError):
            g(0)


# mirror and sums ---------------------------------------------------------------------


def test_mirror_involution():
    for d in (gen_unknot(2), gen_torus(3), clasp()):
        assert structurally_equal(mirror(mirror(d)), d)


def test_mirror_circle():
    assert mirror(unknot_circle()) == unknot_circle()


def test_mirror_swaps_smoothings(random_diagrams):
    for d in random_diagrams[:15]:
        m = mirror(d)
        for bits in itertools.islice(itertools.product([0, 1], repeat=d.n_crossings), 8):
            flipped = tuple(1 - b for b in bits)
            assert n_circles(d, bits) == n_circles(m, flipped)


def test_connected_sum_identity():
    d = gen_torus(3)
    assert structurally_equal(connected_sum(d, unknot_circle()), d)
    assert structurally_equal(connected_sum(unknot_circle(), d), d)


def test_connected_sum_requires_points():
    d = PlanarDiagram(clasp().crossings, 0, None)
    with pytest.raises(PreconditionError):
        connected_sum(d, clasp())


def test_normalize_idempotent(random_diagrams):
    for d in random_diagrams[:10]:
        assert normalize(normalize(d)) == normalize(d)


# edits -------------------------------------------------------------------------------


def test_resolve_crossing_matches_trace(random_diagrams):
    for d in random_diagrams[:15]:
        if d.n_crossings < 2:
            continue
        for bit in (0, 1):
            d2, emap = resolve_crossing(d, 0, bit)
            assert d2.n_crossings == d.n_crossings - 1
            for rest in itertools.islice(itertools.product([0, 1], repeat=d.n_crossings - 1), 8):
                assert n_circles(d, (bit,) + rest) == n_circles(d2, rest)
            assert len(emap) == d.n_ids


def test_add_kink_circle_counts():
    d = gen_torus(3)
    for kind, delta in (("left", 1), ("right", -1)):
        k = add_kink(d, 0, kind)
        assert k.n_crossings == 4
        bits0 = (0, 0, 0, 0)
        bits1 = (0, 0, 0, 1)
        assert n_circles(k, bits1) - n_circles(k, bits0) == delta


def test_curls():
    assert n_circles(curl("left"), (0,)) == 1 and n_circles(curl("left"), (1,)) == 2
    assert n_circles(curl("right"), (0,)) == 2 and n_circles(curl("right"), (1,)) == 1
    with pytest.raises(PreconditionError):
        curl("up")


# braids ------------------------------------------------------------------------------


def test_braid_closure_torus():
    # the closed 2-braid of three negative generators has the circle counts of the torus diagram,
    # three positive ones those of its mirror
    d = braid_closure([-1, -1, -1], 2)
    t = gen_torus(3)
    dm = braid_closure([1, 1, 1], 2)
    for bits in itertools.product([0, 1], repeat=3):
        assert n_circles(dm, bits) == n_circles(mirror(t), bits)
    for bits in itertools.product([0, 1], repeat=3):
        assert n_circles(d, bits) == n_circles(t, bits)


def test_braid_free_strands():
    d = braid_closure([1], 3)
    assert d.free_circles == 1


def test_braid_moves():
    w = [1, 2, 1]
    assert braid_r3(w, 0) == [2, 1, 2]
    assert r3_windows([1, 2, 1, 2]) == [0, 1]
    assert braid_r2([1], 1, -2) == [1, -2, 2]
    with pytest.raises(PreconditionError):
        braid_r3([1, 1, 1], 0)
    with pytest.raises(PreconditionError):
        braid_closure([3], 3)


def test_random_diagram_bounds(random_diagrams):
    assert len(random_diagrams) >= 50
    for d in random_diagrams:
        assert 1 <= d.n_crossings <= 7 and d.pointed
    assert len({d.to_json() for d in random_diagrams}) > 30
    _ = np.random.default_rng(0)
