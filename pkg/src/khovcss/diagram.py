"""Combinatorial link diagrams.

A crossing is a 4-tuple of edge ids ``(e1, e2, e3, e4)`` listed
counterclockwise, ``e1`` on the under-strand.  The 0-smoothing joins e1-e2 and
e3-e4; the 1-smoothing joins e1-e4 and e2-e3.  Edge ids are dense integers
``0..m-1``; crossing-free components are counted in ``free_circles`` and get
the ids ``m, m+1, ...``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DiagramError, PreconditionError

Crossing = tuple[int, int, int, int]


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


@dataclass(frozen=True)
class PlanarDiagram:
    crossings: tuple[Crossing, ...]
    free_circles: int = 0
    marked_edge: int | None = None

    def __post_init__(self):
        xs = tuple(tuple(int(e) for e in c) for c in self.crossings)
        object.__setattr__(self, "crossings", xs)
        object.__setattr__(self, "free_circles", int(self.free_circles))
        if self.marked_edge is not None:
            object.__setattr__(self, "marked_edge", int(self.marked_edge))
        self.validate()

    # structure --------------------------------------------------------
    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_edges(self) -> int:
        """Number of edges touching crossings."""
        return 2 * len(self.crossings)

    @property
    def n_ids(self) -> int:
        return self.n_edges + self.free_circles

    @property
    def edges(self) -> range:
        return range(self.n_ids)

    @property
    def pointed(self) -> bool:
        return self.marked_edge is not None

    def validate(self) -> None:
        counts = np.zeros(self.n_edges, dtype=np.int64)
        for c in self.crossings:
            if len(c) != 4:
                raise DiagramError(f"crossing {c} does not have four slots")
            for e in c:
                if not 0 <= e < self.n_edges:
                    raise DiagramError(
                        f"edge id {e} outside 0..{self.n_edges - 1} (ids must be dense)"
                    )
                counts[e] += 1
        bad = np.flatnonzero(counts != 2)
        if bad.size:
            raise DiagramError(f"edge {int(bad[0])} appears {int(counts[bad[0]])} times")
        if self.free_circles < 0:
            raise DiagramError("negative free circle count")
        if self.marked_edge is not None and not 0 <= self.marked_edge < self.n_ids:
            raise DiagramError(f"marked edge {self.marked_edge} does not exist")

    def slots(self, edge: int) -> list[tuple[int, int]]:
        """The two (crossing, slot) positions of ``edge``."""
        return [(i, k) for i, c in enumerate(self.crossings) for k in range(4) if c[k] == edge]

    def n_components(self) -> int:
        """Number of link components (strands continue e1->e3 and e2->e4)."""
        uf = _UnionFind(self.n_ids)
        for a, b, c, d in self.crossings:
            uf.union(a, c)
            uf.union(b, d)
        return len({uf.find(e) for e in self.edges})

    # serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "crossings": [list(c) for c in self.crossings],
            "free_circles": self.free_circles,
            "marked_edge": self.marked_edge,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "PlanarDiagram":
        try:
            return cls(
                tuple(tuple(c) for c in data["crossings"]),
                data.get("free_circles", 0),
                data.get("marked_edge"),
            )
        except (KeyError, TypeError) as exc:
            raise DiagramError(f"malformed diagram JSON: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "PlanarDiagram":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Resolution:
    """Circles of a resolution, each a sorted tuple of edge ids."""

    bits: tuple[int, ...]
    circles: tuple[tuple[int, ...], ...]
    dotted_circle: int | None

    @property
    def n_circles(self) -> int:
        return len(self.circles)

    @property
    def degree(self) -> int:
        return sum(self.bits)

    def circle_of(self) -> dict[int, int]:
        return {e: i for i, c in enumerate(self.circles) for e in c}


def circle_labels(diagram: PlanarDiagram, bits: Sequence[int]) -> tuple[list[int], int]:
    """Circle index of every edge id plus the circle count (fast path for builders)."""
    m = diagram.n_edges
    uf = _UnionFind(m)
    for (a, b, c, d), bit in zip(diagram.crossings, bits):
        if bit:
            uf.union(a, d)
            uf.union(b, c)
        else:
            uf.union(a, b)
            uf.union(c, d)
    roots = [uf.find(e) for e in range(m)]
    # roots are minimal edge ids of their class, so first-appearance order = order by min edge
    index: dict[int, int] = {}
    out = []
    for r in roots:
        if r not in index:
            index[r] = len(index)
        out.append(index[r])
    k = len(index)
    out.extend(range(k, k + diagram.free_circles))
    return out, k + diagram.free_circles


def trace_circles(diagram: PlanarDiagram, bits: Sequence[int]) -> Resolution:
    bits = tuple(int(b) for b in bits)
    if len(bits) != diagram.n_crossings or any(b not in (0, 1) for b in bits):
        raise PreconditionError("bits must assign 0 or 1 to every crossing")
    labels, k = circle_labels(diagram, bits)
    circles: list[list[int]] = [[] for _ in range(k)]
    for e, c in enumerate(labels):
        circles[c].append(e)
    dotted = None if diagram.marked_edge is None else labels[diagram.marked_edge]
    return Resolution(bits, tuple(tuple(c) for c in circles), dotted)


# normalization ---------------------------------------------------------


def _canonical_rotation(c: Crossing) -> Crossing:
    a, b, cc, d = c
    return min((a, b, cc, d), (cc, d, a, b))


def _relabel(d: PlanarDiagram, mapping: dict[int, int], crossings) -> PlanarDiagram:
    marked = None if d.marked_edge is None else mapping[d.marked_edge]
    return PlanarDiagram(
        tuple(tuple(mapping[e] for e in c) for c in crossings), d.free_circles, marked
    )


def normalize(d: PlanarDiagram) -> PlanarDiagram:
    """Relabel edges by first appearance and rotate each crossing canonically.

    Crossing order is kept.  Rotating a crossing by two slots describes the
    same crossing, so the pair of steps is iterated until nothing changes.
    """
    cur = d
    for _ in range(4 * max(1, d.n_crossings) + 4):
        rot = [_canonical_rotation(c) for c in cur.crossings]
        mapping: dict[int, int] = {}
        for c in rot:
            for e in c:
                if e not in mapping:
                    mapping[e] = len(mapping)
        m = cur.n_edges
        for j in range(cur.free_circles):
            mapping[m + j] = m + j
        nxt = _relabel(cur, mapping, rot)
        if nxt == cur:
            return cur
        cur = nxt
    return cur


def structurally_equal(a: PlanarDiagram, b: PlanarDiagram) -> bool:
    return normalize(a) == normalize(b)


# basic operations --------------------------------------------------------


def mirror(d: PlanarDiagram) -> PlanarDiagram:
    """Switch every crossing: the over-strand becomes the under-strand."""
    xs = tuple(_canonical_rotation((b, c, dd, a)) for a, b, c, dd in d.crossings)
    return PlanarDiagram(xs, d.free_circles, d.marked_edge)


def unknot_circle(pointed: bool = True) -> PlanarDiagram:
    return PlanarDiagram((), 1, 0 if pointed else None)


def _offset(d: PlanarDiagram, off: int, free_off: int) -> tuple[list[Crossing], dict[int, int]]:
    """Shift crossing edge ids by ``off``; map free circle ids relative to ``free_off``."""
    m = d.n_edges
    mapping = {e: e + off for e in range(m)}
    for j in range(d.free_circles):
        mapping[m + j] = free_off + j
    return [tuple(e + off for e in c) for c in d.crossings], mapping


def disjoint_union(d1: PlanarDiagram, d2: PlanarDiagram) -> PlanarDiagram:
    m1, m2 = d1.n_edges, d2.n_edges
    base = m1 + m2
    x1, map1 = _offset(d1, 0, base)
    x2, map2 = _offset(d2, m1, base + d1.free_circles)
    marked = None
    if d1.marked_edge is not None:
        marked = map1[d1.marked_edge]
    elif d2.marked_edge is not None:
        marked = map2[d2.marked_edge]
    return PlanarDiagram(tuple(x1 + x2), d1.free_circles + d2.free_circles, marked)


def _drop_free_circle(d: PlanarDiagram, fid: int) -> PlanarDiagram:
    """Remove free circle ``fid`` (unmarking the diagram if it was marked)."""
    m = d.n_edges
    marked = d.marked_edge
    if marked == fid:
        marked = None
    elif marked is not None and marked > fid:
        marked -= 1
    if not m <= fid < d.n_ids:
        raise DiagramError("not a free circle")
    return PlanarDiagram(d.crossings, d.free_circles - 1, marked)


def connected_sum(d1: PlanarDiagram, d2: PlanarDiagram) -> PlanarDiagram:
    """Splice the marked edges of two pointed diagrams; the result is marked on the splice."""
    if d1.marked_edge is None or d2.marked_edge is None:
        raise PreconditionError("connected sum needs two pointed diagrams")
    if d2.marked_edge >= d2.n_edges:
        # marked free circle of d2 is absorbed into d1's marked edge
        rest = _drop_free_circle(d2, d2.marked_edge)
        return disjoint_union(d1, rest)
    if d1.marked_edge >= d1.n_edges:
        rest = _drop_free_circle(d1, d1.marked_edge)
        return disjoint_union(d2, rest)
    m1 = d1.n_edges
    x = d1.marked_edge
    y = d2.marked_edge + m1
    joined = disjoint_union(d1, PlanarDiagram(d2.crossings, d2.free_circles, None))
    xs = [list(c) for c in joined.crossings]
    s1 = [(i, k) for i, c in enumerate(xs) for k in range(4) if c[k] == x]
    s2 = [(i, k) for i, c in enumerate(xs) for k in range(4) if c[k] == y]
    (i, k) = s1[1]
    xs[i][k] = y
    (i, k) = s2[0]
    xs[i][k] = x
    return normalize(PlanarDiagram(tuple(tuple(c) for c in xs), joined.free_circles, x))


def connected_sum_many(parts: Iterable[PlanarDiagram]) -> PlanarDiagram:
    out = None
    for p in parts:
        out = p if out is None else connected_sum(out, p)
    if out is None:
        raise PreconditionError("empty connected sum")
    return out


def resolve_crossing(d: PlanarDiagram, index: int, bit: int) -> tuple[PlanarDiagram, list[int]]:
    """Smooth one crossing.

    Returns the new diagram and, for every old edge id, the new edge id carrying it.
    """
    if not 0 <= index < d.n_crossings:
        raise PreconditionError("crossing index out of range")
    a, b, c, e = d.crossings[index]
    uf = _UnionFind(d.n_ids)
    if bit:
        uf.union(a, e)
        uf.union(b, c)
    else:
        uf.union(a, b)
        uf.union(c, e)
    rest = [x for i, x in enumerate(d.crossings) if i != index]
    roots = [uf.find(x) for x in range(d.n_ids)]
    used_roots: list[int] = []
    seen = set()
    for x in rest:
        for y in x:
            r = roots[y]
            if r not in seen:
                seen.add(r)
                used_roots.append(r)
    new_id = {r: i for i, r in enumerate(used_roots)}
    m_new = len(used_roots)
    free_roots = []
    for x in range(d.n_ids):
        r = roots[x]
        if r not in new_id and r not in free_roots:
            free_roots.append(r)
    for j, r in enumerate(free_roots):
        new_id[r] = m_new + j
    edge_map = [new_id[roots[x]] for x in range(d.n_ids)]
    xs = tuple(tuple(edge_map[y] for y in x) for x in rest)
    marked = None if d.marked_edge is None else edge_map[d.marked_edge]
    return PlanarDiagram(xs, len(free_roots), marked), edge_map


def add_kink(d: PlanarDiagram, edge: int, kind: str) -> PlanarDiagram:
    """Insert a curl on ``edge`` (``"left"`` or ``"right"``, see :func:`curl`)."""
    if kind not in ("left", "right"):
        raise PreconditionError("kind must be 'left' or 'right'")
    if not 0 <= edge < d.n_ids:
        raise PreconditionError("edge does not exist")
    if edge >= d.n_edges:
        k = curl(kind)
        rest = _drop_free_circle(d, edge)
        marked_here = d.marked_edge == edge
        k = PlanarDiagram(k.crossings, 0, 0 if marked_here else None)
        out = disjoint_union(rest, k) if not marked_here else disjoint_union(k, rest)
        return normalize(out)
    m = d.n_edges
    loop, tail = m, m + 1
    xs = [list(c) for c in d.crossings]
    i, k = next((i, k) for i, c in enumerate(xs) for k in range(4) if c[k] == edge)
    xs[i][k] = tail
    new = (edge, loop, loop, tail) if kind == "left" else (loop, loop, edge, tail)
    xs.append(list(new))
    # free circle ids shift by two
    marked = d.marked_edge
    if marked is not None and marked >= m:
        marked += 2
    return PlanarDiagram(tuple(tuple(c) for c in xs), d.free_circles, marked)


# families ------------------------------------------------------------------


def curl(kind: str) -> PlanarDiagram:
    """One-crossing pointed unknot.

    ``"left"``: 1 circle at the 0-smoothing, 2 at the 1-smoothing (homology shifted by one).
    ``"right"``: 2 circles at the 0-smoothing, 1 at the 1-smoothing.
    """
    if kind == "left":
        return PlanarDiagram(((0, 1, 1, 0),), 0, 0)
    if kind == "right":
        return PlanarDiagram(((1, 1, 0, 0),), 0, 0)
    raise PreconditionError("kind must be 'left' or 'right'")


def clasp() -> PlanarDiagram:
    """Two-crossing diagram of the pointed 2-component unlink."""
    a1, b1, a2, b2 = 0, 1, 2, 3
    return PlanarDiagram(((a1, b1, a2, b2), (a2, b1, a1, b2)), 0, a1)


def _check_l(l: int) -> int:
    if int(l) != l or l < 1:
        raise PreconditionError("family size must be a positive integer")
    return int(l)


def gen_unknot(l: int) -> PlanarDiagram:
    """``l`` left curls followed by ``l`` right curls, summed at the basepoint."""
    l = _check_l(l)
    return connected_sum_many([curl("left")] * l + [curl("right")] * l)


def gen_unlink(l: int) -> PlanarDiagram:
    l = _check_l(l)
    return connected_sum_many([clasp()] * l)


def gen_torus(l: int) -> PlanarDiagram:
    """Closure of the 2-braid with ``l`` equal crossings.

    Between crossings t and t+1 sit the edges ``L_t = 2t`` and ``R_t = 2t+1``;
    the basepoint is on ``L_{l-1}``.
    """
    l = _check_l(l)
    L = lambda t: 2 * (t % l)  # noqa: E731
    R = lambda t: 2 * (t % l) + 1  # noqa: E731
    xs = tuple((R(t - 1), R(t), L(t), L(t - 1)) for t in range(l))
    return PlanarDiagram(xs, 0, L(l - 1))


def braid_closure(word: Sequence[int], strands: int, mark: bool = True) -> PlanarDiagram:
    """Closure of a braid word; ``+i`` is sigma_i, ``-i`` its inverse (``1 <= i < strands``)."""
    if strands < 1:
        raise PreconditionError("need at least one strand")
    cur = list(range(strands))
    nxt = strands
    raw = []
    for g in word:
        i = abs(int(g)) - 1
        if g == 0 or not 0 <= i < strands - 1:
            raise PreconditionError(f"generator {g} invalid for {strands} strands")
        a, b = cur[i], cur[i + 1]
        c, d = nxt, nxt + 1
        nxt += 2
        # braid runs upwards: a bottom-left, b bottom-right, c top-left, d top-right
        raw.append((a, b, d, c) if g > 0 else (b, d, c, a))
        cur[i], cur[i + 1] = c, d
    close = {cur[p]: p for p in range(strands) if cur[p] != p}
    raw = [tuple(close.get(e, e) for e in x) for x in raw]
    touched = sorted({e for x in raw for e in x})
    ids = {e: k for k, e in enumerate(touched)}
    xs = tuple(tuple(ids[e] for e in x) for x in raw)
    n_free = sum(1 for p in range(strands) if p not in ids)
    marked = None
    if mark:
        if 0 in ids:
            marked = ids[0]
        else:
            untouched = [p for p in range(strands) if p not in ids]
            marked = len(touched) + untouched.index(0)
    return PlanarDiagram(xs, n_free, marked)


def random_braid_word(rng: np.random.Generator, strands: int, length: int) -> list[int]:
    gens = rng.integers(1, strands, size=length)
    signs = rng.choice([-1, 1], size=length)
    return [int(g * s) for g, s in zip(gens, signs)]


def random_diagram(rng: np.random.Generator, max_crossings: int = 7, max_strands: int = 4) -> PlanarDiagram:
    strands = int(rng.integers(2, max_strands + 1))
    length = int(rng.integers(1, max_crossings + 1))
    return braid_closure(random_braid_word(rng, strands, length), strands)


def braid_r2(word: Sequence[int], pos: int, gen: int) -> list[int]:
    """Insert the cancelling pair ``gen, -gen`` before position ``pos``."""
    if gen == 0 or not 0 <= pos <= len(word):
        raise PreconditionError("invalid R2 insertion")
    w = [int(g) for g in word]
    return w[:pos] + [int(gen), -int(gen)] + w[pos:]


def braid_r3(word: Sequence[int], pos: int) -> list[int]:
    """Rewrite ``s_i s_j s_i`` at ``pos`` as ``s_j s_i s_j`` when ``|i - j| = 1`` and signs agree."""
    w = [int(g) for g in word]
    if not 0 <= pos <= len(w) - 3:
        raise PreconditionError("R3 window out of range")
    x, y, z = w[pos:pos + 3]
    if x != z or abs(abs(x) - abs(y)) != 1 or (x > 0) != (y > 0):
        raise PreconditionError("window is not of the form s_i s_j s_i")
    return w[:pos] + [y, x, y] + w[pos + 3:]


def r3_windows(word: Sequence[int]) -> list[int]:
    w = [int(g) for g in word]
    out = []
    for p in range(len(w) - 2):
        x, y, z = w[p:p + 3]
        if x == z and abs(abs(x) - abs(y)) == 1 and (x > 0) == (y > 0):
            out.append(p)
    return out
