"""Khovanov chain complexes over GF(2).

Generators in degree ``i`` are enhanced states whose resolution has ``i``
1-smoothings.  A resolution is encoded as an integer with crossing 0 in the
most significant of ``n`` bits, so ascending integers list resolutions in
lexicographic order of their bit tuples.  Undotted circles are ordered by
smallest edge id; undotted circle ``j`` is bit ``u-1-j`` of the label word.

Label bits: in the ``"pm"`` basis ``-`` is 0 and ``+`` is 1; in the
``"one_x"`` basis ``1`` is 0 and ``X`` is 1.  With ``- = 1`` and ``+ = 1 + X``
the two bases are related by the submask matrix ``T[w', w] = [w' ⊆ w]``,
which is its own inverse over GF(2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .diagram import PlanarDiagram, circle_labels, mirror, resolve_crossing
from .errors import CapacityError, PreconditionError
from .homalg.complex import (
    ChainComplex,
    HomologySummary,
    complexes_equal,
    cone,
    is_chain_map,
    mod2,
    sparse_equal,
    spmul2,
)

BASES = ("pm", "one_x")
LABEL_CHARS = {"pm": ("-", "+"), "one_x": ("1", "X")}
DEFAULT_CAPACITY = 1 << 26


@dataclass(frozen=True)
class EnhancedState:
    """Resolution bits plus one label per undotted circle."""

    bits: tuple[int, ...]
    labels: tuple[str, ...]

    @property
    def degree(self) -> int:
        return sum(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits)) + "|" + "".join(self.labels)


@dataclass(frozen=True)
class _ResInfo:
    circ: np.ndarray  # circle index of every edge id
    n_circles: int
    dot: int  # dotted circle index, -1 when unreduced
    und: np.ndarray  # undotted index of every circle, -1 for the dot
    u: int
    rep: np.ndarray  # smallest edge of every circle


class KhovanovCube:
    """Resolution data and local differential rules for one diagram."""

    def __init__(self, diagram: PlanarDiagram, reduced: bool):
        if reduced and not diagram.pointed:
            raise PreconditionError("the reduced complex needs a pointed diagram")
        self.diagram = diagram
        self.reduced = bool(reduced)
        self.n = diagram.n_crossings
        self._info = lru_cache(maxsize=1 << 16)(self._compute_info)
        self._res_cache: dict[int, np.ndarray] = {}
        self._off_cache: dict[int, tuple[dict[int, int], int]] = {}

    # resolutions ------------------------------------------------------
    def crossing_bit(self, c: int) -> int:
        return 1 << (self.n - 1 - c)

    def bits_of(self, s: int) -> tuple[int, ...]:
        return tuple((s >> (self.n - 1 - c)) & 1 for c in range(self.n))

    def int_of(self, bits: Sequence[int]) -> int:
        s = 0
        for b in bits:
            s = (s << 1) | int(b)
        return s

    def _compute_info(self, s: int) -> _ResInfo:
        labels, k = circle_labels(self.diagram, self.bits_of(s))
        circ = np.asarray(labels, dtype=np.int64)
        dot = int(circ[self.diagram.marked_edge]) if self.reduced else -1
        und = np.full(k, -1, dtype=np.int64)
        j = 0
        for x in range(k):
            if x != dot:
                und[x] = j
                j += 1
        rep = np.full(k, -1, dtype=np.int64)
        for e in range(len(circ) - 1, -1, -1):
            rep[circ[e]] = e
        return _ResInfo(circ, k, dot, und, j, rep)

    def info(self, s: int) -> _ResInfo:
        return self._info(s)

    def resolutions(self, i: int) -> np.ndarray:
        if i not in self._res_cache:
            if not 0 <= i <= self.n:
                self._res_cache[i] = np.zeros(0, dtype=np.int64)
            else:
                vals = [sum(self.crossing_bit(c) for c in cs) for cs in combinations(range(self.n), i)]
                self._res_cache[i] = np.sort(np.asarray(vals, dtype=np.int64))
        return self._res_cache[i]

    def offsets(self, i: int) -> tuple[dict[int, int], int]:
        if i not in self._off_cache:
            off = {}
            total = 0
            for s in self.resolutions(i).tolist():
                off[s] = total
                total += 1 << self.info(s).u
            self._off_cache[i] = (off, total)
        return self._off_cache[i]

    def dim(self, i: int) -> int:
        return self.offsets(i)[1]

    # local rules --------------------------------------------------------
    def edge_images(self, s: int, c: int, words: np.ndarray, basis: str) -> tuple[int, np.ndarray, np.ndarray]:
        """Images of ``(s, w)`` under the edge map of crossing ``c`` (bit ``c`` of ``s`` is 0).

        Returns ``(s', src, dst)``: each pair ``(words[src[k]], dst[k])`` is one
        term of the output.
        """
        s2 = s | self.crossing_bit(c)
        fi, gi = self.info(s), self.info(s2)
        u, u2 = fi.u, gi.u
        a, b, cc, _ = self.diagram.crossings[c]
        A, C = int(fi.circ[a]), int(fi.circ[cc])
        words = np.asarray(words, dtype=np.int64)

        def lab(x: int) -> np.ndarray:
            return (words >> (u - 1 - int(fi.und[x]))) & 1

        def put(j2: int) -> int:
            return u2 - 1 - j2

        base = np.zeros(words.shape[0], dtype=np.int64)
        for x in range(fi.n_circles):
            if x in (A, C) or fi.und[x] < 0:
                continue
            j2 = int(gi.und[gi.circ[fi.rep[x]]])
            base |= lab(x) << put(j2)
        idx = np.arange(words.shape[0])

        if A != C:
            M = int(gi.circ[a])
            if gi.und[M] < 0:
                other = C if A == fi.dot else A
                if basis == "one_x":
                    keep = lab(other) == 0
                    return s2, idx[keep], base[keep]
                return s2, idx, base
            la, lc = lab(A), lab(C)
            m = put(int(gi.und[M]))
            if basis == "one_x":
                keep = (la & lc) == 0
                return s2, idx[keep], (base | ((la | lc) << m))[keep]
            return s2, idx, base | ((la ^ lc) << m)

        P, Q = int(gi.circ[a]), int(gi.circ[b])
        if A == fi.dot:
            N = Q if P == gi.dot else P
            nb = put(int(gi.und[N]))
            if basis == "one_x":
                return s2, idx, base | (1 << nb)
            return s2, np.concatenate([idx, idx]), np.concatenate([base, base | (1 << nb)])
        ls = lab(A)
        p, q = put(int(gi.und[P])), put(int(gi.und[Q]))
        if basis == "one_x":
            one = ls == 0
            first = np.where(one, base | (1 << q), base | (1 << p) | (1 << q))
            second = (base | (1 << p))[one]
            return s2, np.concatenate([idx, idx[one]]), np.concatenate([first, second])
        # eta = 0: (0, ls^1); eta = 1: (1, ls)
        out0 = base | ((ls ^ 1) << q)
        out1 = base | (1 << p) | (ls << q)
        return s2, np.concatenate([idx, idx]), np.concatenate([out0, out1])

    def differential(self, i: int, basis: str) -> sp.csr_matrix:
        off, ncols = self.offsets(i)
        off2, nrows = self.offsets(i + 1)
        rows, cols = [], []
        for s in self.resolutions(i).tolist():
            u = self.info(s).u
            words = np.arange(1 << u, dtype=np.int64)
            for c in range(self.n):
                if s & self.crossing_bit(c):
                    continue
                s2, src, dst = self.edge_images(s, c, words, basis)
                rows.append(dst + off2[s2])
                cols.append(src + off[s])
        if not rows:
            return sp.csr_matrix((nrows, ncols), dtype=np.uint8)
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        m = sp.coo_matrix((np.ones(r.size, dtype=np.int64), (r, c)), shape=(nrows, ncols))
        return mod2(m)

    def apply(self, states: Iterable[tuple[int, int]], basis: str) -> set[tuple[int, int]]:
        """Matrix-free differential on a sum of generators ``(resolution, word)``."""
        acc: set[tuple[int, int]] = set()
        for s, w in states:
            for c in range(self.n):
                if s & self.crossing_bit(c):
                    continue
                s2, _, dst = self.edge_images(s, c, np.array([w]), basis)
                for x in dst.tolist():
                    acc ^= {(s2, x)}
        return acc

    def grading(self, i: int) -> np.ndarray:
        """Quantum grading ``#1 - #X + i`` of each one_x generator (dotted circle omitted)."""
        parts = []
        for s in self.resolutions(i).tolist():
            u = self.info(s).u
            pc = np.array([bin(w).count("1") for w in range(1 << u)], dtype=np.int64)
            parts.append(u - 2 * pc + i)
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    # state <-> index --------------------------------------------------
    def state(self, i: int, index: int, basis: str) -> EnhancedState:
        off, total = self.offsets(i)
        if not 0 <= index < total:
            raise IndexError(index)
        res = self.resolutions(i)
        starts = np.array([off[s] for s in res.tolist()])
        k = int(np.searchsorted(starts, index, side="right") - 1)
        s = int(res[k])
        w = index - off[s]
        u = self.info(s).u
        chars = LABEL_CHARS[basis]
        labels = tuple(chars[(w >> (u - 1 - j)) & 1] for j in range(u))
        return EnhancedState(self.bits_of(s), labels)

    def index(self, state: EnhancedState, basis: str) -> int:
        s = self.int_of(state.bits)
        off, _ = self.offsets(state.degree)
        chars = LABEL_CHARS[basis]
        w = 0
        for ch in state.labels:
            w = (w << 1) | chars.index(ch)
        if len(state.labels) != self.info(s).u:
            raise PreconditionError("wrong number of labels for this resolution")
        return off[s] + w

    def basis_list(self, i: int, basis: str) -> list[EnhancedState]:
        return [self.state(i, k, basis) for k in range(self.dim(i))]


class KhovanovComplex(ChainComplex):
    """Chain complex of a diagram, with access to its enhanced-state basis."""

    def __init__(self, cube: KhovanovCube, basis: str, dims, diffs, grading=None):
        self.cube = cube
        self.basis_kind = basis
        super().__init__(
            0,
            dims,
            diffs,
            basis=lambda i: cube.basis_list(i, basis),
            grading=grading,
            name=f"Kh{'_red' if cube.reduced else ''}[{basis}]",
        )

    @property
    def diagram(self) -> PlanarDiagram:
        return self.cube.diagram

    @property
    def reduced(self) -> bool:
        return self.cube.reduced

    def state(self, i: int, index: int) -> EnhancedState:
        return self.cube.state(i, index, self.basis_kind)

    def index(self, state: EnhancedState) -> int:
        return self.cube.index(state, self.basis_kind)

    def vector(self, i: int, states: Iterable[tuple[int, int]]) -> np.ndarray:
        off, total = self.cube.offsets(i)
        v = np.zeros(total, dtype=np.uint8)
        for s, w in states:
            v[off[s] + w] ^= 1
        return v


def chain_dims(diagram: PlanarDiagram, reduced: bool = True) -> list[int]:
    """dim C^i = sum over resolutions of degree i of 2^(#circles - [reduced])."""
    cube = KhovanovCube(diagram, reduced)
    return [cube.dim(i) for i in range(cube.n + 1)]


def build_complex(
    diagram: PlanarDiagram,
    reduced: bool = True,
    basis: str = "pm",
    capacity: int = DEFAULT_CAPACITY,
    check: bool = False,
) -> KhovanovComplex:
    if basis not in BASES:
        raise PreconditionError(f"basis must be one of {BASES}")
    cube = KhovanovCube(diagram, reduced)
    dims = [cube.dim(i) for i in range(cube.n + 1)]
    if max(dims) > capacity:
        raise CapacityError(f"chain group of dimension {max(dims)} exceeds the cap {capacity}")
    diffs = {i: cube.differential(i, basis) for i in range(cube.n)}
    grading = None
    if basis == "one_x":
        grading = {i: cube.grading(i) for i in range(cube.n + 1)}
    out = KhovanovComplex(cube, basis, dims, diffs, grading)
    if check:
        out.check()
    return out


def change_of_basis(cube: KhovanovCube, i: int) -> sp.csr_matrix:
    """Block-diagonal submask matrix of degree ``i`` (self-inverse)."""
    rows, cols = [], []
    off, total = cube.offsets(i)
    for s in cube.resolutions(i).tolist():
        u = cube.info(s).u
        o = off[s]
        for w in range(1 << u):
            sub = w
            while True:
                rows.append(o + sub)
                cols.append(o + w)
                if sub == 0:
                    break
                sub = (sub - 1) & w
    data = np.ones(len(rows), dtype=np.uint8)
    return sp.csr_matrix((data, (rows, cols)), shape=(total, total))


def change_basis(c: KhovanovComplex) -> KhovanovComplex:
    """Rewrite a one_x complex in the pm basis by conjugating with the submask matrix."""
    if c.basis_kind != "one_x":
        raise PreconditionError("change_basis expects a complex in the one_x basis")
    cube = c.cube
    ts = {i: change_of_basis(cube, i) for i in c.degrees}
    diffs = {i: spmul2(spmul2(ts[i + 1], c.d(i)), ts[i]) for i in range(cube.n)}
    return KhovanovComplex(cube, "pm", c.dims, diffs)


def khovanov_homology(diagram: PlanarDiagram, reduced: bool = True) -> HomologySummary:
    """Homology dimensions, computed blockwise in the quantum grading of the one_x complex."""
    return build_complex(diagram, reduced, "one_x").homology_dims()


def unreduced_splitting_check(diagram: PlanarDiagram) -> bool:
    if not diagram.pointed:
        raise PreconditionError("diagram must be pointed")
    full = khovanov_homology(diagram, reduced=False)
    red = khovanov_homology(diagram, reduced=True)
    return all(full.kh(i) == 2 * red.kh(i) for i in full.degrees)


# duality -------------------------------------------------------------------


def mirror_index_map(cube: KhovanovCube, mcube: KhovanovCube, i: int) -> np.ndarray:
    """Index in degree ``n - i`` of the mirror of each degree-``i`` generator (flip bits and labels)."""
    n = cube.n
    full = (1 << n) - 1
    off, total = cube.offsets(i)
    moff, _ = mcube.offsets(n - i)
    out = np.empty(total, dtype=np.int64)
    for s, o in off.items():
        u = cube.info(s).u
        if mcube.info(s ^ full).u != u:
            raise PreconditionError("mirror resolution has a different circle count")
        words = np.arange(1 << u, dtype=np.int64)
        out[o : o + (1 << u)] = moff[s ^ full] + (words ^ ((1 << u) - 1))
    return out


def mirror_duality_check(diagram: PlanarDiagram, reduced: bool = True) -> bool:
    """Differential ``i`` of D equals the transpose of differential ``n-i-1`` of D! under the generator map."""
    c = build_complex(diagram, reduced, "pm")
    m = build_complex(mirror(diagram), reduced, "pm")
    n = c.cube.n
    for i in range(n):
        px = mirror_index_map(c.cube, m.cube, i)
        pt = mirror_index_map(c.cube, m.cube, i + 1)
        mm = m.d(n - i - 1).tocsr()
        expect = mm[px, :][:, pt].T
        if not sparse_equal(c.d(i), expect):
            return False
    return True


# cone decomposition -------------------------------------------------------


def _cone_permutation(cube: KhovanovCube, subs: tuple[KhovanovCube, KhovanovCube], c: int,
                      edge_maps: tuple[list[int], list[int]], i: int) -> np.ndarray:
    """Position of each degree-``i`` generator of ``cube`` in the cone basis of the two smoothings."""
    off, total = cube.offsets(i)
    out = np.empty(total, dtype=np.int64)
    for s, o in off.items():
        bits = cube.bits_of(s)
        b = bits[c]
        sub, emap = subs[b], edge_maps[b]
        ss = sub.int_of(bits[:c] + bits[c + 1 :])
        fi, gi = cube.info(s), sub.info(ss)
        soff, _ = sub.offsets(i - b)
        u = fi.u
        if gi.u != u:
            raise PreconditionError("resolved diagram has a different circle count")
        perm = np.empty(u, dtype=np.int64)
        for x in range(fi.n_circles):
            j = fi.und[x]
            if j >= 0:
                perm[j] = gi.und[gi.circ[emap[fi.rep[x]]]]
        words = np.arange(1 << u, dtype=np.int64)
        new = np.zeros_like(words)
        for j in range(u):
            new |= ((words >> (u - 1 - j)) & 1) << (u - 1 - perm[j])
        shift = 0 if b == 0 else subs[0].dim(i)
        out[o : o + (1 << u)] = shift + soff[ss] + new
    return out


def crossing_cone_check(diagram: PlanarDiagram, c: int, reduced: bool = True,
                        basis: str = "pm") -> bool:
    """C(D) is the cone of the crossing-``c`` edge map from C(D_0) to C(D_1)."""
    whole = build_complex(diagram, reduced, basis)
    d0, map0 = resolve_crossing(diagram, c, 0)
    d1, map1 = resolve_crossing(diagram, c, 1)
    c0 = build_complex(d0, reduced, basis)
    c1 = build_complex(d1, reduced, basis)
    n = whole.cube.n
    perms = {
        i: _cone_permutation(whole.cube, (c0.cube, c1.cube), c, (map0, map1), i)
        for i in range(n + 1)
    }
    diffs = {}
    for i in range(n):
        m = whole.d(i).tocoo()
        diffs[i] = mod2(sp.coo_matrix(
            (m.data.astype(np.int64), (perms[i + 1][m.row], perms[i][m.col])), shape=m.shape))
    permuted = ChainComplex(0, whole.dims, diffs)
    f = {i: diffs[i][c0.dim(i + 1) :, : c0.dim(i)] for i in range(n)}
    if not is_chain_map(c0, c1, f):
        return False
    return complexes_equal(cone(c0, c1, f), permuted)


# structural weights ----------------------------------------------------------


def out_degree(cube: KhovanovCube, s: int) -> int:
    """Number of pm-basis terms in the differential of any generator of resolution ``s``."""
    fi = cube.info(s)
    total = 0
    for c in range(cube.n):
        if s & cube.crossing_bit(c):
            continue
        a, _, cc, _ = cube.diagram.crossings[c]
        merge = fi.circ[a] != fi.circ[cc]
        total += 1 if merge else 2
    return total


def in_degree(cube: KhovanovCube, s: int) -> int:
    """Number of pm-basis generators whose differential contains a given generator of ``s``."""
    total = 0
    for c in range(cube.n):
        if not s & cube.crossing_bit(c):
            continue
        s0 = s ^ cube.crossing_bit(c)
        fi = cube.info(s0)
        a, _, cc, _ = cube.diagram.crossings[c]
        merge = fi.circ[a] != fi.circ[cc]
        total += 2 if merge else 1
    return total


def slice_weight_ranges(diagram: PlanarDiagram, i0: int, reduced: bool = True) -> dict:
    """Row and column weights of the pm slice code at ``i0`` from resolution data alone.

    H_X rows are generators of C^{i0+1} (in-degree), H_X columns generators of
    C^{i0} (out-degree); H_Z rows are generators of C^{i0-1} (out-degree) and
    H_Z columns generators of C^{i0} (in-degree).
    """
    cube = KhovanovCube(diagram, reduced)

    def collect(i, fn):
        return sorted({fn(cube, s) for s in cube.resolutions(i).tolist() if cube.info(s).u >= 0}
                      ) if 0 <= i <= cube.n else []

    return {
        "h_x_rows": collect(i0 + 1, in_degree),
        "h_x_cols": collect(i0, out_degree),
        "h_z_rows": collect(i0 - 1, out_degree),
        "h_z_cols": collect(i0, in_degree),
    }
