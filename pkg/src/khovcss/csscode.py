"""CSS codes read off three-term slices of chain complexes."""

from __future__ import annotations

import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import DimensionMismatch, EmptyCodeError, IntegrityError, UnsupportedFormat
from .homalg.bitmatrix import BitMatrix, rank
from .homalg.complex import ChainComplex, mod2, spmul2
from .homalg.distance import DEFAULT_BUDGET, DEFAULT_WMAX, MinWeight, min_weight_in_kernel

FORMATS = ("alist", "matrixmarket", "json")


@dataclass
class CssCode:
    """Pair of parity-check matrices with ``h_x h_z^T = 0`` (stored sparse)."""

    h_x: sp.csr_matrix
    h_z: sp.csr_matrix
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.h_x = mod2(self.h_x)
        self.h_z = mod2(self.h_z)
        if self.h_x.shape[1] != self.h_z.shape[1]:
            raise DimensionMismatch("h_x and h_z must have the same number of columns")
        if spmul2(self.h_x, self.h_z.T).nnz:
            raise IntegrityError("h_x h_z^T is not zero")

    @property
    def n(self) -> int:
        return self.h_x.shape[1]

    @property
    def h_x_bits(self) -> BitMatrix:
        return BitMatrix.from_sparse(self.h_x)

    @property
    def h_z_bits(self) -> BitMatrix:
        return BitMatrix.from_sparse(self.h_z)

    def permute_columns(self, perm) -> "CssCode":
        perm = np.asarray(perm)
        return CssCode(self.h_x[:, perm], self.h_z[:, perm], dict(self.provenance))


def from_complex_slice(c: ChainComplex, i0: int, provenance: dict | None = None) -> CssCode:
    """``H_X`` is the differential on ``C^{i0}``; ``H_Z`` the transpose of the one on ``C^{i0-1}``."""
    if c.dim(i0) == 0:
        raise EmptyCodeError(f"C^{i0} is zero-dimensional")
    prov = {"degree": i0}
    for key in ("reduced", "basis_kind"):
        if hasattr(c, key):
            prov[key if key != "basis_kind" else "basis"] = getattr(c, key)
    if provenance:
        prov.update(provenance)
    return CssCode(c.d(i0), c.d(i0 - 1).T.tocsr(), prov)


# parameters -------------------------------------------------------------------


@dataclass
class CodeParams:
    n: int
    k: int
    d_x: MinWeight | None
    d_z: MinWeight | None
    row_weights: dict = field(default_factory=dict)

    @property
    def d_upper(self) -> float:
        vals = [m.upper for m in (self.d_x, self.d_z) if m is not None]
        return min(vals) if vals else math.inf

    @property
    def d_lower(self) -> float:
        vals = [m.lower for m in (self.d_x, self.d_z) if m is not None]
        return min(vals) if vals else 0

    @property
    def exact(self) -> bool:
        return self.d_x is not None and self.d_z is not None and self.d_upper == self.d_lower

    @property
    def d(self) -> float:
        return self.d_upper

    def summary(self) -> str:
        def fmt(x):
            return "inf" if math.isinf(x) else str(int(x))

        if self.exact:
            return f"[[{self.n};{self.k};{fmt(self.d)}]] exact"
        return f"[[{self.n};{self.k};{fmt(self.d_lower)}..{fmt(self.d_upper)}]] bounds"

    def to_dict(self) -> dict:
        enc = lambda x: None if math.isinf(x) else int(x)  # noqa: E731
        return {
            "n": self.n,
            "k": self.k,
            "d": enc(self.d_upper) if self.exact else None,
            "d_lower": enc(self.d_lower),
            "d_upper": enc(self.d_upper),
            "exact": self.exact,
            "d_x": None if self.d_x is None else self.d_x.to_dict(),
            "d_z": None if self.d_z is None else self.d_z.to_dict(),
        }


def _side(a: sp.csr_matrix, b_t: sp.csr_matrix, **kw) -> MinWeight:
    """Least weight in ker(a) outside rowspace(b_t)."""
    return min_weight_in_kernel(BitMatrix.from_sparse(a), BitMatrix.from_sparse(b_t.T.tocsr()), **kw)


def params(
    code: CssCode,
    distance_mode: str = "exact",
    budget: int = DEFAULT_BUDGET,
    w_max: int = DEFAULT_WMAX,
    max_work: int | None = None,
    both_sides_exact: bool = False,
) -> CodeParams:
    """``k`` from ranks and ``d = min(d_X, d_Z)``.

    ``d_Z`` is the least weight in ``ker H_X`` outside ``rowspace H_Z`` and
    ``d_X`` the same with the roles swapped.  In exact mode the side with the
    smaller quick estimate is searched to the end first; the other side is
    then only searched until its lower bound reaches that value, unless
    ``both_sides_exact`` is set.  ``distance_mode="none"`` skips distances.
    """
    n = code.n
    rx = rank(code.h_x_bits) if code.h_x.nnz else 0
    rz = rank(code.h_z_bits) if code.h_z.nnz else 0
    k = n - rx - rz
    if k < 0:
        raise IntegrityError("negative k")
    if distance_mode == "none":
        return CodeParams(n, k, None, None)
    common = dict(budget=budget, w_max=w_max)
    if distance_mode == "bound":
        dz = _side(code.h_x, code.h_z, mode="bound", max_work=max_work, **common)
        dx = _side(code.h_z, code.h_x, mode="bound", max_work=max_work, **common)
        return CodeParams(n, k, dx, dz)
    if distance_mode != "exact":
        raise ValueError(f"unknown distance mode {distance_mode!r}")
    quick = 1 << 20
    sides = {
        "z": (code.h_x, code.h_z),
        "x": (code.h_z, code.h_x),
    }
    found = {key: _side(a, b, max_work=quick, **common) for key, (a, b) in sides.items()}
    order = sorted(found, key=lambda key: (not found[key].exact, found[key].upper, key))
    first, second = order
    if not found[first].exact:
        found[first] = _side(*sides[first], max_work=max_work, **common)
    if not found[second].exact:
        cutoff = None
        if not both_sides_exact and found[first].exact:
            cutoff = int(found[first].upper) if not math.isinf(found[first].upper) else None
        found[second] = _side(*sides[second], max_work=max_work, stop_at=cutoff, **common)
    return CodeParams(n, k, found["x"], found["z"])


# sparseness -------------------------------------------------------------------


def _hist(weights: np.ndarray) -> dict[int, int]:
    return {int(w): int(c) for w, c in sorted(Counter(weights.tolist()).items())}


def weight_report(m: sp.csr_matrix) -> dict:
    rows = np.diff(m.indptr) if m.shape[0] else np.zeros(0, dtype=np.int64)
    cols = np.bincount(m.indices, minlength=m.shape[1]) if m.shape[1] else np.zeros(0, dtype=np.int64)
    out = {"rows": m.shape[0], "cols": m.shape[1], "row_hist": _hist(rows), "col_hist": _hist(cols)}
    out["row_min"] = int(rows.min()) if rows.size else None
    out["row_max"] = int(rows.max()) if rows.size else None
    out["col_min"] = int(cols.min()) if cols.size else None
    out["col_max"] = int(cols.max()) if cols.size else None
    return out


def family_weight_check(prov: dict, hx: dict, hz: dict) -> dict | None:
    """Family-specific bound check.

    unknot/unlink: every row weight of both matrices in ``[l+1, 2(l+1)]``.
    torus: the column weights of ``H_X`` are all ``2(l-r)`` and those of
    ``H_Z`` all ``r`` (each qubit meets that many checks); the row weights are
    ``r+1`` and ``2(l-r+1)``.
    """
    fam, l = prov.get("family"), prov.get("l")
    if fam is None or l is None:
        return None
    if fam in ("unknot", "unlink"):
        lo, hi = l + 1, 2 * (l + 1)
        ws = list(hx["row_hist"]) + list(hz["row_hist"])
        return {"rule": f"row weights in [{lo}, {hi}]", "ok": all(lo <= w <= hi for w in ws)}
    if fam == "torus":
        r = prov["r"]
        cols_ok = set(hx["col_hist"]) <= {2 * (l - r)} and set(hz["col_hist"]) <= {r}
        rows_ok = set(hx["row_hist"]) <= {r + 1} and set(hz["row_hist"]) <= {2 * (l - r + 1)}
        return {
            "rule": f"H_X columns {2 * (l - r)}, H_Z columns {r}",
            "ok": cols_ok,
            "rows_rule": f"H_X rows {r + 1}, H_Z rows {2 * (l - r + 1)}",
            "rows_ok": rows_ok,
        }
    return None


def sparseness_audit(code: CssCode) -> dict:
    hx, hz = weight_report(code.h_x), weight_report(code.h_z)
    return {"h_x": hx, "h_z": hz, "family_check": family_weight_check(code.provenance, hx, hz)}


# export / import ---------------------------------------------------------------


def alist_bytes(m: sp.csr_matrix) -> bytes:
    m = mod2(m)
    rows, cols = m.shape
    csc = m.tocsc()
    col_lists = [(csc.indices[csc.indptr[j] : csc.indptr[j + 1]] + 1).tolist() for j in range(cols)]
    row_lists = [(m.indices[m.indptr[i] : m.indptr[i + 1]] + 1).tolist() for i in range(rows)]
    cdeg = [len(x) for x in col_lists]
    rdeg = [len(x) for x in row_lists]
    lines = [
        f"{cols} {rows}",
        f"{max(cdeg, default=0)} {max(rdeg, default=0)}",
        " ".join(map(str, cdeg)),
        " ".join(map(str, rdeg)),
    ]
    lines += [" ".join(map(str, sorted(x))) for x in col_lists]
    lines += [" ".join(map(str, sorted(x))) for x in row_lists]
    return ("\n".join(lines) + "\n").encode()


def alist_read(data: bytes | str) -> sp.csr_matrix:
    text = data.decode() if isinstance(data, bytes) else data
    lines = text.split("\n")
    try:
        cols, rows = map(int, lines[0].split())
        col_lists = lines[4 : 4 + cols]
        entries = [(i - 1, j) for j, line in enumerate(col_lists) for i in map(int, line.split())]
    except (ValueError, IndexError) as exc:
        raise UnsupportedFormat(f"malformed alist data: {exc}") from exc
    r = [e[0] for e in entries]
    c = [e[1] for e in entries]
    m = sp.coo_matrix((np.ones(len(r), dtype=np.uint8), (r, c)), shape=(rows, cols))
    return mod2(m)


def mm_bytes(m: sp.csr_matrix) -> bytes:
    buf = io.BytesIO()
    scipy.io.mmwrite(buf, sp.coo_matrix(mod2(m)), field="pattern")
    return buf.getvalue()


def mm_read(data: bytes) -> sp.csr_matrix:
    m = scipy.io.mmread(io.BytesIO(data))
    return mod2(sp.csr_matrix(m, dtype=np.int64))


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def code_json(code: CssCode) -> bytes:
    def rows(m):
        return [m.indices[m.indptr[i] : m.indptr[i + 1]].tolist() for i in range(m.shape[0])]

    payload = {
        "n": code.n,
        "h_x": rows(code.h_x),
        "h_z": rows(code.h_z),
        "provenance": {k: _jsonable(v) for k, v in code.provenance.items()},
    }
    return json.dumps(payload, sort_keys=True).encode()


def code_from_json(data: bytes | str) -> CssCode:
    obj = json.loads(data)
    n = obj["n"]

    def build(rows):
        r = [i for i, row in enumerate(rows) for _ in row]
        c = [j for row in rows for j in row]
        return sp.csr_matrix((np.ones(len(r), dtype=np.uint8), (r, c)), shape=(len(rows), n))

    return CssCode(build(obj["h_x"]), build(obj["h_z"]), obj.get("provenance", {}))


def export(code: CssCode, fmt: str) -> dict[str, bytes]:
    """File name -> contents for the chosen format."""
    if fmt == "alist":
        return {"h_x.alist": alist_bytes(code.h_x), "h_z.alist": alist_bytes(code.h_z)}
    if fmt == "matrixmarket":
        return {"h_x.mtx": mm_bytes(code.h_x), "h_z.mtx": mm_bytes(code.h_z)}
    if fmt == "json":
        return {"code.json": code_json(code)}
    raise UnsupportedFormat(f"unknown format {fmt!r}; expected one of {FORMATS}")


def import_code(files: dict[str, bytes], fmt: str, provenance: dict | None = None) -> CssCode:
    if fmt == "alist":
        return CssCode(alist_read(files["h_x.alist"]), alist_read(files["h_z.alist"]), provenance or {})
    if fmt == "matrixmarket":
        return CssCode(mm_read(files["h_x.mtx"]), mm_read(files["h_z.mtx"]), provenance or {})
    if fmt == "json":
        return code_from_json(files["code.json"])
    raise UnsupportedFormat(f"unknown format {fmt!r}; expected one of {FORMATS}")
