"""Command-line front end: ``khovcss <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CapacityError, KhovCSSError

log = logging.getLogger("khovcss")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    args: argparse.Namespace

    def __getattr__(self, name):
        return getattr(self.args, name)


# argument helpers ---------------------------------------------------------------


def int_range(text: str) -> list[int]:
    """``"3"``, ``"3..6"`` or ``"2,4,7"``."""
    out: list[int] = []
    try:
        for part in text.split(","):
            if ".." in part:
                lo, hi = part.split("..")
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None
    return out


def _diagram(cfg):
    from . import diagram as dg

    if getattr(cfg, "diagram", None):
        return dg.PlanarDiagram.from_json(Path(cfg.diagram).read_text())
    if cfg.family is None or cfg.l is None:
        raise UsageError("give --diagram FILE or --family with --l")
    return {"unknot": dg.gen_unknot, "unlink": dg.gen_unlink, "torus": dg.gen_torus}[cfg.family](cfg.l)


def _degree(cfg) -> int:
    if cfg.r is not None:
        if cfg.family == "torus" and not 2 <= cfg.r <= cfg.l:
            raise UsageError("torus codes need 2 <= r <= l")
        return cfg.r
    if cfg.family in ("unknot", "unlink"):
        return cfg.l
    raise UsageError("--r is required for this diagram")


def _write(files: dict[str, bytes], out: str | None) -> list[str]:
    base = Path(out or ".")
    base.mkdir(parents=True, exist_ok=True)
    written = []
    for name, data in sorted(files.items()):
        p = base / name
        p.write_bytes(data)
        written.append(str(p))
    return written


def _emit(obj, out: str | None, name: str) -> None:
    text = json.dumps(obj, sort_keys=True) + "\n"
    if out:
        _write({name: text.encode()}, out)
    else:
        sys.stdout.write(text)


# subcommands --------------------------------------------------------------------


def cmd_gen(cfg) -> int:
    d = _diagram(cfg)
    if cfg.out:
        _write({"diagram.json": d.to_json().encode() + b"\n"}, cfg.out)
    else:
        print(d.to_json())
    return EXIT_OK


def cmd_complex(cfg) -> int:
    from .khovanov import build_complex, khovanov_homology

    d = _diagram(cfg)
    c = build_complex(d, not cfg.unreduced, cfg.basis, check=True)
    diffs = {}
    for i in range(c.min_degree, c.min_degree + len(c.dims) - 1):
        m = c.d(i).tocoo()
        order = np.lexsort((m.col, m.row))
        diffs[str(i)] = {"shape": list(m.shape), "entries": np.stack([m.row[order], m.col[order]], 1).tolist()}
    h = khovanov_homology(d, not cfg.unreduced)
    obj = {"min_degree": c.min_degree, "dims": list(map(int, c.dims)), "differentials": diffs,
           "homology": h.to_dict(), "reduced": not cfg.unreduced, "basis": cfg.basis}
    _emit(obj, cfg.out, "complex.json")
    return EXIT_OK


def _code(cfg):
    from .csscode import from_complex_slice
    from .khovanov import build_complex

    d = _diagram(cfg)
    i0 = _degree(cfg)
    c = build_complex(d, not cfg.unreduced, cfg.basis)
    prov = {"reduced": not cfg.unreduced, "basis": cfg.basis}
    if cfg.family:
        prov.update({"family": cfg.family, "l": cfg.l, "r": i0})
    return from_complex_slice(c, i0, prov)


def cmd_css(cfg) -> int:
    from .csscode import export

    code = _code(cfg)
    files = export(code, cfg.format)
    written = _write(files, cfg.out)
    print(f"n = {code.n}; wrote {', '.join(written)}")
    return EXIT_OK


def _params(cfg, code):
    from .csscode import params

    return params(code, cfg.distance, budget=cfg.budget, w_max=cfg.w_max, max_work=cfg.max_work)


def cmd_params(cfg) -> int:
    from .csscode import sparseness_audit

    code = _code(cfg)
    p = _params(cfg, code)
    if cfg.json:
        obj = p.to_dict()
        obj["sparseness"] = sparseness_audit(code)
        obj["provenance"] = code.provenance
        print(json.dumps(obj, sort_keys=True))
    else:
        print(p.summary())
    return EXIT_OK


def cmd_verify(cfg) -> int:
    from .families import verify_family

    if cfg.family is None or cfg.l is None:
        raise UsageError("verify needs --family and --l")
    ls = cfg.l if isinstance(cfg.l, list) else [cfg.l]
    rs = cfg.r_list
    records = verify_family(cfg.family, ls, rs, cfg.distance, cfg.budget, cfg.max_work)
    lines = [rec.to_json() for rec in records]
    if cfg.out:
        _write({"verify.jsonl": ("\n".join(lines) + "\n").encode()}, cfg.out)
    if cfg.json:
        print("\n".join(lines))
    else:
        print(f"{'family':7} {'l':>3} {'r':>3} {'n':>10} {'k':>6} {'d (formula)':>12} {'d (computed)':>14}  status")
        for rec in records:
            comp = rec.computed
            dc = comp.get("d")
            if dc is None and comp.get("d_lower") is not None:
                dc = f"{comp['d_lower']}..{comp['d_upper']}"
            status = "pass" if rec.ok else "FAIL " + ",".join(k for k, v in rec.checks.items() if not v)
            print(f"{rec.family:7} {rec.l:>3} {rec.r:>3} {comp['n']:>10} {comp['k']:>6} "
                  f"{rec.expected['d']:>12} {str(dc):>14}  {status}")
            for note in rec.notes:
                print(f"        note: {note}")
    return EXIT_OK if all(rec.ok for rec in records) else EXIT_MISMATCH


def cmd_asymptotics(cfg) -> int:
    from .asymptotics import best_param_check, legendre_check, ratio_to_asymptote, unlink_ratio

    leg = [legendre_check(l) for l in range(0, cfg.legendre_max + 1)]
    leg_ok = all(x["ok"] for x in leg)
    points = [100, 1000, 10000]
    sq = {l: ratio_to_asymptote(l, 2) for l in points}
    ul = {l: unlink_ratio(l) for l in points}

    def shrinking(vals):
        errs = [abs(vals[l] - 1) for l in points]
        return all(a > b for a, b in zip(errs, errs[1:])) and abs(vals[1000] - 1) <= 0.05

    best = best_param_check(range(2, cfg.best_max + 1))
    checked = [row for row in best["rows"] if not row["skipped"]]
    thr = best["threshold"]
    best_ok = thr is not None and all(row["verdict"] for row in checked if row["l"] >= thr)
    report = {
        "legendre": {"max_l": cfg.legendre_max, "ok": leg_ok},
        "sum_squares_x2": {"ratios": sq, "ok": shrinking(sq)},
        "unlink_T": {"ratios": ul, "ok": shrinking(ul)},
        "best_params": {"range": [2, cfg.best_max], "threshold": thr, "ok": best_ok,
                        "ratio_threshold": best["ratio_threshold"],
                        "ratio_failures": [r["l"] for r in checked if not r["ratio_ok"]],
                        "rounding": "half-up"},
    }
    if cfg.eps_stream:
        from .asymptotics import eps_sequence

        report["eps_stream"] = eps_sequence(range(2, 2 + cfg.eps_stream))
    if cfg.json:
        print(json.dumps(report, sort_keys=True))
    else:
        for key, val in report.items():
            if key == "eps_stream":
                continue
            print(f"{key:15} {'pass' if val['ok'] else 'FAIL'}  "
                  + json.dumps({k: v for k, v in val.items() if k != 'ok'}, sort_keys=True))
    ok = all(v["ok"] for k, v in report.items() if k != "eps_stream")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_weights(cfg) -> int:
    """Exploratory: d^i before and after random R2/R3 moves on braid closures."""
    from .diagram import braid_closure, braid_r2, braid_r3, random_braid_word
    from .homalg.distance import min_homology_weight
    from .khovanov import build_complex, khovanov_homology

    rng = np.random.default_rng(cfg.seed)

    def profile(d):
        c = build_complex(d, True, "pm")
        h = khovanov_homology(d, True)
        out = {}
        for j, v in enumerate(h.homology):
            if v:
                i = h.min_degree + j
                mw = min_homology_weight(c, i, budget=cfg.budget, max_work=cfg.max_work)
                out[str(i)] = {"rank": v, "upper": mw.to_dict()["upper"], "lower": mw.to_dict()["lower"]}
        return out

    done = 0
    attempts = 0
    while done < cfg.samples and attempts < 100 * cfg.samples:
        attempts += 1
        strands = int(rng.integers(2, 4))
        word = random_braid_word(rng, strands, int(rng.integers(1, cfg.max_crossings)))
        if cfg.rmove == "r2":
            g = int(rng.integers(1, strands)) * int(rng.choice([-1, 1]))
            new = braid_r2(word, int(rng.integers(0, len(word) + 1)), g)
        else:
            if strands < 3:
                continue
            i = int(rng.integers(1, strands - 1))
            s = int(rng.choice([-1, 1]))
            pos = int(rng.integers(0, len(word) + 1))
            word = word[:pos] + [s * i, s * (i + 1), s * i] + word[pos:]
            new = braid_r3(word, pos)
        if len(new) > cfg.max_crossings + 3:
            continue
        rec = {"move": cfg.rmove, "strands": strands, "before": word, "after": new,
               "d_before": profile(braid_closure(word, strands)),
               "d_after": profile(braid_closure(new, strands))}
        print(json.dumps(rec, sort_keys=True))
        done += 1
    return EXIT_OK


# parser -------------------------------------------------------------------------


def _family_args(p, l_type=int, need_r=True):
    p.add_argument("--family", choices=["unknot", "unlink", "torus"])
    p.add_argument("--l", type=l_type)
    if need_r:
        p.add_argument("--r", type=int)
    p.add_argument("--diagram", help="diagram JSON file (instead of --family)")


def _code_args(p):
    p.add_argument("--unreduced", action="store_true", help="use the unreduced complex")
    p.add_argument("--basis", choices=["pm", "one_x"], default="pm")


def _distance_args(p, default="exact"):
    p.add_argument("--distance", choices=["exact", "bound", "none"], default=default)
    p.add_argument("--budget", type=int, default=24, help="kernel dimension enumerated exhaustively")
    p.add_argument("--w-max", type=int, default=6, help="weight cutoff in bound mode")
    p.add_argument("--max-work", type=int, default=None, help="cap on enumerated combinations")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="khovcss", description="CSS codes from Khovanov complexes")
    ap.add_argument("--threads", type=int, default=None,
                    help="thread cap (falls back to KHOVCSS_THREADS)")
    ap.add_argument("--json", action="store_true", help="machine-readable output and diagnostics")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="write a family diagram as JSON")
    _family_args(p, need_r=False)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("complex", help="chain dimensions, differentials and homology")
    _family_args(p, need_r=False)
    _code_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("css", help="export H_X and H_Z of a slice")
    _family_args(p)
    _code_args(p)
    p.add_argument("--format", choices=["alist", "matrixmarket", "json"], default="alist")
    p.add_argument("--out", help="output directory (default: current)")
    p.set_defaults(func=cmd_css)

    p = sub.add_parser("params", help="print [[n;k;d]]")
    _family_args(p)
    _code_args(p)
    _distance_args(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("verify", help="compare family codes with their closed forms")
    p.add_argument("--family", choices=["unknot", "unlink", "torus"], required=True)
    p.add_argument("--l", type=int_range, required=True, help="e.g. 3..6")
    p.add_argument("--r", dest="r_list", type=int_range, default=None)
    _distance_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("asymptotics", help="appendix checks")
    p.add_argument("--legendre-max", type=int, default=200)
    p.add_argument("--best-max", type=int, default=2000)
    p.add_argument("--eps-stream", type=int, default=0, help="emit this many rounding offsets")
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("weights", help="exploratory d^i data around R2/R3 moves")
    p.add_argument("--rmove", choices=["r2", "r3"], required=True)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--max-crossings", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=24)
    p.add_argument("--max-work", type=int, default=1 << 24)
    p.set_defaults(func=cmd_weights)
    return ap


def _set_threads(n: int | None) -> None:
    if n is None:
        env = os.environ.get("KHOVCSS_THREADS")
        n = int(env) if env else None
    if n is None:
        return
    if n < 1:
        raise UsageError("--threads must be positive")
    import warnings

    import numba

    warnings.filterwarnings("ignore", category=numba.NumbaWarning)
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")

    def fail(code: int, kind: str, exc: Exception) -> int:
        if args.json:
            print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        else:
            print(f"khovcss: {kind}: {exc}", file=sys.stderr)
        return code

    try:
        _set_threads(args.threads)
        return args.func(RunConfig(args))
    except UsageError as e:
        return fail(EXIT_USAGE, "usage", e)
    except CapacityError as e:
        return fail(EXIT_CAPACITY, "capacity", e)
    except (KhovCSSError, OSError, ValueError) as e:
        return fail(EXIT_USAGE, "input", e)


if __name__ == "__main__":
    sys.exit(main())
