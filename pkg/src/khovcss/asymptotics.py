"""Exact and high-precision checks of the length asymptotics."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath

from .errors import PreconditionError

DELTA0 = Fraction(261, 100)
C162 = Fraction(162, 100)


@dataclass(frozen=True)
class QuadInt:
    """``a + b*sqrt(3)`` with integer coefficients."""

    a: int
    b: int = 0

    def __add__(self, o: "QuadInt") -> "QuadInt":
        o = _q(o)
        return QuadInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o: "QuadInt") -> "QuadInt":
        o = _q(o)
        return QuadInt(self.a - o.a, self.b - o.b)

    def __mul__(self, o: "QuadInt") -> "QuadInt":
        o = _q(o)
        return QuadInt(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QuadInt":
        if k < 0:
            raise ValueError("negative powers are not supported")
        out, base = QuadInt(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "QuadInt":
        return QuadInt(self.a, -self.b)

    def norm(self) -> int:
        return self.a * self.a - 3 * self.b * self.b

    def __float__(self) -> float:
        return float(self.to_mpf())

    def to_mpf(self, dps: int = 50):
        with mpmath.workdps(dps):
            return mpmath.mpf(self.a) + mpmath.mpf(self.b) * mpmath.sqrt(3)


def _q(x) -> QuadInt:
    return x if isinstance(x, QuadInt) else QuadInt(int(x))


X0 = QuadInt(2, 1)  # 1 / (2 - sqrt 3)


# sums of squares --------------------------------------------------------------


def sum_squares(l: int, x) -> Fraction:
    """``sum_r [C(l, r) x^r]^2`` exactly for rational ``x > 0``."""
    x = Fraction(x)
    if x <= 0:
        raise PreconditionError("x must be positive")
    if l < 0:
        raise PreconditionError("l must be non-negative")
    # integer sum over the common denominator q^(2l), binomials updated in place
    p2, q2 = x.numerator ** 2, x.denominator ** 2
    total = 0
    c = 1
    pw = q2**l
    for r in range(l + 1):
        total += c * c * pw
        if r < l:
            c = c * (l - r) // (r + 1)
            pw = pw // q2 * p2
    return Fraction(total, q2**l)


def sum_squares_asymptote(l: int, x, dps: int = 50):
    with mpmath.workdps(dps):
        xm = mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator
        return (1 + xm) ** (2 * l + 1) / (2 * mpmath.sqrt(xm * mpmath.pi * l))


def ratio_to_asymptote(l: int, x, dps: int = 50) -> float:
    if l < 1:
        raise PreconditionError("l must be at least 1")
    s = sum_squares(l, x)
    with mpmath.workdps(dps):
        val = mpmath.mpf(s.numerator) / s.denominator
        return float(val / sum_squares_asymptote(l, x, dps))


# unlink lengths ----------------------------------------------------------------


def unlink_T(l: int) -> int:
    """``2^l sum_r C(l, r) C(2r, r) / 2^r`` (an integer)."""
    if l < 0:
        raise PreconditionError("l must be non-negative")
    total = 0
    c, cc, pw = 1, 1, 1 << l  # C(l, r), C(2r, r), 2^(l-r)
    for r in range(l + 1):
        total += c * cc * pw
        if r < l:
            c = c * (l - r) // (r + 1)
            cc = cc * (2 * r + 1) * (2 * r + 2) // ((r + 1) * (r + 1))
            pw >>= 1
    return total


def unlink_T_asymptote(l: int, dps: int = 50):
    """Sum-of-squares asymptote at ``x0 = 2 + sqrt 3`` divided by ``x0^l``."""
    with mpmath.workdps(dps):
        x0 = 2 + mpmath.sqrt(3)
        return (1 + x0) ** (2 * l + 1) / (2 * mpmath.sqrt(x0 * mpmath.pi * l)) / x0**l


def unlink_ratio(l: int, dps: int = 50) -> float:
    t = unlink_T(l)
    with mpmath.workdps(dps):
        return float(mpmath.mpf(t) / unlink_T_asymptote(l, dps))


def legendre_value(l: int, z, dps: int = 50):
    """``P_l(z)`` by the three-term recurrence."""
    with mpmath.workdps(dps):
        z = mpmath.mpf(z)
        p0, p1 = mpmath.mpf(1), z
        if l == 0:
            return p0
        for k in range(1, l):
            p0, p1 = p1, ((2 * k + 1) * z * p1 - k * p0) / (k + 1)
        return p1


def legendre_check(l: int, rel_tol: float = 1e-10) -> dict:
    """Exact identity ``x0^l T_l = sum_r C(l,r)^2 x0^(2r)`` in Z[sqrt 3], plus the Legendre form numerically."""
    t = unlink_T(l)
    lhs = X0**l * QuadInt(t)
    rhs = QuadInt(0)
    x02 = X0 * X0
    p = QuadInt(1)
    for r in range(l + 1):
        rhs = rhs + QuadInt(comb(l, r) ** 2) * p
        p = p * x02
    exact = lhs == rhs
    dps = 30 + l // 2
    with mpmath.workdps(dps):
        s3 = mpmath.sqrt(3)
        leg = (2 * s3) ** l * legendre_value(l, 2 / s3, dps)
        rel = abs(leg - t) / t
        numeric = bool(rel <= rel_tol)
    return {"l": l, "T": t, "exact": exact, "numeric": numeric, "rel_err": float(rel), "ok": exact and numeric}


# best parameters ---------------------------------------------------------------


@dataclass(frozen=True)
class SubfamilyConstants:
    alpha0: mpmath.mpf
    beta0: mpmath.mpf
    gamma0: mpmath.mpf
    delta0: Fraction = DELTA0
    residual: mpmath.mpf = mpmath.mpf(0)


def _g(x):
    return x * mpmath.log(2 * x) + (1 - x) * mpmath.log(1 - x)


def subfamily_constants(precision: float = 1e-30) -> SubfamilyConstants:
    """``alpha0`` by bisection of ``x ln(2x) + (1-x) ln(1-x)`` on ``[1/2, 1)``.

    The function tends to 0 at ``x -> 0`` as well, so the bracket starts at
    ``1/2`` where it is negative; it is positive near 1.
    """
    if precision <= 0:
        raise PreconditionError("precision must be positive")
    dps = max(30, int(-mpmath.log10(precision)) + 15)
    with mpmath.workdps(dps):
        lo, hi = mpmath.mpf(1) / 2, 1 - mpmath.mpf(10) ** (-dps // 2)
        if not (_g(lo) < 0 < _g(hi)):
            raise ArithmeticError("bisection bracket does not change sign")
        tol = mpmath.mpf(precision) / 10
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if _g(mid) < 0:
                lo = mid
            else:
                hi = mid
        a = (lo + hi) / 2
        beta = 1 / (2 * mpmath.log(2 * a / (1 - a)))
        gamma = beta * mpmath.log(2 / (mpmath.pi * a * (1 - a)))
        return SubfamilyConstants(+a, +beta, +gamma, DELTA0, abs(_g(a)))


_CONSTS: SubfamilyConstants | None = None


def _consts() -> SubfamilyConstants:
    global _CONSTS
    if _CONSTS is None:
        _CONSTS = subfamily_constants(1e-40)
    return _CONSTS


def r_of_l(l: int) -> int:
    """``round(alpha0 l - beta0 ln l + gamma0)`` with halves rounded up."""
    c = _consts()
    with mpmath.workdps(60):
        v = c.alpha0 * l - c.beta0 * mpmath.log(l) + c.gamma0
        return int(mpmath.floor(v + mpmath.mpf(1) / 2))


def eps_sequence(l_values) -> list[float]:
    """``2 (alpha0 l - beta0 ln l + gamma0 - r_l)``, the rounding offsets in ``[-1, 1]`` (exploratory)."""
    c = _consts()
    out = []
    with mpmath.workdps(60):
        for l in l_values:
            v = c.alpha0 * l - c.beta0 * mpmath.log(l) + c.gamma0
            out.append(float(2 * (v - r_of_l(l))))
    return out


def best_param_check(l_values) -> dict:
    """Check ``1.62^2 min(C, 2^(r-1))^2 > 2^(r-1) C`` exactly, ``C = C(l, r_l)``."""
    rows = []
    num, den = C162.numerator, C162.denominator
    for l in l_values:
        r = r_of_l(l)
        if not 2 <= r <= l:
            rows.append({"l": l, "r": r, "skipped": True})
            continue
        c = comb(l, r)
        p = 2 ** (r - 1)
        n = c * p
        m = min(c, p)
        verdict = num * num * m * m > den * den * n
        # delta0^-1 C < 2^(r-1) < delta0 C
        dn, dd = DELTA0.numerator, DELTA0.denominator
        ratio_ok = dd * c < dn * p and dd * p < dn * c
        rows.append({"l": l, "r": r, "n": n, "d": m, "verdict": verdict, "ratio_ok": ratio_ok,
                     "skipped": False})
    checked = [x for x in rows if not x["skipped"]]
    threshold = None
    for idx in range(len(checked) - 1, -1, -1):
        if not checked[idx]["verdict"]:
            threshold = checked[idx + 1]["l"] if idx + 1 < len(checked) else None
            break
    else:
        threshold = checked[0]["l"] if checked else None
    ratio_threshold = None
    for idx in range(len(checked) - 1, -1, -1):
        if not checked[idx]["ratio_ok"]:
            ratio_threshold = checked[idx + 1]["l"] if idx + 1 < len(checked) else None
            break
    else:
        ratio_threshold = checked[0]["l"] if checked else None
    return {"rows": rows, "threshold": threshold, "ratio_threshold": ratio_threshold,
            "skipped": [x["l"] for x in rows if x["skipped"]]}
