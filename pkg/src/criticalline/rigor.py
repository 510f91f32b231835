"""Midpoint-radius ball arithmetic with guaranteed enclosures.

A Ball is an MPFR midpoint at a configurable precision plus a double
radius that is always rounded outward.  Every operation returns a ball
containing the exact image of its inputs: MPFR supplies correctly
rounded point operations (error at most half an ulp, folded into the
radius), and radius bookkeeping is done in doubles bumped upward with
nextafter so no float rounding can shrink an error bound.

The MPFR engine is reused rather than reimplemented; its enclosure
guarantees are re-verified by the containment suite in selftest/tests.
"""

from __future__ import annotations

import math
from enum import Enum

import gmpy2

from .errors import DivisorContainsZero, DomainViolation

_INF = math.inf
_CTX_CACHE: dict[int, "gmpy2.context"] = {}

MIN_PREC = 8
MAX_PREC = 1 << 20


def context(prec: int) -> "gmpy2.context":
    """Cached MPFR context at the given precision, round-to-nearest."""
    ctx = _CTX_CACHE.get(prec)
    if ctx is None:
        if not MIN_PREC <= prec <= MAX_PREC:
            raise ValueError(f"precision {prec} out of range")
        ctx = gmpy2.context(precision=prec)
        _CTX_CACHE[prec] = ctx
    return ctx


# ---------------------------------------------------------------------------
# outward float helpers (radius arithmetic)
# ---------------------------------------------------------------------------

def _up(x: float) -> float:
    """Smallest float step above x; upper-bounds any value that rounded to x."""
    return math.nextafter(x, _INF)


def add_up(a: float, b: float) -> float:
    return _up(a + b)


def mul_up(a: float, b: float) -> float:
    return _up(a * b)


def div_up(a: float, b: float) -> float:
    return _up(a / b)


def sum_up(*vals: float) -> float:
    s = 0.0
    for v in vals:
        s = _up(s + v)
    return s


def _half_ulp(x: "gmpy2.mpfr", prec: int) -> float:
    """Upper bound for the rounding error of a round-to-nearest MPFR result."""
    if gmpy2.is_zero(x):
        return 0.0
    if not gmpy2.is_finite(x):
        return _INF
    e = gmpy2.get_exp(x) - prec  # ulp(x) == 2**e  (mantissa in [1/2, 1))
    if e < -1070:
        return 5e-324
    if e > 1020:
        return _INF
    return math.ldexp(1.0, e)  # one full ulp: >= half-ulp with slack


def _abs_up(x: "gmpy2.mpfr") -> float:
    """Float upper bound for |x|."""
    f = abs(float(x))  # round-to-nearest conversion
    return _up(f) if math.isfinite(f) else _INF


# ---------------------------------------------------------------------------
# Ball
# ---------------------------------------------------------------------------

class Ball:
    """Enclosure [mid - rad, mid + rad] of a real number."""

    __slots__ = ("mid", "rad")

    def __init__(self, mid, rad: float = 0.0):
        if not isinstance(mid, type(gmpy2.mpfr(0))):
            raise TypeError("Ball midpoint must be an mpfr; use the constructors")
        rad = float(rad)
        if rad < 0.0 or math.isnan(rad):
            raise ValueError(f"radius {rad} must be a non-negative float")
        object.__setattr__(self, "mid", mid)
        object.__setattr__(self, "rad", rad)

    def __setattr__(self, name, value):
        raise AttributeError("Ball is immutable")

    # -- constructors --------------------------------------------------

    @classmethod
    def exact_int(cls, n: int, prec: int) -> "Ball":
        mid = gmpy2.mpfr(n, prec)
        return cls(mid, _half_ulp(mid, prec) if mid != n else 0.0)

    @classmethod
    def from_dyadic(cls, d, prec: int) -> "Ball":
        ctx = context(prec)
        mid = gmpy2.mpfr(gmpy2.mpz(d.man), prec)
        err = 0.0 if mid == d.man else _half_ulp(mid, prec)
        mid = ctx.mul_2exp(mid, d.exp) if d.exp >= 0 else ctx.div_2exp(mid, -d.exp)
        return cls(mid, _up(math.ldexp(err, d.exp)) if err else 0.0)

    @classmethod
    def from_float(cls, x: float, prec: int) -> "Ball":
        if not math.isfinite(x):
            raise ValueError("Ball from non-finite float")
        mid = gmpy2.mpfr(x, prec)
        return cls(mid, 0.0 if mid == x else _half_ulp(mid, prec))

    @classmethod
    def from_decimal(cls, text: str, prec: int) -> "Ball":
        mid = gmpy2.mpfr(text, prec)
        return cls(mid, _half_ulp(mid, prec))

    @classmethod
    def from_interval(cls, lo: float, hi: float, prec: int) -> "Ball":
        if not lo <= hi:
            raise ValueError("empty interval")
        mid = gmpy2.mpfr(0.5 * (lo + hi), prec)
        f = float(mid)
        rad = sum_up(_up(max(hi - f, f - lo)), _half_ulp(mid, prec))
        return cls(mid, rad)

    # -- views ----------------------------------------------------------

    def lower(self) -> float:
        """Float lower bound of the ball (rounded down)."""
        f = float(self.mid)
        if self.mid != f:
            f = math.nextafter(f, -_INF)
        if self.rad:
            f = math.nextafter(f - self.rad, -_INF)
        return f

    def upper(self) -> float:
        f = float(self.mid)
        if self.mid != f:
            f = math.nextafter(f, _INF)
        if self.rad:
            f = math.nextafter(f + self.rad, _INF)
        return f

    def mag_upper(self) -> float:
        """Upper bound for sup |x| over the ball."""
        return add_up(_abs_up(self.mid), self.rad)

    def mag_lower(self) -> float:
        """Lower bound for inf |x| over the ball (0 if it straddles)."""
        lo = abs(float(self.mid))
        if self.mid != lo and self.mid != -lo:
            lo = math.nextafter(lo, -_INF)
        if self.rad:
            lo = math.nextafter(lo - self.rad, -_INF)
        return max(lo, 0.0)

    def contains_zero(self) -> bool:
        return abs(self.mid) <= self.rad

    def contains(self, x) -> bool:
        """Membership test (diagnostics/tests; computed at boosted precision)."""
        xm = x if isinstance(x, type(gmpy2.mpfr(0))) else gmpy2.mpfr(x, 200)
        p = max(xm.precision, self.mid.precision) + 64
        d = context(p).sub(self.mid, xm)
        return -self.rad <= d <= self.rad

    def overlaps(self, other: "Ball") -> bool:
        """Conservative intersection test via outward float endpoints."""
        return self.lower() <= other.upper() and other.lower() <= self.upper()

    def is_finite(self) -> bool:
        return gmpy2.is_finite(self.mid) and math.isfinite(self.rad)

    def __repr__(self):
        return f"Ball({self.mid!r}, rad={self.rad:.3g})"


class Sign(Enum):
    NEGATIVE = -1
    INDETERMINATE = 0
    POSITIVE = 1


def ball_sign(a: Ball) -> Sign:
    """Certified sign: POSITIVE/NEGATIVE only when the whole ball is one-sided.

    Comparisons are exact (mpfr against float), so the trichotomy is sharp:
    POSITIVE iff mid - rad > 0, NEGATIVE iff mid + rad < 0.
    """
    if a.mid > a.rad:
        return Sign.POSITIVE
    if -a.mid > a.rad:
        return Sign.NEGATIVE
    return Sign.INDETERMINATE


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------

def add(a: Ball, b: Ball, prec: int) -> Ball:
    ctx = context(prec)
    mid = ctx.add(a.mid, b.mid)
    return Ball(mid, sum_up(a.rad, b.rad, _half_ulp(mid, prec)))


def sub(a: Ball, b: Ball, prec: int) -> Ball:
    ctx = context(prec)
    mid = ctx.sub(a.mid, b.mid)
    return Ball(mid, sum_up(a.rad, b.rad, _half_ulp(mid, prec)))


def neg(a: Ball) -> Ball:
    return Ball(context(a.mid.precision).minus(a.mid), a.rad)  # exact


def mul(a: Ball, b: Ball, prec: int) -> Ball:
    ctx = context(prec)
    mid = ctx.mul(a.mid, b.mid)
    rad = sum_up(
        mul_up(_abs_up(a.mid), b.rad),
        mul_up(_abs_up(b.mid), a.rad),
        mul_up(a.rad, b.rad),
        _half_ulp(mid, prec),
    )
    return Ball(mid, rad)


def div(a: Ball, b: Ball, prec: int) -> Ball:
    blo = b.mag_lower()
    if blo <= 0.0:
        raise DivisorContainsZero(f"divisor {b!r} contains zero")
    ctx = context(prec)
    mid = ctx.div(a.mid, b.mid)
    # |x/y - am/bm| <= ar/|y| + |am/bm|*br/|y| <= (ar + |mid|*br)/blo
    rad = sum_up(
        div_up(a.rad, blo),
        div_up(mul_up(_abs_up(mid), b.rad), blo),
        _half_ulp(mid, prec),
    )
    return Ball(mid, rad)


def scale2(a: Ball, k: int) -> Ball:
    """Multiplication by 2**k (exact on the midpoint)."""
    ctx = context(a.mid.precision)
    mid = ctx.mul_2exp(a.mid, k) if k >= 0 else ctx.div_2exp(a.mid, -k)
    if a.rad == 0.0:
        return Ball(mid, 0.0)
    r = math.ldexp(a.rad, k)
    return Ball(mid, r if k >= 0 else _up(r))  # ldexp may round near subnormals


def mul_int(a: Ball, n: int, prec: int) -> Ball:
    return mul(a, Ball.exact_int(n, prec), prec)


def div_int(a: Ball, n: int, prec: int) -> Ball:
    if n == 0:
        raise DivisorContainsZero("division by integer zero")
    return div(a, Ball.exact_int(n, prec), prec)


_ARITH = {"add": add, "sub": sub, "mul": mul, "div": div}


def ball_arith(op: str, a: Ball, b: Ball, prec: int = 64) -> Ball:
    """Dispatcher form of the four arithmetic operations."""
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown arithmetic op {op!r}") from None
    return fn(a, b, prec)


# ---------------------------------------------------------------------------
# elementary enclosures
# ---------------------------------------------------------------------------

def pi_ball(prec: int) -> Ball:
    mid = context(prec).const_pi()
    return Ball(mid, _half_ulp(mid, prec))


def sqrt(a: Ball, prec: int) -> Ball:
    lo, hi = a.lower(), a.upper()
    if lo < 0.0 or a.mid < 0:
        raise DomainViolation("sqrt of a ball reaching below zero")
    ctx = context(prec)
    mid = ctx.sqrt(a.mid)
    if lo > 0.0:
        # Lipschitz bound 1/(2 sqrt(lo)) over the ball
        lip = div_up(1.0, mul_up(2.0, math.sqrt(lo) * (1.0 - 1e-15)))
        rad = sum_up(mul_up(a.rad, lip), _half_ulp(mid, prec))
    else:
        rad = sum_up(_up(math.sqrt(hi)), _half_ulp(mid, prec))
    return Ball(mid, rad)


def exp(a: Ball, prec: int) -> Ball:
    ctx = context(prec)
    mid = ctx.exp(a.mid)
    # |exp(x) - exp(m)| <= exp(m) * (e^r - 1) <= exp(m) * r * e^r
    if a.rad == 0.0:
        return Ball(mid, _half_ulp(mid, prec))
    if a.rad > 700.0:
        rad = _INF
    else:
        rad = mul_up(mul_up(_abs_up(mid), a.rad), _up(math.exp(a.rad)))
    return Ball(mid, sum_up(rad, _half_ulp(mid, prec)))


def log(a: Ball, prec: int) -> Ball:
    lo = a.lower()
    if lo <= 0.0:
        raise DomainViolation("log of a ball touching zero or below")
    ctx = context(prec)
    mid = ctx.log(a.mid)
    rad = sum_up(div_up(a.rad, lo), _half_ulp(mid, prec))  # sup |1/x| <= 1/lo
    return Ball(mid, rad)


def sin(a: Ball, prec: int) -> Ball:
    ctx = context(prec)
    mid = ctx.sin(a.mid)
    rad = sum_up(min(2.0, a.rad), _half_ulp(mid, prec))
    return Ball(mid, rad)


def cos(a: Ball, prec: int) -> Ball:
    ctx = context(prec)
    mid = ctx.cos(a.mid)
    rad = sum_up(min(2.0, a.rad), _half_ulp(mid, prec))
    return Ball(mid, rad)


def atan(a: Ball, prec: int) -> Ball:
    ctx = context(prec)
    mid = ctx.atan(a.mid)
    # |atan'| = 1/(1+x^2) <= 1/(1 + inf|x|^2) over the ball
    m = a.mag_lower()
    lip = div_up(1.0, 1.0 + m * m * (1.0 - 1e-15)) if m > 0.0 else 1.0
    rad = sum_up(mul_up(a.rad, min(1.0, lip)), _half_ulp(mid, prec))
    return Ball(mid, rad)


def pow_real(a: Ball, y, prec: int) -> Ball:
    """a**y for a strictly positive ball and real (Ball or float/int) y."""
    if not isinstance(y, Ball):
        y = Ball.from_float(float(y), prec)
    return exp(mul(y, log(a, prec), prec), prec)


_ELEM = {"sqrt": sqrt, "exp": exp, "log": log, "sin": sin, "cos": cos, "atan": atan}


def ball_elem(f: str, a: Ball, prec: int = 64) -> Ball:
    """Dispatcher form of the single-argument elementary enclosures."""
    if f == "pow_real":
        raise ValueError("pow_real takes an exponent; call rigor.pow_real directly")
    try:
        fn = _ELEM[f]
    except KeyError:
        raise ValueError(f"unknown elementary function {f!r}") from None
    return fn(a, prec)
