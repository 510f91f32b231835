"""Real-pair compositions of balls for the few complex-valued formulas.

Not a general complex-ball facility: only the operations the Stirling
series and the Euler-Maclaurin tail actually use.
"""

from __future__ import annotations

from . import rigor
from .rigor import Ball


class CBall:
    """Pair of real balls standing for re + i*im."""

    __slots__ = ("re", "im")

    def __init__(self, re: Ball, im: Ball):
        self.re = re
        self.im = im

    @classmethod
    def from_real(cls, re: Ball, prec: int) -> "CBall":
        return cls(re, Ball.exact_int(0, prec))

    def conj(self) -> "CBall":
        return CBall(self.re, rigor.neg(self.im))

    def __repr__(self):
        return f"CBall({self.re!r}, {self.im!r})"


def cadd(a: CBall, b: CBall, prec: int) -> CBall:
    return CBall(rigor.add(a.re, b.re, prec), rigor.add(a.im, b.im, prec))


def csub(a: CBall, b: CBall, prec: int) -> CBall:
    return CBall(rigor.sub(a.re, b.re, prec), rigor.sub(a.im, b.im, prec))


def cmul(a: CBall, b: CBall, prec: int) -> CBall:
    re = rigor.sub(rigor.mul(a.re, b.re, prec), rigor.mul(a.im, b.im, prec), prec)
    im = rigor.add(rigor.mul(a.re, b.im, prec), rigor.mul(a.im, b.re, prec), prec)
    return CBall(re, im)


def cmul_real(a: CBall, x: Ball, prec: int) -> CBall:
    return CBall(rigor.mul(a.re, x, prec), rigor.mul(a.im, x, prec))


def cabs2(a: CBall, prec: int) -> Ball:
    return rigor.add(rigor.mul(a.re, a.re, prec), rigor.mul(a.im, a.im, prec), prec)


def cinv(a: CBall, prec: int) -> CBall:
    d = cabs2(a, prec)
    return CBall(rigor.div(a.re, d, prec), rigor.neg(rigor.div(a.im, d, prec)))


def cdiv(a: CBall, b: CBall, prec: int) -> CBall:
    return cmul(a, cinv(b, prec), prec)


def clog(a: CBall, prec: int) -> CBall:
    """Principal log for Re(a) strictly positive (all uses satisfy this)."""
    if a.re.lower() <= 0.0:
        raise ValueError("clog restricted to the right half plane")
    re = rigor.scale2(rigor.log(cabs2(a, prec), prec), -1)
    im = rigor.atan(rigor.div(a.im, a.re, prec), prec)
    return CBall(re, im)


def cpow_int(a: CBall, n: int, prec: int) -> CBall:
    """a**n for n >= 1 by binary powering."""
    if n < 1:
        raise ValueError("cpow_int needs n >= 1")
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else cmul(result, base, prec)
        n >>= 1
        if n:
            base = cmul(base, base, prec)
    return result


def cmag_upper(a: CBall) -> float:
    """Float upper bound for |a| over the ball pair."""
    hr = a.re.mag_upper()
    hi = a.im.mag_upper()
    return rigor._up((hr * hr + hi * hi) ** 0.5 * (1.0 + 1e-14))
