"""Enclosures for the phase function theta, its derivative, the
main-sum remainder bounds, and the gamma magnitude bound.

theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi is computed two ways:

* t >= 8: the standard asymptotic form
      (t/2) log(t/2pi) - t/2 - pi/8 + 1/(48t) + 7/(5760 t^3) + 31/(80640 t^5)
  with the tail bounded by twice the first omitted term.  That factor is
  a same-sign-series heuristic; the oracle-domination suite in the tests
  checks it over the working range (the observed ratio is ~0.50-0.53 for
  t >= 8, and the heuristic genuinely fails below ~7, hence the floor).

* 0 < t < 8: upward recurrence Gamma(z) = Gamma(z+m)/(z)...(z+m-1) into
  the Stirling series, whose Binet remainder after N terms is bounded by
      |B_{2N+2}| / ((2N+1)(2N+2) |z|^{2N+1} cos^{2N+2}(arg(z)/2)),
  valid on the right half plane.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2

from . import rigor
from ._complex import CBall, cadd, cinv, clog, cmag_upper, cmul, cmul_real, cpow_int, csub
from .errors import BelowValidityFloor, DomainViolation, HeightTooLow
from .rigor import Ball, add, add_up, div, div_int, div_up, mul, mul_int, mul_up, sub, sum_up

TWO_PI_HI = 6.283185307179587   # float at or above 2*pi
THETA_SERIES_FLOOR = 8.0

# ---------------------------------------------------------------------------
# Bernoulli numbers (exact rationals, cached)
# ---------------------------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]


def bernoulli(m: int) -> Fraction:
    """B_m with B_1 = -1/2, computed by the defining recurrence."""
    while len(_BERNOULLI) <= m:
        n = len(_BERNOULLI)
        acc = Fraction(0)
        for k in range(n):
            acc += Fraction(math.comb(n + 1, k)) * _BERNOULLI[k]
        _BERNOULLI.append(-acc / (n + 1))
    return _BERNOULLI[m]


# theta series coefficients c_j / t^(2j-1); c4 is the first omitted term.
def _theta_coeff(j: int) -> Fraction:
    return abs(bernoulli(2 * j)) * (1 - Fraction(2) ** (1 - 2 * j)) / (4 * j * (2 * j - 1))


THETA_C = [_theta_coeff(j) for j in range(1, 5)]  # 1/48, 7/5760, 31/80640, 127/430080


def frac_ball(q: Fraction, prec: int) -> Ball:
    return div(Ball.exact_int(q.numerator, prec), Ball.exact_int(q.denominator, prec), prec)


# ---------------------------------------------------------------------------
# small cached constants
# ---------------------------------------------------------------------------

_CONST_CACHE: dict = {}


def two_pi(prec: int) -> Ball:
    key = ("2pi", prec)
    if key not in _CONST_CACHE:
        _CONST_CACHE[key] = rigor.scale2(rigor.pi_ball(prec), 1)
    return _CONST_CACHE[key]


def log_pi(prec: int) -> Ball:
    key = ("logpi", prec)
    if key not in _CONST_CACHE:
        _CONST_CACHE[key] = rigor.log(rigor.pi_ball(prec), prec)
    return _CONST_CACHE[key]


def log_2pi(prec: int) -> Ball:
    key = ("log2pi", prec)
    if key not in _CONST_CACHE:
        _CONST_CACHE[key] = rigor.log(two_pi(prec), prec)
    return _CONST_CACHE[key]


def inflate(b: Ball, extra: float) -> Ball:
    return Ball(b.mid, add_up(b.rad, extra))


# ---------------------------------------------------------------------------
# theta: asymptotic branch (t >= 8)
# ---------------------------------------------------------------------------

def _require_above_2pi(t: Ball):
    if not t.lower() > TWO_PI_HI:
        raise HeightTooLow(f"t = {t!r} not strictly above 2*pi")


def theta_tail_bound(t_lo: float) -> float:
    """Upper bound for |theta - 3-term series| on [t_lo, inf), t_lo >= 8."""
    c4 = float(THETA_C[3]) * (1.0 + 1e-15)
    return mul_up(2.0, div_up(c4, t_lo ** 7 * (1.0 - 1e-13)))


def _theta_series(t: Ball, prec: int) -> Ball:
    return inflate(_series_value_only(t, prec), theta_tail_bound(t.lower()))


def rs_theta(t: Ball, prec: int = 64) -> Ball:
    """Enclosure of theta(t) for t strictly above 2*pi."""
    _require_above_2pi(t)
    if t.lower() >= THETA_SERIES_FLOOR:
        return _theta_series(t, prec)
    return _theta_gamma(t, prec)


def theta_any(t: Ball, prec: int = 64) -> Ball:
    """Enclosure of theta(t) for any t > 0 (internal: evaluators need low t)."""
    if not t.lower() > 0.0:
        raise DomainViolation("theta needs t > 0")
    if t.lower() >= THETA_SERIES_FLOOR:
        return _theta_series(t, prec)
    return _theta_gamma(t, prec)


def rs_theta_deriv(t: Ball, prec: int = 64) -> Ball:
    """Enclosure of theta'(t) = (1/2) log(t/2pi) - sum (2j-1) c_j / t^2j - ..."""
    _require_above_2pi(t)
    if t.lower() < THETA_SERIES_FLOOR:
        # wide but sound cover: theta' is increasing through (2pi, 8) from
        # about -0.0006 (correction terms) up to 0.121, checked by oracle
        return Ball.from_interval(-0.01, 0.15, prec)
    d = rigor.scale2(rigor.log(div(t, two_pi(prec), prec), prec), -1)
    t2 = mul(t, t, prec)
    tp = t2
    for j, c in enumerate(THETA_C[:3], start=1):
        if j > 1:
            tp = mul(tp, t2, prec)                              # t^(2j)
        d = sub(d, div(frac_ball(c * (2 * j - 1), prec), tp, prec), prec)
    # first omitted derivative term: 7 c4 / t^8, doubled like the theta tail
    t_lo = t.lower()
    tail = mul_up(2.0 * 7.0 * float(THETA_C[3]) * (1.0 + 1e-15),
                  div_up(1.0, t_lo ** 8 * (1.0 - 1e-13)))
    return inflate(d, tail)


def theta_antideriv(t: Ball, prec: int = 64) -> Ball:
    """Antiderivative F with F' = 3-term theta series, for exact window integrals.

    F(t) = (t^2/4) log(t/2pi) - (3/8) t^2 - (pi/8) t + (1/48) log t
           - c2/(2 t^2) - c3/(4 t^4)

    Callers integrating theta itself must add (t2-t1) * theta_tail_bound(t1).
    """
    if t.lower() < THETA_SERIES_FLOOR:
        raise HeightTooLow("antiderivative used below the series floor")
    L = rigor.log(div(t, two_pi(prec), prec), prec)
    t2 = mul(t, t, prec)
    F = mul(rigor.scale2(t2, -2), L, prec)
    F = sub(F, mul(frac_ball(Fraction(3, 8), prec), t2, prec), prec)
    F = sub(F, mul(rigor.scale2(rigor.pi_ball(prec), -3), t, prec), prec)
    F = add(F, div_int(rigor.log(t, prec), 48, prec), prec)
    F = sub(F, div(frac_ball(THETA_C[1] / 2, prec), t2, prec), prec)
    F = sub(F, div(frac_ball(THETA_C[2] / 4, prec), mul(t2, t2, prec), prec), prec)
    return F


def theta_tilde_derivs(t0: Ball, kmax: int, prec: int) -> list[Ball]:
    """Balls for d^k/dt^k of the 3-term theta series at t0, k = 0..kmax."""
    out = [_series_value_only(t0, prec), _series_deriv_only(t0, prec)]
    t_pow = t0  # t0^(k-1) for k = 2
    for k in range(2, kmax + 1):
        if k > 2:
            t_pow = mul(t_pow, t0, prec)
        sign = 1 if k % 2 == 0 else -1
        term = div(Ball.exact_int(sign * math.factorial(k - 2), prec),
                   rigor.scale2(t_pow, 1), prec)  # (1/2) (-1)^k (k-2)! / t^(k-1)
        acc = term
        for j, c in enumerate(THETA_C[:3], start=1):
            rise = math.factorial(2 * j + k - 2) // math.factorial(2 * j - 2)
            q = c * rise * sign
            p_pow = _int_pow(t0, 2 * j - 1 + k, prec)
            acc = add(acc, div(frac_ball(q, prec), p_pow, prec), prec)
        out.append(acc)
    return out


def theta_tilde_deriv_sup(t_lo: float, k: int) -> float:
    """Float upper bound for |d^k theta-series/dt^k| on [t_lo, inf), k >= 2."""
    up = 0.5 * math.factorial(k - 2) / t_lo ** (k - 1)
    for j, c in enumerate(THETA_C[:3], start=1):
        rise = math.factorial(2 * j + k - 2) // math.factorial(2 * j - 2)
        up += float(c) * rise / t_lo ** (2 * j - 1 + k)
    return up * (1.0 + 1e-12)


def _series_value_only(t: Ball, prec: int) -> Ball:
    """3-term series value with no asymptotic tail (exact function of t)."""
    L = rigor.log(div(t, two_pi(prec), prec), prec)
    th = mul(rigor.scale2(t, -1), L, prec)
    th = sub(th, rigor.scale2(t, -1), prec)
    th = sub(th, rigor.scale2(rigor.pi_ball(prec), -3), prec)
    tp = t
    t2 = mul(t, t, prec)
    for j, c in enumerate(THETA_C[:3], start=1):
        if j > 1:
            tp = mul(tp, t2, prec)
        th = add(th, div(frac_ball(c, prec), tp, prec), prec)
    return th


def _series_deriv_only(t: Ball, prec: int) -> Ball:
    d = rigor.scale2(rigor.log(div(t, two_pi(prec), prec), prec), -1)
    t2 = mul(t, t, prec)
    tp = t2
    for j, c in enumerate(THETA_C[:3], start=1):
        if j > 1:
            tp = mul(tp, t2, prec)
        d = sub(d, div(frac_ball(c * (2 * j - 1), prec), tp, prec), prec)
    return d


def _int_pow(t: Ball, n: int, prec: int) -> Ball:
    out = None
    base = t
    while n:
        if n & 1:
            out = base if out is None else mul(out, base, prec)
        n >>= 1
        if n:
            base = mul(base, base, prec)
    return out


# ---------------------------------------------------------------------------
# theta: gamma recurrence branch (0 < t < 8) and Stirling machinery
# ---------------------------------------------------------------------------

def _stirling_log_gamma(w: CBall, prec: int, target: float) -> CBall:
    """log Gamma(w) for Re(w) > 0 via Stirling; Binet remainder in the radius."""
    half = Ball.from_decimal("0.5", prec)
    lw = clog(w, prec)
    acc = cmul(csub(w, CBall.from_real(half, prec), prec), lw, prec)
    acc = csub(acc, w, prec)
    acc = cadd(acc, CBall.from_real(rigor.scale2(log_2pi(prec), -1), prec), prec)

    wa_lo = max(w.re.mag_lower(), 1e-300)
    wabs2_lo = w.re.mag_lower() ** 2 + w.im.mag_lower() ** 2
    wabs_lo = math.sqrt(wabs2_lo) * (1.0 - 1e-14)
    # sec(arg/2)^2 <= 2 |w| / (|w| + Re w)  for Re w > 0
    sec2 = 2.0 * cmag_upper(w) / (wabs_lo + wa_lo) * (1.0 + 1e-13)

    inv_w = cinv(w, prec)
    inv_w2 = cmul(inv_w, inv_w, prec)
    zpow = inv_w  # w^(1-2n) for n = 1
    nmax = 40
    best = math.inf
    n = 0
    while True:
        n += 1
        if n > 1:
            zpow = cmul(zpow, inv_w2, prec)
        coeff = bernoulli(2 * n) / (2 * n * (2 * n - 1))
        acc = cadd(acc, cmul_real(zpow, frac_ball(coeff, prec), prec), prec)
        b_next = abs(bernoulli(2 * n + 2)) / ((2 * n + 1) * (2 * n + 2))
        rem = float(b_next) / wabs_lo ** (2 * n + 1) * sec2 ** (n + 1) * (1.0 + 1e-12)
        if rem >= best or n >= nmax or rem <= target:
            break
        best = rem
    return CBall(inflate(acc.re, rem), inflate(acc.im, rem))


def _theta_gamma(t: Ball, prec: int) -> Ball:
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi by upward recurrence."""
    wp = prec + 16
    quarter = Ball.from_decimal("0.25", wp)
    y = rigor.scale2(t, -1)
    m = max(12, (wp * 35) // 100)
    target = math.ldexp(1.0, -(wp + 4))
    w = CBall(add(quarter, Ball.exact_int(m, wp), wp), y)
    lg = _stirling_log_gamma(w, wp, target)
    im = lg.im
    for k in range(m):
        xk = add(quarter, Ball.exact_int(k, wp), wp)
        im = sub(im, rigor.atan(div(y, xk, wp), wp), wp)  # arg(1/4 + k + iy)
    return sub(im, mul(y, log_pi(wp), wp), wp)


# ---------------------------------------------------------------------------
# main-sum remainder bounds (config table)
# ---------------------------------------------------------------------------

DEFAULT_REMAINDER_TABLE = (
    # terms, coefficient, validity floor: bound = c * t^(-(2k+1)/4) for t >= floor
    (0, 2.0, 200.0),
    (1, 0.127, 200.0),
    (2, 0.053, 200.0),
    (3, 0.011, 200.0),
)


class RemainderTable:
    """Rows (term count, coefficient, floor) for the truncation bound."""

    def __init__(self, rows=DEFAULT_REMAINDER_TABLE):
        self.rows = {int(k): (float(c), float(f)) for k, c, f in rows}

    @classmethod
    def from_text(cls, text: str) -> "RemainderTable":
        rows = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            k, c, f = line.replace(",", " ").split()
            rows.append((int(k), float(c), float(f)))
        if not rows:
            raise ValueError("empty remainder table")
        return cls(rows)

    def to_text(self) -> str:
        lines = ["# terms coefficient floor"]
        for k in sorted(self.rows):
            c, f = self.rows[k]
            lines.append(f"{k} {c!r} {f!r}")
        return "\n".join(lines) + "\n"

    def floor(self, terms: int) -> float:
        if terms not in self.rows:
            raise BelowValidityFloor(f"no remainder bound for {terms} correction terms")
        return self.rows[terms][1]

    def bound(self, t_lo: float, terms: int) -> float:
        """Proven |R(t)| bound for t >= t_lo after the given correction terms."""
        if terms not in self.rows:
            raise BelowValidityFloor(f"no remainder bound for {terms} correction terms")
        c, floor = self.rows[terms]
        if t_lo < floor:
            raise BelowValidityFloor(
                f"t = {t_lo} below validity floor {floor} for {terms} terms")
        expo = -(2 * terms + 1) / 4.0
        return mul_up(c, t_lo ** expo * (1.0 + 1e-13))


_DEFAULT_TABLE = RemainderTable()


def rs_remainder_bound(t, terms: int, table: RemainderTable | None = None) -> float:
    """Module-level convenience over the default table."""
    t_lo = t.lower() if isinstance(t, Ball) else float(t)
    return (table or _DEFAULT_TABLE).bound(t_lo, terms)


# ---------------------------------------------------------------------------
# C0 correction coefficient
# ---------------------------------------------------------------------------

def _sinc_ball(x: Ball, prec: int) -> Ball:
    """sin(x)/x for |x| <= 0.5 via the alternating series."""
    if x.mag_upper() > 0.5:
        raise ValueError("sinc helper restricted to small arguments")
    x2 = mul(x, x, prec)
    one = Ball.exact_int(1, prec)
    acc = sub(one, div_int(x2, 6, prec), prec)
    x4 = mul(x2, x2, prec)
    acc = add(acc, div_int(x4, 120, prec), prec)
    acc = sub(acc, div_int(mul(x4, x2, prec), 5040, prec), prec)
    tail = div_up(x.mag_upper() ** 8 * (1.0 + 1e-13), 362880.0)
    return inflate(acc, tail)


def c0_ball(p: Ball, prec: int) -> Ball:
    """First correction coefficient cos(2pi(p^2-p-1/16))/cos(2pi p) on [0,1).

    The quotient has removable singularities at p = 1/4 and 3/4; near them
    the factored sinc form is used so the enclosure never divides by a
    ball containing zero.
    """
    pf = float(p.mid)
    for p0_num, p0_den, sgn in ((1, 4, -1), (3, 4, +1)):
        p0 = p0_num / p0_den
        if abs(pf - p0) <= 0.05:
            w = sub(p, div_int(Ball.exact_int(p0_num, prec), p0_den, prec), prec)
            two_w = rigor.scale2(w, 1)
            one = Ball.exact_int(1, prec)
            fac = add(one, two_w, prec) if sgn > 0 else sub(one, two_w, prec)
            pi_b = rigor.pi_ball(prec)
            num = _sinc_ball(mul(mul(pi_b, w, prec), fac, prec), prec)
            den = _sinc_ball(mul(rigor.scale2(pi_b, 1), w, prec), prec)
            return mul(rigor.scale2(fac, -1), div(num, den, prec), prec)
    two_pi_b = two_pi(prec)
    inner = sub(mul(p, p, prec), p, prec)
    inner = sub(inner, frac_ball(Fraction(1, 16), prec), prec)
    num = rigor.cos(mul(two_pi_b, inner, prec), prec)
    den = rigor.cos(mul(two_pi_b, p, prec), prec)
    return div(num, den, prec)


# ---------------------------------------------------------------------------
# gamma magnitude bound
# ---------------------------------------------------------------------------

def gamma_halfline_bound(sigma: Ball, t: Ball, prec: int = 64) -> float:
    """Proven upper bound for |Gamma((sigma+it)/2)| * exp(pi t / 4).

    Stirling with the explicit Binet remainder; 0 <= sigma <= 1, t >= 10.
    """
    if sigma.lower() < 0.0 or sigma.upper() > 1.0:
        raise DomainViolation("sigma must lie within [0, 1]")
    if t.lower() < 10.0:
        raise DomainViolation("t must be at least 10")
    x = rigor.scale2(sigma, -1)
    y = rigor.scale2(t, -1)
    w = CBall(x, y)
    target = math.ldexp(1.0, -(prec // 2))
    lg = _stirling_log_gamma_re_upper(w, prec, target)
    quarter_pi_t = mul(rigor.scale2(rigor.pi_ball(prec), -2), t, prec)
    total = add(lg, quarter_pi_t, prec)
    hi = total.upper()
    if hi > 700.0:
        return math.inf
    return mul_up(math.exp(hi), 1.0 + 1e-13)


def _stirling_log_gamma_re_upper(w: CBall, prec: int, target: float) -> Ball:
    """Ball for Re log Gamma(w), Re(w) >= 0, Im(w) >= 5 (gamma bound helper)."""
    # arg(w) = pi/2 - atan(x/y) stays well defined for x >= 0, y > 0
    x, y = w.re, w.im
    half = Ball.from_decimal("0.5", prec)
    abs2 = add(mul(x, x, prec), mul(y, y, prec), prec)
    logabs = rigor.scale2(rigor.log(abs2, prec), -1)
    argw = sub(rigor.scale2(rigor.pi_ball(prec), -1), rigor.atan(div(x, y, prec), prec), prec)
    re_part = sub(mul(sub(x, half, prec), logabs, prec), mul(y, argw, prec), prec)
    re_part = sub(re_part, x, prec)
    re_part = add(re_part, rigor.scale2(log_2pi(prec), -1), prec)

    wabs_lo = math.sqrt(max(y.mag_lower(), 1e-9) ** 2) * (1.0 - 1e-14)
    sec2 = 2.0 * cmag_upper(w) / (wabs_lo + x.mag_lower()) * (1.0 + 1e-13)

    inv_w = cinv(w, prec)
    inv_w2 = cmul(inv_w, inv_w, prec)
    zpow = inv_w
    rem = math.inf
    n = 0
    acc = re_part
    while n < 12:
        n += 1
        if n > 1:
            zpow = cmul(zpow, inv_w2, prec)
        coeff = bernoulli(2 * n) / (2 * n * (2 * n - 1))
        acc = add(acc, mul(zpow.re, frac_ball(coeff, prec), prec), prec)
        b_next = abs(bernoulli(2 * n + 2)) / ((2 * n + 1) * (2 * n + 2))
        rem = float(b_next) / wabs_lo ** (2 * n + 1) * sec2 ** (n + 1) * (1.0 + 1e-12)
        if rem <= target:
            break
    return inflate(acc, rem)


# ---------------------------------------------------------------------------
# float-level planning helpers (never used in certifications)
# ---------------------------------------------------------------------------

def mean_gap(t: float) -> float:
    """Approximate mean zero gap pi/theta'(t); planning only."""
    t = max(float(t), 20.0)
    return math.pi / (0.5 * math.log(t / (2 * math.pi)))
