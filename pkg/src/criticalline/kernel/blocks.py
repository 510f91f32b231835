"""Planning layer between the MP world and the double-precision core.

A *block* is a run of exact-double lattice points sharing one main-sum
length nu, one Taylor expansion of theta about an anchor t0, and one
static radius.  Everything the core consumes (double-double phase
tables, coefficients, error constants) is produced here with ball
arithmetic, rounded outward.

Static radius budget per point (documented against the core's ops):

* POLY_ERR   : cosine/sine polynomial truncation (<= 3e-18) plus Horner
               rounding (~12 ops, <= 1.5e-15) plus quadrant-step and
               hi+lo collapse rounding (<= 2e-16); 4e-15 with margin.
* DD_NOISE   : sloppy double-double residuals, <= ~3e-24 at the largest
               phase magnitudes; budgeted flat at 1e-19.
* accumulation: each add rounds by <= eps * (sum of |a_n|); budgeted
               2.5e-16 * N * A.
* correction term: sqrt/divide roundings and the C0 branch polynomials;
               budgeted flat at 1e-10 (the Gabcke truncation bound it
               accompanies is ~1e-5 .. 1e-7).

The containment suite exercises these constants against the
arbitrary-precision evaluators at random heights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .. import rigor, special
from ..rigor import Ball, add_up, div_up, mul_up, sum_up

POLY_ERR = 4e-15
DD_NOISE = 1e-19
ACC_EPS = 2.5e-16
C0_TERM_ERR = 1e-10
TAYLOR_DEGREE = 12
BLOCK_WIDTH_FRACTION = 16.0   # block half-width <= t0 / this
BLOCK_WIDTH_CAP = 4000.0

_TAB_PREC = 120


def _dd_split(b: Ball) -> tuple[float, float, float]:
    """Ball -> (hi, lo, err) with |value - hi - lo| <= err guaranteed."""
    ctx = rigor.context(b.mid.precision)
    hi = float(b.mid)
    r = ctx.sub(b.mid, gmpy2.mpfr(hi, b.mid.precision))
    lo = float(r)
    resid = abs(ctx.sub(r, gmpy2.mpfr(lo, b.mid.precision)))
    return hi, lo, add_up(rigor._up(float(resid) * (1.0 + 1e-14)), b.rad)


class _Constants:
    """Double-double 2*pi and pi/2 plus the shared parameter prefix."""

    def __init__(self):
        two_pi = special.two_pi(_TAB_PREC)
        half_pi = rigor.scale2(rigor.pi_ball(_TAB_PREC), -1)
        self.two_pi_hi, self.two_pi_lo, self.two_pi_err = _dd_split(two_pi)
        self.half_pi_hi, self.half_pi_lo, self.half_pi_err = _dd_split(half_pi)
        self.inv_2pi = 1.0 / (2.0 * math.pi)  # only selects reduction integers

    def param_prefix(self) -> list[float]:
        return [self.two_pi_hi, self.two_pi_lo, self.inv_2pi,
                self.half_pi_hi, self.half_pi_lo]


_CONSTANTS: _Constants | None = None


def constants() -> _Constants:
    global _CONSTANTS
    if _CONSTANTS is None:
        _CONSTANTS = _Constants()
    return _CONSTANTS


class TermTables:
    """Growing cache of log n / n^(-1/2) tables shared by all blocks."""

    def __init__(self):
        self.n = 0
        self.lam_hi = np.zeros(0)
        self.lam_lo = np.zeros(0)
        self.lam_err = np.zeros(0)
        self.a = np.zeros(0)
        self.a_err = np.zeros(0)
        self.pre_a = np.zeros(1)      # prefix sums of a upper bounds
        self.pre_a_err = np.zeros(1)

    def grow(self, n: int):
        if n <= self.n:
            return
        n = max(n, 2 * self.n, 64)
        ctx = rigor.context(_TAB_PREC)
        old = self.n
        lam_hi = np.concatenate([self.lam_hi, np.zeros(n - old)])
        lam_lo = np.concatenate([self.lam_lo, np.zeros(n - old)])
        lam_err = np.concatenate([self.lam_err, np.zeros(n - old)])
        a = np.concatenate([self.a, np.zeros(n - old)])
        a_err = np.concatenate([self.a_err, np.zeros(n - old)])
        for i in range(old, n):
            k = i + 1
            lam = rigor.log(Ball.exact_int(k, _TAB_PREC), _TAB_PREC)
            lam_hi[i], lam_lo[i], lam_err[i] = _dd_split(lam)
            rs = rigor.div(Ball.exact_int(1, _TAB_PREC),
                           rigor.sqrt(Ball.exact_int(k, _TAB_PREC), _TAB_PREC), _TAB_PREC)
            a[i] = float(rs.mid)
            a_err[i] = sum_up(abs(float(ctx.sub(rs.mid, gmpy2.mpfr(a[i], _TAB_PREC)))) * (1.0 + 1e-14),
                              rs.rad)
        self.lam_hi, self.lam_lo, self.lam_err = lam_hi, lam_lo, lam_err
        self.a, self.a_err = a, a_err
        up = np.maximum(a, 0.0) * (1.0 + 2e-16) + a_err
        self.pre_a = np.concatenate([[0.0], np.cumsum(up) * (1.0 + 1e-12)])
        self.pre_a_err = np.concatenate([[0.0], np.cumsum(a_err) * (1.0 + 1e-12)])
        self.n = n

    def slice_sums(self, start: int, stop: int) -> tuple[float, float]:
        """Upper bounds for sum a_n and sum a_err over table slots [start, stop)."""
        a_sum = (self.pre_a[stop] - self.pre_a[start]) * (1.0 + 1e-12) + 1e-300
        e_sum = (self.pre_a_err[stop] - self.pre_a_err[start]) * (1.0 + 1e-12) + 1e-300
        return a_sum, e_sum


_TABLES: TermTables | None = None


def term_tables() -> TermTables:
    global _TABLES
    if _TABLES is None:
        _TABLES = TermTables()
    return _TABLES


# ---------------------------------------------------------------------------
# RS scan blocks
# ---------------------------------------------------------------------------

@dataclass
class Block:
    ts: np.ndarray                # exact-double sample points, ascending
    indices: list[int]            # positions of these points in the caller's list
    t0: float
    nu: int
    params: np.ndarray
    tc_hi: np.ndarray
    tc_lo: np.ndarray
    lam_hi: np.ndarray = field(repr=False, default=None)
    lam_lo: np.ndarray = field(repr=False, default=None)
    coeff: np.ndarray = field(repr=False, default=None)
    phi_hi: np.ndarray = field(repr=False, default=None)
    phi_lo: np.ndarray = field(repr=False, default=None)
    rad: float = 0.0


def nu_of(t: float) -> int:
    """Exact floor of sqrt(t/2pi) for an exact-double t."""
    prec = 96
    while True:
        tb = Ball.from_float(t, prec)
        a = rigor.sqrt(rigor.div(tb, special.two_pi(prec), prec), prec)
        lo, hi = math.floor(a.lower()), math.floor(a.upper())
        if lo == hi:
            return lo
        prec *= 2
        if prec > 4096:
            raise rigor.DomainViolation(f"cannot settle nu at t={t}")


def nu_transition(m: int) -> tuple[float, float]:
    """Float enclosure of 2 pi m^2, where the main-sum length steps to m."""
    prec = 128
    b = rigor.mul(special.two_pi(prec), Ball.exact_int(m * m, prec), prec)
    return b.lower(), b.upper()


def _theta_static_err(t0: float, w: float, cerr: list[float], t_blo: float) -> float:
    # coefficient splitting errors propagated through |h| <= w
    acc = 0.0
    wp = 1.0
    for e in cerr:
        acc = add_up(acc, mul_up(e, wp))
        wp = mul_up(wp, w)
    # Lagrange remainder of the degree-K Taylor of the closed-form series
    k1 = TAYLOR_DEGREE + 1
    sup = special.theta_tilde_deriv_sup(t_blo, k1)
    lag = sup / math.factorial(k1) * w ** k1 * (1.0 + 1e-10)
    # asymptotic-series tail of theta itself
    tail = special.theta_tail_bound(t_blo)
    return sum_up(acc, lag, tail)


def build_rs_block(ts: np.ndarray, indices: list[int], terms: int,
                   table: special.RemainderTable) -> Block:
    """Tables and static radius for one nu-homogeneous run of points."""
    cst = constants()
    tt = term_tables()
    t_blo = float(ts[0])
    t_bhi = float(ts[-1])
    t0 = float(ts[len(ts) // 2])
    w = max(t0 - t_blo, t_bhi - t0, 1.0)
    nu = nu_of(t_blo)

    prec = _TAB_PREC + max(0, int(math.log2(max(t_bhi, 2))) + 8)
    t0b = Ball.from_float(t0, prec)
    derivs = special.theta_tilde_derivs(t0b, TAYLOR_DEGREE, prec)
    tc_hi = np.zeros(TAYLOR_DEGREE + 1)
    tc_lo = np.zeros(TAYLOR_DEGREE + 1)
    cerr = []
    for k, d in enumerate(derivs):
        coeff_ball = rigor.div_int(d, math.factorial(k), prec) if k >= 2 else d
        hi, lo, err = _dd_split(coeff_ball)
        tc_hi[k], tc_lo[k] = hi, lo
        cerr.append(err)
    theta_err = _theta_static_err(t0, w, cerr, t_blo)

    tt.grow(nu)
    lam_hi = np.ascontiguousarray(tt.lam_hi[:nu])
    lam_lo = np.ascontiguousarray(tt.lam_lo[:nu])
    coeff = np.ascontiguousarray(tt.a[:nu])
    phi_hi = np.zeros(nu)
    phi_lo = np.zeros(nu)
    phi_err = 0.0
    ctx = rigor.context(prec)
    two_pi_b = special.two_pi(prec)
    for i in range(nu):
        lam = Ball(gmpy2.mpfr(tt.lam_hi[i], prec), 0.0)
        lam = rigor.add(lam, Ball.from_float(tt.lam_lo[i], prec), prec)
        lam = special.inflate(lam, tt.lam_err[i])
        ph = rigor.mul(t0b, lam, prec)
        q = math.floor(float(ph.mid) / (2.0 * math.pi))
        ph = rigor.sub(ph, rigor.mul_int(two_pi_b, q, prec), prec)
        hi, lo, err = _dd_split(ph)
        phi_hi[i], phi_lo[i] = hi, lo
        phi_err = max(phi_err, err)

    lam_err_max = float(np.max(tt.lam_err[:nu])) if nu else 0.0
    phase_err = sum_up(theta_err, phi_err, mul_up(w, lam_err_max), DD_NOISE)
    a_sum, a_err_sum = tt.slice_sums(0, nu)
    per_point = sum_up(
        a_err_sum,
        mul_up(a_sum, add_up(POLY_ERR, phase_err)),
        mul_up(mul_up(ACC_EPS, float(nu)), a_sum),
    )
    rad = mul_up(2.0, per_point)
    if terms >= 1:
        rad = sum_up(rad, C0_TERM_ERR)
    rad = add_up(rad, table.bound(t_blo, terms))

    parity = 0.0 if terms == 0 else (-1.0 if nu % 2 == 0 else 1.0)
    params = np.array(cst.param_prefix() + [
        t0, float(nu), parity, 1.0 if terms >= 1 else 0.0,
    ])
    return Block(ts=ts, indices=indices, t0=t0, nu=nu, params=params,
                 tc_hi=tc_hi, tc_lo=tc_lo, lam_hi=lam_hi, lam_lo=lam_lo,
                 coeff=coeff, phi_hi=phi_hi, phi_lo=phi_lo, rad=rad)


def plan_blocks(points: list[float], indices: list[int], terms: int,
                table: special.RemainderTable) -> list[Block]:
    """Split ascending exact-double points into nu-homogeneous width-capped
    blocks.  nu is settled exactly per run (the first point of a run gets an
    exact floor; the run is cut before the float lower bound of the next
    transition, so every point in it provably shares that nu).
    """
    if not points:
        return []
    blocks: list[Block] = []
    i = 0
    npts = len(points)
    while i < npts:
        t = points[i]
        lo_f, _ = nu_transition(nu_of(t) + 1)
        width = min(t / BLOCK_WIDTH_FRACTION, BLOCK_WIDTH_CAP)
        j = i + 1
        while j < npts and points[j] < lo_f and points[j] - t <= width:
            j += 1
        ts = np.ascontiguousarray(np.asarray(points[i:j], dtype=np.float64))
        blocks.append(build_rs_block(ts, indices[i:j], terms, table))
        i = j
    return blocks


# ---------------------------------------------------------------------------
# oscillating pair sums (zeta main sum helper)
# ---------------------------------------------------------------------------

def pair_sum_radius(t: float, start: int, stop: int) -> float:
    """Static radius for one oscillating_pair call over slots [start, stop)."""
    tt = term_tables()
    a_sum, a_err_sum = tt.slice_sums(start, stop)
    lam_err_max = float(np.max(tt.lam_err[start:stop])) if stop > start else 0.0
    phase_err = sum_up(mul_up(abs(t), lam_err_max), DD_NOISE)
    n = float(stop - start)
    return sum_up(
        a_err_sum,
        mul_up(a_sum, add_up(POLY_ERR, phase_err)),
        mul_up(mul_up(ACC_EPS, n), a_sum),
    )
