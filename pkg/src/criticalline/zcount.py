"""Two independent rigorous evaluators for Z(t) and the lattice scanner.

Z(t) = e^{i theta(t)} zeta(1/2 + it) is real; its certified sign changes
are the raw material of the whole verification.  The series evaluator
(Euler-Maclaurin) works at any height and is the reference; the main-sum
evaluator (Riemann-Siegel) is the fast one above its validity floor.
Both return balls, and the scanner cross-checks them against each other
on a sampled subset of lattice points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import gmpy2
import numpy as np

from . import rigor, special
from ._complex import CBall, cadd, cdiv, cmag_upper, cmul, cmul_real, csub
from .dyadic import Dyadic
from .errors import (BudgetExhausted, DomainViolation, PrecisionExhausted,
                     StepTooCoarse)
from .kernel import blocks, load_core
from .rigor import Ball, Sign, add, ball_sign, div, div_int, mul, mul_int, sub

ZERO_D = Dyadic(0)


def _promote(t: Ball, prec: int) -> Ball:
    """Re-round a ball's midpoint to a working precision."""
    if t.mid.precision >= prec:
        return t
    return add(t, Ball.exact_int(0, prec), prec)


def _guard_bits(t_hi: float, nmax: float) -> int:
    """Extra bits so phases around t*log(n) keep their precision."""
    mag = max(t_hi, 4.0) * max(math.log(max(nmax, 4.0)), 2.0)
    return max(8, int(math.log2(mag)) + 6)


# ---------------------------------------------------------------------------
# Euler-Maclaurin evaluator
# ---------------------------------------------------------------------------

def _zeta_em_complex(t: Ball, prec: int, max_terms: int, fast_sum_core=None) -> CBall:
    """Ball pair for zeta(1/2 + it) by Euler-Maclaurin summation."""
    t_hi = t.mag_upper()
    N = max(16, int(0.25 * t_hi) + 2 * ((prec + 63) // 64) * 8)
    while True:
        if N > max_terms:
            raise PrecisionExhausted(
                f"Euler-Maclaurin needs more than {max_terms} terms at t ~ {t_hi:g}")
        out = _zeta_em_at(t, prec, N, fast_sum_core)
        if out is not None:
            return out
        N *= 2


def _zeta_em_at(t: Ball, prec: int, N: int, fast_sum_core) -> CBall | None:
    wp = prec + _guard_bits(t.mag_upper(), N)
    tb = _promote(t, wp)
    half = Ball.from_decimal("0.5", wp)
    s = CBall(half, tb)

    if fast_sum_core is not None and t.rad == 0.0 and t.mid == float(t.mid):
        re, im = _em_main_sum_fast(float(t.mid), N, wp, fast_sum_core)
    else:
        re, im = _em_main_sum_mp(tb, N, wp)

    nb = Ball.exact_int(N, wp)
    log_n = rigor.log(nb, wp)
    # N^{-s} = N^{-1/2} (cos(t log N) - i sin(t log N))
    amp = div(Ball.exact_int(1, wp), rigor.sqrt(nb, wp), wp)
    ang = mul(tb, log_n, wp)
    npow = CBall(mul(amp, rigor.cos(ang, wp), wp),
                 rigor.neg(mul(amp, rigor.sin(ang, wp), wp)))
    # sum_{n<N} n^-s + N^-s/2 + N^{1-s}/(s-1)
    acc = CBall(re, im)
    acc = cadd(acc, CBall(rigor.scale2(npow.re, -1), rigor.scale2(npow.im, -1)), wp)
    n1s = cmul_real(npow, nb, wp)  # N^{1-s}
    sm1 = CBall(sub(half, Ball.exact_int(1, wp), wp), tb)
    acc = cadd(acc, cdiv(n1s, sm1, wp), wp)

    # correction terms B_2k/(2k)! (s)_{2k-1} N^{-s-2k+1}
    target = math.ldexp(max(cmag_upper(acc), 1.0), -(prec + 8))
    rising = s
    invn2 = div(Ball.exact_int(1, wp), mul(nb, nb, wp), wp)
    npw = cmul_real(npow, mul(nb, invn2, wp), wp)  # N^{-s-1}
    k = 0
    prev_mag = math.inf
    while True:
        k += 1
        coeff = special.bernoulli(2 * k) / math.factorial(2 * k)
        term = cmul_real(cmul(rising, npw, wp), special.frac_ball(coeff, wp), wp)
        mag = cmag_upper(term)
        # tail bound: |s + 2k+1|/(sigma + 2k+1) * |next term|; emitted once
        # the term chain is decreasing and small enough
        if mag > prev_mag and mag > target:
            return None  # diverging before reaching target: grow N
        acc = cadd(acc, term, wp)
        nxt_rising = cmul(cmul(rising, CBall(add(half, Ball.exact_int(2 * k - 1, wp), wp), tb), wp),
                          CBall(add(half, Ball.exact_int(2 * k, wp), wp), tb), wp)
        nxt_coeff = special.bernoulli(2 * k + 2) / math.factorial(2 * k + 2)
        npw_next = cmul_real(npw, invn2, wp)
        nxt = cmul_real(cmul(nxt_rising, npw_next, wp), special.frac_ball(nxt_coeff, wp), wp)
        nxt_mag = cmag_upper(nxt)
        ratio = rigor.div_up(math.hypot(0.5, t.mag_upper()) + 2 * k + 1, 0.5 + 2 * k + 1)
        tail = rigor.mul_up(ratio, nxt_mag)
        if tail <= target:
            return CBall(special.inflate(acc.re, tail), special.inflate(acc.im, tail))
        if k >= 60:
            return None  # not converging fast enough: caller grows N
        rising = nxt_rising
        npw = npw_next
        prev_mag = mag


_MP_LOG_CACHE: dict[tuple[int, int], tuple[Ball, Ball]] = {}


def _log_rsqrt(n: int, wp: int) -> tuple[Ball, Ball]:
    key = (wp, n)
    hit = _MP_LOG_CACHE.get(key)
    if hit is None:
        nb = Ball.exact_int(n, wp)
        hit = (rigor.log(nb, wp),
               div(Ball.exact_int(1, wp), rigor.sqrt(nb, wp), wp))
        if len(_MP_LOG_CACHE) < 200000:
            _MP_LOG_CACHE[key] = hit
    return hit


def _em_main_sum_mp(tb: Ball, N: int, wp: int) -> tuple[Ball, Ball]:
    re = Ball.exact_int(1, wp)
    im = Ball.exact_int(0, wp)
    for n in range(2, N):
        log_n, amp = _log_rsqrt(n, wp)
        ang = mul(tb, log_n, wp)
        re = add(re, mul(amp, rigor.cos(ang, wp), wp), wp)
        im = sub(im, mul(amp, rigor.sin(ang, wp), wp), wp)
    return re, im


def _em_main_sum_fast(t: float, N: int, wp: int, core) -> tuple[Ball, Ball]:
    tt = blocks.term_tables()
    tt.grow(N - 1)
    out = np.zeros(2)
    core.oscillating_pair(t, tt.lam_hi, tt.lam_lo, tt.a, 0, N - 1,
                          np.array(blocks.constants().param_prefix() + [0.0] * 4), out)
    rad = blocks.pair_sum_radius(t, 0, N - 1)
    re = special.inflate(Ball.from_float(out[0], wp), rad)
    im = rigor.neg(special.inflate(Ball.from_float(out[1], wp), rad))
    return re, im


def z_euler_maclaurin(t: Ball, prec: int = 64, *, max_terms: int = 400000,
                      allow_fast_sum: bool = True) -> Ball:
    """Enclosure of Z(t) via Euler-Maclaurin zeta, rotated by theta."""
    if not t.lower() > 0.0:
        raise DomainViolation("Z evaluation needs t > 0")
    core = _default_core() if (allow_fast_sum and prec <= 46) else None
    zeta = _zeta_em_complex(t, prec, max_terms, core)
    wp = prec + _guard_bits(t.mag_upper(), 16)
    th = special.theta_any(_promote(t, wp), wp)
    cth, sth = rigor.cos(th, wp), rigor.sin(th, wp)
    z = sub(mul(zeta.re, cth, wp), mul(zeta.im, sth, wp), wp)
    imag = add(mul(zeta.re, sth, wp), mul(zeta.im, cth, wp), wp)
    if not imag.contains_zero():
        raise RuntimeError(
            "rotated zeta has nonzero imaginary enclosure: soundness bug")
    return z


_CORE = None


def _default_core():
    global _CORE
    if _CORE is None:
        from . import kernel
        _CORE = kernel.core
    return _CORE


# ---------------------------------------------------------------------------
# Riemann-Siegel evaluator
# ---------------------------------------------------------------------------

def z_riemann_siegel(t: Ball, prec: int = 64, correction_terms: int = 1,
                     table: special.RemainderTable | None = None) -> Ball:
    """Enclosure of Z(t) by the truncated main sum plus correction terms.

    Only the first correction coefficient is evaluated (deeper rows exist
    in the bound table but have no evaluator here).
    """
    table = table or special._DEFAULT_TABLE
    t_lo = t.lower()
    bound = table.bound(t_lo, correction_terms)  # raises BelowValidityFloor
    if correction_terms > 1:
        raise ValueError("correction terms beyond the first are not evaluated")
    wp = prec + _guard_bits(t.mag_upper(), max(t.mag_upper(), 16.0))
    tb = _promote(t, wp)
    a = rigor.sqrt(div(tb, special.two_pi(wp), wp), wp)
    while True:
        lo_f, hi_f = math.floor(a.lower()), math.floor(a.upper())
        if lo_f == hi_f:
            nu = int(lo_f)
            break
        wp *= 2
        if wp > 1 << 16:
            raise PrecisionExhausted("cannot settle the main-sum length")
        tb = _promote(t, wp)
        a = rigor.sqrt(div(tb, special.two_pi(wp), wp), wp)
    if nu < 1:
        raise DomainViolation("empty main sum below the first transition")

    th = special.rs_theta(tb, wp)
    acc = rigor.cos(th, wp)  # n = 1 term
    for n in range(2, nu + 1):
        log_n, amp = _log_rsqrt(n, wp)
        ang = sub(th, mul(tb, log_n, wp), wp)
        acc = add(acc, mul(amp, rigor.cos(ang, wp), wp), wp)
    z = rigor.scale2(acc, 1)

    if correction_terms >= 1:
        p = sub(a, Ball.exact_int(nu, wp), wp)
        c0 = special.c0_ball(p, wp)
        scale = div(Ball.exact_int(1, wp), rigor.sqrt(a, wp), wp)  # (2pi/t)^(1/4)
        term = mul(scale, c0, wp)
        if nu % 2 == 0:
            term = rigor.neg(term)
        z = add(z, term, wp)
    return special.inflate(z, bound)


# ---------------------------------------------------------------------------
# lattice and sign sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    """Uniform exact-dyadic sampling grid over [t_lo, t_hi)."""

    t_lo: Dyadic
    t_hi: Dyadic
    step: Dyadic
    offset: Dyadic = ZERO_D

    def __post_init__(self):
        if not self.t_lo < self.t_hi:
            raise ValueError("need t_lo < t_hi")
        if not ZERO_D < self.step:
            raise ValueError("step must be positive")
        if not (ZERO_D <= self.offset and self.offset < self.step):
            raise ValueError("offset must lie in [0, step)")

    def points(self) -> list[Dyadic]:
        out = []
        p = self.t_lo + self.offset
        while p < self.t_hi:
            out.append(p)
            p = p + self.step
        return out


@dataclass(frozen=True)
class SignSequence:
    """Ordered certified signs at sample points, with scan diagnostics."""

    points: tuple[Dyadic, ...]
    signs: tuple[Sign, ...]
    z_mids: tuple[float, ...]
    prec: int
    lattice: Lattice | None = None
    policy: "EvaluatorPolicy" = None

    @property
    def changes(self) -> int:
        """Adjacent determinate flips; INDETERMINATE blocks counting."""
        n = 0
        for i in range(len(self.signs) - 1):
            a, b = self.signs[i], self.signs[i + 1]
            if a != Sign.INDETERMINATE and b != Sign.INDETERMINATE and a != b:
                n += 1
        return n

    @property
    def indeterminates(self) -> int:
        return sum(1 for s in self.signs if s == Sign.INDETERMINATE)

    def change_cells(self) -> list[tuple[Dyadic, Dyadic]]:
        out = []
        for i in range(len(self.signs) - 1):
            a, b = self.signs[i], self.signs[i + 1]
            if a != Sign.INDETERMINATE and b != Sign.INDETERMINATE and a != b:
                out.append((self.points[i], self.points[i + 1]))
        return out

    def changes_within(self, lo: Dyadic, hi: Dyadic) -> int:
        """Count change cells entirely inside (lo, hi]."""
        n = 0
        for a, b in self.change_cells():
            if lo <= a and b <= hi:
                n += 1
        return n

    def indeterminate_points(self) -> list[Dyadic]:
        return [p for p, s in zip(self.points, self.signs) if s == Sign.INDETERMINATE]

    def slice(self, lo: Dyadic, hi: Dyadic) -> "SignSequence":
        """Sub-sequence of points within [lo, hi]."""
        keep = [i for i, p in enumerate(self.points) if lo <= p <= hi]
        return replace(self,
                       points=tuple(self.points[i] for i in keep),
                       signs=tuple(self.signs[i] for i in keep),
                       z_mids=tuple(self.z_mids[i] for i in keep),
                       lattice=None)


# ---------------------------------------------------------------------------
# evaluation policy
# ---------------------------------------------------------------------------

@dataclass
class EvaluatorPolicy:
    """Which evaluator runs where, ladder limits, cross-check cadence."""

    em_cutoff: float = 500.0
    rs_terms: int = 1
    table: special.RemainderTable = field(default_factory=special.RemainderTable)
    ladder_max: int = 4096
    crosscheck_every: int = 1000
    small_z: float = 0.05
    samples_per_gap: float = 12.0
    step_safety: float = 4.0
    em_max_terms: int = 400000
    kernel_prefer: str = "auto"
    _core: object = field(default=None, repr=False)
    _core_compiled: bool = field(default=False, repr=False)

    def core(self):
        if self._core is None:
            self._core, self._core_compiled = load_core(self.kernel_prefer)
        return self._core

    def kernel_floor(self) -> float:
        return max(self.em_cutoff, self.table.floor(self.rs_terms))

    def default_step(self, t_hi: float) -> Dyadic:
        """About samples_per_gap points per mean zero gap near the top end.

        Quantised coarsely enough that lattice points stay exact doubles.
        """
        gap = special.mean_gap(t_hi)
        quantum = -max(8, 50 - max(0, int(math.log2(max(t_hi, 2))) + 1))
        return Dyadic.from_float(gap / self.samples_per_gap).quantize(quantum)

    def max_step(self, t_hi: float) -> float:
        return special.mean_gap(t_hi) / self.step_safety

    # -- single-point evaluation (ladder lives in the scanner) ----------

    def evaluate(self, t: Ball, prec: int) -> Ball:
        if t.lower() >= self.kernel_floor():
            return z_riemann_siegel(t, prec, self.rs_terms, self.table)
        return z_euler_maclaurin(t, prec, max_terms=self.em_max_terms)

    def sign_with_ladder(self, td: Dyadic, prec: int) -> tuple[Sign, float, int]:
        p = max(prec, 64)
        while True:
            ball = self.evaluate(Ball.from_dyadic(td, p), p)
            s = ball_sign(ball)
            if s != Sign.INDETERMINATE or p >= self.ladder_max:
                return s, float(ball.mid), p
            p *= 2


# ---------------------------------------------------------------------------
# scanning
# ---------------------------------------------------------------------------

def scan_points(points: list[Dyadic], policy: EvaluatorPolicy, prec: int,
                lattice: Lattice | None = None) -> SignSequence:
    """Certified signs of Z at the given ascending dyadic points."""
    n = len(points)
    signs: list[Sign] = [Sign.INDETERMINATE] * n
    zmids: list[float] = [0.0] * n

    floor = policy.kernel_floor()
    kernel_idx: list[int] = []
    kernel_pts: list[float] = []
    mp_idx: list[int] = []
    for i, p in enumerate(points):
        if p.fits_double() and float(p) >= floor:
            kernel_idx.append(i)
            kernel_pts.append(p.exact_float())
        else:
            mp_idx.append(i)

    core = policy.core()
    for block in blocks.plan_blocks(kernel_pts, kernel_idx, policy.rs_terms,
                                    policy.table):
        out = np.zeros(len(block.ts))
        core.scan_rs_block(block.ts, out, block.tc_hi, block.tc_lo,
                           block.lam_hi, block.lam_lo, block.phi_hi,
                           block.phi_lo, block.coeff, block.params)
        for local, idx in enumerate(block.indices):
            mid = float(out[local])
            zmids[idx] = mid
            if mid > block.rad:
                signs[idx] = Sign.POSITIVE
            elif -mid > block.rad:
                signs[idx] = Sign.NEGATIVE
            else:
                mp_idx.append(idx)  # escalate through the MP ladder

    for idx in mp_idx:
        s, zm, _ = policy.sign_with_ladder(points[idx], prec)
        signs[idx] = s
        zmids[idx] = zm

    if policy.crosscheck_every:
        for idx in range(0, n, policy.crosscheck_every):
            _crosscheck(points[idx], policy, prec)

    return SignSequence(points=tuple(points), signs=tuple(signs),
                        z_mids=tuple(zmids), prec=prec, lattice=lattice,
                        policy=policy)


def _crosscheck(td: Dyadic, policy: EvaluatorPolicy, prec: int):
    """Independent-evaluator agreement at one point; a failure is a bug."""
    t = Ball.from_dyadic(td, max(prec, 64))
    em = z_euler_maclaurin(t, max(prec, 64), max_terms=policy.em_max_terms)
    if t.lower() >= policy.table.floor(policy.rs_terms):
        rs = z_riemann_siegel(t, max(prec, 64), policy.rs_terms, policy.table)
        if not em.overlaps(rs):
            raise RuntimeError(
                f"evaluator cross-check failed at t={td}: {em!r} vs {rs!r}")


def scan_lattice(lattice: Lattice, policy: EvaluatorPolicy, prec: int = 64,
                 extra_points: tuple[Dyadic, ...] = ()) -> SignSequence:
    """Scan a uniform lattice (plus optional explicit boundary points)."""
    if float(lattice.step) > policy.max_step(float(lattice.t_hi)):
        raise StepTooCoarse(
            f"step {float(lattice.step):g} exceeds gap/{policy.step_safety:g} "
            f"at t={float(lattice.t_hi):g}")
    pts = lattice.points()
    if extra_points:
        merged = sorted(set(pts) | set(extra_points))
        pts = [p for p in merged if lattice.t_lo <= p <= lattice.t_hi]
    return scan_points(pts, policy, prec, lattice=lattice)


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------

def _merge(seq: SignSequence, new: list[tuple[Dyadic, Sign, float]],
           drop: set[Dyadic]) -> SignSequence:
    table = {p: (s, z) for p, s, z in zip(seq.points, seq.signs, seq.z_mids)
             if p not in drop}
    for p, s, z in new:
        if s != Sign.INDETERMINATE or p not in table:
            table[p] = (s, z)
    pts = sorted(table)
    return replace(seq,
                   points=tuple(pts),
                   signs=tuple(table[p][0] for p in pts),
                   z_mids=tuple(table[p][1] for p in pts))


def refine(seq: SignSequence, budget: int, *, deficit: int = 0,
           lo: Dyadic | None = None, hi: Dyadic | None = None) -> SignSequence:
    """Resolve indeterminate points and hunt close pairs for missed changes.

    Inserts midpoint samples around suspicious same-sign pairs (small
    certified |Z| at both ends, sharpened by a curvature score) and
    jitters points sitting numerically on a zero.  Never removes a
    certified sign; `budget` caps the number of new evaluations.
    """
    policy = seq.policy
    if policy is None:
        raise ValueError("sequence carries no evaluation policy")
    if budget <= 0:
        if seq.indeterminates or deficit > 0:
            raise BudgetExhausted("zero budget", _unresolved(seq, lo, hi))
        return seq
    lo = lo if lo is not None else seq.points[0]
    hi = hi if hi is not None else seq.points[-1]
    start_changes = seq.changes
    spent = 0

    for _ in range(256):
        progress = False

        # 1. indeterminate points: the ladder already ran during the scan,
        # so a survivor is treated as sitting on a zero and is dodged by a
        # one-eighth-cell jitter (kept dyadic so placement stays exact).
        for p in seq.indeterminate_points():
            if spent >= budget:
                raise BudgetExhausted(f"budget {budget} exhausted",
                                      _unresolved(seq, lo, hi))
            i = list(seq.points).index(p)
            if i + 1 < len(seq.points):
                jit = p + (seq.points[i + 1] - p).scale2(-3)
            elif i > 0:
                jit = p - (p - seq.points[i - 1]).scale2(-3)
            else:
                raise BudgetExhausted("isolated indeterminate point",
                                      _unresolved(seq, lo, hi))
            s, z, _ = policy.sign_with_ladder(jit, seq.prec)
            spent += 1
            seq = _merge(seq, [(jit, s, z)], drop={p})
            progress = True

        found = seq.changes - start_changes
        if seq.indeterminates == 0 and (deficit <= 0 or found >= deficit):
            return seq

        # 2. suspicious same-sign cells inside (lo, hi], small-|Z| first
        cands = []
        pts, sgs, zms = seq.points, seq.signs, seq.z_mids
        for i in range(len(pts) - 1):
            if not (lo <= pts[i] and pts[i + 1] <= hi):
                continue
            if sgs[i] == Sign.INDETERMINATE or sgs[i] != sgs[i + 1]:
                continue
            small = min(abs(zms[i]), abs(zms[i + 1]))
            curve = 0.0
            if 0 < i < len(pts) - 2:
                curve = abs(zms[i - 1] - 2.0 * zms[i] + zms[i + 1])
            score = small / (1.0 + curve)
            cands.append((score, small, i))
        cands.sort()
        take = max(4 * max(deficit - found, 1), 8)
        batch: list[tuple[Dyadic, Sign, float]] = []
        for score, small, i in cands[:take]:
            if small > policy.small_z and len(batch) >= 2:
                break
            if spent >= budget:
                raise BudgetExhausted(f"budget {budget} exhausted",
                                      _unresolved(seq, lo, hi))
            mid = (pts[i] + pts[i + 1]).half()
            if mid in pts:
                continue
            s, z, _ = policy.sign_with_ladder(mid, seq.prec)
            spent += 1
            batch.append((mid, s, z))
        if batch:
            seq = _merge(seq, batch, drop=set())
            progress = True

        found = seq.changes - start_changes
        if seq.indeterminates == 0 and (deficit <= 0 or found >= deficit):
            return seq
        if not progress:
            break

    if seq.indeterminates or (deficit > 0 and seq.changes - start_changes < deficit):
        raise BudgetExhausted("refinement stalled", _unresolved(seq, lo, hi))
    return seq


def _unresolved(seq: SignSequence, lo, hi) -> list[tuple[float, float]]:
    out = [(float(p), float(p)) for p in seq.indeterminate_points()]
    pts, sgs, zms = seq.points, seq.signs, seq.z_mids
    for i in range(len(pts) - 1):
        if sgs[i] != Sign.INDETERMINATE and sgs[i] == sgs[i + 1] and \
                min(abs(zms[i]), abs(zms[i + 1])) < (seq.policy.small_z if seq.policy else 0.05):
            out.append((float(pts[i]), float(pts[i + 1])))
    return out
