"""Oracle-backed invariant suites, runnable without any test framework.

The containment suite is the package's own guarantee check: random ball
operations are re-evaluated at four times the working precision on
random points sampled inside the operand balls, and the sampled value
must land inside the output ball every single time.
"""

from __future__ import annotations

import math
import random
import time

import gmpy2

from . import rigor, special, zcount
from .orchestra import ensure_validated, load_reference_zeros
from .certify import TuringConstants
from .rigor import Ball, Sign, ball_sign

ARITH_OPS = ("add", "sub", "mul", "div")
ELEM_OPS = ("sqrt", "exp", "log", "sin", "cos", "atan")


def _random_ball(rng: random.Random, prec: int, positive: bool = False) -> Ball:
    mag = 10.0 ** rng.uniform(-12, 12)
    mid = rng.uniform(0.1, 1.0) * mag if positive else rng.uniform(-1.0, 1.0) * mag
    rad = abs(mid) * 10.0 ** rng.uniform(-18, -1) * rng.random()
    b = Ball.from_float(mid, prec)
    return Ball(b.mid, rad)


def _sample_inside(rng: random.Random, b: Ball, prec: int):
    u = rng.uniform(-1.0, 1.0)
    ctx = rigor.context(prec)
    return ctx.add(b.mid, gmpy2.mpfr(u * b.rad, prec))


def containment_suite(n_ops: int = 1_000_000, seed: int = 1257787,
                      prec: int = 64, report=print) -> int:
    """Randomized containment check; returns the number of violations."""
    rng = random.Random(seed)
    hi_prec = 4 * prec
    ctx_hi = rigor.context(hi_prec)
    violations = 0
    t0 = time.time()
    per_op = {"add": ctx_hi.add, "sub": ctx_hi.sub, "mul": ctx_hi.mul,
              "div": ctx_hi.div, "sqrt": ctx_hi.sqrt, "exp": ctx_hi.exp,
              "log": ctx_hi.log, "sin": ctx_hi.sin, "cos": ctx_hi.cos,
              "atan": ctx_hi.atan}
    for i in range(n_ops):
        if i % 3 == 2:
            op = ELEM_OPS[rng.randrange(len(ELEM_OPS))]
            need_pos = op in ("sqrt", "log")
            a = _random_ball(rng, prec, positive=need_pos)
            out = rigor.ball_elem(op, a, prec)
            x = _sample_inside(rng, a, hi_prec)
            exact = per_op[op](x)
            if not out.contains(exact):
                violations += 1
        else:
            op = ARITH_OPS[rng.randrange(len(ARITH_OPS))]
            a = _random_ball(rng, prec)
            b = _random_ball(rng, prec, positive=(op == "div"))
            out = rigor.ball_arith(op, a, b, prec)
            x = _sample_inside(rng, a, hi_prec)
            y = _sample_inside(rng, b, hi_prec)
            exact = per_op[op](x, y)
            if not out.contains(exact):
                violations += 1
    report(f"containment: {n_ops} ops, {violations} violations "
           f"({time.time() - t0:.1f}s)")
    return violations


def monotone_precision_suite(n: int = 2000, seed: int = 5689, report=print) -> int:
    """Higher precision must never produce a disjoint ball."""
    rng = random.Random(seed)
    bad = 0
    for _ in range(n):
        a = _random_ball(rng, 64)
        b = _random_ball(rng, 64)
        lo = rigor.mul(a, b, 64)
        hi = rigor.mul(a, b, 256)
        if not lo.overlaps(hi):
            bad += 1
        e_lo = rigor.exp(Ball(a.mid, min(a.rad, 1.0)), 64)
        e_hi = rigor.exp(Ball(a.mid, min(a.rad, 1.0)), 256)
        if not e_lo.overlaps(e_hi):
            bad += 1
    report(f"monotone precision: {n} pairs, {bad} disjoint")
    return bad


def sign_trichotomy_suite(n: int = 5000, seed: int = 999331, report=print) -> int:
    rng = random.Random(seed)
    bad = 0
    for _ in range(n):
        a = _random_ball(rng, 64)
        s = ball_sign(a)
        want = (Sign.POSITIVE if a.mid > a.rad
                else Sign.NEGATIVE if a.mid < -a.rad else Sign.INDETERMINATE)
        if s != want:
            bad += 1
    report(f"sign trichotomy: {n} balls, {bad} mismatches")
    return bad


def cross_agreement_suite(n: int = 10_000, seed: int = 424243,
                          lo: float = 200.0, hi: float = 1e6,
                          report=print) -> int:
    """Series and main-sum evaluators must emit intersecting enclosures."""
    rng = random.Random(seed)
    bad = 0
    t0 = time.time()
    for i in range(n):
        t = rng.uniform(lo, hi)
        tb = Ball.from_float(t, 40)
        em = zcount.z_euler_maclaurin(tb, 30)
        rs = zcount.z_riemann_siegel(tb, 40)
        if not em.overlaps(rs):
            bad += 1
            report(f"  disagreement at t={t!r}: {em!r} vs {rs!r}")
    report(f"evaluator cross-agreement: {n} heights, {bad} failures "
           f"({time.time() - t0:.1f}s)")
    return bad


def theta_domination_suite(n: int = 1000, seed: int = 77001, report=print) -> int:
    """The theta series enclosure must contain the gamma-branch enclosure."""
    rng = random.Random(seed)
    bad = 0
    for _ in range(n):
        t = 10.0 ** rng.uniform(math.log10(20.0), 6.0)
        tb = Ball.from_float(t, 96)
        series = special.rs_theta(tb, 96)
        gamma = special._theta_gamma(tb, 96)
        if not series.overlaps(gamma):
            bad += 1
    report(f"theta series vs gamma-branch: {n} heights, {bad} disjoint")
    return bad


def turing_constants_suite(report=print) -> bool:
    constants = TuringConstants()
    try:
        ensure_validated(constants)
    except Exception as exc:  # pragma: no cover - failure path
        report(f"turing constants validation FAILED: {exc}")
        return False
    report("turing constants (2.30, 0.128): validated on reference windows")
    return True


def remainder_domination_suite(n: int = 300, seed: int = 31251, report=print) -> int:
    """Main-sum truncation bound must dominate the observed residual."""
    rng = random.Random(seed)
    bad = 0
    table = special.RemainderTable()
    for _ in range(n):
        t = rng.uniform(220.0, 20000.0)
        tb = Ball.from_float(t, 64)
        em = zcount.z_euler_maclaurin(tb, 64, allow_fast_sum=False)
        for terms in (0, 1):
            rs = zcount.z_riemann_siegel(tb, 64, terms, table)
            # |EM - RS| cannot exceed the two radii: both contain Z(t)
            gapw = abs(float(em.mid) - float(rs.mid))
            if gapw > em.rad + rs.rad:
                bad += 1
    report(f"remainder domination: {n} heights x 2 depths, {bad} failures")
    return bad


def run(quick: bool = False, report=print) -> int:
    """Run every suite; exit status style return (0 = all pass)."""
    scale = 0.01 if quick else 1.0
    fails = 0
    fails += containment_suite(max(2000, int(1_000_000 * scale)), report=report)
    fails += monotone_precision_suite(max(200, int(2000 * scale)), report=report)
    fails += sign_trichotomy_suite(max(500, int(5000 * scale)), report=report)
    fails += theta_domination_suite(max(100, int(1000 * scale)), report=report)
    fails += cross_agreement_suite(max(100, int(10_000 * scale)), report=report)
    fails += remainder_domination_suite(max(30, int(300 * scale)), report=report)
    fails += 0 if turing_constants_suite(report=report) else 1
    report("selftest: " + ("PASS" if fails == 0 else f"FAIL ({fails})"))
    return 0 if fails == 0 else 1
