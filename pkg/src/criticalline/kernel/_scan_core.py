# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Double-precision evaluation core for lattice scans.

All arithmetic is plain IEEE-754 double work: phases are carried in
double-double (hi, lo) pairs built from error-free transforms, cosine is
a Taylor polynomial after exact quadrant reduction, and every rounding
source is covered by static error constants computed by the block
planner.  The same file runs interpreted (fallback) or compiled by
Cython in pure-python mode; the extension is built with FMA contraction
disabled so both paths produce bit-identical doubles.

Nothing here is trusted blindly: the enclosures this core emits are
cross-checked against the arbitrary-precision evaluators by the
containment suites.
"""

import cython

if cython.compiled:  # pragma: no cover - exercised via the compiled module
    from cython.cimports.libc.math import sqrt as _sqrt
else:
    from math import sqrt as _sqrt

_SPLIT = 134217729.0  # 2^27 + 1, Dekker splitting constant

# cos(x) = sum _COS[k] x^(2k), sin(x) = x * sum _SIN[k] x^(2k); |x| <= pi/4 + 2^-40.
# Truncation: next cos term x^18/18! <= 3e-18, next sin term x^19/19! <= 2e-19.
_COS_C8 = 1.0 / 20922789888000.0
_COS_C7 = -1.0 / 87178291200.0
_COS_C6 = 1.0 / 479001600.0
_COS_C5 = -1.0 / 3628800.0
_COS_C4 = 1.0 / 40320.0
_COS_C3 = -1.0 / 720.0
_COS_C2 = 1.0 / 24.0
_COS_C1 = -0.5
_SIN_C8 = -1.0 / 355687428096000.0
_SIN_C7 = 1.0 / 1307674368000.0
_SIN_C6 = -1.0 / 6227020800.0
_SIN_C5 = 1.0 / 39916800.0
_SIN_C4 = -1.0 / 362880.0
_SIN_C3 = 1.0 / 5040.0
_SIN_C2 = -1.0 / 120.0
_SIN_C1 = 1.0 / 6.0


@cython.cfunc
@cython.inline
def _cos_poly(x: cython.double) -> cython.double:
    x2: cython.double = x * x
    return 1.0 + x2 * (_COS_C1 + x2 * (_COS_C2 + x2 * (_COS_C3 + x2 * (
        _COS_C4 + x2 * (_COS_C5 + x2 * (_COS_C6 + x2 * (_COS_C7 + x2 * _COS_C8)))))))


@cython.cfunc
@cython.inline
def _sin_poly(x: cython.double) -> cython.double:
    x2: cython.double = x * x
    return x * (1.0 + x2 * (_SIN_C1 + x2 * (_SIN_C2 + x2 * (_SIN_C3 + x2 * (
        _SIN_C4 + x2 * (_SIN_C5 + x2 * (_SIN_C6 + x2 * (_SIN_C7 + x2 * _SIN_C8))))))))


# Parameter-pack slots (doubles), shared by both entry points.
P_TWO_PI_HI = 0
P_TWO_PI_LO = 1
P_INV_2PI = 2
P_HALF_PI_HI = 3
P_HALF_PI_LO = 4
P_T0 = 5
P_NU = 6          # main-sum length as a double (exact integer)
P_PARITY = 7      # (-1)^(nu+1); 0 disables the correction term
P_NTERMS = 8      # correction term count as a double: 0 or 1


def scan_rs_block(
    ts: cython.double[:],
    out: cython.double[:],
    tc_hi: cython.double[:],
    tc_lo: cython.double[:],
    lam_hi: cython.double[:],
    lam_lo: cython.double[:],
    phi_hi: cython.double[:],
    phi_lo: cython.double[:],
    coeff: cython.double[:],
    params: cython.double[:],
) -> cython.int:
    """Main-sum values 2*sum a_n cos(theta(t) - t log n) (+ C0 term) per point.

    theta(t) is the planner-supplied Taylor polynomial around params[P_T0]
    carried as double-double coefficients.  Writes midpoints into ``out``;
    the static radius lives with the caller.  Returns 0.
    """
    npts: cython.Py_ssize_t = ts.shape[0]
    deg: cython.Py_ssize_t = tc_hi.shape[0]
    nu: cython.Py_ssize_t = cython.cast(cython.Py_ssize_t, params[P_NU])
    two_pi_hi: cython.double = params[P_TWO_PI_HI]
    two_pi_lo: cython.double = params[P_TWO_PI_LO]
    inv_2pi: cython.double = params[P_INV_2PI]
    half_pi_hi: cython.double = params[P_HALF_PI_HI]
    half_pi_lo: cython.double = params[P_HALF_PI_LO]
    t0: cython.double = params[P_T0]
    parity: cython.double = params[P_PARITY]
    with_c0: cython.double = params[P_NTERMS]

    i: cython.Py_ssize_t
    n: cython.Py_ssize_t
    k: cython.Py_ssize_t
    for i in range(npts):
        t: cython.double = ts[i]
        h: cython.double = t - t0  # exact: |h| <= t0/2 (Sterbenz range)

        # theta(t): double-double Horner in h
        th_h: cython.double = tc_hi[deg - 1]
        th_l: cython.double = tc_lo[deg - 1]
        for k in range(deg - 2, -1, -1):
            # (th_h, th_l) = (th_h, th_l) * h
            c: cython.double = _SPLIT * th_h
            ah: cython.double = c - (c - th_h)
            al: cython.double = th_h - ah
            c = _SPLIT * h
            bh: cython.double = c - (c - h)
            bl: cython.double = h - bh
            ph: cython.double = th_h * h
            pl: cython.double = ((ah * bh - ph) + ah * bl + al * bh) + al * bl
            pl = pl + th_l * h
            # (th_h, th_l) = (ph, pl) + (tc_hi[k], tc_lo[k])
            s: cython.double = ph + tc_hi[k]
            bb: cython.double = s - ph
            e: cython.double = (ph - (s - bb)) + (tc_hi[k] - bb)
            th_h = s
            th_l = e + pl + tc_lo[k]

        acc: cython.double = 0.0
        for n in range(nu):
            # v = theta - phi_n - h*lam_n, in double-double
            c = _SPLIT * h
            bh = c - (c - h)
            bl = h - bh
            lh: cython.double = lam_hi[n]
            c = _SPLIT * lh
            ah = c - (c - lh)
            al = lh - ah
            ph = h * lh
            pl = ((ah * bh - ph) + ah * bl + al * bh) + al * bl
            pl = pl + h * lam_lo[n]

            s = th_h - phi_hi[n]
            bb = s - th_h
            e = (th_h - (s - bb)) + (-phi_hi[n] - bb)
            v_h: cython.double = s
            v_l: cython.double = e + th_l - phi_lo[n]

            s = v_h - ph
            bb = s - v_h
            e = (v_h - (s - bb)) + (-ph - bb)
            v_h = s
            v_l = v_l + e - pl

            # reduce modulo 2*pi
            q: cython.double = (v_h * inv_2pi) + 6755399441055744.0  # round via shift
            q = q - 6755399441055744.0
            c = _SPLIT * q
            ah = c - (c - q)
            al = q - ah
            c = _SPLIT * two_pi_hi
            bh = c - (c - two_pi_hi)
            bl = two_pi_hi - bh
            ph = q * two_pi_hi
            pl = ((ah * bh - ph) + ah * bl + al * bh) + al * bl
            pl = pl + q * two_pi_lo
            s = v_h - ph
            bb = s - v_h
            e = (v_h - (s - bb)) + (-ph - bb)
            r_h: cython.double = s
            r_l: cython.double = v_l + e - pl

            # quadrant reduction to |r| <= pi/4
            qf: cython.double = (r_h * 0.6366197723675814) + 6755399441055744.0
            qf = qf - 6755399441055744.0
            r_h = r_h - qf * half_pi_hi
            r_l = r_l - qf * half_pi_lo
            x: cython.double = r_h + r_l
            qi: cython.int = cython.cast(cython.int, qf) & 3

            w: cython.double
            if qi == 0:
                w = _cos_poly(x)
            elif qi == 1:
                w = -_sin_poly(x)
            elif qi == 2:
                w = -_cos_poly(x)
            else:
                w = _sin_poly(x)
            acc = acc + coeff[n] * w

        z: cython.double = 2.0 * acc

        if parity != 0.0:
            # correction term parity * (2pi/t)^(1/4) * C0(p), p = sqrt(t/2pi) - nu
            c = _SPLIT * t
            ah = c - (c - t)
            al = t - ah
            c = _SPLIT * inv_2pi
            bh = c - (c - inv_2pi)
            bl = inv_2pi - bh
            xh: cython.double = t * inv_2pi
            xl: cython.double = ((ah * bh - xh) + ah * bl + al * bh) + al * bl
            # Newton-corrected sqrt in double-double
            s0: cython.double = _sqrt(xh)
            c = _SPLIT * s0
            ah = c - (c - s0)
            al = s0 - ah
            ph = s0 * s0
            pl = ((ah * ah - ph) + 2.0 * ah * al) + al * al
            num: cython.double = (xh - ph) + (xl - pl)
            ds: cython.double = num / (2.0 * s0)
            p: cython.double = (s0 - params[P_NU]) + ds
            if with_c0 != 0.0:
                z = z + parity * (1.0 / _sqrt(s0 + ds)) * _c0_value(p)
        out[i] = z
    return 0


@cython.cfunc
def _c0_value(p: cython.double) -> cython.double:
    """cos(2pi(p^2-p-1/16))/cos(2pi p) with factored forms near p=1/4, 3/4."""
    w: cython.double
    if p > 0.21 and p < 0.29:
        w = p - 0.25
        return (0.5 - w) * _sinc(3.141592653589793 * w * (1.0 - 2.0 * w)) / _sinc(
            6.283185307179586 * w)
    if p > 0.71 and p < 0.79:
        w = p - 0.75
        return (0.5 + w) * _sinc(3.141592653589793 * w * (1.0 + 2.0 * w)) / _sinc(
            6.283185307179586 * w)
    arg: cython.double = 6.283185307179586 * ((p * p - p) - 0.0625)
    den: cython.double = 6.283185307179586 * p
    return _cos_range2pi(arg) / _cos_range2pi(den)


@cython.cfunc
@cython.inline
def _sinc(x: cython.double) -> cython.double:
    x2: cython.double = x * x
    return 1.0 + x2 * (-1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (
        -1.0 / 5040.0 + x2 * (1.0 / 362880.0 + x2 * (-1.0 / 39916800.0)))))


@cython.cfunc
def _cos_range2pi(v: cython.double) -> cython.double:
    """cos for |v| < 8: plain quadrant reduction, inputs already tiny."""
    qf: cython.double = (v * 0.6366197723675814) + 6755399441055744.0
    qf = qf - 6755399441055744.0
    x: cython.double = (v - qf * 1.5707963267948966) - qf * 6.123233995736766e-17
    qi: cython.int = cython.cast(cython.int, qf) & 3
    if qi == 0:
        return _cos_poly(x)
    if qi == 1:
        return -_sin_poly(x)
    if qi == 2:
        return -_cos_poly(x)
    return _sin_poly(x)


def oscillating_pair(
    t: cython.double,
    lam_hi: cython.double[:],
    lam_lo: cython.double[:],
    coeff: cython.double[:],
    start: cython.Py_ssize_t,
    stop: cython.Py_ssize_t,
    params: cython.double[:],
    out: cython.double[:],
) -> cython.int:
    """(sum a_n cos(t log n), sum a_n sin(t log n)) over n in [start, stop).

    Feeds the zeta main sum of the series evaluator; writes the pair
    into out[0], out[1].  Index n corresponds to table slot n-1.
    """
    two_pi_hi: cython.double = params[P_TWO_PI_HI]
    two_pi_lo: cython.double = params[P_TWO_PI_LO]
    inv_2pi: cython.double = params[P_INV_2PI]
    half_pi_hi: cython.double = params[P_HALF_PI_HI]
    half_pi_lo: cython.double = params[P_HALF_PI_LO]

    acc_c: cython.double = 0.0
    acc_s: cython.double = 0.0
    n: cython.Py_ssize_t
    c: cython.double
    ah: cython.double
    al: cython.double
    bh: cython.double
    bl: cython.double
    for n in range(start, stop):
        lh: cython.double = lam_hi[n]
        c = _SPLIT * t
        ah = c - (c - t)
        al = t - ah
        c = _SPLIT * lh
        bh = c - (c - lh)
        bl = lh - bh
        v_h: cython.double = t * lh
        v_l: cython.double = ((ah * bh - v_h) + ah * bl + al * bh) + al * bl
        v_l = v_l + t * lam_lo[n]

        q: cython.double = (v_h * inv_2pi) + 6755399441055744.0
        q = q - 6755399441055744.0
        c = _SPLIT * q
        ah = c - (c - q)
        al = q - ah
        c = _SPLIT * two_pi_hi
        bh = c - (c - two_pi_hi)
        bl = two_pi_hi - bh
        ph: cython.double = q * two_pi_hi
        pl: cython.double = ((ah * bh - ph) + ah * bl + al * bh) + al * bl
        pl = pl + q * two_pi_lo
        s: cython.double = v_h - ph
        bb: cython.double = s - v_h
        e: cython.double = (v_h - (s - bb)) + (-ph - bb)
        r_h: cython.double = s
        r_l: cython.double = v_l + e - pl

        qf: cython.double = (r_h * 0.6366197723675814) + 6755399441055744.0
        qf = qf - 6755399441055744.0
        r_h = r_h - qf * half_pi_hi
        r_l = r_l - qf * half_pi_lo
        x: cython.double = r_h + r_l
        qi: cython.int = cython.cast(cython.int, qf) & 3

        cv: cython.double
        sv: cython.double
        if qi == 0:
            cv = _cos_poly(x)
            sv = _sin_poly(x)
        elif qi == 1:
            cv = -_sin_poly(x)
            sv = _cos_poly(x)
        elif qi == 2:
            cv = -_cos_poly(x)
            sv = -_sin_poly(x)
        else:
            cv = _sin_poly(x)
            sv = -_cos_poly(x)
        a: cython.double = coeff[n]
        acc_c = acc_c + a * cv
        acc_s = acc_s + a * sv
    out[0] = acc_c
    out[1] = acc_s
    return 0
