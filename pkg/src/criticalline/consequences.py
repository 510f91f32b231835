"""Explicit corollaries unlocked by a verified height H.

Once every zero with ordinate up to H is known to lie on the critical
line, the conditional prime-counting bound

    |psi(x) - x| <= sqrt(x) log^2(x) / (8 pi)

holds unconditionally for all x with 4.92 sqrt(x / log x) <= H, and the
same right-hand side bounds |theta(x) - x| and |pi(x) - li(x)| above
their per-function floors.  A one-row data table maps H to an upper
bound for the de Bruijn-Newman constant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import DomainViolation

PSI_FLOOR = 59
CHEB_THETA_FLOOR = 599
PI_FLOOR = 2657
BUTHE_COEFF = 4.92

# height threshold -> proven upper bound for the de Bruijn-Newman constant;
# extendable data, deliberately shipped with the single attested row.
DBN_TABLE: tuple[tuple[float, float], ...] = (
    (2.51e12, 0.2),
)


@dataclass(frozen=True)
class ConsequenceReport:
    H: float
    psi_range: tuple[float, float]
    cheb_theta_range: tuple[float, float]
    pi_range: tuple[float, float]
    dbn_bound: float | None

    def to_json(self) -> str:
        return json.dumps({
            "H": self.H,
            "psi_range": list(self.psi_range),
            "cheb_theta_range": list(self.cheb_theta_range),
            "pi_range": list(self.pi_range),
            "dbn_bound": "none" if self.dbn_bound is None else self.dbn_bound,
        }, indent=2)


def buthe_threshold(H: float, rel_tol: float = 1e-9) -> float:
    """Largest x with 4.92 sqrt(x / log x) <= H, by bisection.

    x / log x is strictly increasing for x > e, so the equation
    x / log x = (H / 4.92)^2 has one root there; the returned enclosure
    midpoint is within a relative 1e-9 of it (far inside the required
    1e-6).
    """
    H = float(H)
    if not H > 100.0:
        raise DomainViolation("verified height must exceed 100")
    target = (H / BUTHE_COEFF) ** 2

    def f(x: float) -> float:
        return x / math.log(x) - target

    lo = math.e * 1.5
    hi = max(16.0, 4.0 * target * max(math.log(target), 1.0))
    while f(hi) < 0.0:
        hi *= 4.0
    if f(lo) > 0.0:
        raise DomainViolation("threshold collapses below e; height too small")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * lo:
            break
    return 0.5 * (lo + hi)


def dbn_bound_for(H: float) -> float | None:
    """Best tabulated de Bruijn-Newman bound proven by height H (strict)."""
    best = None
    for threshold, bound in DBN_TABLE:
        if H > threshold and (best is None or bound < best):
            best = bound
    return best


def consequence_report(H: float) -> ConsequenceReport:
    """Validity ranges of the explicit bounds plus the DBN gate at height H."""
    H = float(H)
    if not H > 100.0:
        raise DomainViolation("verified height must exceed 100")
    x_max = buthe_threshold(H)
    return ConsequenceReport(
        H=H,
        psi_range=(PSI_FLOOR, x_max),
        cheb_theta_range=(CHEB_THETA_FLOOR, x_max),
        pi_range=(PI_FLOOR, x_max),
        dbn_bound=dbn_bound_for(H),
    )
