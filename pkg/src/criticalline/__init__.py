"""Rigorous verification that the low zeta zeros lie on the critical line.

Ball-arithmetic enclosures, two independent Z(t) evaluators, certified
sign-change counting, Turing-method certification, a journaled campaign
driver, and the explicit corollaries a verified height unlocks.
"""

from .dyadic import Dyadic
from .rigor import Ball, Sign, ball_arith, ball_elem, ball_sign
from .zcount import (EvaluatorPolicy, Lattice, SignSequence, refine,
                     scan_lattice, z_euler_maclaurin, z_riemann_siegel)
from .special import (gamma_halfline_bound, rs_remainder_bound, rs_theta,
                      rs_theta_deriv, RemainderTable)
from .certify import (GlobalCertificate, TuringConstants, TuringVerdict,
                      counting_main_term, stitch, turing_certify,
                      validate_constants)
from .orchestra import (ChunkCertificate, Config, WorkUnit, journal_recover,
                        plan_units, run_campaign, run_unit)
from .consequences import ConsequenceReport, buthe_threshold, consequence_report

__version__ = "0.1.0"

__all__ = [
    "Ball", "Sign", "Dyadic", "ball_arith", "ball_elem", "ball_sign",
    "EvaluatorPolicy", "Lattice", "SignSequence", "refine", "scan_lattice",
    "z_euler_maclaurin", "z_riemann_siegel",
    "gamma_halfline_bound", "rs_remainder_bound", "rs_theta", "rs_theta_deriv",
    "RemainderTable",
    "GlobalCertificate", "TuringConstants", "TuringVerdict",
    "counting_main_term", "stitch", "turing_certify", "validate_constants",
    "ChunkCertificate", "Config", "WorkUnit", "journal_recover", "plan_units",
    "run_campaign", "run_unit",
    "ConsequenceReport", "buthe_threshold", "consequence_report",
    "__version__",
]
