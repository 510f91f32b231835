"""Command-line interface.

Subcommands: scan (sign-count a range, no certification), run (full
campaign), resume, certify (stitch a journal into the global verdict),
consequences, selftest.  Exit status 0 is reserved for full success;
certification commands return 1 when anything is uncertified.
"""

from __future__ import annotations

import argparse
import sys

from .consequences import consequence_report
from .dyadic import Dyadic
from .errors import CriticalLineError
from . import certify as certify_mod
from . import orchestra
from .zcount import Lattice, scan_lattice


def _add_config_arg(p):
    p.add_argument("--config", help="key = value config file", default=None)


def _load_config(args) -> orchestra.Config:
    if getattr(args, "config", None):
        return orchestra.Config.from_file(args.config)
    return orchestra.Config()


def cmd_scan(args) -> int:
    config = _load_config(args)
    policy = config.policy()
    t_lo = Dyadic.parse(args.from_)
    t_hi = Dyadic.parse(args.to)
    step = Dyadic.parse(args.step) if args.step else policy.default_step(float(t_hi))
    lattice = Lattice(t_lo=t_lo, t_hi=t_hi, step=step)
    seq = scan_lattice(lattice, policy, args.prec)
    print(f"scanned [{float(t_lo):g}, {float(t_hi):g}) step {float(step):g}: "
          f"{len(seq.points)} points")
    print(f"sign changes: {seq.changes}")
    print(f"indeterminate: {seq.indeterminates}")
    return 0


def cmd_run(args) -> int:
    config = _load_config(args)
    if args.unit_length:
        config.values["unit_length"] = args.unit_length
    t_max = Dyadic.parse(args.height)
    unit_length = Dyadic.parse(config.values["unit_length"])
    certs = orchestra.run_campaign(t_max, unit_length, config, args.journal,
                                   workers=args.workers)
    return _report_stitch(certs)


def cmd_resume(args) -> int:
    certs = orchestra.resume_campaign(args.journal, workers=args.workers)
    return _report_stitch(certs)


def cmd_certify(args) -> int:
    state = orchestra.journal_recover(args.journal)
    for w in state.warnings:
        print(f"journal warning: {w}")
    if state.header is None:
        print("no campaign header found")
        return 1
    units = orchestra.plan_units(
        state.header.t_max, state.header.unit_length, state.header.prec,
        orchestra.Config.from_text(state.header.config_text).policy())
    missing = [u.unit_id for u in units if u.unit_id not in state.certificates]
    if missing:
        print(f"incomplete: {len(missing)} units pending (first {missing[0]})")
        return 1
    certs = [state.certificates[u.unit_id] for u in units]
    return _report_stitch(certs)


def _report_stitch(certs) -> int:
    try:
        g = certify_mod.stitch(certs)
    except CriticalLineError as exc:
        print(f"NOT CERTIFIED: {exc}")
        return 1
    print(f"verified height: {float(g.verified_height):g}")
    print(f"zeros on the critical line: {g.total_zeros}")
    print(f"chunks: {g.chunks}")
    return 0


def cmd_consequences(args) -> int:
    report = consequence_report(float(args.height))
    if args.json:
        print(report.to_json())
        return 0
    print(f"verified height H = {report.H:g}")
    b = report.dbn_bound
    print(f"|psi(x) - x|      <= sqrt(x) log^2 x / (8 pi) for "
          f"{report.psi_range[0]:g} < x <= {report.psi_range[1]:.4g}")
    print(f"|theta(x) - x|    <= sqrt(x) log^2 x / (8 pi) for "
          f"{report.cheb_theta_range[0]:g} < x <= {report.cheb_theta_range[1]:.4g}")
    print(f"|pi(x) - li(x)|   <= sqrt(x) log^2 x / (8 pi) for "
          f"{report.pi_range[0]:g} < x <= {report.pi_range[1]:.4g}")
    print(f"de Bruijn-Newman bound: {'none' if b is None else b}")
    return 0


def cmd_selftest(args) -> int:
    from . import selftest

    return selftest.run(quick=args.quick)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="criticalline",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="count certified sign changes over a range")
    p.add_argument("--from", dest="from_", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--step", default=None)
    p.add_argument("--prec", type=int, default=64)
    _add_config_arg(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("run", help="run a certification campaign")
    p.add_argument("--height", required=True)
    p.add_argument("--unit-length", default=None)
    p.add_argument("--journal", required=True)
    p.add_argument("--workers", type=int, default=None)
    _add_config_arg(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("resume", help="resume a campaign from its journal")
    p.add_argument("--journal", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_resume)

    p = sub.add_parser("certify", help="stitch a journal into the global verdict")
    p.add_argument("--journal", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("consequences", help="explicit corollaries at a height")
    p.add_argument("--height", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_consequences)

    p = sub.add_parser("selftest", help="run the oracle-backed invariant suites")
    p.add_argument("--quick", action="store_true",
                   help="reduced sample counts (smoke test)")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CriticalLineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
