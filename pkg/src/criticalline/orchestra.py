"""Work planning, parallel execution, journaling, and the campaign driver.

A campaign covers (0, T] with abutting work units.  Each unit scans its
own range plus Turing windows on both sides, pins N at its boundaries,
and emits a self-checking certificate line.  The journal is append-only
text, one checksummed record per line, so recovery after a crash is a
replay that validates every checksum and truncates at most one corrupt
trailing record.
"""

from __future__ import annotations

import base64
import math
import multiprocessing
import os
from dataclasses import dataclass, replace

from . import special
from .certify import TuringConstants, pin_count, turing_certify, validate_constants
from .dyadic import Dyadic
from .errors import (BudgetExhausted, CertificationFailed, ChecksumMismatch,
                     CriticalLineError, InvalidParameters, UnvalidatedConstants)
from .zcount import EvaluatorPolicy, SignSequence, refine, scan_points

ZERO_D = Dyadic(0)
VERSION_TAG = "RHC1"

FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

DEFAULTS = {
    "precision": "64",
    "ladder_max": "4096",
    "samples_per_gap": "12",
    "step_safety": "4",
    "window_gaps": "60",
    "min_gap_factor": "1.0",
    "turing_a": "2.30",
    "turing_b": "0.128",
    "em_cutoff": "500",
    "rs_terms": "1",
    "crosscheck_every": "1000",
    "small_z_threshold": "0.05",
    "refine_budget": "100000",
    "unit_length": "500",
    "em_max_terms": "400000",
    "kernel": "auto",
}


class Config:
    """key = value text config; unknown keys rejected, values kept verbatim."""

    def __init__(self, overrides: dict[str, str] | None = None):
        self.values = dict(DEFAULTS)
        for k, v in (overrides or {}).items():
            if k not in DEFAULTS:
                raise InvalidParameters(f"unknown config key {k!r}")
            self.values[k] = str(v).strip()

    @classmethod
    def from_text(cls, text: str) -> "Config":
        overrides = {}
        for ln, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameters(f"config line {ln}: expected key = value")
            k, v = line.split("=", 1)
            overrides[k.strip()] = v.strip()
        return cls(overrides)

    @classmethod
    def from_file(cls, path: str) -> "Config":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def canonical_text(self) -> str:
        return "".join(f"{k} = {self.values[k]}\n" for k in sorted(self.values))

    def hash(self) -> int:
        return fnv1a64(self.canonical_text().encode("utf-8"))

    def f(self, key: str) -> float:
        return float(self.values[key])

    def i(self, key: str) -> int:
        return int(self.values[key])

    def policy(self) -> EvaluatorPolicy:
        return EvaluatorPolicy(
            em_cutoff=self.f("em_cutoff"),
            rs_terms=self.i("rs_terms"),
            ladder_max=self.i("ladder_max"),
            crosscheck_every=self.i("crosscheck_every"),
            small_z=self.f("small_z_threshold"),
            samples_per_gap=self.f("samples_per_gap"),
            step_safety=self.f("step_safety"),
            em_max_terms=self.i("em_max_terms"),
            kernel_prefer=self.values["kernel"],
        )

    def constants(self) -> TuringConstants:
        return TuringConstants(a_text=self.values["turing_a"],
                               b_text=self.values["turing_b"])


_VALIDATED: dict[tuple[str, str], bool] = {}


def ensure_validated(constants: TuringConstants) -> TuringConstants:
    """Validate constants once per process against the packaged zero table."""
    key = (constants.a_text, constants.b_text)
    if not _VALIDATED.get(key):
        ok, margin = validate_constants(constants, load_reference_zeros())
        if not ok:
            raise UnvalidatedConstants(
                f"constants ({constants.a_text}, {constants.b_text}) failed "
                f"validation with margin {margin:g}")
        _VALIDATED[key] = True
    constants.validated = True
    return constants


_ZEROS_CACHE: list[float] | None = None


def load_reference_zeros() -> list[float]:
    """Reference zero ordinates shipped with the package (t <= 5000)."""
    global _ZEROS_CACHE
    if _ZEROS_CACHE is None:
        from importlib import resources

        path = resources.files("criticalline").joinpath("data/zeros_5000.txt")
        out = []
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(float(line))
        _ZEROS_CACHE = out
    return _ZEROS_CACHE


# ---------------------------------------------------------------------------
# work units and certificates
# ---------------------------------------------------------------------------

@dataclass
class WorkUnit:
    unit_id: int
    t_lo: Dyadic
    t_hi: Dyadic
    step: Dyadic
    prec: int
    state: str = "PENDING"   # PENDING | RUNNING | DONE | FAILED


@dataclass(frozen=True)
class ChunkCertificate:
    unit_id: int
    t_lo: Dyadic
    t_hi: Dyadic
    step: Dyadic
    zero_count: int
    prec_bits: int
    turing_a: str
    turing_b: str
    config_hash: int
    status: str              # CERTIFIED | FAILED
    version: str = VERSION_TAG

    def body_fields(self) -> list[str]:
        return [self.version, "C", str(self.unit_id),
                str(self.t_lo.man), str(self.t_lo.exp),
                str(self.t_hi.man), str(self.t_hi.exp),
                str(self.step.man), str(self.step.exp),
                str(self.zero_count), str(self.prec_bits),
                self.turing_a, self.turing_b,
                str(self.config_hash), self.status]

    def serialize(self) -> str:
        body = "|".join(self.body_fields())
        return f"{body}|{fnv1a64(body.encode('utf-8'))}\n"

    @classmethod
    def parse(cls, line: str) -> "ChunkCertificate":
        fields = line.rstrip("\n").split("|")
        if len(fields) != 16 or fields[0] != VERSION_TAG or fields[1] != "C":
            raise ValueError("malformed certificate record")
        body = "|".join(fields[:-1])
        if fnv1a64(body.encode("utf-8")) != int(fields[-1]):
            raise ChecksumMismatch(int(fields[2]) if fields[2].isdigit() else -1)
        return cls(unit_id=int(fields[2]),
                   t_lo=Dyadic(int(fields[3]), int(fields[4])),
                   t_hi=Dyadic(int(fields[5]), int(fields[6])),
                   step=Dyadic(int(fields[7]), int(fields[8])),
                   zero_count=int(fields[9]), prec_bits=int(fields[10]),
                   turing_a=fields[11], turing_b=fields[12],
                   config_hash=int(fields[13]), status=fields[14])


def plan_units(t_max: Dyadic, unit_length: Dyadic, prec: int,
               policy: EvaluatorPolicy | None = None) -> list[WorkUnit]:
    """Abutting units covering (0, t_max]; the last one is truncated."""
    if not (ZERO_D < t_max and ZERO_D < unit_length):
        raise InvalidParameters("t_max and unit_length must be positive")
    policy = policy or EvaluatorPolicy()
    units = []
    lo = ZERO_D
    uid = 0
    while lo < t_max:
        hi = lo + unit_length
        if t_max < hi:
            hi = t_max
        step = policy.default_step(float(hi))
        units.append(WorkUnit(unit_id=uid, t_lo=lo, t_hi=hi, step=step, prec=prec))
        uid += 1
        lo = hi
    return units


# ---------------------------------------------------------------------------
# unit execution
# ---------------------------------------------------------------------------

def _grid_down(anchor: Dyadic, step: Dyadic, span: float, floor: float) -> list[Dyadic]:
    """Points anchor - k*step staying >= floor, covering about span."""
    out = []
    k = 1
    limit = math.ceil(span / float(step))
    while k <= limit:
        p = anchor - step * k
        if float(p) < floor:
            break
        out.append(p)
        k += 1
    return list(reversed(out))


def _grid_up(anchor: Dyadic, step: Dyadic, end: Dyadic) -> list[Dyadic]:
    """Points anchor + k*step through end; end itself is appended exactly."""
    out = []
    k = 1
    p = anchor + step
    while p < end:
        out.append(p)
        k += 1
        p = anchor + step * k
    out.append(end)
    return out


def run_unit(unit: WorkUnit, config: Config) -> ChunkCertificate:
    """Scan, refine until Turing certification succeeds, emit a certificate.

    Deterministic in (unit, config); raises CertificationFailed carrying
    the last verdict when the refinement budget runs out.
    """
    policy = config.policy()
    constants = ensure_validated(config.constants())
    prec = unit.prec
    budget = config.i("refine_budget")
    window_gaps = config.f("window_gaps")
    min_gap_factor = config.f("min_gap_factor")
    t_lo, t_hi, step = unit.t_lo, unit.t_hi, unit.step

    span_hi = window_gaps * special.mean_gap(float(t_hi))
    w_end = t_hi + Dyadic.from_float(span_hi).quantize(step.exp)
    points = [t_lo] if ZERO_D < t_lo else []
    low_floor = special.THETA_SERIES_FLOOR + 0.5
    if ZERO_D < t_lo:
        span_lo = window_gaps * special.mean_gap(float(t_lo))
        points = _grid_down(t_lo, step, span_lo, low_floor) + points
    points += _grid_up(t_lo, step, t_hi)
    points += _grid_up(t_hi, step, w_end)

    seq = scan_points(points, policy, prec)
    verdict = None
    for _ in range(48):
        if seq.indeterminates:
            seq = refine(seq, budget)
        n_loc = seq.changes_within(t_lo, t_hi)
        try:
            n0 = _pin_low_boundary(seq, unit, constants, prec, min_gap_factor,
                                   window_gaps)
        except _PinDeficit as exc:
            seq = refine(seq, budget, deficit=exc.deficit,
                         lo=seq.points[0], hi=exc.through)
            continue
        window = seq.slice(t_hi, w_end)
        verdict = turing_certify(window, n0 + n_loc, constants,
                                 min_gap_factor=min_gap_factor)
        if verdict.certified:
            return ChunkCertificate(
                unit_id=unit.unit_id, t_lo=t_lo, t_hi=t_hi, step=step,
                zero_count=n_loc, prec_bits=prec,
                turing_a=constants.a_text, turing_b=constants.b_text,
                config_hash=config.hash(), status="CERTIFIED")
        try:
            seq = refine(seq, budget, deficit=verdict.deficit, lo=t_lo, hi=w_end)
        except BudgetExhausted as exc:
            raise CertificationFailed(
                f"unit {unit.unit_id}: deficit {verdict.deficit} unresolved",
                verdict) from exc
    raise CertificationFailed(f"unit {unit.unit_id}: certification did not settle",
                              verdict)


class _PinDeficit(Exception):
    def __init__(self, deficit: int, through: Dyadic):
        self.deficit = deficit
        self.through = through


def _pin_low_boundary(seq: SignSequence, unit: WorkUnit,
                      constants: TuringConstants, prec: int,
                      min_gap_factor: float, window_gaps: float) -> int:
    """Exact N(t_lo), or 0 for the first unit."""
    t_lo = unit.t_lo
    if t_lo == ZERO_D:
        return 0
    t_lo_f = float(t_lo)
    span = window_gaps * special.mean_gap(t_lo_f)
    above = seq.slice(t_lo, min(unit.t_hi, t_lo + Dyadic.from_float(span).quantize(unit.step.exp)))
    below_start = seq.points[0]
    need = min_gap_factor * math.log(max(t_lo_f, 3.0)) * special.mean_gap(t_lo_f)
    below = None
    if t_lo_f - float(below_start) >= need and below_start < t_lo:
        below = seq.slice(below_start, t_lo)
    n_lo, n_hi = pin_count(below, above, constants, min_gap_factor=min_gap_factor)
    if below is None:
        n_lo = 0
    if n_lo == n_hi:
        return n_hi
    if n_lo > n_hi:
        raise RuntimeError(f"boundary pin inverted at {t_lo_f}: [{n_lo}, {n_hi}]")
    raise _PinDeficit(n_hi - n_lo, above.points[-1])


# ---------------------------------------------------------------------------
# journal
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JournalHeader:
    t_max: Dyadic
    unit_length: Dyadic
    prec: int
    config_text: str

    def serialize(self) -> str:
        cfg = base64.b64encode(self.config_text.encode("utf-8")).decode("ascii")
        body = "|".join([VERSION_TAG, "H", str(self.t_max.man), str(self.t_max.exp),
                         str(self.unit_length.man), str(self.unit_length.exp),
                         str(self.prec), cfg])
        return f"{body}|{fnv1a64(body.encode('utf-8'))}\n"

    @classmethod
    def parse(cls, line: str) -> "JournalHeader":
        fields = line.rstrip("\n").split("|")
        if len(fields) != 9 or fields[0] != VERSION_TAG or fields[1] != "H":
            raise ValueError("malformed journal header")
        body = "|".join(fields[:-1])
        if fnv1a64(body.encode("utf-8")) != int(fields[-1]):
            raise ChecksumMismatch(0)
        return cls(t_max=Dyadic(int(fields[2]), int(fields[3])),
                   unit_length=Dyadic(int(fields[4]), int(fields[5])),
                   prec=int(fields[6]),
                   config_text=base64.b64decode(fields[7]).decode("utf-8"))


@dataclass
class RecoveredState:
    header: JournalHeader | None
    certificates: dict[int, ChunkCertificate]
    warnings: list[str]


def journal_append(path: str, record: str):
    """Append one serialized record and force it to disk."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record)
        fh.flush()
        os.fsync(fh.fileno())


def journal_recover(path: str) -> RecoveredState:
    """Replay a journal, validating checksums.

    A corrupt or truncated trailing record is dropped with a warning; a
    corrupt record anywhere else aborts with ChecksumMismatch.
    """
    state = RecoveredState(header=None, certificates={}, warnings=[])
    if not os.path.exists(path):
        return state
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read()
    lines = raw.split("\n")
    trailing_partial = lines and lines[-1] != ""
    if not trailing_partial:
        lines = lines[:-1]
    n = len(lines)
    for i, line in enumerate(lines):
        is_last = i == n - 1
        try:
            if line.startswith(f"{VERSION_TAG}|H|"):
                state.header = JournalHeader.parse(line)
            else:
                cert = ChunkCertificate.parse(line)
                state.certificates[cert.unit_id] = cert
        except (ValueError, ChecksumMismatch) as exc:
            if is_last:
                state.warnings.append(
                    f"dropped corrupt trailing record {i}: {exc}")
                continue
            if isinstance(exc, ChecksumMismatch):
                raise
            raise ChecksumMismatch(i) from exc
    return state


# ---------------------------------------------------------------------------
# campaign driver
# ---------------------------------------------------------------------------

def _worker(payload):
    unit_fields, config_text = payload
    unit = WorkUnit(unit_id=unit_fields[0],
                    t_lo=Dyadic(*unit_fields[1]), t_hi=Dyadic(*unit_fields[2]),
                    step=Dyadic(*unit_fields[3]), prec=unit_fields[4])
    config = Config.from_text(config_text)
    try:
        cert = run_unit(unit, config)
    except CriticalLineError:
        cert = ChunkCertificate(
            unit_id=unit.unit_id, t_lo=unit.t_lo, t_hi=unit.t_hi,
            step=unit.step, zero_count=-1, prec_bits=unit.prec,
            turing_a=config.values["turing_a"], turing_b=config.values["turing_b"],
            config_hash=config.hash(), status="FAILED")
    return cert


def worker_count() -> int:
    env = os.environ.get("CRITICALLINE_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_campaign(t_max: Dyadic, unit_length: Dyadic, config: Config,
                 journal_path: str, workers: int | None = None,
                 stop_after_appends: int | None = None) -> list[ChunkCertificate]:
    """Execute (or resume) a campaign, journaling certificates in unit order.

    ``stop_after_appends`` simulates a crash for recovery testing: the
    driver returns early after that many journal appends.
    """
    ensure_validated(config.constants())
    state = journal_recover(journal_path)
    for w in state.warnings:
        print(f"journal warning: {w}")
    header = JournalHeader(t_max=t_max, unit_length=unit_length,
                           prec=config.i("precision"),
                           config_text=config.canonical_text())
    appends = 0
    if state.header is None:
        journal_append(journal_path, header.serialize())
        appends += 1
        if stop_after_appends is not None and appends >= stop_after_appends:
            return []
    else:
        if state.header.serialize() != header.serialize():
            raise InvalidParameters("journal was produced by different parameters")

    units = plan_units(t_max, unit_length, config.i("precision"), config.policy())
    done = state.certificates
    pending = [u for u in units if u.unit_id not in done
               or done[u.unit_id].status != "CERTIFIED"]
    payloads = [((u.unit_id, (u.t_lo.man, u.t_lo.exp), (u.t_hi.man, u.t_hi.exp),
                  (u.step.man, u.step.exp), u.prec), config.canonical_text())
                for u in pending]

    nworkers = workers if workers is not None else worker_count()
    results = {}
    if nworkers <= 1 or len(payloads) <= 1:
        iterator = map(_worker, payloads)
    else:
        ctx = multiprocessing.get_context()
        pool = ctx.Pool(min(nworkers, len(payloads)))
        iterator = pool.imap(_worker, payloads)
    try:
        for cert in iterator:
            results[cert.unit_id] = cert
            journal_append(journal_path, cert.serialize())
            appends += 1
            if stop_after_appends is not None and appends >= stop_after_appends:
                break
    finally:
        if nworkers > 1 and len(payloads) > 1:
            pool.terminate()
            pool.join()

    merged = dict(done)
    merged.update(results)
    return [merged[u.unit_id] for u in units if u.unit_id in merged]


def resume_campaign(journal_path: str, workers: int | None = None) -> list[ChunkCertificate]:
    state = journal_recover(journal_path)
    if state.header is None:
        raise InvalidParameters(f"no usable header in journal {journal_path}")
    config = Config.from_text(state.header.config_text)
    return run_campaign(state.header.t_max, state.header.unit_length, config,
                        journal_path, workers=workers)
