"""Exception types shared across the package."""


class CriticalLineError(Exception):
    """Base class for all package errors."""


class DivisorContainsZero(CriticalLineError):
    """Ball division where the divisor ball straddles zero."""


class DomainViolation(CriticalLineError):
    """Argument outside the domain an operation is proven on."""


class HeightTooLow(CriticalLineError):
    """Asymptotic formula requested below its validity floor."""


class BelowValidityFloor(CriticalLineError):
    """Remainder bound requested below the floor of its constant."""


class PrecisionExhausted(CriticalLineError):
    """Requested enclosure cannot be produced under the cost cap."""


class StepTooCoarse(CriticalLineError):
    """Lattice step exceeds the allowed fraction of the mean zero gap."""


class BudgetExhausted(CriticalLineError):
    """Refinement budget ran out; carries the unresolved sub-intervals."""

    def __init__(self, message, unresolved=()):
        super().__init__(message)
        self.unresolved = list(unresolved)


class WindowTooShort(CriticalLineError):
    """Turing window spans too few mean gaps."""


class IndeterminateSigns(CriticalLineError):
    """Certification attempted over a sequence with uncertified signs."""


class UnvalidatedConstants(CriticalLineError):
    """Turing constants used before passing the validation suite."""


class CertificationFailed(CriticalLineError):
    """A work unit could not be certified; carries the last verdict."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class GapDetected(CriticalLineError):
    """Adjacent certificates do not abut exactly."""

    def __init__(self, interval):
        super().__init__(f"uncovered interval {interval[0]} .. {interval[1]}")
        self.interval = interval


class StatusNotCertified(CriticalLineError):
    """A chunk in a stitch request is not CERTIFIED."""

    def __init__(self, unit_id):
        super().__init__(f"unit {unit_id} is not CERTIFIED")
        self.unit_id = unit_id


class InvalidParameters(CriticalLineError):
    """Malformed planning or configuration input."""


class ChecksumMismatch(CriticalLineError):
    """A non-trailing journal record failed checksum validation."""

    def __init__(self, record_id):
        super().__init__(f"journal record {record_id} failed its checksum")
        self.record_id = record_id
