"""Exact dyadic rationals: integers scaled by a power of two.

Lattice geometry (chunk bounds, steps, offsets) is kept exact so that
sample-point placement, chunk abutment and journal round-trips never
involve rounding.  Values are normalised so the mantissa is odd (or the
value is zero with exponent zero), which makes equality structural.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering


@total_ordering
class Dyadic:
    """man * 2**exp with man, exp plain integers."""

    __slots__ = ("man", "exp")

    def __init__(self, man: int, exp: int = 0):
        man = int(man)
        exp = int(exp)
        if man == 0:
            exp = 0
        else:
            while man % 2 == 0:
                man //= 2
                exp += 1
        object.__setattr__(self, "man", man)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # -- constructors ------------------------------------------------

    @classmethod
    def from_float(cls, x: float) -> "Dyadic":
        if not math.isfinite(x):
            raise ValueError("dyadic from non-finite float")
        man, exp = math.frexp(x)
        man = int(man * (1 << 53))
        return cls(man, exp - 53)

    @classmethod
    def from_decimal(cls, text: str, quantum_exp: int = -40) -> "Dyadic":
        """Nearest dyadic multiple of 2**quantum_exp to a decimal string.

        Decimal inputs like "0.01" are not dyadic; campaign inputs are
        snapped to a fixed grid so the lattice stays exact.
        """
        frac = Fraction(text)
        scaled = frac / Fraction(2) ** quantum_exp
        man = int(scaled + Fraction(1, 2)) if scaled >= 0 else -int(-scaled + Fraction(1, 2))
        return cls(man, quantum_exp)

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse 'man/exp' pairs or plain integers/decimals."""
        text = text.strip()
        if "/" in text:
            man, exp = text.split("/")
            return cls(int(man), int(exp))
        if "." in text or "e" in text or "E" in text:
            return cls.from_decimal(text)
        return cls(int(text), 0)

    # -- arithmetic (exact) -------------------------------------------

    def _align(self, other: "Dyadic"):
        e = min(self.exp, other.exp)
        return self.man << (self.exp - e), other.man << (other.exp - e), e

    def __add__(self, other: "Dyadic") -> "Dyadic":
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        a, b, e = self._align(other)
        return Dyadic(a - b, e)

    def __mul__(self, other) -> "Dyadic":
        if isinstance(other, int):
            return Dyadic(self.man * other, self.exp)
        return Dyadic(self.man * other.man, self.exp + other.exp)

    __rmul__ = __mul__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.man, self.exp)

    def half(self) -> "Dyadic":
        return Dyadic(self.man, self.exp - 1)

    def scale2(self, k: int) -> "Dyadic":
        return Dyadic(self.man, self.exp + k)

    def quantize(self, exp: int) -> "Dyadic":
        """Nearest multiple of 2**exp (ties away from zero)."""
        if self.exp >= exp:
            return self
        shift = exp - self.exp
        man = abs(self.man)
        q = (man + (1 << (shift - 1))) >> shift
        return Dyadic(q if self.man >= 0 else -q, exp)

    # -- comparison ----------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.man == other.man and self.exp == other.exp

    def __lt__(self, other) -> bool:
        if isinstance(other, int):
            other = Dyadic(other)
        a, b, _ = self._align(other)
        return a < b

    def __hash__(self):
        return hash((self.man, self.exp))

    # -- conversion ----------------------------------------------------

    def __float__(self) -> float:
        return math.ldexp(self.man, self.exp)

    def exact_float(self) -> float:
        """Value as a double, raising if the conversion would round."""
        x = math.ldexp(self.man, self.exp)
        if Dyadic.from_float(x) != self:
            raise ValueError(f"{self!r} is not representable as a double")
        return x

    def fits_double(self) -> bool:
        if self.man == 0:
            return True
        return abs(self.man) < (1 << 53) and -1000 < self.exp < 900

    def as_fraction(self) -> Fraction:
        return Fraction(self.man, 1) * Fraction(2) ** self.exp

    def bit_size(self) -> int:
        return abs(self.man).bit_length()

    def __repr__(self):
        return f"Dyadic({self.man}, {self.exp})"

    def __str__(self):
        f = float(self)
        return f"{f:g}" if Dyadic.from_float(f) == self else f"{self.man}*2^{self.exp}"


ZERO = Dyadic(0)
ONE = Dyadic(1)
