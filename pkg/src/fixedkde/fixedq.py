"""Signed Q32.32 fixed-point arithmetic.

A value is stored as a 64-bit two's-complement integer ``raw`` and read as
``raw * 2**-32``.  Every operation here is a pure function on raw integers.
Python ints stand in for the wider hardware buses (the 128-bit product of
``mul``, the Q2.62 Newton datapath of ``reciprocal``); results are narrowed
back to 64 bits and range-checked.

The most-negative raw value ``-2**63`` is never produced in checked mode so
that negation is always defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from numbers import Rational

from .errors import DivByZeroError, RangeError

FRAC_BITS = 32
ONE_RAW = 1 << FRAC_BITS
RAW_MAX = (1 << 63) - 1
RAW_MIN = -RAW_MAX
ULP = 2.0**-FRAC_BITS
LIMIT = 2.0**31

# Q2.62 internal datapath of the reciprocal unit
Q62 = 62
ONE_Q62 = 1 << Q62
HALF_Q62 = 1 << (Q62 - 1)
TWO_Q62 = 1 << (Q62 + 1)
RECIP_ITERATIONS = 5
# y0 = 48/17 - 32/17 * b, evaluated as 2 * (24/17 - 16/17 * b) so that every
# constant fits the signed Q2.62 word.
Y0_HALF_A = round(Fraction(24, 17) * ONE_Q62)
Y0_HALF_B = round(Fraction(16, 17) * ONE_Q62)


@dataclass(frozen=True, order=True, slots=True)
class FixedQ:
    """A Q32.32 number. Arithmetic operators are the checked operations."""

    raw: int

    def __post_init__(self):
        if not isinstance(self.raw, int):
            raise TypeError(f"raw must be int, got {type(self.raw).__name__}")
        if not -(1 << 63) <= self.raw <= RAW_MAX:
            raise RangeError(f"raw {self.raw} does not fit in 64 bits")

    def __float__(self) -> float:
        return decode(self)

    def __repr__(self) -> str:
        return f"FixedQ({decode(self)!r})"

    def __add__(self, other: FixedQ) -> FixedQ:
        return add(self, other)

    def __sub__(self, other: FixedQ) -> FixedQ:
        return sub(self, other)

    def __neg__(self) -> FixedQ:
        return neg(self)

    def __mul__(self, other: FixedQ) -> FixedQ:
        return mul(self, other)

    def __truediv__(self, other: FixedQ) -> FixedQ:
        return div(self, other)

    def __abs__(self) -> FixedQ:
        return neg(self) if self.raw < 0 else self

    def is_zero(self) -> bool:
        return self.raw == 0

    def to_bytes(self) -> bytes:
        """Little-endian two's-complement serialization (8 bytes)."""
        return self.raw.to_bytes(8, "little", signed=True)

    @classmethod
    def from_bytes(cls, data: bytes) -> FixedQ:
        if len(data) != 8:
            raise ValueError("expected 8 bytes")
        return cls(int.from_bytes(data, "little", signed=True))

    def to_decimal(self) -> str:
        """Exact decimal expansion of the stored value."""
        with localcontext() as ctx:
            ctx.prec = 80
            d = Decimal(self.raw) / Decimal(ONE_RAW)
        return format(d.normalize(), "f") if self.raw else "0"

    def to_json(self) -> dict:
        return {"value": decode(self), "raw": self.raw}

    @classmethod
    def from_json(cls, obj: dict) -> FixedQ:
        return cls(int(obj["raw"]))


ZERO = FixedQ(0)
ONE = FixedQ(ONE_RAW)


def _checked(raw: int, op: str) -> int:
    if raw > RAW_MAX or raw < RAW_MIN:
        raise OverflowError(f"Q32.32 overflow in {op}")
    return raw


def wrap(raw: int) -> int:
    """Reduce an integer to signed 64 bits (two's-complement wraparound)."""
    return ((raw + (1 << 63)) & ((1 << 64) - 1)) - (1 << 63)


def _narrow(raw: int, op: str, checked: bool) -> FixedQ:
    return FixedQ(_checked(raw, op) if checked else wrap(raw))


def encode(v) -> FixedQ:
    """Round a real number to the nearest Q32.32 value (ties away from zero)."""
    if isinstance(v, FixedQ):
        return v
    if isinstance(v, int):
        raw = v << FRAC_BITS
    elif isinstance(v, Rational):
        q = Fraction(v) * ONE_RAW
        mag = abs(q)
        whole = math.floor(mag)
        raw = whole + (1 if mag - whole >= Fraction(1, 2) else 0)
        raw = -raw if q < 0 else raw
    else:
        v = float(v)
        if not math.isfinite(v):
            raise RangeError(f"cannot encode non-finite value {v}")
        # scaling by a power of two is exact in binary64
        mag = abs(v) * ONE_RAW
        whole = math.floor(mag)
        raw = whole + (1 if mag - whole >= 0.5 else 0)
        raw = -raw if v < 0 else raw
    if abs(raw) >= 1 << 63:
        raise RangeError(f"{v} is outside the Q32.32 range")
    return FixedQ(raw)


def decode(a: FixedQ) -> float:
    return a.raw / ONE_RAW


def from_int(n: int) -> FixedQ:
    return _narrow(n << FRAC_BITS, "from_int", True)


def neg(a: FixedQ, *, checked: bool = True) -> FixedQ:
    return _narrow(-a.raw, "neg", checked)


def add(a: FixedQ, b: FixedQ, *, checked: bool = True) -> FixedQ:
    return _narrow(a.raw + b.raw, "add", checked)


def sub(a: FixedQ, b: FixedQ, *, checked: bool = True) -> FixedQ:
    """``a + (-b)``; the datapath has no subtractor."""
    return add(a, neg(b, checked=checked), checked=checked)


def mul(a: FixedQ, b: FixedQ, *, checked: bool = True) -> FixedQ:
    """Full-width product shifted right by 32 (rounds toward minus infinity)."""
    return _narrow((a.raw * b.raw) >> FRAC_BITS, "mul", checked)


def round_shift(v: int, shift: int) -> int:
    """``v / 2**shift`` rounded half up, without forming ``v + 2**(shift-1)``."""
    if shift <= 0:
        return v << -shift
    return ((v >> (shift - 1)) + 1) >> 1


def normalize(r: int) -> tuple[int, int]:
    """Map a positive raw value to a Q2.62 mantissa in [0.5, 1).

    Returns ``(m, L)`` with ``L = r.bit_length()`` so that
    ``r * 2**-32 == m * 2**-62 * 2**(L - 32)`` (bits below Q2.62 dropped).
    """
    n = r.bit_length()
    m = r << (Q62 - n) if n <= Q62 else r >> (n - Q62)
    return m, n


def newton_reciprocal_q62(m: int) -> int:
    """1/m for a Q2.62 mantissa m in (0.5, 1), result in Q2.62.

    Linear seed 48/17 - 32/17*m (max error 1/17) refined by a fixed number of
    Newton steps ``y <- y * (2 - m*y)``; products truncate.
    """
    y = (Y0_HALF_A - ((Y0_HALF_B * m) >> Q62)) << 1
    for _ in range(RECIP_ITERATIONS):
        e = TWO_Q62 - ((m * y) >> Q62)
        y = (y * e) >> Q62
    return y


def reciprocal_mantissa(r: int) -> tuple[int, int]:
    """Reciprocal of a positive raw value as ``(y, L)``.

    ``1 / (r * 2**-32) ~= y * 2**-62 * 2**(32 - L)`` with y in (1, 2] (Q2.62).
    """
    m, n = normalize(r)
    if m == HALF_Q62:
        return TWO_Q62, n
    return newton_reciprocal_q62(m), n


def reciprocal(a: FixedQ) -> FixedQ:
    """1/a by Newton iteration on the normalized operand."""
    if a.raw == 0:
        raise DivByZeroError("reciprocal of zero")
    r = abs(a.raw)
    y, n = reciprocal_mantissa(r)
    # result raw = y * 2**(2 - n); n >= 2 for every in-range result
    shift = n - 2
    if shift < 0:
        raise RangeError(f"1/{decode(a)} is outside the Q32.32 range")
    raw = round_shift(y, shift)
    if raw > RAW_MAX:
        raise RangeError(f"1/{decode(a)} is outside the Q32.32 range")
    return FixedQ(-raw if a.raw < 0 else raw)


def div(a: FixedQ, b: FixedQ) -> FixedQ:
    """``a * reciprocal(b)``; the datapath has no divider."""
    return mul(a, reciprocal(b))


def ratio(num_raw: int, den, *, num_frac: int = FRAC_BITS, den_frac: int = FRAC_BITS) -> FixedQ:
    """Quotient of two wide raw values, rounded to nearest, as Q32.32.

    ``num_raw`` and ``den`` (a FixedQ or a raw int) may exceed 64 bits and
    carry ``num_frac``/``den_frac`` fractional bits.  Unlike ``div``, the
    Newton reciprocal is kept as a normalized Q2.62 mantissa and applied with
    a single shift, so the result is within one ulp whatever the size of the
    denominator.
    """
    den_raw = den.raw if isinstance(den, FixedQ) else int(den)
    if den_raw == 0:
        raise DivByZeroError("division by zero")
    y, n = reciprocal_mantissa(abs(den_raw))
    shift = 30 + n + num_frac - den_frac
    mag = round_shift(abs(num_raw) * y, shift)
    neg_result = (num_raw < 0) != (den_raw < 0)
    return _narrow(-mag if neg_result else mag, "ratio", True)


def power_int(a: FixedQ, k: int) -> FixedQ:
    """a**k for a small non-negative integer k by repeated ``mul``."""
    if k < 0:
        raise ValueError("negative exponent")
    out = ONE
    for _ in range(k):
        out = mul(out, a)
    return out
