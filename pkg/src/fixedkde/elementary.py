"""Fixed-point elementary functions on Q32.32 values.

Two exponentials share one range reduction ``x = k*ln2 + r``:

* ``exp_cordic`` drives ``r`` to zero with the shift-and-add table
  ``ln(1 + 2**-i)`` (multiplication-free per step);
* ``exp_remez`` evaluates a degree-7 minimax polynomial for ``e**t`` on
  ``[-ln2/2, ln2/2]`` by Horner's scheme, which pipelines well.

Both work in Q2.62 internally and return to Q32.32 with one rounding shift.
``ln_cordic`` runs the same table in the opposite direction; powers and roots
follow from ``x**y = exp(y * ln x)``.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .errors import DomainError, RangeError
from .fixedq import (
    FRAC_BITS,
    ONE_Q62,
    Q62,
    RAW_MAX,
    FixedQ,
    ZERO,
    encode,
    mul,
    normalize,
    round_shift,
)

CORDIC_ITERATIONS = 48
EXP_UNDERFLOW_RAW = -21 << FRAC_BITS

with mpmath.workdps(40):
    _SCALE = mpmath.mpf(2) ** Q62
    LN2_Q62 = int(mpmath.nint(mpmath.log(2) * _SCALE))
    # index i holds ln(1 + 2**-i); index 0 is unused
    LN_TABLE = (0,) + tuple(
        int(mpmath.nint(mpmath.log(1 + mpmath.mpf(2) ** -i) * _SCALE))
        for i in range(1, CORDIC_ITERATIONS + 1)
    )
    INV_LN2_RAW = int(mpmath.nint(2**FRAC_BITS / mpmath.log(2)))
    del _SCALE

LN2_HALF_Q62 = LN2_Q62 >> 1

# Minimax e**t on [-ln2/2, ln2/2], degree 7, lowest order first (Q2.62).
# Produced by remez.remez_minimax("exp", (-ln2/2, ln2/2), 7); certified max
# error 4.05e-11 (about 2**-34.5).  test_remez checks these stay reproducible.
# The compiled kernels bake this table in; clear the numba cache after edits.
REMEZ_DEGREE = 7
REMEZ_COEFFS_Q62 = (
    4611686018240774973,
    4611686018261610290,
    2305843058913650575,
    768614351585011647,
    192151516049784223,
    38430326276541619,
    6432648662634236,
    918840119378066,
)


def smul_shr(a: int, b: int, shift: int) -> int:
    """Signed product shifted right, truncating toward zero."""
    p = abs(a) * abs(b) >> shift
    return -p if (a < 0) != (b < 0) else p


def reduce_floor(x_raw: int) -> tuple[int, int]:
    """Split x into ``k*ln2 + r`` with r in [0, ln2) (r in Q2.62)."""
    k = ((x_raw * INV_LN2_RAW) >> FRAC_BITS) >> FRAC_BITS
    r = (x_raw << (Q62 - FRAC_BITS)) - k * LN2_Q62
    while r < 0:
        k -= 1
        r += LN2_Q62
    while r >= LN2_Q62:
        k += 1
        r -= LN2_Q62
    return k, r


def reduce_nearest(x_raw: int) -> tuple[int, int]:
    """Split x into ``k*ln2 + t`` with t in (-ln2/2, ln2/2]."""
    k, r = reduce_floor(x_raw)
    if r > LN2_HALF_Q62:
        k += 1
        r -= LN2_Q62
    return k, r


def exp_cordic_parts(x_raw: int) -> tuple[int, int]:
    """``e**x ~= y * 2**-62 * 2**k``; y in [1, 2) as Q2.62."""
    k, r = reduce_floor(x_raw)
    y = ONE_Q62
    for i in range(1, CORDIC_ITERATIONS + 1):
        if r >= LN_TABLE[i]:
            r -= LN_TABLE[i]
            y += y >> i
    # residual r < ln(1 + 2**-48): first-order correction
    y += (y * r) >> Q62
    return y, k


def exp_remez_parts(x_raw: int) -> tuple[int, int]:
    """``e**x ~= p * 2**-62 * 2**k``; p in [0.7, 1.42] as Q2.62."""
    k, t = reduce_nearest(x_raw)
    p = REMEZ_COEFFS_Q62[-1]
    for c in REMEZ_COEFFS_Q62[-2::-1]:
        p = c + smul_shr(p, t, Q62)
    return p, k


def _scale_to_fixed(y: int, k: int) -> FixedQ:
    # raw = y * 2**(k - 30)
    shift = Q62 - FRAC_BITS - k
    if shift <= 0:
        raw = y << -shift
    elif shift >= 64:
        raw = 0
    else:
        raw = round_shift(y, shift)
    if raw > RAW_MAX:
        raise RangeError("exp result exceeds the Q32.32 range")
    return FixedQ(raw)


def exp_cordic(x: FixedQ) -> FixedQ:
    """e**x by shift-and-add CORDIC; 0 below x = -21."""
    if x.raw < EXP_UNDERFLOW_RAW:
        return ZERO
    return _scale_to_fixed(*exp_cordic_parts(x.raw))


def exp_remez(x: FixedQ) -> FixedQ:
    """e**x via range reduction and the minimax polynomial; 0 below x = -21."""
    if x.raw < EXP_UNDERFLOW_RAW:
        return ZERO
    return _scale_to_fixed(*exp_remez_parts(x.raw))


def ln_cordic(x: FixedQ) -> FixedQ:
    if x.raw <= 0:
        raise DomainError(f"ln of non-positive value {float(x.raw) / 2**32}")
    m, n = normalize(x.raw)
    # x = m * 2**(n - 32), m in [0.5, 1); multiply m up towards 1
    acc = 0
    for i in range(1, CORDIC_ITERATIONS + 1):
        t = m + (m >> i)
        if t <= ONE_Q62:
            m = t
            acc += LN_TABLE[i]
    total = (n - FRAC_BITS) * LN2_Q62 - acc + (m - ONE_Q62)
    shift = Q62 - FRAC_BITS
    return FixedQ((total + (1 << (shift - 1))) >> shift)


def pow(x: FixedQ, y: FixedQ) -> FixedQ:
    """x**y = exp(y * ln x) for x > 0."""
    if x.raw <= 0:
        raise DomainError("pow requires a positive base")
    return exp_cordic(mul(y, ln_cordic(x)))


_HALF = encode(0.5)


def sqrt(x: FixedQ) -> FixedQ:
    if x.raw < 0:
        raise DomainError("sqrt of negative value")
    if x.raw == 0:
        return ZERO
    return pow(x, _HALF)


def root(x: FixedQ, k: int) -> FixedQ:
    """k-th root of a positive value."""
    if k <= 0:
        raise ValueError("root order must be positive")
    return pow(x, encode(Fraction(1, k))) if k != 1 else x
