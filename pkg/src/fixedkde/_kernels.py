"""Compiled inner loops for the Psi sums.

These mirror, operation for operation, the reference functions in
``fixedq``, ``elementary`` and ``plugin`` using only 64-bit words: wide
products are assembled from 32-bit limbs and intermediate wraparound is
harmless wherever the true result fits in 64 bits.  ``tests/test_kernels.py``
checks bit equality against the reference path.

Each row function fills ``out[i]`` with ``sum_{j>i} K((z[i]-z[j]) / g)`` for
``i0 <= i < i1``.  Per-row sums are bounded by ``n * max|K| * 2**32`` and fit
an int64 for any n below ~3e8; the caller adds rows with unbounded ints.
"""

import numpy as np
from numba import njit

from .elementary import (
    CORDIC_ITERATIONS,
    INV_LN2_RAW,
    LN2_HALF_Q62,
    LN2_Q62,
    LN_TABLE,
    REMEZ_COEFFS_Q62,
)
from .fixedq import HALF_Q62, ONE_Q62, RECIP_ITERATIONS, Y0_HALF_A, Y0_HALF_B

_M32 = np.uint64(0xFFFFFFFF)
_U32 = np.uint64(32)
_LN = np.array(LN_TABLE, dtype=np.int64)
_REMEZ = np.array(REMEZ_COEFFS_Q62, dtype=np.int64)
_NREMEZ = len(REMEZ_COEFFS_Q62)
_ONE = np.int64(1) << np.int64(32)
# |x| >= 2**15: u = x*x would leave Q32.32; the kernel is 0 there anyway
_ARG_LIMIT = np.int64(1) << np.int64(47)

CORDIC = 0
REMEZ = 1


@njit(cache=True, nogil=True)
def mulq(a, b):
    """Q32.32 product, floor of the exact 128-bit result."""
    ah = a >> 32
    al = a & 0xFFFFFFFF
    bh = b >> 32
    bl = b & 0xFFFFFFFF
    low = np.int64((np.uint64(al) * np.uint64(bl)) >> _U32)
    return ((ah * bh) << 32) + ah * bl + al * bh + low


@njit(cache=True, nogil=True)
def umul_shr(a, b, s):
    """floor(a*b / 2**s) for 0 <= a, b < 2**63 and 1 <= s <= 126."""
    ua = np.uint64(a)
    ub = np.uint64(b)
    al = ua & _M32
    ah = ua >> _U32
    bl = ub & _M32
    bh = ub >> _U32
    ll = al * bl
    lh = al * bh
    hl = ah * bl
    mid = (ll >> _U32) + (lh & _M32) + (hl & _M32)
    lo = (mid << _U32) | (ll & _M32)
    hi = ah * bh + (lh >> _U32) + (hl >> _U32) + (mid >> _U32)
    if s >= 64:
        return np.int64(hi >> np.uint64(s - 64))
    return np.int64((hi << np.uint64(64 - s)) | (lo >> np.uint64(s)))


@njit(cache=True, nogil=True)
def smul_shr(a, b, s):
    """Signed counterpart of umul_shr, truncating toward zero."""
    p = umul_shr(a if a >= 0 else -a, b if b >= 0 else -b, s)
    return -p if (a < 0) != (b < 0) else p


@njit(cache=True, nogil=True)
def round_shift(v, s):
    if s <= 0:
        return v << -s
    return ((v >> (s - 1)) + 1) >> 1


@njit(cache=True, nogil=True)
def bit_length(r):
    n = 0
    for step in (32, 16, 8, 4, 2, 1):
        if r >> step:
            r >>= step
            n += step
    return n + (1 if r else 0)


@njit(cache=True, nogil=True)
def reciprocal_raw(a, iterations):
    """Raw Q32.32 reciprocal of a positive raw value (no range checks)."""
    n = bit_length(a)
    if n <= 62:
        m = a << (62 - n)
    else:
        m = a >> (n - 62)
    if m == HALF_Q62:
        return np.int64(1) << (65 - n)
    y = (Y0_HALF_A - umul_shr(Y0_HALF_B, m, 62)) << 1
    for _ in range(iterations):
        p = umul_shr(m, y, 62)
        e = (ONE_Q62 - p) + ONE_Q62
        y = umul_shr(y, e, 62)
    return round_shift(y, n - 2)


@njit(cache=True, nogil=True)
def reduce_floor(x):
    k = mulq(x, INV_LN2_RAW) >> 32
    r = (x << 30) - k * LN2_Q62
    while r < 0:
        k -= 1
        r += LN2_Q62
    while r >= LN2_Q62:
        k += 1
        r -= LN2_Q62
    return k, r


@njit(cache=True, nogil=True)
def exp_cordic_parts(x):
    k, r = reduce_floor(x)
    y = np.int64(ONE_Q62)
    for i in range(1, CORDIC_ITERATIONS + 1):
        if r >= _LN[i]:
            r -= _LN[i]
            y += y >> i
    y += umul_shr(y, r, 62)
    return y, k


@njit(cache=True, nogil=True)
def exp_remez_parts(x):
    k, t = reduce_floor(x)
    if t > LN2_HALF_Q62:
        k += 1
        t -= LN2_Q62
    p = _REMEZ[_NREMEZ - 1]
    for idx in range(_NREMEZ - 2, -1, -1):
        p = _REMEZ[idx] + smul_shr(p, t, 62)
    return p, k


@njit(cache=True, nogil=True)
def kernel(x, order, exp_impl, cutoff, c_q62):
    """K^(order)(x) for order 4 or 6 with the exponential fused in."""
    if x >= _ARG_LIMIT or x <= -_ARG_LIMIT:
        return np.int64(0)
    u = mulq(x, x)
    if u > cutoff:
        return np.int64(0)
    if order == 6:
        p = mulq(mulq(u - 15 * _ONE, u) + 45 * _ONE, u) - 15 * _ONE
    else:
        p = mulq(u - 6 * _ONE, u) + 3 * _ONE
    w = -(u >> 1)
    if exp_impl == REMEZ:
        y, k = exp_remez_parts(w)
    else:
        y, k = exp_cordic_parts(w)
    t = smul_shr(p, c_q62, 62)
    return smul_shr(t, y, 62 - k)


@njit(cache=True, nogil=True)
def rows_literal(z, g, order, cutoff, c_q62, iterations, i0, i1, out):
    n = z.shape[0]
    for i in range(i0, i1):
        s = np.int64(0)
        for j in range(i + 1, n):
            # (z[i] - z[j]) / g, reciprocal recomputed for every term
            x = mulq(z[i] + (-z[j]), reciprocal_raw(g, iterations))
            s += kernel(x, order, CORDIC, cutoff, c_q62)
        out[i] = s


@njit(cache=True, nogil=True)
def rows_minimal(z, rg, order, cutoff, c_q62, i0, i1, out):
    n = z.shape[0]
    for i in range(i0, i1):
        s = np.int64(0)
        for j in range(i + 1, n):
            s += kernel(mulq(z[i] + (-z[j]), rg), order, CORDIC, cutoff, c_q62)
        out[i] = s


@njit(cache=True, nogil=True)
def rows_fast(z, rg, order, cutoff, c_q62, i0, i1, out):
    n = z.shape[0]
    for i in range(i0, i1):
        s = np.int64(0)
        tmp = np.int64(0)
        zi = z[i]
        for j in range(i + 1, n, 2):
            tmp1 = kernel(mulq(zi + (-z[j]), rg), order, REMEZ, cutoff, c_q62)
            tmp2 = np.int64(0)
            if j + 1 < n:
                tmp2 = kernel(mulq(zi + (-z[j + 1]), rg), order, REMEZ, cutoff, c_q62)
            tmp += tmp1
            tmp += tmp2
        s += tmp
        out[i] = s


@njit(cache=True, nogil=True)
def rows_full(z, rg, order, exp_impl, cutoff, c_q62, out):
    """Unhalved double sum over all (i, j), one row per i."""
    n = z.shape[0]
    for i in range(n):
        s = np.int64(0)
        for j in range(n):
            s += kernel(mulq(z[i] + (-z[j]), rg), order, exp_impl, cutoff, c_q62)
        out[i] = s
