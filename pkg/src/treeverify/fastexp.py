"""Deterministic double-precision exponential.

libm `exp` differs by an ulp between CPython and the numba runtime, which
would break the bit-exactness contract between the interpreted engine and
the jitted kernels for softmax models.  This implementation uses only
IEEE-754 +, -, *, / and ldexp, all of which are bit-identical in both
builds (numba compiles without fastmath, so no FMA contraction).

Standard reduction: x = k*ln2 + r with |r| <= ln2/2, exp(x) =
2^k * exp(r), exp(r) by a degree-13 Taylor polynomial (relative error
~1e-16 at this range, far below float32 rounding granularity).
"""

from __future__ import annotations

import math

_LOG2E = 1.4426950408889634074
_LN2_HI = 6.93147180369123816490e-01
_LN2_LO = 1.90821492927058770002e-10

_INV_FACT = (
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
    1.0 / 6227020800.0,
)


def _exp64(x: float) -> float:
    if x != x:  # NaN
        return x
    if x > 709.782712893384:
        return math.inf
    if x < -745.2:
        return 0.0
    k = int(math.floor(x * _LOG2E + 0.5))
    kf = float(k)
    r = (x - kf * _LN2_HI) - kf * _LN2_LO
    # Horner, highest order first: exp(r) = 1 + r + r^2/2! + ... + r^13/13!
    p = _INV_FACT[11]
    p = p * r + _INV_FACT[10]
    p = p * r + _INV_FACT[9]
    p = p * r + _INV_FACT[8]
    p = p * r + _INV_FACT[7]
    p = p * r + _INV_FACT[6]
    p = p * r + _INV_FACT[5]
    p = p * r + _INV_FACT[4]
    p = p * r + _INV_FACT[3]
    p = p * r + _INV_FACT[2]
    p = p * r + _INV_FACT[1]
    p = p * r + _INV_FACT[0]
    p = p * (r * r) + r + 1.0
    return math.ldexp(p, k)


try:
    from numba import njit as _njit
    exp64 = _njit(cache=True)(_exp64)
except ImportError:  # pragma: no cover
    exp64 = _exp64
