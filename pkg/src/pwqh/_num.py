from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Number = Union[int, float, Fraction]

REL_TOL = 1e-12
STRUCTURAL_ZERO = 1e-14


def cbrt(u: float) -> float:
    """Real cube root; negative arguments give negative results."""
    u = float(u)
    if u == 0.0:
        return 0.0
    r = abs(u) ** (1.0 / 3.0)
    # one Newton step recovers the last ulp lost by the float exponent 1/3
    r -= (r * r * r - abs(u)) / (3.0 * r * r)
    return math.copysign(r, u)


def real_pow_thirds(base: float, num: int) -> float:
    """``base ** (num / 3)`` on the real branch: cbrt(base) ** num."""
    return cbrt(base) ** num


def is_rational(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def div(a: Number, b: Number) -> Number:
    """Exact quotient for rational operands, float otherwise."""
    if is_rational(a) and is_rational(b):
        q = Fraction(a) / Fraction(b)
        return q.numerator if q.denominator == 1 else q
    return float(a) / float(b)


def close(a: float, b: float, rel: float = REL_TOL) -> bool:
    return abs(float(a) - float(b)) <= rel * max(abs(float(a)), abs(float(b)))


def sign(v: Number, scale: float = 0.0, rel: float = REL_TOL) -> int:
    """Sign of ``v`` with values within ``rel * scale`` treated as zero."""
    if abs(float(v)) <= rel * scale:
        return 0
    return 1 if v > 0 else -1


def to_json_number(v: Number):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else float(v)
    return v
