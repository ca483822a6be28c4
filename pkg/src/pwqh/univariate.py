"""Exact real-root isolation for univariate polynomials.

Coefficients are converted to :class:`fractions.Fraction` (floats convert
exactly), so every sign decision below is exact.  Isolation follows the
Descartes bisection scheme: the variation count of
``(1 + x)^d p((a + b x) / (1 + x))`` bounds the number of roots in ``(a, b)``,
and equals it when it is 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

__all__ = ["sign_variations", "RealRoot", "positive_roots", "real_roots", "poly_eval"]

DEFAULT_WIDTH = Fraction(1, 10**12)


def sign_variations(coeffs: Sequence) -> int:
    """Number of sign changes in ``coeffs`` after dropping zeros."""
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _strip(coeffs: Sequence) -> list[Fraction]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return out


def poly_eval(coeffs: Sequence, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _interval_transform(p: list[Fraction], a: Fraction, b: Fraction) -> list[Fraction]:
    """Coefficients of ``(1 + x)^d p((a + b x) / (1 + x))``."""
    d = len(p) - 1
    out = [Fraction(0)] * (d + 1)
    for i, c in enumerate(p):
        if c == 0:
            continue
        # (a + b x)^i (1 + x)^(d - i)
        left = [comb(i, k) * a ** (i - k) * b**k for k in range(i + 1)]
        right = [comb(d - i, k) for k in range(d - i + 1)]
        for k1, u in enumerate(left):
            if u == 0:
                continue
            cu = c * u
            for k2, v in enumerate(right):
                out[k1 + k2] += cu * v
    return out


def _positive_bound(p: list[Fraction]) -> Fraction:
    """Power of two exceeding every positive root (Cauchy bound)."""
    lead = abs(p[-1])
    m = max((abs(c) for c in p[:-1]), default=Fraction(0)) / lead
    bound = Fraction(1)
    while bound <= 1 + m:
        bound *= 2
    return bound


@dataclass(frozen=True)
class RealRoot:
    """An isolated real root.

    ``lo <= root <= hi``; ``lo == hi`` means the root is exactly rational.
    ``simple`` is True when the isolating interval provably holds a single
    simple root, False when the multiplicity is unresolved (a cluster narrower
    than the requested width).
    """

    lo: Fraction
    hi: Fraction
    simple: bool

    @property
    def value(self) -> float:
        return float((self.lo + self.hi) / 2)

    @property
    def exact(self) -> bool:
        return self.lo == self.hi


def _divide_linear(p: list[Fraction], r: Fraction) -> list[Fraction]:
    """Quotient of ``p`` by ``x - r`` (synthetic division; ``r`` must be a root)."""
    out = [Fraction(0)] * (len(p) - 1)
    carry = Fraction(0)
    for k in range(len(p) - 1, 0, -1):
        carry = p[k] + carry * r
        out[k - 1] = carry
    return out


def _refine(p: list[Fraction], lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    s_lo = poly_eval(p, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s_mid = poly_eval(p, mid)
        if s_mid == 0:
            return mid, mid
        if (s_mid > 0) == (s_lo > 0):
            lo, s_lo = mid, s_mid
        else:
            hi = mid
    return lo, hi


def positive_roots(coeffs: Sequence, width=DEFAULT_WIDTH) -> list[RealRoot]:
    """Isolate the positive real roots of ``sum(coeffs[k] x^k)``.

    Roots are returned in increasing order; simple roots are refined by
    bisection until their enclosing interval is narrower than ``width``.
    """
    width = Fraction(width)
    p = _strip(coeffs)
    while p and p[0] == 0:
        p.pop(0)
    if len(p) <= 1:
        return []
    if sign_variations(p) == 0:
        return []
    found: list[RealRoot] = []
    stack = [(Fraction(0), _positive_bound(p))]
    while stack:
        a, b = stack.pop()
        v = sign_variations(_interval_transform(p, a, b))
        if v == 0:
            continue
        if v == 1:
            lo, hi = _refine(p, a, b, width)
            found.append(RealRoot(lo, hi, True))
            continue
        if b - a <= width:
            found.append(RealRoot(a, b, False))
            continue
        mid = (a + b) / 2
        if poly_eval(p, mid) == 0:
            # deflate the rational root and start over, so that no later
            # interval has a root sitting on its endpoint
            mult, q = 0, p
            while poly_eval(q, mid) == 0:
                q, mult = _divide_linear(q, mid), mult + 1
            rest = positive_roots(q, width)
            return sorted(rest + [RealRoot(mid, mid, mult == 1)], key=lambda r: r.lo)
        stack.append((mid, b))
        stack.append((a, mid))
    return sorted(found, key=lambda r: r.lo)


def real_roots(coeffs: Sequence, width=DEFAULT_WIDTH) -> list[RealRoot]:
    """All real roots (negative, zero, positive) in increasing order."""
    p = _strip(coeffs)
    if not p:
        raise ValueError("the zero polynomial has every real number as a root")
    out: list[RealRoot] = []
    mirrored = [c if k % 2 == 0 else -c for k, c in enumerate(p)]
    for r in reversed(positive_roots(mirrored, width)):
        out.append(RealRoot(-r.hi, -r.lo, r.simple))
    if p[0] == 0:
        mult = next(k for k, c in enumerate(p) if c != 0)
        out.append(RealRoot(Fraction(0), Fraction(0), mult == 1))
    out.extend(positive_roots(p, width))
    return out
