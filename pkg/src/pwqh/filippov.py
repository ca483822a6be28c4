"""Crossing and sliding decomposition of the switching line ``y = 0``.

With the switching function ``F = y`` the Filippov test quantity reduces to
``sigma(x) = Q+(x, 0) * Q-(x, 0)``, a univariate polynomial, so every set
below is computed from exact sign information: its roots are isolated over the
rationals and its sign on each gap is read at a rational sample point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ._num import to_json_number
from .algebra import PiecewiseField
from .univariate import RealRoot, poly_eval, real_roots

__all__ = ["AxisSet", "Interval", "SwitchingAnalysis", "sigma_at", "switching_analysis"]


def sigma_at(f: PiecewiseField, x: float) -> float:
    """``Q+(x, 0) * Q-(x, 0)``; positive exactly where orbits cross."""
    return f.upper_Q(x, 0) * f.lower_Q(x, 0)


# -- exact univariate helpers -------------------------------------------------


def _trim(p: Sequence) -> list[Fraction]:
    out = [Fraction(c) for c in p]
    while out and out[-1] == 0:
        out.pop()
    return out


def _mul(p: Sequence, q: Sequence) -> list[Fraction]:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def _sub(p: Sequence, q: Sequence) -> list[Fraction]:
    n = max(len(p), len(q))
    p = list(p) + [0] * (n - len(p))
    q = list(q) + [0] * (n - len(q))
    return _trim([a - b for a, b in zip(p, q)])


def _rem(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    p = list(p)
    while len(p) >= len(q):
        factor = p[-1] / q[-1]
        shift = len(p) - len(q)
        for i, c in enumerate(q):
            p[shift + i] -= factor * c
        p = _trim(p)
        if not p:
            break
    return p


def _gcd(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    """Monic gcd; the zero polynomial acts as the identity."""
    p, q = _trim(p), _trim(q)
    while q:
        p, q = q, _rem(p, q)
    if not p:
        return []
    return [c / p[-1] for c in p]


# -- set descriptors ------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Interval of the x-axis; ``None`` endpoints are infinite.

    Finite endpoints are roots of a polynomial and are stored as isolating
    intervals so that membership near them stays exact for rational input.
    """

    lo: RealRoot | None
    hi: RealRoot | None
    lo_closed: bool = False
    hi_closed: bool = False

    def contains(self, x: float) -> bool:
        if self.lo is not None:
            if x < self.lo.lo or (x == self.lo.lo and self.lo.exact and not self.lo_closed):
                return False
            if not self.lo.exact and x <= self.lo.hi:
                return self.lo_closed
        if self.hi is not None:
            if x > self.hi.hi or (x == self.hi.hi and self.hi.exact and not self.hi_closed):
                return False
            if not self.hi.exact and x >= self.hi.lo:
                return self.hi_closed
        return True

    def to_json(self) -> list:
        return [
            None if self.lo is None else _root_json(self.lo),
            None if self.hi is None else _root_json(self.hi),
            self.lo_closed,
            self.hi_closed,
        ]


def _root_json(r: RealRoot):
    return to_json_number(r.lo) if r.exact else r.value


def _on_root(r: RealRoot, x: float) -> bool:
    return r.lo <= x <= r.hi if not r.exact else x == r.lo


@dataclass(frozen=True)
class AxisSet:
    """Subset of the switching line.

    ``kind`` is one of ``empty``, ``axis``, ``axis-minus-points`` (then
    ``excluded`` lists the removed points), ``points`` or ``intervals``.  For
    ``intervals`` the set is the union of ``intervals`` and the isolated
    ``points``.
    """

    kind: str
    intervals: tuple[Interval, ...] = ()
    points: tuple[RealRoot, ...] = ()
    excluded: tuple[RealRoot, ...] = ()

    def contains(self, x: float) -> bool:
        if self.kind == "empty":
            return False
        if self.kind == "axis":
            return True
        if self.kind == "axis-minus-points":
            return not any(_on_root(r, x) for r in self.excluded)
        return any(_on_root(r, x) for r in self.points) or any(i.contains(x) for i in self.intervals)

    @property
    def point_values(self) -> list[float]:
        return [r.value for r in self.points]

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "axis-minus-points":
            out["excluded"] = [_root_json(r) for r in self.excluded]
        if self.kind in ("points", "intervals"):
            out["points"] = [_root_json(r) for r in self.points]
        if self.kind == "intervals":
            out["intervals"] = [i.to_json() for i in self.intervals]
        return out

    def describe(self) -> str:
        if self.kind == "empty":
            return "empty"
        if self.kind == "axis":
            return "whole axis"
        if self.kind == "axis-minus-points":
            return "axis minus {" + ", ".join(f"{_root_json(r)}" for r in self.excluded) + "}"
        parts = [f"{{{_root_json(r)}}}" for r in self.points]
        for i in self.intervals:
            lo = "-inf" if i.lo is None else _root_json(i.lo)
            hi = "+inf" if i.hi is None else _root_json(i.hi)
            parts.append(("[" if i.lo_closed else "(") + f"{lo}, {hi}" + ("]" if i.hi_closed else ")"))
        return " U ".join(parts)


EMPTY = AxisSet("empty")
AXIS = AxisSet("axis")


def _assemble(roots: list[RealRoot], gap_in: list[bool], root_in: list[bool]) -> AxisSet:
    """Union of the selected gaps (open) and selected roots (points)."""
    if not any(gap_in) and not any(root_in):
        return EMPTY
    if all(gap_in) and all(root_in):
        return AXIS
    if all(gap_in):
        return AxisSet("axis-minus-points", excluded=tuple(r for r, keep in zip(roots, root_in) if not keep))
    intervals: list[Interval] = []
    points: list[RealRoot] = []
    start: RealRoot | None = None
    start_closed = False
    open_run = gap_in[0]  # a run that began at -infinity
    running = gap_in[0]
    for k, r in enumerate(roots):
        right_in = gap_in[k + 1]
        if running:
            if root_in[k] and right_in:
                continue
            intervals.append(Interval(None if open_run else start, r, start_closed, root_in[k]))
            running, open_run = False, False
            if right_in:  # root excluded, restart
                start, start_closed, running = r, False, True
            continue
        if right_in:
            start, start_closed, running = r, root_in[k], True
        elif root_in[k]:
            points.append(r)
    if running:
        intervals.append(Interval(None if open_run else start, None, start_closed, False))
    if not intervals:
        return AxisSet("points", points=tuple(points))
    return AxisSet("intervals", tuple(intervals), tuple(points))


def _gap_signs(p: list[Fraction], roots: list[RealRoot]) -> list[int]:
    samples: list[Fraction] = []
    if not roots:
        samples.append(Fraction(0))
    else:
        samples.append(roots[0].lo - 1)
        for left, right in zip(roots, roots[1:]):
            samples.append((left.hi + right.lo) / 2)
        samples.append(roots[-1].hi + 1)
    out = []
    for s in samples:
        v = poly_eval(p, s)
        out.append(0 if v == 0 else (1 if v > 0 else -1))
    return out


@dataclass(frozen=True)
class SwitchingAnalysis:
    crossing: AxisSet
    sliding: AxisSet
    singular: AxisSet
    boundary_equilibria: AxisSet
    sigma: tuple = field(default=(), compare=False)

    @property
    def singular_points(self) -> list[float]:
        return self.singular.point_values

    def to_json(self) -> dict:
        return {
            "sigma": [to_json_number(c) for c in self.sigma],
            "crossing": self.crossing.to_json(),
            "sliding": self.sliding.to_json(),
            "singular": self.singular.to_json(),
            "boundary_equilibria": self.boundary_equilibria.to_json(),
        }


def _is_finite(coeffs) -> bool:
    return all(math.isfinite(float(c)) for c in coeffs)


def switching_analysis(f: PiecewiseField) -> SwitchingAnalysis:
    """Exact crossing/sliding/singular decomposition of ``y = 0``.

    Singular sliding points are the sliding points where
    ``Q-(x, 0) - Q+(x, 0)`` vanishes; when that difference is identically
    zero every sliding point is singular.  Boundary equilibria are the common
    real zeros of all four components on the axis.
    """
    qp, qm = _trim(f.upper_Q.at_y0()), _trim(f.lower_Q.at_y0())
    pp, pm = _trim(f.upper_P.at_y0()), _trim(f.lower_P.at_y0())
    if not _is_finite(qp + qm + pp + pm):
        raise ValueError("field coefficients must be finite")
    sigma = _mul(qp, qm)

    if not sigma:
        crossing, sliding = EMPTY, AXIS
        sigma_roots: list[RealRoot] = []
        gap = [0]
    else:
        sigma_roots = real_roots(sigma)
        gap = _gap_signs(sigma, sigma_roots)
        crossing = _assemble(sigma_roots, [s > 0 for s in gap], [False] * len(sigma_roots))
        sliding = _assemble(sigma_roots, [s <= 0 for s in gap], [True] * len(sigma_roots))

    def in_sliding(r: RealRoot) -> bool:
        if not sigma:
            return True
        # roots shared with sigma were caught by _shares_root, so sigma is
        # nonzero at r and its sign at the refined midpoint is the sign at r
        return poly_eval(sigma, (r.lo + r.hi) / 2) <= 0

    diff = _sub(qm, qp)
    if not diff:
        singular = sliding
    else:
        common = _gcd(diff, sigma) if sigma else diff
        singular_roots = [r for r in real_roots(diff) if _shares_root(r, common) or in_sliding(r)]
        singular = AxisSet("points", points=tuple(singular_roots)) if singular_roots else EMPTY

    g: list[Fraction] = []
    for poly in (pp, qp, pm, qm):
        g = _gcd(g, poly)
    if not g and not (pp or qp or pm or qm):
        boundary = singular
    elif len(g) <= 1:
        boundary = EMPTY
    else:
        pts = tuple(real_roots(g))
        boundary = AxisSet("points", points=pts) if pts else EMPTY

    return SwitchingAnalysis(crossing, sliding, singular, boundary, tuple(sigma))


def _shares_root(r: RealRoot, common: list[Fraction]) -> bool:
    """True when ``r`` (a root of the difference) is also a root of ``common``."""
    if len(common) <= 1:
        return False
    if r.exact:
        return poly_eval(common, r.lo) == 0
    lo_v, hi_v = poly_eval(common, r.lo), poly_eval(common, r.hi)
    return lo_v == 0 or hi_v == 0 or (lo_v > 0) != (hi_v > 0)
