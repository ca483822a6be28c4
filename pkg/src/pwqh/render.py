"""Deterministic SVG phase portraits.

Orbits are seeded on a square grid and near the four axis directions at
infinity, integrated forward and backward, and clipped to a disk.  Output
depends only on the form and the options: seeds are processed in a fixed
order and every coordinate is printed with three decimals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .algebra import CanonicalForm
from .errors import RenderBudgetExceeded, StartOnSliding
from .filippov import AxisSet, switching_analysis
from .portrait import classify_case
from .simulate import Trajectory, integrate

__all__ = ["RenderOptions", "render", "closed_orbit"]

CLOSURE_TOL = 1e-4


@dataclass(frozen=True)
class RenderOptions:
    grid: int = 12
    radius: float = 4.0
    size: int = 480
    tol: float = 1e-7
    tmax: float = 50.0
    infinity_seeds: int = 8
    infinity_z: float = 0.05
    max_crossings: int = 24
    step_budget: int = 2_000_000

    def __post_init__(self):
        if self.grid < 1 or self.radius <= 0 or self.size < 16:
            raise ValueError("grid >= 1, radius > 0 and size >= 16 are required")


def _seeds(opts: RenderOptions) -> list[tuple[float, float]]:
    R, g = opts.radius, opts.grid
    pts = []
    for iy in range(g):
        for ix in range(g):
            # cell centres: never exactly on the switching line
            pts.append((-R + (2 * ix + 1) * R / g, -R + (2 * iy + 1) * R / g))
    z, m = opts.infinity_z, opts.infinity_seeds
    us = [-1.0 + 2.0 * (k + 0.5) / m for k in range(m)]
    for u in us:  # U1 and its antipode (x-axis ends)
        pts.append((1.0 / z, u / z))
        pts.append((-1.0 / z, -u / z))
    for u in us:  # U2 and its antipode (y-axis ends)
        pts.append((u / z, 1.0 / z))
        pts.append((-u / z, -1.0 / z))
    return pts


def closed_orbit(traj: Trajectory, tol: float = CLOSURE_TOL) -> list[tuple[float, float, float]] | None:
    """One revolution of ``traj`` if it closes up, else ``None``.

    The orbit counts as closed when a later crossing in the same direction as
    the first lands within ``tol`` of it.
    """
    cr = traj.crossings
    if len(cr) < 3:
        return None
    first = cr[0]
    for later in cr[2::2]:
        if abs(later.x - first.x) <= tol * max(1.0, abs(first.x)):
            return [s for s in traj.samples if first.t <= s[0] <= later.t]
    return None


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class _Canvas:
    def __init__(self, opts: RenderOptions):
        self.R = opts.radius
        self.half = opts.size / 2.0
        self.scale = (self.half - 10.0) / opts.radius

    def xy(self, x: float, y: float) -> str:
        return f"{_fmt(self.half + x * self.scale)},{_fmt(self.half - y * self.scale)}"

    def clip(self, pts: list[tuple[float, float]]) -> list[list[tuple[float, float]]]:
        """Split a polyline into runs inside the disk, cutting edges at the circle."""
        R2 = self.R * self.R
        runs: list[list[tuple[float, float]]] = []
        cur: list[tuple[float, float]] = []
        prev = None
        for p in pts:
            inside = p[0] * p[0] + p[1] * p[1] <= R2
            if prev is not None:
                prev_in = prev[0] * prev[0] + prev[1] * prev[1] <= R2
                if inside != prev_in:
                    cut = self._boundary(prev, p)
                    if inside:
                        cur = [cut]
                    else:
                        cur.append(cut)
                        runs.append(cur)
                        cur = []
            if inside:
                cur.append(p)
            prev = p
        if len(cur) > 1:
            runs.append(cur)
        return [r for r in runs if len(r) > 1]

    def _boundary(self, a, b):
        dx, dy = b[0] - a[0], b[1] - a[1]
        A = dx * dx + dy * dy
        B = 2 * (a[0] * dx + a[1] * dy)
        C = a[0] * a[0] + a[1] * a[1] - self.R * self.R
        disc = max(B * B - 4 * A * C, 0.0)
        roots = [(-B - math.sqrt(disc)) / (2 * A), (-B + math.sqrt(disc)) / (2 * A)]
        t = min((r for r in roots if 0.0 <= r <= 1.0), default=0.5)
        return (a[0] + t * dx, a[1] + t * dy)

    def path(self, pts, closed: bool = False) -> str:
        body = " L".join(self.xy(x, y) for x, y in pts)
        return "M" + body + (" Z" if closed else "")


def _axis_segments(s: AxisSet, R: float) -> list[tuple[float, float]]:
    if s.kind in ("axis", "axis-minus-points"):
        return [(-R, R)]
    out = []
    for iv in s.intervals:
        lo = -R if iv.lo is None else max(-R, iv.lo.value)
        hi = R if iv.hi is None else min(R, iv.hi.value)
        if lo < hi:
            out.append((lo, hi))
    return out


def render(form: CanonicalForm, opts: RenderOptions | None = None) -> bytes:
    """SVG document for ``form``; identical inputs give identical bytes."""
    opts = opts or RenderOptions()
    canvas = _Canvas(opts)
    field = form.to_field()
    backward = field.reversed()
    analysis = switching_analysis(field)
    case = classify_case(form)
    budget = opts.step_budget
    orbit_paths: list[str] = []
    closed_count = 0

    def run(f, seed):
        nonlocal budget
        radius = max(10.0 * opts.radius, 2.0 * math.hypot(*seed))
        try:
            tr = integrate(
                f, seed, opts.tmax, opts.tol, max_steps=max(budget, 1),
                max_crossings=opts.max_crossings, escape_radius=radius, on_budget="stop",
            )
        except StartOnSliding:
            tr = integrate(f, seed, opts.tmax, opts.tol, zone=1, max_steps=max(budget, 1),
                           max_crossings=opts.max_crossings, escape_radius=radius, on_budget="stop")
        budget -= tr.steps
        if tr.stop is not None and tr.stop.kind == "budget-stop":
            raise RenderBudgetExceeded(f"render step budget of {opts.step_budget} exhausted")
        return tr

    for seed in _seeds(opts):
        fwd = run(field, seed)
        loop = closed_orbit(fwd)
        if loop is not None:
            pts = [(x, y) for _, x, y in loop]
            if all(x * x + y * y <= opts.radius**2 for x, y in pts):
                orbit_paths.append(f'<path class="closed" d="{canvas.path(pts, closed=True)}"/>')
                closed_count += 1
                continue
            for run_pts in canvas.clip(pts):
                orbit_paths.append(f'<path class="orbit" d="{canvas.path(run_pts)}"/>')
            continue
        bwd = run(backward, seed)
        pts = [(x, y) for _, x, y in reversed(bwd.samples)] + [(x, y) for _, x, y in fwd.samples[1:]]
        for run_pts in canvas.clip(pts):
            orbit_paths.append(f'<path class="orbit" d="{canvas.path(run_pts)}"/>')

    meta = {
        "form": form.to_json(),
        "case": case.to_json(),
        "switching": analysis.to_json(),
        "closed_paths": closed_count,
        "options": {"grid": opts.grid, "radius": opts.radius, "tol": opts.tol, "tmax": opts.tmax},
    }
    size = opts.size
    R = opts.radius
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<desc>{_xml_escape(json.dumps(meta, sort_keys=True))}</desc>",
        "<style>"
        ".orbit{fill:none;stroke:#1f4e79;stroke-width:0.8}"
        ".closed{fill:none;stroke:#2e7d32;stroke-width:0.8}"
        ".crossing{stroke:#555;stroke-width:1.2}"
        ".sliding{stroke:#c62828;stroke-width:2.4;stroke-dasharray:6 3}"
        ".singular{fill:#c62828}"
        ".disk{fill:none;stroke:#000;stroke-width:1}"
        "</style>",
        f'<circle class="disk" cx="{_fmt(size / 2)}" cy="{_fmt(size / 2)}" r="{_fmt(R * canvas.scale)}"/>',
    ]
    lines.append('<g id="orbits">')
    lines.extend(orbit_paths)
    lines.append("</g>")
    lines.append('<g id="switching-line">')
    for lo, hi in _axis_segments(analysis.crossing, R):
        lines.append(f'<path class="crossing" d="M{canvas.xy(lo, 0)} L{canvas.xy(hi, 0)}"/>')
    for lo, hi in _axis_segments(analysis.sliding, R):
        lines.append(f'<path class="sliding" d="M{canvas.xy(lo, 0)} L{canvas.xy(hi, 0)}"/>')
    if analysis.singular.kind in ("points", "intervals"):
        for x in analysis.singular.point_values:
            if abs(x) <= R:
                cx, cy = canvas.xy(x, 0).split(",")
                lines.append(f'<circle class="singular" cx="{cx}" cy="{cy}" r="3"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _xml_escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
