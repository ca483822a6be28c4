"""Event-located integration of piecewise fields.

The integrator is the Dormand-Prince 5(4) pair with PI step-size control and
the pair's own continuous extension for dense output.  Each zone is integrated
with its own polynomial field; a step that carries the orbit across ``y = 0``
is cut at the crossing, which is first bracketed by bisection on the dense
output and then polished by Newton iterations on exact re-steps.  At the
crossing point the Filippov test decides between concatenating into the other
zone (``sigma > 0``) and stopping (``sigma <= 0``).
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .algebra import CanonicalForm, PiecewiseField
from .errors import NoReturn, NotACenter, StartOnSliding, StepBudgetExceeded
from .melnikov import PerturbationSpec

__all__ = [
    "Event",
    "Trajectory",
    "DisplacementSample",
    "integrate",
    "displacement",
    "find_limit_cycles",
]

AXIS_TOL = 1e-12
DEFAULT_MAX_STEPS = 10**6

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_A71, _A73, _A74, _A75, _A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)
# continuous extension coefficients of the pair
_D1, _D3, _D4, _D5, _D6, _D7 = (
    -12715105075 / 11282082432,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)

Vec = tuple[float, float]
Rhs = Callable[[float, float], Vec]


@dataclass(frozen=True)
class Event:
    t: float
    x: float
    y: float
    kind: str  # crossing | sliding-contact | equilibrium-stop | budget-stop | escape


@dataclass
class Trajectory:
    samples: list[tuple[float, float, float]] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    steps: int = 0

    @property
    def end(self) -> tuple[float, float, float]:
        return self.samples[-1]

    @property
    def crossings(self) -> list[Event]:
        return [e for e in self.events if e.kind == "crossing"]

    @property
    def stop(self) -> Event | None:
        """The terminating event, if the run ended on one."""
        if self.events and self.events[-1].kind != "crossing":
            return self.events[-1]
        return None

    def to_csv(self) -> str:
        """``t,x,y,event`` rows; event rows repeat the located point."""
        rows = ["t,x,y,event"]
        by_time = {}
        for e in self.events:
            by_time.setdefault(e.t, []).append(e.kind)
        for t, x, y in self.samples:
            kinds = by_time.pop(t, None)
            rows.append(f"{t!r},{x!r},{y!r},{'|'.join(kinds) if kinds else ''}")
        for e in self.events:
            if e.t in by_time:
                rows.append(f"{e.t!r},{e.x!r},{e.y!r},{e.kind}")
        return "\n".join(rows) + "\n"


def _zone_rhs(f: PiecewiseField, zone: int) -> Rhs:
    P, Q = f.zone("upper" if zone > 0 else "lower")
    p, q = P.fast(), Q.fast()
    return lambda x, y: (p(x, y), q(x, y))


def _step(rhs: Rhs, x: float, y: float, k1: Vec, h: float):
    """One Dormand-Prince step; returns (x5, y5, k7, err_x, err_y, stages)."""
    k2 = rhs(x + h * _A21 * k1[0], y + h * _A21 * k1[1])
    k3 = rhs(x + h * (_A31 * k1[0] + _A32 * k2[0]), y + h * (_A31 * k1[1] + _A32 * k2[1]))
    k4 = rhs(
        x + h * (_A41 * k1[0] + _A42 * k2[0] + _A43 * k3[0]),
        y + h * (_A41 * k1[1] + _A42 * k2[1] + _A43 * k3[1]),
    )
    k5 = rhs(
        x + h * (_A51 * k1[0] + _A52 * k2[0] + _A53 * k3[0] + _A54 * k4[0]),
        y + h * (_A51 * k1[1] + _A52 * k2[1] + _A53 * k3[1] + _A54 * k4[1]),
    )
    k6 = rhs(
        x + h * (_A61 * k1[0] + _A62 * k2[0] + _A63 * k3[0] + _A64 * k4[0] + _A65 * k5[0]),
        y + h * (_A61 * k1[1] + _A62 * k2[1] + _A63 * k3[1] + _A64 * k4[1] + _A65 * k5[1]),
    )
    xn = x + h * (_A71 * k1[0] + _A73 * k3[0] + _A74 * k4[0] + _A75 * k5[0] + _A76 * k6[0])
    yn = y + h * (_A71 * k1[1] + _A73 * k3[1] + _A74 * k4[1] + _A75 * k5[1] + _A76 * k6[1])
    k7 = rhs(xn, yn)
    ex = h * (_E1 * k1[0] + _E3 * k3[0] + _E4 * k4[0] + _E5 * k5[0] + _E6 * k6[0] + _E7 * k7[0])
    ey = h * (_E1 * k1[1] + _E3 * k3[1] + _E4 * k4[1] + _E5 * k5[1] + _E6 * k6[1] + _E7 * k7[1])
    return xn, yn, k7, ex, ey, (k1, k3, k4, k5, k6, k7)


def _dense(x0: float, y0: float, x1: float, y1: float, h: float, stages) -> Callable[[float], Vec]:
    k1, k3, k4, k5, k6, k7 = stages

    def coeffs(a0, a1, i):
        diff = a1 - a0
        bspl = h * k1[i] - diff
        r4 = diff - h * k7[i] - bspl
        r5 = h * (_D1 * k1[i] + _D3 * k3[i] + _D4 * k4[i] + _D5 * k5[i] + _D6 * k6[i] + _D7 * k7[i])
        return a0, diff, bspl, r4, r5

    cx, cy = coeffs(x0, x1, 0), coeffs(y0, y1, 1)

    def at(theta: float) -> Vec:
        t1 = 1.0 - theta
        return tuple(  # type: ignore[return-value]
            c[0] + theta * (c[1] + t1 * (c[2] + theta * (c[3] + t1 * c[4]))) for c in (cx, cy)
        )

    return at


def _err_norm(ex, ey, x0, y0, x1, y1, tol) -> float:
    sx = tol + tol * max(abs(x0), abs(x1))
    sy = tol + tol * max(abs(y0), abs(y1))
    return math.sqrt(0.5 * ((ex / sx) ** 2 + (ey / sy) ** 2))


def _initial_step(rhs: Rhs, x: float, y: float, k1: Vec, tol: float, hmax: float) -> float:
    sx, sy = tol + tol * abs(x), tol + tol * abs(y)
    d0 = math.hypot(x / sx, y / sy) / math.sqrt(2)
    d1 = math.hypot(k1[0] / sx, k1[1] / sy) / math.sqrt(2)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, hmax)
    k2 = rhs(x + h0 * k1[0], y + h0 * k1[1])
    d2 = math.hypot((k2[0] - k1[0]) / sx, (k2[1] - k1[1]) / sy) / math.sqrt(2) / h0
    h1 = max(1e-6, h0 * 1e-3) if max(d1, d2) <= 1e-15 else (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, hmax)


def _start_zone(f: PiecewiseField, x: float, y: float, zone: int | None) -> int:
    if y > 0:
        return 1
    if y < 0:
        return -1
    if zone is not None:
        return 1 if zone > 0 else -1
    qp, qm = f.upper_Q(x, 0.0), f.lower_Q(x, 0.0)
    if qp * qm <= 0:
        raise StartOnSliding(f"start point ({x}, 0) lies on the sliding set")
    return 1 if qp > 0 else -1


def _vanishes(f: PiecewiseField, x: float) -> bool:
    scale = max(1.0, abs(x)) ** 2 * AXIS_TOL
    return all(abs(p(x, 0.0)) <= scale for p in (f.upper_P, f.upper_Q, f.lower_P, f.lower_Q))


def integrate(
    f: PiecewiseField,
    x0: Sequence[float],
    tmax: float,
    tol: float = 1e-10,
    zone: int | str | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_crossings: int | None = None,
    escape_radius: float = 1e6,
    on_budget: str = "raise",
) -> Trajectory:
    """Integrate ``f`` from ``x0`` over ``[0, tmax]``.

    ``zone`` picks the starting zone for a start on the switching line
    (``+1``/``"upper"`` or ``-1``/``"lower"``); without it the zone is the one
    the orbit enters and a start on the sliding set raises
    :class:`StartOnSliding`.  Integration stops at ``tmax``, at the
    ``max_crossings``-th crossing, on sliding contact, at a boundary
    equilibrium, or when ``|(x, y)|`` exceeds ``escape_radius``.  Running out
    of ``max_steps`` raises :class:`StepBudgetExceeded` (carrying the partial
    trajectory) unless ``on_budget="stop"``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if tmax < 0:
        raise ValueError("tmax must be nonnegative; integrate f.reversed() for backward time")
    if isinstance(zone, str):
        zone = {"upper": 1, "lower": -1}[zone]
    x, y = float(x0[0]), float(x0[1])
    t = 0.0
    s = _start_zone(f, x, y, zone)
    traj = Trajectory(samples=[(t, x, y)])
    rhs = _zone_rhs(f, s)
    on_axis = y == 0.0
    if on_axis:
        q = (f.upper_Q if s > 0 else f.lower_Q)(x, 0.0)
        if s * q < 0:
            kind = "equilibrium-stop" if _vanishes(f, x) else "sliding-contact"
            traj.events.append(Event(t, x, y, kind))
            return traj
    k1 = rhs(x, y)
    h = _initial_step(rhs, x, y, k1, tol, max(tmax, 1e-300)) if tmax > 0 else 0.0
    err_old = 1e-4
    n_cross = 0
    while t < tmax:
        if traj.steps >= max_steps:
            if on_budget == "stop":
                traj.events.append(Event(t, x, y, "budget-stop"))
                return traj
            raise StepBudgetExceeded(f"step budget of {max_steps} exhausted at t={t}", traj)
        traj.steps += 1
        h = min(h, tmax - t)
        if h <= 1e-14 * max(1.0, abs(t)):
            if on_axis:
                kind = "equilibrium-stop" if _vanishes(f, x) else "sliding-contact"
                traj.events.append(Event(t, x, y, kind))
                return traj
            h = tmax - t
        xn, yn, k7, ex, ey, stages = _step(rhs, x, y, k1, h)
        err = _err_norm(ex, ey, x, y, xn, yn, tol)
        if not (math.isfinite(err) and math.isfinite(xn) and math.isfinite(yn)):
            h *= 0.1
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** (-0.2))
            continue
        if s * yn <= 0.0:
            if on_axis:
                # fell straight back onto the line it just left: shrink
                h *= 0.5
                continue
            tc, xc = _locate_crossing(rhs, x, y, k1, h, stages, xn, yn, t)
            traj.samples.append((tc, xc, 0.0))
            if f.upper_Q(xc, 0.0) * f.lower_Q(xc, 0.0) > 0:
                traj.events.append(Event(tc, xc, 0.0, "crossing"))
                n_cross += 1
                t, x, y = tc, xc, 0.0
                s = -s
                rhs = _zone_rhs(f, s)
                k1 = rhs(x, y)
                on_axis = True
                h = min(h, max(tc - traj.samples[-2][0], 1e-8))
                err_old = 1e-4
                if max_crossings is not None and n_cross >= max_crossings:
                    return traj
                continue
            kind = "equilibrium-stop" if _vanishes(f, xc) else "sliding-contact"
            traj.events.append(Event(tc, xc, 0.0, kind))
            return traj
        # accepted step
        t += h
        x, y = xn, yn
        k1 = k7
        traj.samples.append((t, x, y))
        if on_axis and abs(y) > AXIS_TOL * max(1.0, abs(x)):
            on_axis = False
        if not on_axis and abs(y) < AXIS_TOL and f.upper_Q(x, 0.0) * f.lower_Q(x, 0.0) <= 0:
            # asymptotic approach to the sliding set (the line is never reached in finite time)
            kind = "equilibrium-stop" if _vanishes(f, x) else "sliding-contact"
            traj.events.append(Event(t, x, 0.0, kind))
            return traj
        if x * x + y * y > escape_radius * escape_radius:
            traj.events.append(Event(t, x, y, "escape"))
            return traj
        # PI controller, beta = 0.04
        e = max(err, 1e-10)
        fac = e ** (0.2 - 0.04 * 0.75) / err_old**0.04 / 0.9
        fac = min(5.0, max(0.1, fac))
        h = h / fac
        err_old = max(err, 1e-4)
    return traj


def _locate_crossing(rhs, x, y, k1, h, stages, xn, yn, t0) -> tuple[float, float]:
    """Time and abscissa where the step from ``(x, y)`` meets ``y = 0``."""
    dense = _dense(x, y, xn, yn, h, stages)
    lo, hi = 0.0, 1.0
    ylo = y
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ym = dense(mid)[1]
        if ym == 0.0:
            lo = hi = mid
            break
        if (ym > 0) == (ylo > 0):
            lo, ylo = mid, ym
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    theta = 0.5 * (lo + hi)
    # Newton polish on exact re-steps (the dense output is one order lower)
    dt = theta * h
    xc, yc = dense(theta)
    for _ in range(8):
        if dt <= 0.0:
            break
        xc, yc, k_end, *_ = _step(rhs, x, y, k1, dt)
        if abs(yc) < AXIS_TOL * max(1.0, abs(xc)) or k_end[1] == 0.0:
            break
        dt_new = dt - yc / k_end[1]
        if not (0.0 < dt_new <= h):
            break
        dt = dt_new
    return t0 + dt, xc


# -- displacement map and limit cycles ------------------------------------------------


@dataclass(frozen=True)
class DisplacementSample:
    h: float
    epsilon: float
    d: float


def _require_center(form: CanonicalForm) -> tuple[float, float, float]:
    if form.variant != "I":
        raise NotACenter(f"form {form.variant} has no center")
    a1, b1, a1t = (float(v) for v in form.params)
    if not (a1 < 0 < b1 and a1t > 0):
        raise NotACenter("the center condition a1 < 0, b1 > 0, a1~ > 0 fails")
    return a1, b1, a1t


def displacement(
    form: CanonicalForm,
    pert: PerturbationSpec,
    h: float,
    eps: float,
    tol: float = 1e-11,
) -> DisplacementSample:
    """Change of the upper energy after one revolution of the perturbed field.

    The orbit starts at ``A = (sqrt(h / b1), 0)`` and is followed through two
    crossings.  The returned ``d`` is ``H+(return point) - H+(A)`` with
    ``H+ = a1 y^3/3 - b1 x^2/2``; at first order in ``eps`` it equals
    ``eps * M(h)``.
    """
    a1, b1, _ = _require_center(form)
    if h <= 0:
        raise ValueError("h must be positive")
    r = math.sqrt(h / b1)
    if eps == 0:
        return DisplacementSample(h, eps, 0.0)
    field_ = form.to_field().perturbed(*pert.polys(), eps)
    # one revolution of the unperturbed orbit takes T = beta0 r^(-1/3); allow ample margin
    tmax = 50.0 * (1.0 + r ** (-1.0 / 3.0)) * (1.0 + 1.0 / abs(a1) + 1.0 / b1)
    try:
        traj = integrate(field_, (r, 0.0), tmax, tol, zone=1, max_crossings=2, escape_radius=1e3 * (1 + r))
    except StartOnSliding as exc:  # pragma: no cover - the start is on the crossing set for small eps
        raise NoReturn(str(exc)) from exc
    if len(traj.crossings) < 2:
        stop = traj.stop
        why = stop.kind if stop else "time limit"
        raise NoReturn(f"orbit from h={h} did not return to the positive axis ({why})")
    x_ret = traj.crossings[1].x
    if x_ret <= 0:
        raise NoReturn(f"orbit from h={h} returned at x={x_ret} <= 0")
    d = -0.5 * b1 * (x_ret - r) * (x_ret + r)
    return DisplacementSample(h, eps, d)


def _disp_or_none(args) -> float | None:
    form, pert, h, eps, tol = args
    try:
        return displacement(form, pert, h, eps, tol).d
    except NoReturn:
        return None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PWQH_THREADS", "1")))
    except ValueError:
        return 1


def find_limit_cycles(
    form: CanonicalForm,
    pert: PerturbationSpec,
    eps: float,
    h_range: tuple[float, float],
    grid: int = 40,
    tol: float = 1e-11,
    h_tol: float = 1e-6,
) -> list[float]:
    """Zeros of the displacement map on a log grid over ``h_range``.

    Each sign change between neighbouring grid values is refined by bisection
    until the bracket is narrower than ``h_tol``.  Grid points whose orbit does
    not return are skipped; their number is reported through
    :mod:`warnings`.
    """
    _require_center(form)
    lo, hi = float(h_range[0]), float(h_range[1])
    if not (0 < lo < hi) or grid < 2:
        raise ValueError("need 0 < h_min < h_max and grid >= 2")
    hs = [lo * (hi / lo) ** (i / (grid - 1)) for i in range(grid)]
    jobs = [(form, pert, h, eps, tol) for h in hs]
    workers = _threads()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_disp_or_none, jobs))
    else:
        values = [_disp_or_none(j) for j in jobs]
    skipped = sum(v is None for v in values)
    pairs = [(h, v) for h, v in zip(hs, values) if v is not None]
    zeros: list[float] = []
    for (h0, d0), (h1, d1) in zip(pairs, pairs[1:]):
        if d0 == 0.0:
            zeros.append(h0)
            continue
        if (d0 > 0) == (d1 > 0) or d1 == 0.0:
            continue
        a, b, da = h0, h1, d0
        while b - a > h_tol:
            m = 0.5 * (a + b)
            dm = _disp_or_none((form, pert, m, eps, tol))
            if dm is None:
                skipped += 1
                break
            if dm == 0.0:
                a = b = m
                break
            if (dm > 0) == (da > 0):
                a, da = m, dm
            else:
                b = m
        zeros.append(0.5 * (a + b))
    if pairs and pairs[-1][1] == 0.0:
        zeros.append(pairs[-1][0])
    if skipped:
        warnings.warn(f"{skipped} displacement evaluations did not return and were skipped", RuntimeWarning)
    return zeros
