"""Center detection, return maps and the period function of form I.

Form I is a center exactly when ``a1 < 0``, ``b1 > 0`` and ``a1~ > 0``.  Each
half-plane then carries the cubic-in-``y`` energy of its zone, so the orbit
through ``(r, 0)`` returns to ``(r, 0)`` and the period scales as
``r^(-1/3)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._num import cbrt
from .algebra import CanonicalForm
from .errors import IntegrationFailure, NotACenter
from .quadrature import tanh_sinh
from .simulate import integrate

__all__ = [
    "CenterReport",
    "PeriodValue",
    "center_report",
    "exact_return_maps",
    "numeric_return_map",
    "period_closed_form",
    "period_numeric",
    "period_constant",
]


@dataclass(frozen=True)
class CenterReport:
    is_center: bool
    reason: str
    is_global: bool
    isochronous: bool

    def to_json(self) -> dict:
        return {
            "is_center": self.is_center,
            "reason": self.reason,
            "global": self.is_global,
            "isochronous": self.isochronous,
        }


def center_report(form: CanonicalForm) -> CenterReport:
    if form.variant == "II":
        return CenterReport(False, "FormIINoCenter", False, False)
    if form.variant == "III":
        return CenterReport(False, "FormIIINoCenter", False, False)
    a1, b1, a1t = form.params
    if a1 < 0 < b1 and a1t > 0:
        return CenterReport(True, "FormIConditionMet", True, False)
    return CenterReport(False, "FormICondFail", False, False)


def _center_params(form: CanonicalForm) -> tuple[float, float, float]:
    report = center_report(form)
    if not report.is_center:
        raise NotACenter(f"{form.variant}{tuple(form.params)}: {report.reason}")
    return tuple(float(v) for v in form.params)  # type: ignore[return-value]


def exact_return_maps(form: CanonicalForm, r: float) -> tuple[float, float]:
    """Half and full return maps on the positive x-axis.

    The upper energy ``-b1 x^2 / 2`` takes the same value at ``(r, 0)`` and
    ``(-r, 0)``; the lower energy ``-x^2 / 2`` does the same on the way back,
    so both maps are the identity.
    """
    _center_params(form)
    if r < 0:
        raise ValueError("r must be nonnegative")
    return (float(r), float(r))


def numeric_return_map(form: CanonicalForm, r: float, tol: float = 1e-10) -> float:
    """x-coordinate after one integrated revolution from ``(r, 0)``."""
    a1, b1, a1t = _center_params(form)
    if r <= 0:
        raise ValueError("r must be positive")
    tmax = 4.0 * period_closed_form(form, r).T
    traj = integrate(form.to_field(), (r, 0.0), tmax, tol, zone=1, max_crossings=2)
    crossings = traj.crossings
    if len(crossings) < 2:
        raise IntegrationFailure(f"orbit from r={r} completed only {len(crossings)} crossings")
    return crossings[1].x


@dataclass(frozen=True)
class PeriodValue:
    r0: float
    T: float
    beta0: float

    def to_json(self) -> dict:
        return {"r0": self.r0, "T": self.T, "beta0": self.beta0}


# (2/3)^(5/3) pi^(3/2) sqrt(3) / (Gamma(2/3) Gamma(5/6))
_PERIOD_PREFACTOR = (
    (2.0 / 3.0) ** (5.0 / 3.0) * math.pi**1.5 * math.sqrt(3.0) / (math.gamma(2.0 / 3.0) * math.gamma(5.0 / 6.0))
)


def period_constant(form: CanonicalForm) -> float:
    """``beta0`` with ``T(r0) = beta0 r0^(-1/3)``.

    Negative cube roots follow the real branch, so ``-a1^(-1/3)`` is positive
    for ``a1 < 0``.
    """
    a1, b1, a1t = _center_params(form)
    return _PERIOD_PREFACTOR * (-1.0 / cbrt(a1) * cbrt(b1) ** -2 + 1.0 / cbrt(a1t))


def period_closed_form(form: CanonicalForm, r0: float) -> PeriodValue:
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    beta0 = period_constant(form)
    return PeriodValue(float(r0), beta0 / cbrt(r0), beta0)


def period_numeric(form: CanonicalForm, r0: float, tol: float = 1e-10) -> float:
    """Period as the sum of the two half-orbit time integrals.

    Above the axis ``dt = dx / (a1 y^2)`` with ``y^3 = 3 b1 (x^2 - r0^2) / (2 a1)``;
    below, ``dt = dx / (a1~ y^2)`` with ``y^3 = 3 (x^2 - r0^2) / (2 a1~)``.  Both
    integrands blow up like ``(r0 - |x|)^(-2/3)`` at the ends, which the
    double-exponential rule handles when fed the endpoint distances.
    """
    a1, b1, a1t = _center_params(form)
    if r0 <= 0:
        raise ValueError("r0 must be positive")

    def half(a: float, b: float) -> float:
        # |y|^2 = |3 b (r0 - x)(r0 + x) / (2 a)|^(2/3); the time to cross is
        # int dx / (|a| |y|^2) over [-r0, r0]
        scale = abs(3.0 * b / (2.0 * a))

        def integrand(x: float, d_lo: float, d_hi: float) -> float:
            return 1.0 / (abs(a) * (cbrt(scale) * cbrt(d_lo) * cbrt(d_hi)) ** 2)

        return tanh_sinh(integrand, -r0, r0, tol)

    return half(a1, b1) + half(a1t, 1.0)
