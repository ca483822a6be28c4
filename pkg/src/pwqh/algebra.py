"""Bivariate polynomials, weight vectors, canonical forms and first integrals.

A piecewise field is two polynomial vector fields glued along ``y = 0``; the
upper pair governs ``y >= 0`` and the lower pair ``y < 0``.  Every quadratic
quasi-homogeneous non-homogeneous piecewise field whose zones share one of the
raw monomial shapes reduces, by a scaling of ``x`` and of time, to one of the
families

    I:   upper (a1 y^2, b1 x),              lower (a1~ y^2, x)
    II:  upper (a2 x y, b21 x + b22 y^2),   lower (a2~ x y, x + y^2)
    III: upper (a31 x + a32 y^2, b3 y),     lower (a31~ x + y^2, y)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

from ._num import REL_TOL, STRUCTURAL_ZERO, Number, close, div, to_json_number
from .errors import (
    DomainError,
    NotQuadraticNonHomogeneous,
    NotQuasiHomogeneous,
    UnsupportedShape,
    ZeroField,
    ZeroParameter,
)

__all__ = [
    "BiPoly",
    "WeightVector",
    "PiecewiseField",
    "CanonicalForm",
    "TransformRecord",
    "FirstIntegral",
    "PARAM_NAMES",
    "minimal_weight_vector",
    "canonicalize",
    "first_integral",
]

WEIGHT_SEARCH_BOUND = 12


class BiPoly:
    """Sparse polynomial in two variables, keyed by exponent pairs ``(i, j)``."""

    __slots__ = ("_terms", "_fast")

    def __init__(self, terms: Mapping[tuple[int, int], Number] | Iterable | None = None):
        acc: dict[tuple[int, int], Number] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for key, c in items:
                i, j = int(key[0]), int(key[1])
                if i < 0 or j < 0:
                    raise ValueError(f"negative exponent ({i}, {j})")
                acc[(i, j)] = acc.get((i, j), 0) + c
        self._terms = MappingProxyType({k: v for k, v in sorted(acc.items()) if v != 0})
        self._fast = None

    @classmethod
    def from_triples(cls, triples: Iterable) -> BiPoly:
        return cls(((t[0], t[1]), t[2]) for t in triples)

    @classmethod
    def monomial(cls, i: int, j: int, c: Number = 1) -> BiPoly:
        return cls({(i, j): c})

    @property
    def terms(self) -> Mapping[tuple[int, int], Number]:
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int | None:
        """Total degree, or ``None`` for the zero polynomial."""
        if not self._terms:
            return None
        return max(i + j for i, j in self._terms)

    def coeff(self, i: int, j: int) -> Number:
        return self._terms.get((i, j), 0)

    def support(self, threshold: float = STRUCTURAL_ZERO) -> frozenset[tuple[int, int]]:
        return frozenset(k for k, c in self._terms.items() if abs(c) > threshold)

    def __call__(self, x, y):
        return sum((c * x**i * y**j for (i, j), c in self._terms.items()), 0)

    def fast(self) -> Callable[[float, float], float]:
        """Float evaluator compiled from the term list (used in hot loops)."""
        if self._fast is None:
            parts = []
            for (i, j), c in self._terms.items():
                mono = "*".join(["x"] * i + ["y"] * j)
                parts.append(f"{float(c)!r}*{mono}" if mono else f"{float(c)!r}")
            src = "lambda x, y: " + (" + ".join(parts) if parts else "0.0")
            self._fast = eval(src, {"__builtins__": {}})  # noqa: S307 - generated from floats only
        return self._fast

    def at_y0(self) -> list[Number]:
        """Coefficients (ascending in x) of the restriction to ``y = 0``."""
        deg = max((i for (i, j) in self._terms if j == 0), default=-1)
        out: list[Number] = [0] * (deg + 1)
        for (i, j), c in self._terms.items():
            if j == 0:
                out[i] = c
        return out

    def substitute_scale(self, sx: Number = 1, sy: Number = 1) -> BiPoly:
        """Polynomial ``p(sx * x, sy * y)``."""
        return BiPoly({(i, j): c * sx**i * sy**j for (i, j), c in self._terms.items()})

    def to_triples(self) -> list[list]:
        return [[i, j, to_json_number(c)] for (i, j), c in self._terms.items()]

    def __add__(self, other):
        if not isinstance(other, BiPoly):
            other = BiPoly({(0, 0): other})
        return BiPoly(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, BiPoly) else -other)

    def __mul__(self, other):
        if isinstance(other, BiPoly):
            acc = []
            for (i1, j1), c1 in self._terms.items():
                for (i2, j2), c2 in other._terms.items():
                    acc.append(((i1 + i2, j1 + j2), c1 * c2))
            return BiPoly(acc)
        return BiPoly({k: c * other for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "BiPoly(0)"
        body = " + ".join(f"{c}*x^{i}*y^{j}" for (i, j), c in self._terms.items())
        return f"BiPoly({body})"


X = BiPoly.monomial(1, 0)
Y = BiPoly.monomial(0, 1)


@dataclass(frozen=True)
class WeightVector:
    s1: int
    s2: int
    d: int

    def __post_init__(self):
        if min(self.s1, self.s2, self.d) < 1:
            raise ValueError(f"weight components must be positive: {self}")

    def holds(self, P: BiPoly, Q: BiPoly, threshold: float = STRUCTURAL_ZERO) -> bool:
        """Term-wise check of both scaling identities."""
        s1, s2, d = self.s1, self.s2, self.d
        return all(s1 * i + s2 * j == s1 + d - 1 for i, j in P.support(threshold)) and all(
            s1 * i + s2 * j == s2 + d - 1 for i, j in Q.support(threshold)
        )

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.s1, self.s2, self.d)


def minimal_weight_vector(
    P: BiPoly, Q: BiPoly, bound: int = WEIGHT_SEARCH_BOUND
) -> WeightVector | None:
    """Componentwise-minimal weight vector of ``(P, Q)``, or ``None``.

    Enumerates ``s1, s2 <= bound``; ``d`` is read off one monomial and then
    checked against every term.  When the admissible set has no componentwise
    minimum the smallest vector by ``(s1 + s2 + d, s1, s2)`` is returned.
    """
    if P.is_zero or Q.is_zero:
        raise ZeroField("weight vectors need P and Q both nonzero")
    sp, sq = P.support(), Q.support()
    if not sp or not sq:
        raise ZeroField("weight vectors need P and Q both nonzero")
    i0, j0 = min(sp)
    found = []
    for s1 in range(1, bound + 1):
        for s2 in range(1, bound + 1):
            d = s1 * i0 + s2 * j0 - s1 + 1
            if d < 1:
                continue
            w = WeightVector(s1, s2, d)
            if w.holds(P, Q):
                found.append(w)
    if not found:
        return None
    for w in found:
        if all(w.s1 <= o.s1 and w.s2 <= o.s2 and w.d <= o.d for o in found):
            return w
    return min(found, key=lambda w: (w.s1 + w.s2 + w.d, w.s1, w.s2))


@dataclass(frozen=True)
class PiecewiseField:
    upper_P: BiPoly
    upper_Q: BiPoly
    lower_P: BiPoly
    lower_Q: BiPoly

    def __post_init__(self):
        if self.upper_P.is_zero and self.upper_Q.is_zero:
            raise ZeroField("upper zone field is identically zero")
        if self.lower_P.is_zero and self.lower_Q.is_zero:
            raise ZeroField("lower zone field is identically zero")

    def zone(self, name: str) -> tuple[BiPoly, BiPoly]:
        if name == "upper":
            return self.upper_P, self.upper_Q
        if name == "lower":
            return self.lower_P, self.lower_Q
        raise ValueError(f"unknown zone {name!r}")

    def __call__(self, x, y):
        P, Q = self.zone("upper" if y >= 0 else "lower")
        return P(x, y), Q(x, y)

    def degree(self) -> int:
        return max(p.degree() or 0 for p in (self.upper_P, self.upper_Q, self.lower_P, self.lower_Q))

    def reversed(self) -> PiecewiseField:
        """The same field with time reversed in both zones."""
        return PiecewiseField(-self.upper_P, -self.upper_Q, -self.lower_P, -self.lower_Q)

    def time_scaled(self, upper: Number, lower: Number) -> PiecewiseField:
        return PiecewiseField(
            self.upper_P * upper, self.upper_Q * upper, self.lower_P * lower, self.lower_Q * lower
        )

    def perturbed(
        self, f_plus: BiPoly, g_plus: BiPoly, f_minus: BiPoly, g_minus: BiPoly, eps: float
    ) -> PiecewiseField:
        """``(P + eps f, Q + eps g)`` zone by zone."""
        if eps == 0:
            return self
        return PiecewiseField(
            self.upper_P + f_plus * eps,
            self.upper_Q + g_plus * eps,
            self.lower_P + f_minus * eps,
            self.lower_Q + g_minus * eps,
        )

    def to_json(self) -> dict:
        return {
            "upper": {"P": self.upper_P.to_triples(), "Q": self.upper_Q.to_triples()},
            "lower": {"P": self.lower_P.to_triples(), "Q": self.lower_Q.to_triples()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> PiecewiseField:
        try:
            up, lo = data["upper"], data["lower"]
            return cls(
                BiPoly.from_triples(up.get("P", [])),
                BiPoly.from_triples(up.get("Q", [])),
                BiPoly.from_triples(lo.get("P", [])),
                BiPoly.from_triples(lo.get("Q", [])),
            )
        except (KeyError, TypeError, IndexError, AttributeError) as exc:
            raise ValueError(f"malformed system JSON: {exc}") from exc


PARAM_NAMES = {
    "I": ("a1", "b1", "a1_tilde"),
    "II": ("a2", "b21", "b22", "a2_tilde"),
    "III": ("a31", "a32", "b3", "a31_tilde"),
}


@dataclass(frozen=True)
class CanonicalForm:
    variant: str
    params: tuple

    def __post_init__(self):
        if self.variant not in PARAM_NAMES:
            raise ValueError(f"unknown variant {self.variant!r}")
        names = PARAM_NAMES[self.variant]
        if len(self.params) != len(names):
            raise ValueError(f"form {self.variant} takes {len(names)} parameters, got {len(self.params)}")
        object.__setattr__(self, "params", tuple(self.params))
        for name, v in zip(names, self.params):
            if not math.isfinite(float(v)):
                raise ZeroParameter(f"parameter {name} is not finite")
            if v == 0:
                raise ZeroParameter(f"parameter {name} must be nonzero")

    @property
    def named(self) -> dict[str, Number]:
        return dict(zip(PARAM_NAMES[self.variant], self.params))

    def to_field(self) -> PiecewiseField:
        p = self.params
        xy, yy = X * Y, Y * Y
        if self.variant == "I":
            a1, b1, a1t = p
            return PiecewiseField(yy * a1, X * b1, yy * a1t, X)
        if self.variant == "II":
            a2, b21, b22, a2t = p
            return PiecewiseField(xy * a2, X * b21 + yy * b22, xy * a2t, X + yy)
        a31, a32, b3, a31t = p
        return PiecewiseField(X * a31 + yy * a32, Y * b3, X * a31t + yy, Y)

    def to_json(self) -> dict:
        return {"variant": self.variant, "params": {k: to_json_number(v) for k, v in self.named.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> CanonicalForm:
        variant = data["variant"]
        params = data["params"]
        if isinstance(params, Mapping):
            params = [params[name] for name in PARAM_NAMES[variant]]
        return cls(variant, tuple(params))


@dataclass(frozen=True)
class TransformRecord:
    """Change of variables taking the raw field to its canonical form.

    The canonical coordinates are ``X = x_scale * x`` and ``dtau = time_scale * dt``
    (applied to both zones).
    """

    shape: str
    x_scale: Number
    time_scale: Number
    original: PiecewiseField

    def apply(self, canonical: PiecewiseField) -> PiecewiseField:
        """Pull a canonical field back to the original coordinates."""
        sx, st = self.x_scale, self.time_scale
        inv_sx = div(1, sx)

        def back(P: BiPoly, Q: BiPoly):
            return P.substitute_scale(sx) * (st * inv_sx), Q.substitute_scale(sx) * st

        up = back(canonical.upper_P, canonical.upper_Q)
        lo = back(canonical.lower_P, canonical.lower_Q)
        return PiecewiseField(up[0], up[1], lo[0], lo[1])

    def to_json(self) -> dict:
        return {
            "shape": self.shape,
            "x_scale": to_json_number(self.x_scale),
            "time_scale": to_json_number(self.time_scale),
        }


_SHAPES = {
    "a": ({(0, 2)}, {(1, 0)}),
    "b": ({(1, 1)}, {(1, 0), (0, 2)}),
    "c": ({(1, 0), (0, 2)}, {(0, 1)}),
}
_SHAPE_TO_VARIANT = {"a": "I", "b": "II", "c": "III"}


def _zone_shape(P: BiPoly, Q: BiPoly, zone: str) -> str:
    w = minimal_weight_vector(P, Q)
    if w is None:
        raise NotQuasiHomogeneous(f"{zone} zone has no weight vector with s1, s2 <= {WEIGHT_SEARCH_BOUND}")
    n = max(P.degree() or 0, Q.degree() or 0)
    if n != 2:
        raise NotQuadraticNonHomogeneous(f"{zone} zone has degree {n}, expected 2")
    if WeightVector(1, 1, n).holds(P, Q):
        raise NotQuadraticNonHomogeneous(f"{zone} zone is homogeneous")
    sp, sq = P.support(), Q.support()
    for name, (allowed_p, allowed_q) in _SHAPES.items():
        if sp <= allowed_p and sq <= allowed_q:
            return name
    raise UnsupportedShape(f"{zone} zone monomials P{sorted(sp)} Q{sorted(sq)} match no raw shape")


def _coef(P: BiPoly, key: tuple[int, int], label: str) -> Number:
    c = P.coeff(*key)
    if abs(c) <= STRUCTURAL_ZERO:
        raise ZeroParameter(f"coefficient {label} is zero")
    return c


def canonicalize(f: PiecewiseField) -> tuple[CanonicalForm, TransformRecord]:
    """Reduce a raw shape (a)/(b)/(c) piecewise field to form I/II/III."""
    shape = _zone_shape(f.upper_P, f.upper_Q, "upper")
    lower_shape = _zone_shape(f.lower_P, f.lower_Q, "lower")
    if shape != lower_shape:
        raise UnsupportedShape(f"zones have different raw shapes ({shape} above, {lower_shape} below)")
    uP, uQ, lP, lQ = f.upper_P, f.upper_Q, f.lower_P, f.lower_Q
    if shape == "a":
        a1, b1 = _coef(uP, (0, 2), "a1"), _coef(uQ, (1, 0), "b1")
        a1t, b1t = _coef(lP, (0, 2), "a1~"), _coef(lQ, (1, 0), "b1~")
        params = (div(a1, b1t), div(b1, b1t), div(a1t, b1t))
        x_scale, time_scale = 1, b1t
    elif shape == "b":
        a2, b21, b22 = _coef(uP, (1, 1), "a2"), _coef(uQ, (1, 0), "b21"), _coef(uQ, (0, 2), "b22")
        a2t, b21t, b22t = _coef(lP, (1, 1), "a2~"), _coef(lQ, (1, 0), "b21~"), _coef(lQ, (0, 2), "b22~")
        params = (div(a2, b22t), div(b21, b21t), div(b22, b22t), div(a2t, b22t))
        x_scale, time_scale = div(b21t, b22t), b22t
    else:
        a31, a32, b3 = _coef(uP, (1, 0), "a31"), _coef(uP, (0, 2), "a32"), _coef(uQ, (0, 1), "b3")
        a31t, a32t, b3t = _coef(lP, (1, 0), "a31~"), _coef(lP, (0, 2), "a32~"), _coef(lQ, (0, 1), "b3~")
        params = (div(a31, b3t), div(a32, a32t), div(b3, b3t), div(a31t, b3t))
        x_scale, time_scale = div(b3t, a32t), b3t
    form = CanonicalForm(_SHAPE_TO_VARIANT[shape], params)
    return form, TransformRecord(shape, x_scale, time_scale, f)


@dataclass(frozen=True)
class FirstIntegral:
    zone: str
    branch: str  # "power" or "logarithmic"
    expression: str
    _fn: Callable[[float, float], float] = field(repr=False, compare=False)
    _domain: Callable[[float, float], bool] = field(repr=False, compare=False)

    def in_domain(self, x: float, y: float) -> bool:
        return self._domain(x, y)

    def __call__(self, x: float, y: float) -> float:
        if not self._domain(x, y):
            raise DomainError(f"({x}, {y}) is outside the domain of {self.expression}")
        return self._fn(x, y)


def _everywhere(x, y):
    return True


def first_integral(form: CanonicalForm, zone: str) -> FirstIntegral:
    """Closed-form first integral of one zone of a canonical form.

    Form I is polynomial.  Forms II and III switch to a logarithmic expression
    on ``a2 = 2 b22`` / ``a2~ = 2`` and ``a31 = 2 b3`` / ``a31~ = 2`` (compared to
    relative 1e-12).  Form II needs ``x > 0``.  Form III needs ``y > 0`` above and
    ``y < 0`` below; the lower expressions use ``|y|``, which agrees with the
    textbook formula up to the branch choice and keeps them real.
    """
    if zone not in ("upper", "lower"):
        raise ValueError(f"unknown zone {zone!r}")
    upper = zone == "upper"
    v, p = form.variant, [float(c) for c in form.params]

    if v == "I":
        a1, b1, a1t = p
        a, b = (a1, b1) if upper else (a1t, 1.0)
        return FirstIntegral(
            zone, "power", f"{a}/3*y^3 - {b}/2*x^2",
            lambda x, y: a / 3.0 * y**3 - b / 2.0 * x * x, _everywhere,
        )

    if v == "II":
        a2, b21, b22, a2t = p
        a, b1_, b2_ = (a2, b21, b22) if upper else (a2t, 1.0, 1.0)

        def dom(x, y):
            return x > 0

        if close(a, 2.0 * b2_, REL_TOL):
            return FirstIntegral(
                zone, "logarithmic", f"(-{b1_}*x*ln x + {b2_}*y^2)/({b2_}*x)",
                lambda x, y: (-b1_ * x * math.log(x) + b2_ * y * y) / (b2_ * x), dom,
            )
        expo = 2.0 * b2_ / a
        return FirstIntegral(
            zone, "power", f"(-2*{b1_}*x + ({a}-2*{b2_})*y^2)/(x^{expo}*({a}-2*{b2_}))",
            lambda x, y: (-2.0 * b1_ * x + (a - 2.0 * b2_) * y * y) / (x**expo * (a - 2.0 * b2_)), dom,
        )

    a31, a32, b3, a31t = p
    a, c, b = (a31, a32, b3) if upper else (a31t, 1.0, 1.0)

    if upper:
        def dom(x, y):
            return y > 0
    else:
        def dom(x, y):
            return y < 0

    if close(a, 2.0 * b, REL_TOL):
        return FirstIntegral(
            zone, "logarithmic", f"-({c}*y^2*ln|y| - {b}*x)/({b}*y^2)",
            lambda x, y: -(c * y * y * math.log(abs(y)) - b * x) / (b * y * y), dom,
        )
    expo = a / b
    return FirstIntegral(
        zone, "power", f"(({a}-2*{b})*x + {c}*y^2)/(|y|^{expo}*({a}-2*{b}))",
        lambda x, y: ((a - 2.0 * b) * x + c * y * y) / (abs(y) ** expo * (a - 2.0 * b)), dom,
    )
