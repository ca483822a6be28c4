"""Poincare charts, equilibria at infinity and sign-case classification.

The classification is data, not analysis: the infinity types and the case
tables below restate published outcomes and are looked up by parameter signs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from .algebra import BiPoly, CanonicalForm
from .center import center_report
from .errors import DegenerateParameter

__all__ = [
    "ChartField",
    "InfinityEquilibrium",
    "PortraitCase",
    "chart_transform",
    "infinity_equilibria",
    "classify_case",
    "enumerate_cases",
    "CASE_COUNTS",
    "FORM_III_TABLE",
]


@dataclass(frozen=True)
class ChartField:
    chart: str
    u_dot: BiPoly
    z_dot: BiPoly

    def __call__(self, u: float, z: float) -> tuple[float, float]:
        return self.u_dot(u, z), self.z_dot(u, z)


def chart_transform(P: BiPoly, Q: BiPoly, chart: str, n: int | None = None) -> ChartField:
    """Field of one zone in the chart ``U1`` (x = 1/z, y = u/z), ``U2`` (x = u/z, y = 1/z) or ``U3``.

    The factor ``z^n`` clearing the denominators uses ``n`` = the field's
    degree unless given explicitly.  In ``U3`` the field is returned unchanged
    (with ``(u, z)`` standing for ``(x, y)``).
    """
    if chart == "U3":
        return ChartField("U3", P, Q)
    if n is None:
        n = max(P.degree() or 0, Q.degree() or 0)

    def cleared(poly: BiPoly) -> BiPoly:
        terms = {}
        for (i, j), c in poly.terms.items():
            if i + j > n:
                raise ValueError(f"monomial x^{i} y^{j} exceeds degree {n}")
            u_pow = j if chart == "U1" else i
            key = (u_pow, n - i - j)
            terms[key] = terms.get(key, 0) + c
        return BiPoly(terms)

    if chart not in ("U1", "U2"):
        raise ValueError(f"unknown chart {chart!r}")
    U, Z = BiPoly.monomial(1, 0), BiPoly.monomial(0, 1)
    p, q = cleared(P), cleared(Q)
    if chart == "U1":
        return ChartField("U1", q - U * p, -(Z * p))
    return ChartField("U2", p - U * q, -(Z * q))


@dataclass(frozen=True)
class InfinityEquilibrium:
    zone: str
    location: str  # "x-axis end" | "y-axis end" | "whole equator"
    type: str

    def to_json(self) -> dict:
        return {"zone": self.zone, "location": self.location, "type": self.type}


NODE = "node"
SADDLE = "saddle"
HYP_ELL = "hyperbolic+elliptic sectors"
ELL2_PAR1 = "two-elliptic-one-parabolic"
HYP2_PAR2 = "two-hyperbolic-two-parabolic"
HYP2_PAR4 = "two-hyperbolic-four-parabolic"
EQUATOR = "equator-of-singularities"


def _zone_params(form: CanonicalForm, zone: str) -> tuple:
    """Parameters of one zone with the lower zone's unit coefficients filled in."""
    p = form.params
    upper = zone == "upper"
    if form.variant == "I":
        return (p[0], p[1]) if upper else (p[2], 1)
    if form.variant == "II":
        return (p[0], p[1], p[2]) if upper else (p[3], 1, 1)
    return (p[0], p[1], p[2]) if upper else (p[3], 1, 1)


def infinity_equilibria(form: CanonicalForm) -> list[InfinityEquilibrium]:
    out = []
    for zone in ("upper", "lower"):
        zp = _zone_params(form, zone)
        if form.variant == "I":
            out.append(InfinityEquilibrium(zone, "x-axis end", NODE))
        elif form.variant == "II":
            a2, _b21, b22 = zp
            if b22 == a2:
                out.append(InfinityEquilibrium(zone, "whole equator", EQUATOR))
                continue
            gap = b22 - a2
            out.append(InfinityEquilibrium(zone, "x-axis end", SADDLE if gap * a2 > 0 else HYP_ELL))
            out.append(InfinityEquilibrium(zone, "y-axis end", SADDLE if gap * b22 < 0 else NODE))
        else:
            a31, _a32, b3 = zp
            prod = a31 * b3
            if prod < 0:
                kind = ELL2_PAR1
            elif prod <= 2 * b3 * b3:
                kind = HYP2_PAR2
            else:
                kind = HYP2_PAR4
            out.append(InfinityEquilibrium(zone, "x-axis end", kind))
    return out


@dataclass(frozen=True)
class PortraitCase:
    variant: str
    signature: tuple
    case_id: int
    infinity: tuple[InfinityEquilibrium, ...]
    has_center: bool

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "case_id": self.case_id,
            "signature": list(self.signature),
            "has_center": self.has_center,
            "infinity": [e.to_json() for e in self.infinity],
        }


def _sgn(v) -> str:
    return "+" if v > 0 else ("-" if v < 0 else "0")


# -- form I -------------------------------------------------------------------------

_FORM_I_ORDER = [("+", "+"), ("+", "-"), ("-", "-"), ("-", "+")]


def _form_i_signature(p) -> tuple:
    a1, b1, a1t = p
    return (_sgn(b1), _sgn(a1), _sgn(a1t))


def _form_i_case(sig: tuple) -> int:
    b1, a1, a1t = sig
    return (0 if b1 == "+" else 4) + _FORM_I_ORDER.index((a1, a1t)) + 1


# -- form II ------------------------------------------------------------------------

_THREE = ("+", "0", "-")
_TWO = ("+", "-")


def _form_ii_feasible(sig: tuple) -> bool:
    _b21, gap, b22, a2, a2t, a2t_gap = sig
    if b22 == "+" and a2 == "-" and gap != "+":
        return False
    if b22 == "-" and a2 == "+" and gap != "-":
        return False
    if a2t == "-" and a2t_gap != "-":
        return False
    return True


_FORM_II_CASES = {
    sig: idx + 1
    for idx, sig in enumerate(
        s for s in itertools.product(_TWO, _THREE, _TWO, _TWO, _TWO, _THREE) if _form_ii_feasible(s)
    )
}


def _form_ii_signature(p) -> tuple:
    a2, b21, b22, a2t = p
    return (_sgn(b21), _sgn(b22 - a2), _sgn(b22), _sgn(a2), _sgn(a2t), _sgn(a2t - 1))


# -- form III (table rows encoded verbatim) -----------------------------------------------

Row = Callable[[float, float, float, float], bool]


def _lower(kind: str) -> Callable[[float], bool]:
    return {
        "gt2": lambda t: t > 2,
        "in02": lambda t: 0 < t <= 2,
        "neg": lambda t: t < 0,
    }[kind]


def _row(a31: str, b3: str, rel: str | None, a32: str, lower: str) -> Row:
    sign_ok = {"+": lambda v: v > 0, "-": lambda v: v < 0}
    rel_ok = {
        None: lambda a, b: True,
        ">=": lambda a, b: a >= 2 * b,
        "<": lambda a, b: a < 2 * b,
        "<=": lambda a, b: a <= 2 * b,
        ">": lambda a, b: a > 2 * b,
    }[rel]
    low = _lower(lower)

    def match(x31, x32, y3, t31):
        return sign_ok[a31](x31) and sign_ok[b3](y3) and rel_ok(x31, y3) and sign_ok[a32](x32) and low(t31)

    return match


_LOWER_ORDER = ("gt2", "in02", "neg")
FORM_III_TABLE: list[tuple[str, str, str | None, str]] = (
    [("-", "-", ">=", a32) for a32 in ("-", "+")]
    + [("-", "-", "<", a32) for a32 in ("+", "-")]
    + [("+", "+", "<=", a32) for a32 in ("-", "+")]
    + [("+", "+", ">", a32) for a32 in ("-", "+")]
    + [("+", "-", None, a32) for a32 in ("-", "+")]
    + [("-", "+", None, a32) for a32 in ("-", "+")]
)
"""Row groups ``(a31, b3, a31 vs 2 b3, a32)``; each group spans three lower-zone ranges."""

_FORM_III_ROWS: list[Row] = [
    _row(a31, b3, rel, a32, lower) for (a31, b3, rel, a32) in FORM_III_TABLE for lower in _LOWER_ORDER
]


def _form_iii_signature(p) -> tuple:
    a31, a32, b3, a31t = p
    return (_sgn(a31), _sgn(b3), _sgn(a31 - 2 * b3), _sgn(a32), _sgn(a31t), _sgn(a31t - 2))


def _form_iii_case(p) -> int:
    a31, a32, b3, a31t = p
    hits = [i + 1 for i, row in enumerate(_FORM_III_ROWS) if row(a31, a32, b3, a31t)]
    if len(hits) != 1:
        raise DegenerateParameter(f"form III parameters {tuple(p)} match table rows {hits}")
    return hits[0]


CASE_COUNTS = {"I": 8, "II": len(_FORM_II_CASES), "III": len(_FORM_III_ROWS)}


def classify_case(form: CanonicalForm) -> PortraitCase:
    """Signed phase-portrait case of a canonical form.

    Form I cases 1-4 have ``b1 > 0`` and 5-8 ``b1 < 0``, each block ordered
    ``(a1, a1~)`` = ``(+,+), (+,-), (-,-), (-,+)``; case 4 is the center.
    Form II cases number the feasible sign vectors of
    ``(b21, b22 - a2, b22, a2, a2~, a2~ - 1)`` in lexicographic order with
    ``+`` before ``0`` before ``-``.  Form III cases are the table rows.
    """
    p = form.params
    if form.variant == "I":
        sig = _form_i_signature(p)
        case_id = _form_i_case(sig)
    elif form.variant == "II":
        sig = _form_ii_signature(p)
        if sig not in _FORM_II_CASES:  # pragma: no cover - unreachable for nonzero parameters
            raise DegenerateParameter(f"form II signature {sig} is not a listed case")
        case_id = _FORM_II_CASES[sig]
    else:
        sig = _form_iii_signature(p)
        case_id = _form_iii_case(p)
    return PortraitCase(
        form.variant, sig, case_id, tuple(infinity_equilibria(form)), center_report(form).is_center
    )


def _representatives(variant: str):
    """One parameter vector per realizable sign pattern (used for exhaustive counts)."""
    values = [-3.0, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0, 3.0]
    size = 3 if variant == "I" else 4
    for combo in itertools.product(values, repeat=size):
        yield CanonicalForm(variant, combo)


def enumerate_cases(variant: str) -> dict[int, CanonicalForm]:
    """First representative form found for every case id of ``variant``.

    The sample grid contains every sign and every table boundary value
    (``a2 = b22``, ``a2~ = 1``, ``a31 = 2 b3``, ``a31~ = 2``).
    """
    found: dict[int, CanonicalForm] = {}
    for form in _representatives(variant):
        cid = classify_case(form).case_id
        found.setdefault(cid, form)
    return dict(sorted(found.items()))
