"""First-order Melnikov functions for polynomial perturbations of the form I center.

The unperturbed system is Hamiltonian in each zone with
``H+ = a1 y^3/3 - b1 x^2/2`` and ``H- = a1~ y^3/3 - x^2/2``.  Perturbing the
vector field by ``eps (f, g)`` with ``f = sum c_ij x^i y^j`` and
``g = sum d_ij x^i y^j`` (separately above and below) gives, at first order,
the change of ``H+`` over one revolution as ``eps M(h)`` where

    M(h) = sum over 2k + j <= n of xi[2k, j] h^(k + j/3 + 1/2).

Writing ``s = h^(1/3)`` turns ``M(h) / h^(1/2)`` into an ordinary polynomial in
``s`` whose monomial ``s^(3k + j)`` collects every ``xi[2k, j]`` with the same
``3k + j``; its positive roots are the candidate limit cycles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ._num import STRUCTURAL_ZERO, cbrt
from .algebra import BiPoly, CanonicalForm
from .errors import DegreeMismatch, DuplicateRoots, EmptyPoly, NotACenter, TooManyRoots
from .univariate import positive_roots as _isolate_positive
from .univariate import sign_variations

__all__ = [
    "PerturbationSpec",
    "MelnikovPoly",
    "base_integral",
    "hat_coefficients",
    "melnikov_poly",
    "exponent_set",
    "xi_max",
    "descartes_variations",
    "positive_roots",
    "realize_roots",
]

Coeffs = Mapping[tuple[int, int], float]


def _center_params(form: CanonicalForm) -> tuple[float, float, float]:
    if form.variant != "I":
        raise NotACenter(f"form {form.variant} has no center")
    a1, b1, a1t = (float(v) for v in form.params)
    if not (a1 < 0 < b1 and a1t > 0):
        raise NotACenter("the center condition a1 < 0, b1 > 0, a1~ > 0 fails")
    return a1, b1, a1t


@dataclass(frozen=True)
class PerturbationSpec:
    """Degree-``n`` perturbation ``(f+, g+)`` above and ``(f-, g-)`` below.

    ``c_*`` hold the coefficients of the horizontal component ``f`` and
    ``d_*`` those of the vertical component ``g``, keyed by ``(i, j)`` for
    ``x^i y^j``.
    """

    n: int
    c_plus: Coeffs
    c_minus: Coeffs
    d_plus: Coeffs
    d_minus: Coeffs

    def __post_init__(self):
        if self.n < 0:
            raise DegreeMismatch("degree must be nonnegative")
        for name in ("c_plus", "c_minus", "d_plus", "d_minus"):
            clean = {}
            for (i, j), c in dict(getattr(self, name)).items():
                i, j = int(i), int(j)
                if i < 0 or j < 0 or i + j > self.n:
                    raise DegreeMismatch(f"{name} index ({i}, {j}) outside 0 <= i + j <= {self.n}")
                if c != 0:
                    clean[(i, j)] = float(c)
            object.__setattr__(self, name, dict(sorted(clean.items())))

    @classmethod
    def zero(cls, n: int) -> PerturbationSpec:
        return cls(n, {}, {}, {}, {})

    def polys(self) -> tuple[BiPoly, BiPoly, BiPoly, BiPoly]:
        """``(f+, g+, f-, g-)`` in the order expected by ``PiecewiseField.perturbed``."""
        return BiPoly(self.c_plus), BiPoly(self.d_plus), BiPoly(self.c_minus), BiPoly(self.d_minus)

    def to_json(self) -> dict:
        def triples(m):
            return [[i, j, c] for (i, j), c in m.items()]

        return {
            "n": self.n,
            "c_plus": triples(self.c_plus),
            "c_minus": triples(self.c_minus),
            "d_plus": triples(self.d_plus),
            "d_minus": triples(self.d_minus),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> PerturbationSpec:
        def table(key):
            return {(int(t[0]), int(t[1])): float(t[2]) for t in data.get(key, [])}

        return cls(int(data["n"]), table("c_plus"), table("c_minus"), table("d_plus"), table("d_minus"))


def base_integral(k: int, j: int) -> float:
    """``int_0^1 x^(2k) (x^2 - 1)^(j/3) dx`` with the real cube root.

    Equals ``(-1)^j B(k + 1/2, j/3 + 1) / 2``; defined for ``k >= 0`` and
    ``j >= -2`` (negative ``j`` arise in the ``dy`` integrals and leave an
    integrable endpoint singularity).
    """
    if k < 0 or j < -2:
        raise ValueError(f"base integral needs k >= 0 and j >= -2, got ({k}, {j})")
    a, b = k + 0.5, j / 3.0 + 1.0
    beta = math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
    return (-1.0) ** (j % 2) * 0.5 * beta


def hat_coefficients(form: CanonicalForm, k: int, j: int) -> tuple[float, float, float, float]:
    """Scale factors turning each perturbation monomial into a power of ``h``.

    Returns ``(d+, c+, d-, c-)`` where, along the unperturbed orbit of level
    ``h``,

    * ``int_upper x^(2k) y^j dx = d+ h^(k + j/3 + 1/2)``
    * ``int_upper x^(2k+1) y^j dy = c+ h^(k + (j+1)/3 + 1/2)``

    and likewise ``d-``, ``c-`` for the lower arc.  ``j = -1`` is accepted so
    that the ``dy`` factor for the pairing ``(2k + 1, j - 1)`` is available for
    every ``j >= 0``.
    """
    a1, b1, a1t = _center_params(form)
    if k < 0 or j < -1:
        raise ValueError(f"hat coefficients need k >= 0 and j >= -1, got ({k}, {j})")
    up, lo = cbrt(3.0 / (2.0 * a1)), cbrt(3.0 / (2.0 * a1t))
    d_plus = d_minus = 0.0
    if j >= 0:
        i_d = base_integral(k, j)
        d_plus = -2.0 * up**j * b1 ** (-(k + 0.5)) * i_d
        d_minus = 2.0 * lo**j * b1 ** (-(k + j / 3.0 + 0.5)) * i_d
    i_c = base_integral(k + 1, j - 2)
    c_plus = -2.0 * (b1 / a1) * up ** (j - 2) * b1 ** (-(k + 1.5)) * i_c
    c_minus = 2.0 / a1t * lo ** (j - 2) * b1 ** (-(k + (j + 1) / 3.0 + 0.5)) * i_c
    return d_plus, c_plus, d_minus, c_minus


@dataclass(frozen=True)
class MelnikovPoly:
    """``M(h) = sum xi[(2k, j)] h^(k + j/3 + 1/2)``."""

    form_params: tuple[float, float, float]
    terms: Mapping[tuple[int, int], float]
    n: int

    def __call__(self, h: float) -> float:
        if h <= 0:
            raise ValueError("M is defined for h > 0")
        return sum(c * h ** (k2 / 2 + j / 3.0 + 0.5) for (k2, j), c in self.terms.items())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def s_coefficients(self) -> list[float]:
        """Coefficients of ``M(s^3) / s^(3/2)`` as a polynomial in ``s``, ascending."""
        if not self.terms:
            return []
        top = max(3 * (k2 // 2) + j for k2, j in self.terms)
        out = [0.0] * (top + 1)
        for (k2, j), c in self.terms.items():
            out[3 * (k2 // 2) + j] += c
        return out

    def exponents(self) -> list[int]:
        """Exponents of ``h^(1/6)`` after factoring ``h^(1/2)``; always even."""
        return sorted({2 * (3 * (k2 // 2) + j) for k2, j in self.terms})

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "exponents": self.exponents(),
            "xi": {f"({k2},{j})": c for (k2, j), c in self.terms.items()},
        }


def melnikov_poly(form: CanonicalForm, pert: PerturbationSpec) -> MelnikovPoly:
    a1, b1, a1t = _center_params(form)
    n = pert.n
    terms: dict[tuple[int, int], float] = {}
    for k in range(n // 2 + 1):
        for j in range(n - 2 * k + 1):
            d_hat_p, _, d_hat_m, _ = hat_coefficients(form, k, j)
            xi = pert.d_plus.get((2 * k, j), 0.0) * d_hat_p + b1 * pert.d_minus.get((2 * k, j), 0.0) * d_hat_m
            if j >= 1:
                key = (2 * k + 1, j - 1)
                cp, cm = pert.c_plus.get(key, 0.0), pert.c_minus.get(key, 0.0)
                if cp or cm:
                    _, c_hat_p, _, c_hat_m = hat_coefficients(form, k, j - 1)
                    xi -= cp * c_hat_p + b1 * cm * c_hat_m
            if abs(xi) >= STRUCTURAL_ZERO:
                terms[(2 * k, j)] = xi
    return MelnikovPoly((a1, b1, a1t), terms, n)


def exponent_set(n: int) -> list[int]:
    """Distinct ``3i + 2j`` over even ``i``, ``0 <= j < 3`` and ``i + j <= n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return sorted({3 * i + 2 * j for i in range(0, n + 1, 2) for j in range(3) if i + j <= n})


def xi_max(n: int) -> int:
    """Largest number of limit cycles reachable at first order for degree ``n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n % 2:
        return 2 * ((n + 1) // 2) + (n - 1) // 2 - 1
    return 2 * (n // 2) + (n + 2) // 2 - 1


def descartes_variations(coeffs: Sequence[float] | MelnikovPoly) -> int:
    """Sign changes of a coefficient sequence ordered by ascending exponent."""
    if isinstance(coeffs, MelnikovPoly):
        coeffs = coeffs.s_coefficients()
    return sign_variations(coeffs)


def positive_roots(m: MelnikovPoly) -> list[tuple[float, str]]:
    """Positive zeros of ``M`` as ``(h, "simple" | "unknown")``, ascending."""
    coeffs = m.s_coefficients()
    if not any(coeffs):
        raise EmptyPoly("the Melnikov function is identically zero")
    out = []
    for r in _isolate_positive(coeffs):
        s = r.value
        out.append((s * s * s, "simple" if r.simple else "unknown"))
    return out


def realize_roots(form: CanonicalForm, n: int, roots_h: Iterable[float]) -> PerturbationSpec:
    """A degree-``n`` perturbation whose Melnikov function vanishes exactly at ``roots_h``.

    Only the upper vertical coefficients ``d+[2k, j]`` (``j < 3``) are used:
    each feeds exactly one power ``s^(3k + j)`` through the nonzero factor
    ``d+hat``, so prescribing the monic polynomial ``prod (s - h_i^(1/3))``
    fixes them uniquely.
    """
    _center_params(form)
    roots = [float(h) for h in roots_h]
    if any(not (h > 0 and math.isfinite(h)) for h in roots):
        raise ValueError("target roots must be positive and finite")
    if len(set(roots)) != len(roots):
        raise DuplicateRoots("target roots must be distinct")
    if len(roots) > xi_max(n):
        raise TooManyRoots(f"{len(roots)} roots requested but degree {n} allows at most {xi_max(n)}")
    poly = [1.0]
    for h in sorted(roots):
        s = cbrt(h)
        nxt = [0.0] * (len(poly) + 1)
        for e, c in enumerate(poly):
            nxt[e + 1] += c
            nxt[e] -= s * c
        poly = nxt
    d_plus = {}
    for e, c in enumerate(poly):
        k, j = divmod(e, 3)
        if 2 * k + j > n:  # pragma: no cover - excluded by the xi_max bound
            raise TooManyRoots(f"power s^{e} is not reachable at degree {n}")
        if c != 0.0:
            d_plus[(2 * k, j)] = c / hat_coefficients(form, k, j)[0]
    return PerturbationSpec(n, {}, {}, d_plus, {})
