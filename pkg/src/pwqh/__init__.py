"""Analysis of planar piecewise-smooth quadratic quasi-homogeneous systems."""

from .algebra import (
    BiPoly,
    CanonicalForm,
    FirstIntegral,
    PiecewiseField,
    TransformRecord,
    WeightVector,
    canonicalize,
    first_integral,
    minimal_weight_vector,
)
from .center import CenterReport, PeriodValue, center_report, exact_return_maps, numeric_return_map
from .center import period_closed_form, period_numeric
from .errors import PwqhError
from .filippov import AxisSet, SwitchingAnalysis, sigma_at, switching_analysis
from .melnikov import (
    MelnikovPoly,
    PerturbationSpec,
    base_integral,
    descartes_variations,
    exponent_set,
    hat_coefficients,
    melnikov_poly,
    positive_roots,
    realize_roots,
    xi_max,
)
from .portrait import InfinityEquilibrium, PortraitCase, chart_transform, classify_case, infinity_equilibria
from .render import RenderOptions, render
from .simulate import DisplacementSample, Trajectory, displacement, find_limit_cycles, integrate

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
