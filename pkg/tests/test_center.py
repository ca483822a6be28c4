import random

import numpy as np
import pytest

from oracles import scipy_period
from pwqh.algebra import CanonicalForm
from pwqh.center import (
    center_report,
    exact_return_maps,
    numeric_return_map,
    period_closed_form,
    period_constant,
    period_numeric,
)
from pwqh.errors import NotACenter
from pwqh.simulate import integrate

# Frozen from the closed form; scipy QUADPACK and the tanh-sinh rule agree to ~1e-15.
PERIOD_AT_ONE = 6.420391306477853


def center_triples(n, seed):
    rng = random.Random(seed)
    return [(-rng.uniform(0.2, 4), rng.uniform(0.2, 4), rng.uniform(0.2, 4)) for _ in range(n)]


def test_reference_center():
    rep = center_report(CanonicalForm("I", (-1, 1, 1)))
    assert rep.is_center and rep.is_global and not rep.isochronous
    assert rep.to_json() == {"is_center": True, "reason": "FormIConditionMet", "global": True, "isochronous": False}


@pytest.mark.parametrize(
    "variant,params,reason",
    [
        ("I", (1, 1, 1), "FormICondFail"),
        ("I", (-1, -1, 1), "FormICondFail"),
        ("I", (-1, 1, -1), "FormICondFail"),
        ("II", (1, 1, 1, 1), "FormIINoCenter"),
        ("III", (1, 1, 1, 1), "FormIIINoCenter"),
    ],
)
def test_non_centers(variant, params, reason):
    form = CanonicalForm(variant, params)
    rep = center_report(form)
    assert not rep.is_center and rep.reason == reason
    with pytest.raises(NotACenter):
        period_closed_form(form, 1.0) if variant == "I" else exact_return_maps(form, 1.0)


def test_exact_return_map_is_identity():
    assert exact_return_maps(CanonicalForm("I", (-2, 0.5, 3)), 1.7) == (1.7, 1.7)


def test_numeric_return_map_on_log_grid():
    form = CanonicalForm("I", (-1.3, 0.7, 2.1))
    for r in np.geomspace(0.1, 100, 20):
        assert abs(numeric_return_map(form, float(r)) - r) < 1e-7


def test_period_at_one_is_frozen():
    form = CanonicalForm("I", (-1, 1, 1))
    assert period_closed_form(form, 1.0).T == pytest.approx(PERIOD_AT_ONE, rel=1e-14)
    assert abs(period_closed_form(form, 1.0).T - 6.4206) < 1e-3


def test_closed_form_matches_both_quadratures():
    for a1, b1, a1t in center_triples(10, 3):
        form = CanonicalForm("I", (a1, b1, a1t))
        assert period_constant(form) > 0
        for r0 in (0.3, 1.0, 4.0, 25.0):
            closed = period_closed_form(form, r0).T
            assert period_numeric(form, r0) == pytest.approx(closed, rel=1e-8)
            assert scipy_period(a1, b1, a1t, r0) == pytest.approx(closed, rel=1e-8)


def test_period_scaling_and_monotonicity():
    for triple in center_triples(10, 5):
        form = CanonicalForm("I", triple)
        radii = np.geomspace(0.05, 200, 40)
        T = [period_closed_form(form, float(r)).T for r in radii]
        assert all(a > b for a, b in zip(T, T[1:]))
        for r in (0.5, 1.0, 3.0):
            assert period_closed_form(form, 8 * r).T == pytest.approx(period_closed_form(form, r).T / 2, rel=1e-10)


def test_integrated_orbit_closes_after_one_period():
    form = CanonicalForm("I", (-1, 1, 1))
    T = period_closed_form(form, 1.0).T
    traj = integrate(form.to_field(), (1.0, 0.0), 2.01 * T, 1e-11, zone=1)
    cx = traj.crossings
    assert len(cx) == 4
    assert [e.x for e in cx] == pytest.approx([-1, 1, -1, 1], abs=1e-8)
    assert cx[1].t == pytest.approx(T, rel=1e-8) and cx[3].t == pytest.approx(2 * T, rel=1e-8)


@pytest.mark.parametrize("params", [(1, 1, 1), (-1, -1, 1), (-1, 1, -1), (2, 1, -0.5)])
def test_violating_triples_never_close(params):
    traj = integrate(CanonicalForm("I", params).to_field(), (1.0, 0.0), 60.0, 1e-10, zone=1, on_budget="stop")
    assert traj.stop is not None and traj.stop.kind in ("sliding-contact", "escape")
    assert not any(e.kind == "crossing" and abs(e.x - 1.0) < 1e-3 for e in traj.events)
