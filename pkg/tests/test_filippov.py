import random

import pytest

from pwqh.algebra import BiPoly, CanonicalForm, PiecewiseField
from pwqh.filippov import sigma_at, switching_analysis


def field(up_p, up_q, lo_p, lo_q):
    return PiecewiseField(BiPoly(up_p), BiPoly(up_q), BiPoly(lo_p), BiPoly(lo_q))


def random_form(rng, variant):
    n = {"I": 3, "II": 4, "III": 4}[variant]
    return CanonicalForm(variant, tuple(rng.choice([-1, 1]) * rng.uniform(0.1, 5) for _ in range(n)))


def test_form_one_crossing_when_b1_positive():
    a = switching_analysis(CanonicalForm("I", (-1, 1, 1)).to_field())
    assert a.crossing.kind == "axis-minus-points"
    assert [r.value for r in a.crossing.excluded] == [0.0]
    assert a.sliding.kind == "points" and a.sliding.point_values == [0.0]
    assert a.singular_points == [0.0]
    assert a.boundary_equilibria.point_values == [0.0]


def test_form_one_slides_everywhere_when_b1_negative():
    a = switching_analysis(CanonicalForm("I", (-1, -1, 1)).to_field())
    assert a.crossing.kind == "empty"
    assert a.sliding.kind == "axis"
    assert a.singular_points == [0.0]


def test_form_three_axis_is_singular():
    a = switching_analysis(CanonicalForm("III", (1.5, -2, 0.7, 3)).to_field())
    assert a.crossing.kind == "empty"
    assert a.sliding.kind == "axis"
    assert a.singular.kind == "axis"


def test_general_field_gives_intervals():
    # sigma = (x - 1)(x + 1): crossing off [-1, 1], no common zero of Q- - Q+ = 2
    a = switching_analysis(field({(0, 1): 1}, {(1, 0): 1, (0, 0): -1}, {(0, 1): 1}, {(1, 0): 1, (0, 0): 1}))
    assert a.crossing.kind == "intervals"
    assert a.crossing.describe() == "(-inf, -1) U (1, +inf)"
    assert a.sliding.describe() == "[-1, 1]"
    assert a.singular.kind == "empty"
    for x in (-3.0, -1.0000001, 1.0000001, 8.0):
        assert a.crossing.contains(x) and not a.sliding.contains(x)
    for x in (-1.0, 0.0, 0.999, 1.0):
        assert a.sliding.contains(x) and not a.crossing.contains(x)


def test_irrational_switching_points():
    # sigma = (x^2 - 2) * 1
    a = switching_analysis(field({(0, 1): 1}, {(2, 0): 1, (0, 0): -2}, {(0, 1): 1}, {(0, 0): 1}))
    edges = [i.hi for i in a.crossing.intervals if i.hi is not None]
    assert edges[0].value == pytest.approx(-(2**0.5), rel=1e-12)
    assert a.sliding.contains(0.0) and a.crossing.contains(1.5)


@pytest.mark.parametrize("variant", ["I", "II", "III"])
def test_sets_partition_axis_and_match_sigma_sign(variant):
    rng = random.Random(hash(variant) & 0xFFFF)
    for _ in range(30):
        f = random_form(rng, variant).to_field()
        a = switching_analysis(f)
        for _ in range(40):
            x = rng.uniform(-10, 10)
            s = sigma_at(f, x)
            assert a.crossing.contains(x) != a.sliding.contains(x)
            assert a.crossing.contains(x) == (s > 0)
        for x in a.singular_points:
            assert a.sliding.contains(x)


def test_closed_form_sets_on_random_parameters():
    """Crossing/sliding follow the sign of the cross-zone coefficient; the origin is the lone singular point."""
    rng = random.Random(11)
    for k in range(200):
        variant = ("I", "II", "III")[k % 3]
        form = random_form(rng, variant)
        a = switching_analysis(form.to_field())
        if variant == "III":
            assert (a.crossing.kind, a.sliding.kind, a.singular.kind) == ("empty", "axis", "axis")
            continue
        b = form.params[1]
        if b > 0:
            assert a.crossing.kind == "axis-minus-points"
            assert [r.value for r in a.crossing.excluded] == [0.0]
            assert a.sliding.point_values == [0.0]
        else:
            assert a.crossing.kind == "empty" and a.sliding.kind == "axis"
        assert a.singular_points == [0.0]
        assert a.boundary_equilibria.point_values == [0.0]


def test_time_rescaling_keeps_sets():
    f = CanonicalForm("II", (1.3, 2.0, -0.4, 0.8)).to_field()
    scaled = PiecewiseField(f.upper_P * 3.0, f.upper_Q * 3.0, f.lower_P * 0.5, f.lower_Q * 0.5)
    assert switching_analysis(f).to_json()["crossing"] == switching_analysis(scaled).to_json()["crossing"]
    assert switching_analysis(f).to_json()["sliding"] == switching_analysis(scaled).to_json()["sliding"]
