"""The ten acceptance criteria, each at its stated tolerance and time budget."""

import math
import os
import random
import subprocess
import sys
import time

from oracles import brute_exponents, quad_base_integral
from pwqh.algebra import CanonicalForm
from pwqh.center import center_report, numeric_return_map, period_closed_form, period_numeric
from pwqh.filippov import switching_analysis
from pwqh.melnikov import (
    descartes_variations,
    base_integral,
    exponent_set,
    melnikov_poly,
    positive_roots,
    realize_roots,
    xi_max,
)
from pwqh.portrait import CASE_COUNTS, classify_case, enumerate_cases
from pwqh.simulate import displacement, find_limit_cycles, integrate

REF = CanonicalForm("I", (-1, 1, 1))


def two_branch(n):
    """Published closed form for n >= 1 (odd and even branches)."""
    if n % 2:
        return 2 * ((n + 1) // 2) + (n - 1) // 2 - 1
    return 2 * (n // 2) + (n + 2) // 2 - 1


def center_triples(n, seed):
    rng = random.Random(seed)
    return [(-rng.uniform(0.2, 4), rng.uniform(0.2, 4), rng.uniform(0.2, 4)) for _ in range(n)]


def test_criterion_01_xi_table(criterion):
    t0 = time.perf_counter()
    card = all(xi_max(n) == len(brute_exponents(n, restrict_j=True)) - 1 for n in range(31))
    formula = all(xi_max(n) == two_branch(n) for n in range(1, 31))
    spots = [xi_max(n) for n in (1, 2, 3, 4)]
    dt = time.perf_counter() - t0
    ok = card and formula and spots == [1, 3, 4, 6] and dt < 1
    criterion(1, ok, f"cardinality={card} formula={formula} spots={spots} in {dt:.3f}s")
    assert ok


def test_criterion_02_exponent_sets(criterion):
    t0 = time.perf_counter()
    equal = all(brute_exponents(n, restrict_j=False) == brute_exponents(n, restrict_j=True) == set(exponent_set(n))
                for n in range(31))
    injective = True
    for n in range(31):
        pts = [(i, j) for i in range(0, n + 1, 2) for j in range(3) if i + j <= n]
        injective &= len({3 * i + 2 * j for i, j in pts}) == len(pts)
    dt = time.perf_counter() - t0
    ok = equal and injective and dt < 1
    criterion(2, ok, f"sets equal={equal} injective={injective} in {dt:.3f}s")
    assert ok


def test_criterion_03_center_suite(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for triple in center_triples(25, 31):
        form = CanonicalForm("I", triple)
        for r in (0.5, 1, 2, 5, 10):
            worst = max(worst, abs(numeric_return_map(form, r) - r))
    rng = random.Random(32)
    stops = set()
    closed = 0
    for _ in range(25):
        while True:
            triple = tuple(rng.choice([-1, 1]) * rng.uniform(0.2, 4) for _ in range(3))
            if not center_report(CanonicalForm("I", triple)).is_center:
                break
        f = CanonicalForm("I", triple).to_field()
        for x0, zone in (((1.0, 0.0), 1), ((1.0, 0.5), None)):
            traj = integrate(f, x0, 100.0, 1e-10, zone=zone, on_budget="stop")
            stops.add(traj.stop.kind if traj.stop else "none")
            if any(abs(e.x - 1.0) < 1e-3 and e.t > 0 for e in traj.crossings):
                closed += 1
    dt = time.perf_counter() - t0
    ok = worst < 1e-7 and closed == 0 and stops <= {"sliding-contact", "escape"} and dt < 60
    criterion(3, ok, f"max|P(r)-r|={worst:.2e} violating stops={sorted(stops)} closed={closed} in {dt:.1f}s")
    assert ok


def test_criterion_04_period_function(criterion):
    t0 = time.perf_counter()
    worst = scale = 0.0
    monotone = True
    for triple in center_triples(25, 41):
        form = CanonicalForm("I", triple)
        for r0 in (0.5, 1.0, 3.0, 10.0):
            closed = period_closed_form(form, r0).T
            worst = max(worst, abs(closed - period_numeric(form, r0)) / closed)
            scale = max(scale, abs(period_closed_form(form, 8 * r0).T - closed / 2) / closed)
        grid = [period_closed_form(form, 0.1 * 1.3**k).T for k in range(30)]
        monotone &= all(a > b for a, b in zip(grid, grid[1:]))
    t1 = period_closed_form(REF, 1.0).T
    dt = time.perf_counter() - t0
    ok = worst < 1e-8 and scale < 1e-10 and monotone and abs(t1 - 6.4206) < 1e-3 and dt < 30
    criterion(4, ok, f"rel err={worst:.1e} T(8r)/T(r)-1/2={scale:.1e} decreasing={monotone} T(1)={t1:.6f} in {dt:.2f}s")
    assert ok


def test_criterion_05_base_integrals(criterion):
    t0 = time.perf_counter()
    worst = max(abs(base_integral(k, j) - quad_base_integral(k, j))
                for k in range(7) for j in range(0, 13 - 2 * k))
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and dt < 5
    criterion(5, ok, f"max abs err={worst:.1e} over 2k+j<=12 in {dt:.2f}s")
    assert ok


def test_criterion_06_realization(criterion):
    t0 = time.perf_counter()
    m = melnikov_poly(REF, realize_roots(REF, 2, [1, 8, 27]))
    roots = [h for h, _ in positive_roots(m)]
    first = (m.exponents() == [0, 2, 4, 6] and descartes_variations(m) == 3 and len(roots) == 3
             and all(abs(a - b) <= 1e-9 * b for a, b in zip(roots, (1, 8, 27))))
    pool = [0.3, 1.0, 2.0, 5.0, 9.0, 17.0, 30.0, 64.0]
    trips = 0
    bad = 0
    for n in range(5):
        for size in range(xi_max(n) + 1):
            target = pool[:size]
            got = [h for h, _ in positive_roots(melnikov_poly(REF, realize_roots(REF, n, target)))]
            trips += 1
            if len(got) != size or any(abs(a - b) > 1e-9 * b for a, b in zip(got, target)):
                bad += 1
    dt = time.perf_counter() - t0
    ok = first and bad == 0 and dt < 10
    criterion(6, ok, f"{{1,8,27}} -> {[round(h, 9) for h in roots]}; {trips - bad}/{trips} roundtrips in {dt:.2f}s")
    assert ok


def test_criterion_07_melnikov_vs_simulation(criterion):
    t0 = time.perf_counter()
    spec = realize_roots(REF, 2, [1, 8, 27])
    m = melnikov_poly(REF, spec)
    zeros = find_limit_cycles(REF, spec, 1e-3, (0.2, 60.0), grid=40)
    near = len(zeros) == 3 and all(abs(z - t) < 0.1 * t for z, t in zip(zeros, (1, 8, 27)))

    def ratio(h, eps):
        return displacement(REF, spec, h, eps, tol=1e-13).d / eps

    # kappa from a Richardson-extrapolated ratio at the probe level
    probe = 4.0
    kappa = (2 * ratio(probe, 2.5e-5) - ratio(probe, 5e-5)) / m(probe)
    ladder = (1e-4, 5e-5, 2.5e-5, 1.25e-5)
    orders = {}
    for h in (0.5, 3.0, 15.0, 40.0):
        errs = [abs(ratio(h, eps) - kappa * m(h)) for eps in ladder]
        orders[h] = math.log2(errs[-2] / errs[-1])
    dt = time.perf_counter() - t0
    ok = near and min(orders.values()) >= 0.95 and dt < 600
    shown = ", ".join(f"h={h:g}:{p:.3f}" for h, p in orders.items())
    criterion(7, ok, f"zeros={[round(z, 4) for z in zeros]} kappa={kappa:.8f} order[{shown}] in {dt:.1f}s")
    assert ok


def test_criterion_08_classification(criterion):
    t0 = time.perf_counter()
    counts = {v: len(enumerate_cases(v)) for v in ("I", "II", "III")}
    rows = (classify_case(CanonicalForm("III", (-1, -1, -1, 3))).case_id,
            classify_case(CanonicalForm("III", (1, -1, -1, 3))).case_id)
    rng = random.Random(8)
    disagree = 0
    for _ in range(1000):
        v = rng.choice(["I", "II", "III"])
        form = CanonicalForm(v, tuple(rng.choice([-1, 1]) * rng.uniform(0.1, 4) for _ in range(3 if v == "I" else 4)))
        disagree += classify_case(form).has_center != center_report(form).is_center
    dt = time.perf_counter() - t0
    ok = counts == {"I": 8, "II": 64, "III": 36} == CASE_COUNTS and rows == (1, 25) and disagree == 0 and dt < 5
    criterion(8, ok, f"counts={counts} rows={rows} has_center mismatches={disagree} in {dt:.2f}s")
    assert ok


def expected_sets(variant, params):
    if variant == "III":
        return {"crossing": {"kind": "empty"}, "sliding": {"kind": "axis"}, "singular": {"kind": "axis"}}
    if params[1] > 0:
        return {"crossing": {"kind": "axis-minus-points", "excluded": [0]},
                "sliding": {"kind": "points", "points": [0]}, "singular": {"kind": "points", "points": [0]}}
    return {"crossing": {"kind": "empty"}, "sliding": {"kind": "axis"}, "singular": {"kind": "points", "points": [0]}}


def test_criterion_09_filippov_sets(criterion):
    rng = random.Random(9)
    forms = []
    for k in range(200):
        v = ("I", "II", "III")[k % 3]
        forms.append((v, tuple(rng.choice([-1, 1]) * rng.uniform(0.1, 5) for _ in range(3 if v == "I" else 4))))
    t0 = time.perf_counter()
    mismatches = 0
    for v, p in forms:
        got = switching_analysis(CanonicalForm(v, p).to_field()).to_json()
        mismatches += any(got[key] != val for key, val in expected_sets(v, p).items())
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 1
    criterion(9, ok, f"{200 - mismatches}/200 vectors match in {dt:.3f}s")
    assert ok


CLI_RUNS = [
    ["analyze", "--params", "-1,1,1"],
    ["center", "--params", "-1,1,1"],
    ["melnikov", "--params", "-1,1,1", "--spec", "{spec}"],
    ["realize", "--params", "-1,1,1", "--n", "2", "--roots", "1,8,27"],
    ["cycles", "--params", "-1,1,1", "--spec", "{spec}", "--eps", "1e-3", "--h-range", "0.2,60", "--grid", "20"],
    ["portrait", "--params", "-1,1,1", "--grid", "6"],
    ["simulate", "--params", "-1,1,1", "--x0", "1,0.5", "--tmax", "20"],
    ["xi-max", "--n", "7"],
]


def test_criterion_10_cli_determinism(criterion, tmp_path):
    spec = tmp_path / "spec.json"
    env = {**os.environ, "PYTHONHASHSEED": "random"}
    make = subprocess.run([sys.executable, "-m", "pwqh", *CLI_RUNS[3]], capture_output=True, check=True)
    spec.write_bytes(make.stdout)
    t0 = time.perf_counter()
    differing = []
    for argv in CLI_RUNS:
        argv = [a.format(spec=spec) for a in argv]
        outs = [subprocess.run([sys.executable, "-m", "pwqh", *argv], capture_output=True, env=env) for _ in range(2)]
        if outs[0].returncode != 0 or outs[0].stdout != outs[1].stdout or not outs[0].stdout:
            differing.append(argv[0])
    dt = time.perf_counter() - t0
    ok = not differing
    criterion(10, ok, f"{len(CLI_RUNS) - len(differing)}/{len(CLI_RUNS)} subcommands byte-identical in {dt:.1f}s")
    assert ok
