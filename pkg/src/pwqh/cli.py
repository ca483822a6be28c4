"""Command-line front end.

Exit status: 0 on success, 1 when the library rejects the input on
mathematical grounds (error JSON on stderr), 2 for usage and I/O problems
(error JSON on stderr as well).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from .algebra import PARAM_NAMES, CanonicalForm, PiecewiseField, canonicalize, minimal_weight_vector
from .center import center_report, period_closed_form, period_numeric
from .errors import EmptyPoly, PwqhError
from .filippov import switching_analysis
from .melnikov import (
    PerturbationSpec,
    descartes_variations,
    melnikov_poly,
    positive_roots,
    realize_roots,
    xi_max,
)
from .portrait import classify_case
from .render import RenderOptions, render
from .simulate import find_limit_cycles, integrate

VALUE_FLAGS = {
    "--n", "--form", "--params", "--roots", "--eps", "--h-range", "--grid", "--out",
    "--tol", "--radius", "--x0", "--tmax", "--radii", "--spec", "--zone",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D401 - argparse hook
        raise UsageError(f"{self.prog}: {message}")


def _join_values(argv: Sequence[str]) -> list[str]:
    """Glue ``--flag value`` into ``--flag=value`` so values like ``-1,1,1`` are not read as flags."""
    out: list[str] = []
    it = iter(range(len(argv)))
    skip = False
    for k in it:
        if skip:
            skip = False
            continue
        tok = argv[k]
        if tok in VALUE_FLAGS and k + 1 < len(argv):
            out.append(f"{tok}={argv[k + 1]}")
            skip = True
        else:
            out.append(tok)
    return out


def _number(text: str):
    v = float(text)
    if not math.isfinite(v):
        raise UsageError(f"non-finite number {text!r}")
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def _numbers(text: str) -> list:
    try:
        return [_number(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _form(args) -> CanonicalForm:
    if args.params is None:
        raise UsageError("--params is required")
    variant = args.form
    params = _numbers(args.params)
    if len(params) != len(PARAM_NAMES[variant]):
        raise UsageError(f"form {variant} takes {len(PARAM_NAMES[variant])} parameters: {','.join(PARAM_NAMES[variant])}")
    return CanonicalForm(variant, tuple(params))


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n"


def _emit(text: str | bytes, out: str | None) -> None:
    data = text.encode("utf-8") if isinstance(text, str) else text
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


# -- subcommands ------------------------------------------------------------------


def cmd_analyze(args) -> str:
    if args.system:
        field = PiecewiseField.from_json(_read_json(args.system))
    else:
        field = _form(args).to_field()
    report: dict = {"system": field.to_json(), "weights": {}}
    for zone in ("upper", "lower"):
        P, Q = field.zone(zone)
        try:
            w = minimal_weight_vector(P, Q)
            report["weights"][zone] = None if w is None else list(w.as_tuple())
        except PwqhError as exc:
            report["weights"][zone] = exc.to_json()
    report["switching"] = switching_analysis(field).to_json()
    try:
        form, record = canonicalize(field)
    except PwqhError as exc:
        report["canonical"] = exc.to_json()
        return _dumps(report)
    report["canonical"] = {"form": form.to_json(), "transform": record.to_json()}
    report["center"] = center_report(form).to_json()
    report["case"] = classify_case(form).to_json()
    return _dumps(report)


def cmd_center(args) -> str:
    form = _form(args)
    report = center_report(form)
    out: dict = {"form": form.to_json(), "report": report.to_json()}
    if report.is_center:
        rows = []
        beta0 = None
        for r0 in _numbers(args.radii):
            closed = period_closed_form(form, r0)
            beta0 = closed.beta0
            quad = period_numeric(form, r0, args.tol)
            rows.append({"r0": r0, "T_closed": closed.T, "T_quad": quad, "rel_err": abs(closed.T - quad) / closed.T})
        out["beta0"] = beta0
        out["periods"] = rows
    return _dumps(out)


def _spec(args) -> PerturbationSpec:
    if not args.spec:
        raise UsageError("--spec is required (a perturbation JSON file, or - for stdin)")
    data = _read_json(args.spec)
    try:
        return PerturbationSpec.from_json(data)
    except (KeyError, TypeError, IndexError) as exc:
        raise UsageError(f"malformed perturbation JSON: {exc}") from exc


def cmd_melnikov(args) -> str:
    form = _form(args)
    spec = _spec(args)
    m = melnikov_poly(form, spec)
    try:
        roots = [{"h": h, "multiplicity": flag} for h, flag in positive_roots(m)]
    except EmptyPoly:
        roots = None
    out = m.to_json()
    out.update(
        {
            "s_coefficients": m.s_coefficients(),
            "variations": descartes_variations(m),
            "roots": roots,
            "xi_max": xi_max(spec.n),
        }
    )
    return _dumps(out)


def cmd_realize(args) -> str:
    form = _form(args)
    if args.n is None:
        raise UsageError("--n is required")
    roots = _numbers(args.roots) if args.roots else []
    return _dumps(realize_roots(form, args.n, roots).to_json())


def cmd_cycles(args) -> str:
    form = _form(args)
    spec = _spec(args)
    lo, hi = _numbers(args.h_range)
    zeros = find_limit_cycles(form, spec, args.eps, (lo, hi), args.grid, tol=args.tol)
    m = melnikov_poly(form, spec)
    try:
        predicted = [h for h, _ in positive_roots(m)]
    except EmptyPoly:
        predicted = []
    return _dumps({"eps": args.eps, "zeros": zeros, "melnikov_roots": predicted})


def cmd_portrait(args) -> bytes:
    form = _form(args)
    return render(form, RenderOptions(grid=args.grid, radius=args.radius))


def cmd_simulate(args) -> str:
    if args.system:
        field = PiecewiseField.from_json(_read_json(args.system))
    else:
        field = _form(args).to_field()
    x0 = _numbers(args.x0)
    if len(x0) != 2:
        raise UsageError("--x0 takes two numbers x,y")
    zone = {"auto": None, "upper": 1, "lower": -1}[args.zone]
    traj = integrate(field, x0, args.tmax, args.tol, zone=zone, on_budget="stop")
    return traj.to_csv()


def cmd_xi_max(args) -> str:
    if args.n is None or args.n < 0:
        raise UsageError("--n must be a nonnegative integer")
    return _dumps({"n": args.n, "xi_max": xi_max(args.n)})


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pwqh", description="Piecewise quadratic quasi-homogeneous system analysis.", allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_form(p, default="I"):
        p.add_argument("--form", choices=("I", "II", "III"), default=default)
        p.add_argument("--params", help="comma-separated parameters in canonical order")

    def with_out(p):
        p.add_argument("--out", help="output file (default: standard output)")

    p = sub.add_parser("analyze", help="weights, canonical form, switching sets", allow_abbrev=False)
    p.add_argument("system", nargs="?", help="system JSON file")
    with_form(p)
    with_out(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("center", help="center test and period function", allow_abbrev=False)
    with_form(p)
    p.add_argument("--radii", default="1,2,4,8")
    p.add_argument("--tol", type=float, default=1e-10)
    with_out(p)
    p.set_defaults(func=cmd_center)

    p = sub.add_parser("melnikov", help="Melnikov function of a perturbation", allow_abbrev=False)
    with_form(p)
    p.add_argument("--spec", help="perturbation JSON (as written by realize)")
    with_out(p)
    p.set_defaults(func=cmd_melnikov)

    p = sub.add_parser("realize", help="perturbation with prescribed Melnikov zeros", allow_abbrev=False)
    with_form(p)
    p.add_argument("--n", type=int)
    p.add_argument("--roots", default="")
    with_out(p)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("cycles", help="limit cycles of the perturbed system by simulation", allow_abbrev=False)
    with_form(p)
    p.add_argument("--spec")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--h-range", dest="h_range", default="0.2,60")
    p.add_argument("--grid", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-11)
    with_out(p)
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("portrait", help="SVG phase portrait", allow_abbrev=False)
    with_form(p)
    p.add_argument("--grid", type=int, default=12)
    p.add_argument("--radius", type=float, default=4.0)
    with_out(p)
    p.set_defaults(func=cmd_portrait)

    p = sub.add_parser("simulate", help="integrate one orbit (CSV)", allow_abbrev=False)
    p.add_argument("system", nargs="?", help="system JSON file")
    with_form(p)
    p.add_argument("--x0", required=True)
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--zone", choices=("auto", "upper", "lower"), default="auto")
    with_out(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("xi-max", help="maximal number of limit cycles for degree n", allow_abbrev=False)
    p.add_argument("--n", type=int)
    with_out(p)
    p.set_defaults(func=cmd_xi_max)
    return parser


def _fail(code: int, payload: dict) -> int:
    sys.stderr.write(_dumps(payload))
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_join_values(argv))
        result = args.func(args)
        _emit(result, args.out)
        return 0
    except PwqhError as exc:
        return _fail(1, exc.to_json())
    except UsageError as exc:
        return _fail(2, {"error": "UsageError", "message": str(exc)})
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        return _fail(2, {"error": "IOError", "message": str(exc)})
    except ValueError as exc:
        return _fail(2, {"error": "InvalidInput", "message": str(exc)})


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
