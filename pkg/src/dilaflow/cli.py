"""Batch command line: analyze fields from JSON, emit JSON/CSV reports.

Exit codes: 0 = computed and every checked property held; 1 = computed
but a checked property failed (a non-converged limit, a failed
commutation, a rigidity counterexample); 2 = input or validation
error; 3 = numerical failure (integration breakdown, small divisor).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .algebra import PolyMap, VectorField
from .errors import NumericsError, ValidationError
from . import fixtures as fixtures_mod
from . import flow as flow_mod
from . import koenigs as koenigs_mod
from . import normalform as normalform_mod
from . import rigidity as rigidity_mod
from . import spectrum as spectrum_mod

_EPILOG = """\
exit codes:
  0  computed; all checked properties held
  1  computed; a checked property failed (non-converged limit,
     failed commutation, counterexample, non-unique linearization)
  2  input or validation error
  3  numerical failure (integration breakdown, small divisor)
"""


def _parse_complex_scalar(text: str, what: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ValidationError("%s must be 're' or 're,im', got %r" % (what, text))


def _parse_point(text: str) -> list:
    try:
        vals = [float(p) for p in text.split(",")]
    except ValueError:
        raise ValidationError("--z must be a comma list of numbers, got %r" % text)
    if not vals or len(vals) % 2:
        raise ValidationError(
            "--z interleaves re,im per coordinate, so it needs an even count"
        )
    return [complex(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]


def _emit(path, text: str) -> None:
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _json_text(d: dict) -> str:
    return json.dumps(d, indent=2) + "\n"


def _add_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--input",
        action="append",
        metavar="PATH",
        help="JSON input (vector field or polynomial map); repeatable where two are needed",
    )
    p.add_argument(
        "--fixture",
        metavar="NAME",
        help="built-in fixture instead of --input: %s" % ", ".join(fixtures_mod.NAMES),
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dilaflow",
        description="analyze, linearize and flow dilation-type vector fields",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="resonance and distortion report")
    _add_source_flags(p)
    p.add_argument("--tol", type=float, help="resonance tolerance (default 1e-9)")
    p.add_argument("--output", metavar="PATH")

    p = sub.add_parser("normalform", help="polynomial normalization")
    _add_source_flags(p)
    p.add_argument("--degree", type=int, default=normalform_mod.DEFAULT_DEGREE)
    p.add_argument("--tol", type=float, help="small-divisor tolerance (default 1e-9)")
    p.add_argument("--output", metavar="PATH")

    p = sub.add_parser(
        "flow",
        help="numeric trajectory CSV with --z; polynomial flow JSON without",
    )
    _add_source_flags(p)
    p.add_argument("--z", metavar="LIST", help="start point, interleaved re,im")
    p.add_argument("--t-max", type=float, default=5.0, dest="t_max")
    p.add_argument("--dt", type=float, help="uniform sampling step (default: accepted steps)")
    p.add_argument("--rtol", type=float, default=flow_mod.DEFAULT_RTOL)
    p.add_argument("--atol", type=float, default=flow_mod.DEFAULT_ATOL)
    p.add_argument("--tol", type=float, help="resonance tolerance for the polynomial flow")
    p.add_argument("--output", metavar="PATH")
    p.add_argument("--figure", metavar="PATH", help="render the trajectory to an image file")

    p = sub.add_parser("koenigs", help="rescaled-orbit limit verdict")
    _add_source_flags(p)
    p.add_argument("--z", metavar="LIST", help="probe point, interleaved re,im")
    p.add_argument("--t-max", type=float, default=koenigs_mod.DEFAULT_T_MAX, dest="t_max")
    p.add_argument("--dt", type=float, default=koenigs_mod.DEFAULT_DT)
    p.add_argument("--tol", type=float, default=koenigs_mod.DEFAULT_TOL)
    p.add_argument("--rtol", type=float, default=flow_mod.DEFAULT_RTOL)
    p.add_argument(
        "--output", metavar="PATH", help="report path; a .csv suffix writes the samples"
    )
    p.add_argument("--figure", metavar="PATH", help="render the samples to an image file")

    p = sub.add_parser(
        "rigidity",
        help="commutation, linear-element, uniqueness or coincidence check",
        description=(
            "The check is picked by the inputs: two vector fields run the "
            "coincidence check (--s0); a map plus a field runs commutation; "
            "one field with --t0 runs the linear-element check; one diagonal "
            "linear map runs unique linearizability."
        ),
    )
    _add_source_flags(p)
    p.add_argument("--t0", type=float, help="probe time for the linear-element check")
    p.add_argument("--s0", type=float, default=1.0, help="element time for coincidence")
    p.add_argument("--tol", type=float, help="deviation tolerance / linearity threshold")
    p.add_argument("--rtol", type=float, default=rigidity_mod.PROBE_RTOL)
    p.add_argument("--atol", type=float, default=rigidity_mod.PROBE_ATOL)
    p.add_argument("--seed", type=int, default=0, help="seed for the polydisc grid")
    p.add_argument("--output", metavar="PATH")

    p = sub.add_parser("fixtures", help="emit a built-in example as JSON")
    p.add_argument("--fixture", metavar="NAME", required=True)
    p.add_argument("--alpha1", metavar="C", default="-1", help="example1 leading eigenvalue")
    p.add_argument("--m", type=int, default=2, help="example1 monomial degree")
    p.add_argument("--a", metavar="C", default="1", help="nonlinear coefficient")
    p.add_argument("--output", metavar="PATH")

    return parser


def _load_sources(args) -> list:
    sources = []
    for path in args.input or []:
        with open(path) as f:
            data = json.load(f)
        if isinstance(data, dict) and "alpha" in data:
            sources.append(VectorField.from_json_dict(data))
        elif isinstance(data, dict) and "max_degree" in data:
            sources.append(PolyMap.from_json_dict(data))
        else:
            raise ValidationError(
                "%s: JSON is neither a vector field nor a polynomial map" % path
            )
    if getattr(args, "fixture", None):
        sources.append(fixtures_mod.get(args.fixture))
    if not sources:
        raise ValidationError("provide --input PATH or --fixture NAME")
    return sources


def _one_field(args) -> VectorField:
    sources = _load_sources(args)
    if len(sources) != 1 or not isinstance(sources[0], VectorField):
        raise ValidationError("this command takes exactly one vector field input")
    return sources[0]


def _point_for(args, field: VectorField) -> list:
    if not args.z:
        raise ValidationError("this command needs --z (interleaved re,im)")
    z = _parse_point(args.z)
    if len(z) != field.dimension:
        raise ValidationError(
            "--z has %d coordinates but the field has %d" % (len(z), field.dimension)
        )
    return z


def _cmd_spectrum(args) -> int:
    field = _one_field(args)
    tol = args.tol if args.tol is not None else spectrum_mod.DEFAULT_TOL
    report = spectrum_mod.analyze(field.alpha, tol)
    _emit(args.output, _json_text(report.to_json_dict()))
    return 0 if report.is_dilation else 1


def _cmd_normalform(args) -> int:
    field = _one_field(args)
    tol = args.tol if args.tol is not None else spectrum_mod.DEFAULT_TOL
    result = normalform_mod.solve(field, degree=args.degree, tol=tol)
    _emit(args.output, _json_text(result.to_json_dict()))
    return 0


def _cmd_flow(args) -> int:
    field = _one_field(args)
    if args.z is None:
        if args.figure:
            raise ValidationError("--figure needs a numeric trajectory; pass --z")
        tol = args.tol if args.tol is not None else spectrum_mod.DEFAULT_TOL
        tri = flow_mod.triangular_flow(field, tol=tol)
        _emit(args.output, _json_text(tri.to_json_dict()))
        return 0
    z = _point_for(args, field)
    if args.t_max <= 0:
        raise ValidationError("--t-max must be positive")
    t_eval = None
    if args.dt is not None:
        if args.dt <= 0:
            raise ValidationError("--dt must be positive")
        count = int(math.floor(args.t_max / args.dt + 1e-9))
        t_eval = [i * args.dt for i in range(count + 1)]
    traj = flow_mod.integrate(
        field, z, args.t_max, rtol=args.rtol, atol=args.atol, t_eval=t_eval
    )
    _emit(args.output, traj.to_csv())
    if args.figure:
        from . import plots

        plots.save_figure(plots.trajectory_figure(traj), args.figure)
    return 0


def _cmd_koenigs(args) -> int:
    field = _one_field(args)
    z = _point_for(args, field)
    result = koenigs_mod.limit(
        field, z, t_max=args.t_max, dt=args.dt, tol=args.tol, rtol=args.rtol
    )
    if args.output and args.output.lower().endswith(".csv"):
        _emit(args.output, result.samples_csv())
    else:
        _emit(args.output, _json_text(result.to_json_dict()))
    if args.figure:
        from . import plots

        plots.save_figure(plots.koenigs_figure(result), args.figure)
    return 0 if result.verdict == "converged" else 1


def _diagonal_of(p: PolyMap) -> list:
    n = p.dimension
    diag = [0j] * n
    for (j, k), c in p.terms.items():
        if sum(k) != 1 or k[j - 1] != 1:
            raise ValidationError(
                "unique-linearizability input must be a diagonal linear map"
            )
        diag[j - 1] = c
    return diag


def _cmd_rigidity(args) -> int:
    sources = _load_sources(args)
    if len(sources) > 2:
        raise ValidationError("rigidity takes at most two inputs")
    fields = [s for s in sources if isinstance(s, VectorField)]
    maps = [s for s in sources if isinstance(s, PolyMap)]

    if len(fields) == 2:
        tol = args.tol if args.tol is not None else 1e-8
        report = rigidity_mod.semigroups_coincide(
            fields[0],
            fields[1],
            s0=args.s0,
            tol=tol,
            rtol=args.rtol,
            atol=args.atol,
            seed=args.seed,
        )
        payload = {"check": "semigroups-coincide"}
        payload.update(report.to_json_dict())
        _emit(args.output, _json_text(payload))
        return 0 if report.verdict == "coincide" else 1

    if len(fields) == 1 and len(maps) == 1:
        tol = args.tol if args.tol is not None else 1e-8
        report = rigidity_mod.check_commutation(
            maps[0],
            fields[0],
            tol=tol,
            rtol=args.rtol,
            atol=args.atol,
            seed=args.seed,
        )
        payload = {"check": "commutation"}
        payload.update(report.to_json_dict())
        _emit(args.output, _json_text(payload))
        return 0 if report.passed else 1

    if len(fields) == 1:
        if args.t0 is None:
            raise ValidationError("the linear-element check needs --t0")
        threshold = args.tol if args.tol is not None else rigidity_mod.LINEARITY_THRESHOLD
        report = rigidity_mod.linear_element_check(
            fields[0], args.t0, threshold=threshold, rtol=args.rtol, atol=args.atol
        )
        payload = {"check": "linear-element"}
        payload.update(report.to_json_dict())
        _emit(args.output, _json_text(payload))
        return 0 if report.verdict == "all-linear" else 1

    # single polynomial map: unique linearizability of its diagonal
    tol = args.tol if args.tol is not None else spectrum_mod.DEFAULT_TOL
    report = rigidity_mod.unique_linearizability(_diagonal_of(maps[0]), tol)
    payload = {"check": "unique-linearizability"}
    payload.update(report.to_json_dict())
    _emit(args.output, _json_text(payload))
    return 0 if report.unique else 1


def _cmd_fixtures(args) -> int:
    obj = fixtures_mod.get(
        args.fixture,
        alpha1=_parse_complex_scalar(args.alpha1, "--alpha1"),
        m=args.m,
        a=_parse_complex_scalar(args.a, "--a"),
    )
    _emit(args.output, _json_text(obj.to_json_dict()))
    return 0


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "normalform": _cmd_normalform,
    "flow": _cmd_flow,
    "koenigs": _cmd_koenigs,
    "rigidity": _cmd_rigidity,
    "fixtures": _cmd_fixtures,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except NumericsError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print("error: invalid JSON input (%s)" % exc, file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
