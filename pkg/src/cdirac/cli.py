"""Command-line front end (``python -m cdirac`` or ``cdirac``).

Exit codes: 0 success, 1 input error, 2 partial failure (per-point errors in
``analyze``, failed properties in ``verify``).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import catalog
from . import classify as cl
from . import dirac as dr
from . import report
from . import subspace as ss
from . import verify as vf
from .errors import CDiracError
from .field import analyze_grid, eval_field
from .fieldfile import FieldFileError, dump_field, load_field_file

EXIT_OK, EXIT_INPUT, EXIT_PARTIAL = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _floats(text, what):
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _ints(text, what):
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _env_tol():
    try:
        return ss.tol_from_env()
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _load_spec(args):
    if args.example and args.field:
        raise InputError("give either a field file or --example, not both")
    if args.example:
        try:
            spec = catalog.get(args.example).spec()
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    elif args.field:
        spec = load_field_file(args.field)
    else:
        raise InputError("a field file or --example NAME is required")
    return spec


def _tol(args, spec):
    if getattr(args, "tol", None) is not None:
        if not 0 < args.tol < 1:
            raise InputError("--tol must lie in (0, 1)")
        return args.tol
    env = _env_tol()
    if spec is not None:
        # a field's tol already defaults to CDIRAC_TOL when the file omits it
        return spec.tol
    return env or ss.BUILTIN_TOL


def _box(args, spec):
    if args.box is None:
        if spec.box is None:
            raise InputError("the field declares no box; pass --box")
        return np.array(spec.box)
    vals = _floats(args.box, "--box")
    m = spec.dim
    if len(vals) == 2:
        vals = vals * m
    if len(vals) != 2 * m:
        raise InputError(f"--box needs 2 or {2 * m} numbers (lo1,hi1,lo2,hi2,...)")
    box = np.array(vals).reshape(m, 2).T
    if np.any(box[0] >= box[1]):
        raise InputError("--box lower bounds must be below upper bounds")
    return box


def _point(args, spec):
    p = _floats(args.point, "--point")
    if len(p) != spec.dim:
        raise InputError(f"--point needs {spec.dim} coordinates, got {len(p)}")
    return np.array(p)


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# -- commands ----------------------------------------------------------------


def cmd_analyze(args):
    spec = _load_spec(args)
    tol = _tol(args, spec)
    box = _box(args, spec)
    res = _ints(args.res, "--res")
    res = res[0] if len(res) == 1 else res
    if args.h is not None and args.h <= 0:
        raise InputError("--h must be positive")
    rep = analyze_grid(spec, box, res, h=args.h, tol=tol, workers=args.workers)
    if args.format == "csv":
        text = report.grid_report_csv(rep, spec.coords)
    else:
        text = report.dumps(report.grid_report_dict(rep, spec.dim))
    _write(text, args.out)
    for p in rep.failed:
        print(f"{spec.name}: point {list(p.point)}: {p.error}", file=sys.stderr)
    summary = ", ".join(f"{t}: {st.count}" for t, st in rep.strata.items())
    print(
        f"{spec.name}: {rep.size} points; strata {{{summary}}}; "
        f"marginal {len(rep.marginal)}; failed {len(rep.failed)}",
        file=sys.stderr,
    )
    return EXIT_PARTIAL if rep.failed else EXIT_OK


def _mat(a):
    a = np.asarray(a)
    if a.size == 0:
        return "  (empty)"
    a = np.round(a, 6) + 0.0
    return np.array2string(a, precision=6, suppress_small=True, max_line_width=120, prefix="  ")


def cmd_classify(args):
    spec = _load_spec(args)
    tol = _tol(args, spec)
    p = _point(args, spec)
    L = eval_field(spec, p, tol)
    rec = dr.invariants(L)
    nf = cl.normal_form(L, check=False)
    coord = cl.tetra_coords(L)
    lines = [
        f"field: {spec.name}",
        f"point: {', '.join(f'{c}={v:g}' for c, v in zip(spec.coords, p))}",
        f"(r, s, k) = ({rec.r}, {rec.s}, {rec.k})",
        f"hat_order (s + 2k) = {coord.hat_order}",
        f"rank Δ = {rec.rank_delta}, rank D = {rec.rank_d}, rank Δ0 = {rec.rank_delta0}",
        f"marginal rank decision: {'yes' if rec.marginal else 'no'}",
        "B (real two-form, coordinate basis):",
        "  " + _mat(nf.B),
        f"Δ frame ({nf.delta.rank} columns):",
        "  " + _mat(nf.delta.basis),
        f"ω_Δ (presymplectic block, rank {np.linalg.matrix_rank(nf.omega_delta, tol=1e-7) if nf.delta.rank else 0}):",
        "  " + _mat(nf.omega_delta),
        f"CR block: complement N of dimension {nf.complement.rank}, T10 of dimension {nf.t10.rank}",
        "  " + _mat(nf.t10.basis),
        f"roundtrip residual: {nf.residual:.3e}",
    ]
    print("\n".join(lines))
    if nf.residual >= ss.CHECK_FACTOR * tol:
        print("warning: normal form does not reconstruct L within tolerance", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_verify(args):
    suites = args.suite or ["all"]
    dims = _ints(args.dims, "--dims")
    if not dims or any(d < 1 for d in dims):
        raise InputError("--dims must list positive integers")
    if args.seeds < 1:
        raise InputError("--seeds must be positive")
    results = vf.run(suites, args.seeds, dims)
    failures = 0
    out = [f"verify: seeds={args.seeds} dims={','.join(map(str, dims))}"]
    for suite, props in results.items():
        out.append(f"[{suite}]")
        for prop, (passed, total) in props.items():
            status = "PASS" if passed == total else "FAIL"
            failures += total - passed
            out.append(f"  {status} {prop}: {passed}/{total}")
    out.append(f"total failures: {failures}")
    _write("\n".join(out) + "\n", args.out)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_tetra(args):
    if args.triple:
        if args.field or args.example:
            raise InputError("give either --triple or a field, not both")
        if args.dim is None:
            raise InputError("--triple needs --dim")
        r, s, k = _triple(args.triple)
        m = args.dim
        err = dr.admissibility_error(m, r, s, k)
        if err:
            raise InputError(f"(r, s, k) = ({r}, {s}, {k}) is not admissible in dimension {m}: {err}")
        queried = [(r, s, k)]
    else:
        spec = _load_spec(args)
        tol = _tol(args, spec)
        m = spec.dim
        if args.point:
            coord = cl.tetra_coords(eval_field(spec, _point(args, spec), tol))
            queried = [(coord.r, coord.s, coord.k)]
        else:
            rep = analyze_grid(spec, _box(args, spec), args.res, tol=tol)
            queried = list(rep.strata)
    if args.out == "svg":
        text = report.tetra_svg(m, queried)
    else:
        text = report.dumps(report.tetra_document(m, queried))
    _write(text, args.output)
    for r, s, k in queried:
        print(f"({r}, {s}, {k}) admissible in dimension {m}, hat_order {s + 2 * k}", file=sys.stderr)
    return EXIT_OK


def _triple(text):
    vals = _ints(text, "--triple")
    if len(vals) != 3:
        raise InputError("--triple needs r,s,k")
    return tuple(vals)


def cmd_examples(args):
    if args.list or not args.emit:
        for name in catalog.names():
            e = catalog.get(name)
            print(f"{name:24s} dim {e.dim}  {e.summary}")
        return EXIT_OK
    try:
        entry = catalog.get(args.emit)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    text = dump_field(
        entry.spec(),
        provenance=entry.provenance + (f"Expected jump set: {entry.jump_set}.",),
        summary=f"{entry.name}: {entry.summary}",
    )
    _write(text, args.out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _add_field_args(p, box=True):
    p.add_argument("field", nargs="?", help="field file (YAML)")
    p.add_argument("--example", metavar="NAME", help="use a built-in example instead of a file")
    p.add_argument("--tol", type=float, help="rank tolerance (default: file, then CDIRAC_TOL, then 1e-9)")
    if box:
        p.add_argument("--box", help="lo,hi for every axis or lo1,hi1,...,lom,him (use --box=-1,1)")


def build_parser():
    parser = _Parser(prog="cdirac", description="Pointwise invariants and normal forms of complex Dirac structures.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("analyze", help="classify every point of a grid")
    _add_field_args(p)
    p.add_argument("--res", default="9", help="points per axis (N or N1,N2,...)")
    p.add_argument("--h", type=float, help="finite-difference step (default 1e-5(1+|p|))")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", help="normal form and tetrahedron coordinates at one point")
    _add_field_args(p, box=False)
    p.add_argument("--point", required=True, help="comma-separated coordinates")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="run seeded property suites")
    p.add_argument("--suite", action="append", choices=vf.SUITES + ("all",))
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--dims", default="2,3,4,5,6")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tetra", help="admissible (r, s, k) lattice with queried points")
    _add_field_args(p)
    p.add_argument("--triple", help="r,s,k")
    p.add_argument("--dim", type=int)
    p.add_argument("--point", help="evaluate the field at this point")
    p.add_argument("--res", type=int, default=5, help="grid resolution when no point is given")
    p.add_argument("--out", choices=("svg", "json"), default="json", help="document format")
    p.add_argument("--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_tetra)

    p = sub.add_parser("examples", help="list or emit built-in field files")
    p.add_argument("--list", action="store_true")
    p.add_argument("--emit", metavar="NAME")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FieldFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CDiracError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
