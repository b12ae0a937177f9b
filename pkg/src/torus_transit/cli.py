"""Command line front end.

Exit codes: 0 success or affirmative finding, 1 negative or inconclusive
finding, 2 usage or input error.  Every JSON report carries the resolved
configuration under ``"config"``; CSV files carry it on their first line.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, algebra, certify as cert_mod, family, simulate
from . import io as tio
from .algebra import poly
from .certify import jsonable
from .errors import TorusTransitError
from .model import linear_part
from .rational import as_rational, format_rational

OK, NEGATIVE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(doc: dict, out: str | None = None) -> None:
    text = tio.dumps_json(jsonable(doc)) + "\n"
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def _positive(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"{value} must be positive")
    return n


def _nonnegative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"{value} must be >= 0")
    return n


def _matrix(text: str):
    """A matrix given inline as JSON or as a path to a JSON file."""
    path = Path(text)
    if not text.lstrip().startswith("[") and path.is_file():
        text = path.read_text()
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse matrix {text!r}: {exc}") from None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise UsageError("a matrix is a JSON list of rows")
    return algebra.as_matrix([[as_rational(x) for x in r] for r in rows])


def _integral(node):
    """Integral rationals as ints so integer inputs echo back unchanged."""
    if isinstance(node, (list, tuple)):
        return [_integral(v) for v in node]
    if isinstance(node, Fraction) and node.denominator == 1:
        return int(node)
    return node


def _point(text: str):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse point {text!r}") from None


# -- subcommands ---------------------------------------------------------------

def cmd_example(args) -> int:
    params = family.Theorem3Params(args.n, args.k, as_rational(args.lam))
    if args.perturb is not None:
        sys_ = family.build_perturbed(params, as_rational(args.perturb))
    else:
        sys_ = family.build_theorem3(params)
    report = family.theorem3_identities(params)
    config = {"n": args.n, "k": args.k, "lambda": format_rational(params.lam),
              "perturb": args.perturb}
    if args.out:
        Path(args.out).write_text(tio.dumps_system(sys_))
    _emit({
        "config": config,
        "system": tio.system_to_dict(sys_),
        "linear_part": linear_part(sys_),
        "identities": {c.name: {"lhs": c.lhs, "rhs": c.rhs, "ok": c.ok} for c in report.checks},
    })
    return OK if report.ok else NEGATIVE


def _assumption_config(args) -> dict:
    return {"system": args.system, "volume": args.volume, "base": args.base,
            "samples": args.samples, "seed": args.seed}


def cmd_analyze(args) -> int:
    sys_ = tio.load_system(args.system)
    assumptions = cert_mod.assumptions_for(sys_, args.volume, args.base, args.samples, args.seed)
    cert = cert_mod.certify(sys_, assumptions)
    _emit({"config": _assumption_config(args), "certificate": cert.to_dict()}, args.out)
    return OK if cert.transitive else NEGATIVE


def cmd_verify(args) -> int:
    sys_ = tio.load_system(args.system)
    check = cert_mod.verify_volume_preservation(sys_, args.samples, args.seed)
    _emit({"config": {"system": args.system, "samples": args.samples, "seed": args.seed},
           "volume_preservation": check.to_dict()}, args.out)
    return OK if check.ok else NEGATIVE


def cmd_simulate(args) -> int:
    sys_ = tio.load_system(args.system)
    config = {"system": args.system, "task": args.task, "seed": args.seed,
              "grid": args.grid, "backend": simulate._kernels.resolve_backend(args.backend)}
    if args.task == "uniformity":
        config["samples"] = args.samples
        rep = simulate.pushforward_uniformity(sys_, args.samples, args.grid, args.seed,
                                              args.backend)
        header = ["samples", "grid", "dof", "statistic", "threshold", "passed"]
        row = [rep.samples, rep.grid, rep.dof, rep.statistic, rep.threshold, rep.passed]
        code = OK if rep.passed else NEGATIVE
    else:
        start = None if args.start is None else _point(args.start)
        config.update(length=args.length, start=args.start)
        pts = simulate.orbit(sys_, simulate.OrbitConfig(args.length, args.seed, start),
                             args.backend)
        if args.orbit_out:
            with open(args.orbit_out, "w", newline="") as fh:
                tio.write_csv(fh, tio.orbit_header(sys_.n), tio.orbit_rows(pts), config)
        rep = simulate.coverage(pts, args.grid)
        header = ["length", "grid", "visited", "cells", "fraction"]
        row = [rep.length, rep.grid, rep.visited, rep.cells, rep.fraction]
        code = OK
    if args.out:
        with open(args.out, "w", newline="") as fh:
            tio.write_csv(fh, header, [row], config)
    tio.write_csv(sys.stdout, header, [row], config)
    return code


def cmd_surface(args) -> int:
    sys_ = tio.load_system(args.system)
    witness = None if args.witness is None else [as_rational(v) for v in args.witness.split(",")]
    frame = simulate.surface_frame(sys_, witness)
    samples = simulate.surface(sys_, args.grid, args.depth, frame.witness, args.select,
                               args.backend)
    config = {"system": args.system, "grid": args.grid, "depth": args.depth,
              "select": args.select, "witness": [format_rational(w) for w in frame.witness],
              "slab": [frame.k1, frame.k2],
              "backend": simulate._kernels.resolve_backend(args.backend)}
    header = tio.surface_header(sys_.n - 1)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            tio.write_csv(fh, header, tio.surface_rows(samples), config)
    else:
        tio.write_csv(sys.stdout, header, tio.surface_rows(samples), config)
    if args.residual:
        res = simulate.surface_invariance_residual(sys_, samples, frame.witness, args.backend)
        sys.stderr.write(f"residual {tio.fmt_float(res)}\n")
    return OK


def cmd_algebra(args) -> int:
    op = args.op
    config = {"op": op}
    if op == "divides":
        if args.file:
            doc = json.loads(Path(args.file).read_text())
            a, basis = _matrix(json.dumps(doc["matrix"])), doc["basis"]
        elif args.matrix and args.basis:
            a, basis = _matrix(args.matrix), json.loads(args.basis)
        else:
            raise UsageError("divides needs --file or both --matrix and --basis")
        basis = [[as_rational(x) for x in v] for v in basis]
        det_s, ok = algebra.restriction_determinant_divides(a, basis)
        _emit({"config": {**config, "matrix": _integral(a), "basis": _integral(basis)},
               "restriction_determinant": _integral(det_s), "divides": ok})
        return OK if ok else NEGATIVE
    if args.matrix is None:
        raise UsageError(f"algebra {op} needs --matrix")
    a = _matrix(args.matrix)
    config["matrix"] = a
    if op == "charpoly":
        cp = algebra.char_poly(a)
        _emit({"config": config, "coefficients": cp, "text": poly.format_poly(cp)})
    elif op == "compound":
        if args.m is None:
            raise UsageError("compound needs --m")
        config["m"] = args.m
        _emit({"config": config, "compound": algebra.compound_matrix(a, args.m)})
    elif op == "snf":
        snf = algebra.smith_normal_form(a)
        _emit({"config": config, "U": snf.U, "D": snf.D, "V": snf.V, "diagonal": snf.diagonal})
    elif op == "hyperplane":
        if args.eigen is None:
            raise UsageError("hyperplane needs --eigen")
        config["eigen"] = args.eigen
        w = algebra.transverse_invariant_hyperplane(a, args.eigen)
        _emit({"config": config, "witness": "none" if w is None else w})
        return NEGATIVE if w is None else OK
    elif op == "diag":
        mp = algebra.minimal_polynomial(a)
        ok = algebra.is_diagonalizable(a)
        _emit({"config": config, "minimal_polynomial": poly.to_integer(mp), "diagonalizable": ok})
        return OK if ok else NEGATIVE
    elif op == "pd":
        ok = algebra.positive_definite(a)
        _emit({"config": config, "leading_minors": algebra.leading_principal_minors(a),
               "positive_definite": ok})
        return OK if ok else NEGATIVE
    return OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torus-transit", description=(
        "Transitivity certificates and simulations for skew-product endomorphisms of the torus."))
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", help="build a conservative contracting-fiber system")
    ex.add_argument("--n", type=int, required=True)
    ex.add_argument("--k", type=int, required=True)
    ex.add_argument("--lambda", dest="lam", required=True, help='contracting slope "p/q"')
    ex.add_argument("--perturb", help='add "p/q" to the contracting slope (breaks conservativity)')
    ex.add_argument("--out", help="also write the bare system JSON here")
    ex.set_defaults(func=cmd_example)

    for name, func, hlp in (("analyze", cmd_analyze, "certify transitivity"),
                            ("verify", cmd_verify, "check volume preservation exactly")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("system", help="system JSON file")
        sp.add_argument("--samples", type=_positive, default=100)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out")
        if name == "analyze":
            sp.add_argument("--volume", choices=("verify", "declare", "unknown"), default="verify")
            sp.add_argument("--base", choices=("auto", "declare"), default="auto")
        sp.set_defaults(func=func)

    sm = sub.add_parser("simulate", help="orbit coverage or push-forward uniformity")
    sm.add_argument("system")
    sm.add_argument("--task", choices=("coverage", "uniformity"), default="coverage")
    sm.add_argument("--length", type=_positive, default=10 ** 6)
    sm.add_argument("--grid", type=_positive, default=100)
    sm.add_argument("--samples", type=_positive, default=10 ** 6)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--start", help="comma separated start point")
    sm.add_argument("--orbit-out", help="write the orbit as CSV")
    sm.add_argument("--out", help="write the summary row as CSV")
    sm.add_argument("--backend", choices=("numba", "numpy"))
    sm.set_defaults(func=cmd_simulate)

    sf = sub.add_parser("surface", help="fiberwise approximation of the invariant set")
    sf.add_argument("system")
    sf.add_argument("--grid", type=_positive, default=256)
    sf.add_argument("--depth", type=_nonnegative, default=40)
    sf.add_argument("--select", choices=("max", "min"))
    sf.add_argument("--witness", help='comma separated "p/q" hyperplane witness')
    sf.add_argument("--residual", action="store_true", help="report the invariance residual")
    sf.add_argument("--out")
    sf.add_argument("--backend", choices=("numba", "numpy"))
    sf.set_defaults(func=cmd_surface)

    al = sub.add_parser("algebra", help="exact matrix utilities")
    al.add_argument("op", choices=("charpoly", "compound", "snf", "hyperplane", "divides",
                                   "diag", "pd"))
    al.add_argument("--matrix", help='JSON rows, entries int or "p/q"; or a JSON file')
    al.add_argument("--m", type=int)
    al.add_argument("--eigen", type=int)
    al.add_argument("--basis", help="JSON list of basis vectors")
    al.add_argument("--file", help='JSON file with "matrix" and "basis"')
    al.set_defaults(func=cmd_algebra)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except (TorusTransitError, UsageError, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
