"""Command-line front end: ``hydrosym <subcommand> [options]``.

Each subcommand runs one verification suite and writes a report, JSON by
default::

    {"meta": {"gamma", "tol", "version", ...}, "checks": [{id, paper_ref, expected, got, tol, pass}, ...]}

The exit status is 0 exactly when every check passes; malformed options exit
with status 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from . import checks as C
from .exactalg import GaussRational, format_rational, parse_rational
from .family import recover_spectrum
from .scattering import density_shape, scattering_data

SUBCOMMANDS = ("verify-algebra", "spectrum", "radial", "action", "intertwiner", "scatter", "resolvent", "measure")


# ---------------------------------------------------------------------------
# option parsing


def parse_number(text: str) -> complex | float:
    """``"p/q"``, a decimal, or a Gaussian rational such as ``"2+i"``."""
    text = text.strip()
    try:
        return float(Fraction(text))
    except ValueError:
        pass
    g = GaussRational.parse(text)
    return complex(g) if not g.is_real() else float(g.re)


def parse_grid(text: str) -> List:
    """``"a,b,c"`` or the inclusive range ``"a:b:step"``."""
    text = text.strip()
    if not text:
        raise ValueError("empty grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be a:b:step, got {text!r}")
        a, b, step = (float(Fraction(p)) for p in parts)
        if step <= 0 or b < a:
            raise ValueError(f"empty range {text!r}")
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        return [a + i * step for i in range(n)]
    return [parse_number(t) for t in text.split(",") if t.strip()]


def _gamma_arg(text: str) -> Fraction:
    try:
        g = parse_rational(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"gamma must be a rational p/q, got {text!r}")
    if g <= 0:
        raise argparse.ArgumentTypeError("gamma must be positive")
    return g


def _tol_arg(text: str) -> float:
    t = float(text)
    if not 0 < t <= 1e-2:
        raise argparse.ArgumentTypeError("tol must lie in (0, 1e-2]")
    return t


def _grid_arg(text: str) -> list:
    try:
        return parse_grid(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _number_arg(text: str):
    try:
        return parse_number(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=_gamma_arg, default=Fraction(1), help="coupling gamma as p/q (default 1)")
    common.add_argument("--lmax", type=int, default=None, help="largest angular momentum")
    common.add_argument("--nmax", type=int, default=4, help="largest principal quantum number (spectrum)")
    common.add_argument("--lambda-grid", type=_grid_arg, default=None, dest="lambda_grid",
                        help="a,b,c or a:b:step")
    common.add_argument("--k-grid", type=_grid_arg, default=None, dest="k_grid", help="a,b,c or a:b:step")
    common.add_argument("--l", type=int, default=None, dest="ell", help="single angular momentum")
    common.add_argument("--lambda", type=_number_arg, default=None, dest="lam", help="single eigenvalue")
    common.add_argument("--tol", type=_tol_arg, default=None, help="override numerical tolerances")
    common.add_argument("--out", choices=("json", "csv"), default="json")
    common.add_argument("--outfile", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sample radii")

    parser = argparse.ArgumentParser(prog="hydrosym", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify-algebra": "exact brackets, Casimirs, centralizer, involutions, matrix family",
        "spectrum": "eigenvalues from definite Jantzen quotients",
        "radial": "radial series, closed forms, Wronskians, ODE residuals",
        "action": "R_- couplings against the closed-form action; twisted equivariance",
        "intertwiner": "singular-to-regular intertwiner ratios",
        "scatter": "Kodaira solutions and the Jost-type function a(k)",
        "resolvent": "Green's-function resolvent",
        "measure": "spectral density, limiting absorption, spectral projection",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "measure":
            p.add_argument("--projection", action="store_true",
                           help="also run the spectral-projection checks (about a minute)")
    return parser


# ---------------------------------------------------------------------------
# output


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return f"{x:.17g}"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats written to 17 significant digits and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, np.integer):
        return str(int(obj))
    if isinstance(obj, Fraction):
        return json.dumps(format_rational(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return _fmt_float(float(x))
    if isinstance(x, dict) or isinstance(x, list):
        return json.dumps(x, sort_keys=True, default=str)
    return "" if x is None else str(x)


def checks_csv(rows: Sequence[C.Check]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "paper_ref", "expected", "got", "tol", "pass"])
    for r in rows:
        d = r.as_dict()
        w.writerow([_cell(d[k]) for k in ("id", "paper_ref", "expected", "got", "tol", "pass")])
    return buf.getvalue()


def density_csv(fit) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "w_re", "w_im", "shape", "fitted_constant", "sign", "rel_residual"])
    for lam, wv in zip(fit.lams, fit.w):
        s = float(density_shape(lam, fit.gamma, fit.sign))
        res = abs(wv - 1j * fit.constant * s) / abs(wv)
        w.writerow([_fmt_float(x) for x in (lam, wv.real, wv.imag, s, fit.constant)] + [fit.sign, _fmt_float(res)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# suites


def _float_gamma(g: Fraction) -> float:
    return float(g)


def run(args) -> tuple:
    """Run one subcommand; returns (rows, extra report fields, csv override or None)."""
    g = args.gamma
    gf = _float_gamma(g)
    tol = args.tol
    extra, table = {}, None
    cmd = args.command
    if cmd == "verify-algebra":
        rows = C.algebra_checks(g)
    elif cmd == "spectrum":
        if args.nmax < 1:
            raise SystemExit("nmax must be at least 1")
        rep = recover_spectrum(g, args.nmax)
        rows = C.spectrum_checks(g, args.nmax, report=rep)
        extra["spectrum"] = rep.to_json_dict()
    elif cmd == "radial":
        if args.ell is not None or args.lam is not None:
            ell = args.ell if args.ell is not None else 0
            lam = args.lam if args.lam is not None else -gf * gf
            rows = C.radial_single(ell, lam, gf, tol or 1e-9, args.seed)
        else:
            kw = {}
            if args.lmax is not None:
                kw["ells"] = range(args.lmax + 1)
            if args.lambda_grid is not None:
                kw["lams"] = args.lambda_grid
            rows = C.radial_checks(gf, tol=tol or 1e-10, seed=args.seed, **kw)
    elif cmd == "action":
        ells = (args.ell,) if args.ell is not None else (
            tuple(range(1, args.lmax + 1)) if args.lmax else C.ACTION_ELLS)
        lams = (args.lam,) if args.lam is not None else (args.lambda_grid or C.ACTION_LAMBDAS)
        rows = C.action_checks(g, ells, lams, tol or 1e-8)
        if args.ell is None and args.lam is None:
            rows += C.equivariance_checks(g, tol=tol or 1e-8)
    elif cmd == "intertwiner":
        lams = args.lambda_grid or C.INTERTWINER_LAMBDAS
        rows = C.intertwiner_checks(g, args.lmax if args.lmax is not None else 3, lams, tol or 1e-6)
    elif cmd == "scatter":
        ks = [float(k) for k in args.k_grid] if args.k_grid else [0.5, 1.0, 2.0]
        rows = C.scatter_checks(gf, ks, tol)
        table = scattering_data([k * k for k in ks], gf).to_csv()
    elif cmd == "resolvent":
        lams = tuple(complex(x) for x in args.lambda_grid) if args.lambda_grid else (1 + 1j, 2 + 1j)
        rows = C.resolvent_checks(gf, lams, tol=tol)
    elif cmd == "measure":
        grid = [float(x) for x in args.lambda_grid] if args.lambda_grid else [0.25, 0.5, 1.0, 2.0, 4.0, 9.0]
        rows, fit = C.density_checks(gf, grid, tol or 1e-4)
        rows += C.absorption_checks(gf, grid if args.lambda_grid else (0.25, 1.0, 4.0), tol or 1e-4)
        if args.projection:
            rows += C.projection_rows(g)
        extra["density_fit"] = {"sign": fit.sign, "constant": fit.constant,
                                "max_rel_residual": fit.max_rel_residual}
        table = density_csv(fit)
    else:  # pragma: no cover - argparse restricts the choices
        raise SystemExit(2)
    return rows, extra, table


def report(args, rows, extra) -> dict:
    meta = {"gamma": format_rational(args.gamma), "tol": args.tol, "version": __version__,
            "command": args.command, "seed": args.seed}
    out = {"meta": meta, "checks": [r.as_dict() for r in rows],
           "summary": {"n_checks": len(rows), "n_failed": sum(not r.passed for r in rows)}}
    out.update(extra)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("lmax", "ell"):
        v = getattr(args, name)
        if v is not None and v < 0:
            parser.error(f"--{'l' if name == 'ell' else name} must be nonnegative")
    if args.lambda_grid is not None and not args.lambda_grid:
        parser.error("grids must be nonempty")
    rows, extra, table = run(args)
    if args.out == "json":
        text = dumps(report(args, rows, extra)) + "\n"
    else:
        text = table if table is not None else checks_csv(rows)
    if args.outfile:
        with open(args.outfile, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if C.all_passed(rows) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
