"""Command-line interface: ``rdlie <subcommand> [options]``.

Structured reports are JSON, sampled curves CSV; every float is written with
17 significant digits so identical inputs give byte-identical output.
Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 divergent tail (decay exponent at or below the threshold).
"""
from __future__ import annotations

import argparse
import math
import re
import sys

import numpy as np

from .exceptions import DivergentTailError, RDError
from .harish_chandra import envelope_ratio, xi_ray
from .lie_structure import build_root_datum, rd_threshold
from .polar import cartan_decompose, iwasawa, length, parse_matrix
from .rd_integral import divergence_scan, rd_constant
from .verify import run_verification

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_DIVERGENT = 0, 1, 2, 3


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def to_json(obj) -> str:
    """JSON with floats at 17 significant digits; inf becomes "infinite", nan null."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{to_json(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if math.isnan(obj):
            return "null"
        if math.isinf(obj):
            return '"infinite"'
        return fmt_float(obj + 0.0)  # no negative zero
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_group(text: str) -> int:
    match = re.fullmatch(r"sl(\d+)", text.strip().lower())
    if not match or int(match.group(1)) < 2:
        raise argparse.ArgumentTypeError(f"group must be sl<n> with n >= 2, got {text!r}")
    return int(match.group(1))


def positive_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def radii_list(text: str) -> list[float]:
    try:
        values = [positive_float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad radii list {text!r}") from exc
    if any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("radii must be strictly increasing")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdlie", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, group=True, numeric=False):
        p = sub.add_parser(name, help=help_text)
        if group:
            p.add_argument("--group", type=parse_group, required=True,
                           help="sl2, sl3" + ("" if numeric else " or sl<n>"))
        p.add_argument("--norm", choices=("killing", "trace"), default="killing")
        p.add_argument("--out", help="write output here instead of stdout")
        return p

    add("roots", "positive roots, multiplicities and threshold")
    add("threshold", "RD threshold dim(a) + 2r")
    p = add("polar", "Cartan and Iwasawa decompositions of a matrix", group=False)
    p.add_argument("--matrix", required=True, help='row-major JSON, e.g. "[[2,0],[0,0.5]]"')
    p = add("xi", "Xi along the ray t (1, 0, ..., -1) as CSV", numeric=True)
    p.add_argument("--t-max", type=positive_float, default=10.0)
    p.add_argument("--samples", type=positive_int, default=21)
    p.add_argument("--grid", type=positive_int, help="boundary points (sl2) or K-panel order (sl3)")
    p = add("rd-constant", "truncated RD integral with tail bound (JSON)", numeric=True)
    p.add_argument("--d", type=positive_float, required=True)
    p.add_argument("--radius", type=positive_float, default=20.0)
    p.add_argument("--grid", type=positive_int, help="radial Gauss points per annulus")
    p.add_argument("--C", type=positive_float, help="override the envelope constant")
    p.add_argument("--no-refine", action="store_true", help="skip the grid-refinement pass")
    p = add("divergence", "partial integrals at increasing radii (CSV)", numeric=True)
    p.add_argument("--d", type=positive_float, required=True)
    p.add_argument("--radii", type=radii_list, default=[10.0, 20.0, 40.0])
    p.add_argument("--grid", type=positive_int, help="radial Gauss points per annulus")
    p = add("verify", "seeded verification of the RD argument (sl2, JSON)", numeric=True)
    p.add_argument("--d", type=positive_float, default=4.0)
    p.add_argument("--trials", type=positive_int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--radius", type=positive_float, default=20.0)
    p.add_argument("--tol", type=positive_float, default=1e-8)
    return parser


def _require_numeric(n: int, allowed=(2, 3)) -> None:
    if n not in allowed:
        names = ", ".join(f"sl{k}" for k in allowed)
        raise ValueError(f"this command supports {names} only")


def _dispatch(args) -> tuple[str, int]:
    cmd = args.command
    if cmd == "polar":
        g = parse_matrix(args.matrix)
        datum = build_root_datum(g.shape[0], args.norm)
        triple = cartan_decompose(g)
        k, H_iw, n_part = iwasawa(g)
        out = triple.to_dict()
        out["length"] = length(g, datum)
        out["iwasawa"] = {"k": k, "H": H_iw.coords, "n": n_part}
        return to_json(out) + "\n", EXIT_OK
    datum = build_root_datum(args.group, args.norm)
    if cmd == "roots":
        return to_json(datum.to_dict()) + "\n", EXIT_OK
    if cmd == "threshold":
        value = rd_threshold(datum)
        return (str(int(value)) if value.is_integer() else fmt_float(value)) + "\n", EXIT_OK
    if cmd == "xi":
        _require_numeric(datum.n)
        kw = {}
        if args.grid:
            kw = {"points": args.grid} if datum.n == 2 else {"m": args.grid}
        ts = np.linspace(0.0, args.t_max, args.samples)
        samples = xi_ray(datum, ts, **kw)
        rows = [(t, s.xi_value, float(envelope_ratio(datum, s.H.coords, s.xi_value)))
                for t, s in zip(ts, samples)]
        return to_csv(["t", "xi", "envelope_ratio"], rows), EXIT_OK
    if cmd == "rd-constant":
        _require_numeric(datum.n)
        report = rd_constant(datum, args.d, args.radius, radial=args.grid, C=args.C,
                             refine=not args.no_refine)
        code = EXIT_DIVERGENT if report.divergent_tail else EXIT_OK
        return to_json(report.to_dict()) + "\n", code
    if cmd == "divergence":
        _require_numeric(datum.n)
        rows = divergence_scan(datum, args.d, args.radii, radial=args.grid)
        return to_csv(["radius", "partial_integral"],
                      [(r["radius"], r["partial_integral"]) for r in rows]), EXIT_OK
    if cmd == "verify":
        _require_numeric(datum.n, (2,))
        run = run_verification(args.seed, args.trials, args.d, args.radius, args.tol)
        return to_json(run.to_dict()) + "\n", EXIT_OK if run.passed else EXIT_VIOLATION
    raise ValueError(f"unknown command {cmd!r}")  # pragma: no cover


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = _dispatch(args)
    except DivergentTailError as exc:
        print(f"rdlie: divergent tail: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except (RDError, ValueError, NotImplementedError) as exc:
        print(f"rdlie: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
