"""Command-line surface: sampling, fields, integrals, capacity, verification.

Machine-readable outputs only (CSV / canonical JSON / binary PGM); identical
invocations produce byte-identical files. Exit codes: 0 success or all
criteria PASS, 1 verification FAIL, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

import numpy as np

from . import __version__
from .capacity import (
    GridSolverConfig,
    annulus_condenser,
    cusp_test_energy,
    grid_capacity,
    tip_capacity_experiment,
)
from .distortion import cusp_jacobian, distortion, fit_growth_envelope
from .errors import ToolkitError
from .io_formats import csv_text, json_text, write_pgm
from .maps import (
    MapChain,
    PlanePoint,
    PolarPoint,
    apply_chain,
    apply_chain_inv,
    boundary_image_trace,
)
from .profile import ProfileParams
from .quadrature import AnnularScheme, distortion_exp_integral, distortion_power_integral
from .verify import run_suite

__all__ = ["main"]


def _parse_theta(text: str) -> float:
    """Angles like '1.2', 'pi', '3pi/4', '-pi/2'."""
    s = text.strip().replace(" ", "")
    if "pi" not in s:
        return float(s)
    m = re.fullmatch(r"([+-]?\d*\.?\d*)pi(?:/(\d*\.?\d+))?", s)
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
    coef = m.group(1)
    num = float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0)
    den = float(m.group(2)) if m.group(2) else 1.0
    return num * math.pi / den


def _parse_points(text: str):
    pts = []
    for chunk in text.split(";"):
        coords = chunk.split(",")
        if len(coords) != 2:
            raise argparse.ArgumentTypeError(f"point {chunk!r} is not 'x1,x2'")
        pts.append(PlanePoint(float(coords[0]), float(coords[1])))
    return pts


def _parse_floats(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


def _chain_from(args) -> MapChain:
    params = ProfileParams(cg=args.cg)
    if getattr(args, "chain", None):
        return MapChain.from_tokens(args.chain.split(","), params)
    return MapChain(params)


def _emit(args, text: str) -> None:
    if args.out and args.out != "-":
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fold_config(argv):
    """Pre-scan for --config and splice key=value pairs in as trailing flags.

    Explicit command-line flags win; boolean keys take true/false values.
    """
    if "--config" not in argv:
        return argv
    path = argv[argv.index("--config") + 1]
    extra = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            flag = "--" + key.strip().replace("_", "-")
            if flag in argv or any(a.startswith(flag + "=") for a in argv):
                continue
            value = value.strip()
            if value.lower() in ("true", "yes", "1") and key.strip() in ("roundtrip",):
                extra.append(flag)
            else:
                extra.extend([flag, value])
    return argv + extra


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuspmap",
        description="Plane homeomorphism with an exponential-cusp image: "
                    "maps, distortion, integrability, capacity.",
    )
    parser.add_argument("--version", action="version", version=f"cuspmap {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cg", type=float, default=16.0,
                        help="cusp constant inside the double logarithm (default 16)")
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json", "pgm"), default="csv")
    common.add_argument("--seed", type=int, default=0,
                        help="offset for quasi-random sampling sequences")
    common.add_argument("--config", default=None,
                        help="plain key=value file supplying flag defaults")

    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="sample the chain and trace the image boundary")
    map_sub = p_map.add_subparsers(dest="subcommand", required=True)
    ms = map_sub.add_parser("sample", parents=[common])
    ms.add_argument("--points", type=_parse_points, default=None,
                    help="semicolon-separated x1,x2 pairs")
    ms.add_argument("--grid", type=int, default=None, help="NxN Cartesian grid over the disk")
    ms.add_argument("--random", type=int, default=None,
                    help="N quasi-random disk points (offset by --seed)")
    ms.add_argument("--roundtrip", action="store_true", help="append inverse-error column")
    mt = map_sub.add_parser("trace-boundary", parents=[common])
    mt.add_argument("--t", type=_parse_floats, required=True,
                    help="comma-separated boundary parameters in (0, 1)")

    p_dist = sub.add_parser("distortion", help="distortion field and growth-envelope fit")
    dist_sub = p_dist.add_subparsers(dest="subcommand", required=True)
    df = dist_sub.add_parser("field", parents=[common])
    df.add_argument("--r-min", type=float, default=1e-8)
    df.add_argument("--r-max", type=float, default=1.0)
    df.add_argument("--nr", type=int, default=64)
    df.add_argument("--ntheta", type=int, default=64)
    df.add_argument("--chain", default=None, help="comma list of stages, e.g. f1,f2,f3")
    fb = dist_sub.add_parser("fit-bound", parents=[common])
    fb.add_argument("--theta", type=_parse_theta, required=True)
    fb.add_argument("--r-min", type=float, default=1e-30)
    fb.add_argument("--r-max", type=float, default=1e-2)
    fb.add_argument("--n", type=int, default=29)
    fb.add_argument("--band", type=_parse_floats, default=[0.05, 2.0])

    p_int = sub.add_parser("integrate", parents=[common],
                           help="partial integrals of K^p or exp(lambda K)")
    group = p_int.add_mutually_exclusive_group(required=True)
    group.add_argument("--kpow", type=float, default=None)
    group.add_argument("--explambda", type=float, default=None)
    p_int.add_argument("--depth", type=int, default=64, help="dyadic refinement depth")
    p_int.add_argument("--geometric-depth", type=float, default=None,
                       help="deep log-radius scheme: reach 2^-DEPTH geometrically")
    p_int.add_argument("--steps", type=int, default=48)
    p_int.add_argument("--chain", default=None)

    p_cap = sub.add_parser("capacity", help="test functions, grid solves, tip experiment")
    cap_sub = p_cap.add_subparsers(dest="subcommand", required=True)
    ct = cap_sub.add_parser("test-fn", parents=[common])
    ct.add_argument("--r", type=float, required=True)
    ct.add_argument("--d", type=float, required=True)
    cg_ = cap_sub.add_parser("grid", parents=[common])
    cg_.add_argument("--annulus", type=float, nargs=2, metavar=("RHO", "R"), required=True)
    cg_.add_argument("--resolution", type=int, default=512)
    th = cap_sub.add_parser("theorem1", parents=[common])
    th.add_argument("--t", type=_parse_floats, required=True)
    th.add_argument("--resolution", type=int, default=256)
    th.add_argument("--arc-samples", type=int, default=64)

    p_ver = sub.add_parser("verify", parents=[common], help="run the certification suite")
    p_ver.add_argument("--only", default=None, help="criterion number or name fragment")

    return parser


# ---------------------------------------------------------------------------
# command bodies
# ---------------------------------------------------------------------------

def _cmd_map_sample(args) -> int:
    chain = _chain_from(args)
    if args.points is None and args.grid is None and args.random is None:
        raise ToolkitError("map sample needs --points, --grid or --random")
    points = list(args.points or [])
    if args.grid:
        xs = np.linspace(-0.99, 0.99, args.grid)
        for a in xs:
            for b in xs:
                if math.hypot(a, b) <= 0.99:
                    points.append(PlanePoint(float(a), float(b)))
    if args.random:
        from .verify import halton

        qr = halton(args.random, skip=20 + args.seed)
        for u, v in qr:
            rad = 0.99 * math.sqrt(u)
            points.append(PlanePoint(rad * math.cos(2.0 * math.pi * v),
                                     rad * math.sin(2.0 * math.pi * v)))
    header = ["x1", "x2", "fx1", "fx2"]
    if args.roundtrip:
        header.append("roundtrip_error")
    rows = []
    for p in points:
        w = apply_chain(p, chain)
        row = [p.x1, p.x2, w.x1, w.x2]
        if args.roundtrip:
            back = apply_chain_inv(w, chain)
            row.append(math.hypot(back.x1 - p.x1, back.x2 - p.x2))
        rows.append(row)
    if args.format == "json":
        _emit(args, json_text([dict(zip(header, row)) for row in rows]))
    else:
        _emit(args, csv_text(header, rows))
    return 0


def _cmd_map_trace(args) -> int:
    rows = boundary_image_trace(sorted(args.t, reverse=True))
    header = ["t", "x1", "x2", "residual", "residual_over_t2"]
    table = [(r.t, r.x1, r.x2, r.residual, r.residual / r.t**2) for r in rows]
    if args.format == "json":
        _emit(args, json_text([dict(zip(header, row)) for row in table]))
    else:
        _emit(args, csv_text(header, table))
    return 0


def _cmd_distortion_field(args) -> int:
    chain = _chain_from(args)
    rs = np.geomspace(args.r_min, args.r_max, args.nr)
    thetas = -math.pi / 2.0 + 2.0 * math.pi * (np.arange(args.ntheta) + 0.5) / args.ntheta
    if args.format == "pgm":
        if args.out == "-":
            raise ToolkitError("--format pgm needs --out FILE")
        from .distortion import distortion_values

        if chain.has_cusp():
            K = distortion_values(np.log(rs)[:, None], thetas[None, :], chain.params)
        else:
            K = np.ones((args.nr, args.ntheta))
        write_pgm(args.out, np.log10(K), lo=0.0)
        return 0
    header = ["r", "theta", "op_norm", "jac_det", "K"]
    rows = []
    for r in rs:
        for t in thetas:
            if chain.has_cusp():
                d = distortion(cusp_jacobian(PolarPoint.from_angle(float(r), float(t)),
                                             chain.params))
                rows.append((float(r), float(t), d.op_norm, d.jac_det, d.K))
            else:
                rows.append((float(r), float(t), 1.0, 1.0, 1.0))
    if args.format == "json":
        _emit(args, json_text([dict(zip(header, row)) for row in rows]))
    else:
        _emit(args, csv_text(header, rows))
    return 0


def _cmd_distortion_fit(args) -> int:
    params = ProfileParams(cg=args.cg)
    rs = np.geomspace(args.r_min, args.r_max, args.n)
    fit = fit_growth_envelope(rs, args.theta, params, band=tuple(args.band))
    payload = {
        "theta": fit.theta,
        "band": list(fit.band),
        "ratio_min": fit.ratio_min,
        "ratio_max": fit.ratio_max,
        "passed": fit.passed,
        "rows": [{"r": r, "ratio": q} for r, q in zip(fit.r_values, fit.ratios)],
    }
    if args.format == "csv":
        _emit(args, csv_text(["r", "ratio"], list(zip(fit.r_values, fit.ratios))))
    else:
        _emit(args, json_text(payload))
    return 0


def _cmd_integrate(args) -> int:
    chain = _chain_from(args)
    if args.geometric_depth is not None:
        scheme = AnnularScheme.geometric(args.geometric_depth, steps=args.steps)
    else:
        scheme = AnnularScheme.dyadic(args.depth)
    if args.kpow is not None:
        rep = distortion_power_integral(args.kpow, scheme, chain)
    else:
        rep = distortion_exp_integral(args.explambda, scheme, chain)
    payload = {
        "kind": rep.kind,
        "parameter": rep.parameter,
        "verdict": rep.verdict.value,
        "partials": [[e, v] for e, v in rep.partials],
        "log_partials": list(rep.log_partials),
        "increment_ratios": list(rep.ratio_stats),
    }
    _emit(args, json_text(payload))
    return 0


def _cmd_capacity_testfn(args) -> int:
    est = cusp_test_energy(args.r, args.d)
    _emit(args, json_text({
        "r": args.r, "d": args.d, "energy": est.value, "log_energy": est.log_value,
        "method": est.method.value,
    }))
    return 0


def _cmd_capacity_grid(args) -> int:
    rho, R = args.annulus
    grid, F, E, dom = annulus_condenser(rho, R, args.resolution)
    cap = grid_capacity(None, F, E, dom, grid, GridSolverConfig(resolution=args.resolution))
    exact = 2.0 * math.pi / math.log(R / rho)
    _emit(args, json_text({
        "rho": rho, "R": R, "resolution": args.resolution,
        "capacity": cap.value, "exact_continuum": exact,
        "rel_error": abs(cap.value - exact) / exact,
    }))
    return 0


def _cmd_capacity_theorem1(args) -> int:
    chain = _chain_from(args)
    rows = tip_capacity_experiment(sorted(args.t, reverse=True), chain,
                                   GridSolverConfig(resolution=args.resolution),
                                   arc_samples=args.arc_samples)
    header = ["t", "capacity", "capacity_over_t", "capacity_over_t2", "diam_image_arc",
              "diam_preimage", "log_diam_preimage", "lower_bound_ref", "log_diam_bound"]
    table = [(r.t, r.capacity, r.capacity_over_t, r.capacity_over_t2, r.diam_image_arc,
              r.diam_preimage, r.log_diam_preimage, r.lower_bound_ref, r.log_diam_bound)
             for r in rows]
    if args.format == "json":
        _emit(args, json_text([dict(zip(header, row)) for row in table]))
    else:
        _emit(args, csv_text(header, table))
    return 0


def _cmd_verify(args) -> int:
    out_dir = None if args.out == "-" else args.out
    results = run_suite(out_dir=out_dir, cg=args.cg, only=args.only)
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(_fold_config(argv))

    dispatch = {
        ("map", "sample"): _cmd_map_sample,
        ("map", "trace-boundary"): _cmd_map_trace,
        ("distortion", "field"): _cmd_distortion_field,
        ("distortion", "fit-bound"): _cmd_distortion_fit,
        ("integrate", None): _cmd_integrate,
        ("capacity", "test-fn"): _cmd_capacity_testfn,
        ("capacity", "grid"): _cmd_capacity_grid,
        ("capacity", "theorem1"): _cmd_capacity_theorem1,
        ("verify", None): _cmd_verify,
    }
    key = (args.command, getattr(args, "subcommand", None))
    try:
        return dispatch[key](args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OverflowError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
