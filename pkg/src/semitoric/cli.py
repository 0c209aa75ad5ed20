"""Command-line interface: classify | invariants | scan | plot.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 near-degenerate parameters.  Data goes to stdout unless --out is given;
diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import catalog
from .errors import CLIConfigError, NearDegenerateError, SemitoricError
from .invariants import attach_twisting, cartographic_polygon, invariants_document
from .singularities import count_focus_focus, region_map, transition_scan

FAMILY_PARAMS = {
    "cso": ("rho1", "rho2"),
    "cam": ("R1", "R2", "t"),
    "twoff": ("R1", "R2", "s1", "s2"),
    "hirzebruch": ("n", "alpha", "beta", "gamma"),
}

_ALL_PARAM_FLAGS = sorted({p for ps in FAMILY_PARAMS.values() for p in ps})


def _base_parser():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--family", type=str, help="system family: cso | cam | twoff")
    for name in _ALL_PARAM_FLAGS:
        if name == "n":
            p.add_argument("--n", type=int, default=None)
        else:
            p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--config", type=str, default=None,
                   help="plain key=value file; flags override its entries")
    p.add_argument("--tolerance", type=float, default=1e-7,
                   help="classification tolerance (relative)")
    p.add_argument("--grid", type=int, default=64, help="grid resolution")
    p.add_argument("--out", type=str, default=None, help="output path or directory")
    p.add_argument("--format", type=str, default=None,
                   choices=["json", "csv", "svg"], help="output format")
    p.add_argument("--threads", type=int, default=None,
                   help="worker count for scans (default: machine parallelism)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the rank-0 multistart")
    return p


def _read_config_file(path):
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CLIConfigError(f"bad config line (expected key=value): {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val
    return values


def _merge_config(args):
    """Apply --config file values under explicit flags; validate keys."""
    if args.config:
        file_vals = _read_config_file(args.config)
        known = {a.dest for a in _base_parser()._actions}
        for key, val in file_vals.items():
            if key not in known:
                raise CLIConfigError(f"unknown config key {key!r}")
            if getattr(args, key, None) is None:
                typ = int if key in ("n", "grid", "threads", "seed") else (
                    str if key in ("family", "out", "format") else float)
                setattr(args, key, typ(val))
    if args.tolerance is not None and args.tolerance <= 0:
        raise CLIConfigError("tolerances must be positive")
    return args


def _build_system(args):
    if not args.family:
        raise CLIConfigError("--family is required")
    family = args.family.lower()
    if family == "hirzebruch":
        raise CLIConfigError("hirzebruch systems are formula-level only; "
                             "use `plot --family hirzebruch`")
    if family not in catalog.FAMILIES:
        raise CLIConfigError(f"unknown family {args.family!r}")
    names = FAMILY_PARAMS[family]
    params = {n: getattr(args, n) for n in names if getattr(args, n) is not None}
    extra = [n for n in _ALL_PARAM_FLAGS
             if getattr(args, n) is not None and n not in names]
    if extra:
        raise CLIConfigError(f"parameters {extra} do not apply to family {family!r}")
    try:
        return catalog.make_system(family, **params)
    except ValueError as exc:
        raise CLIConfigError(str(exc)) from exc


def _emit(text, args, default_name):
    if args.out:
        out = Path(args.out)
        if out.is_dir() or str(args.out).endswith("/"):
            out.mkdir(parents=True, exist_ok=True)
            out = out / default_name
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(str(out), file=sys.stderr)
    else:
        sys.stdout.write(text)


def _json_dumps(doc):
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


# -- subcommands -----------------------------------------------------------------

def cmd_classify(args):
    system = _build_system(args)
    n_ff, records = count_focus_focus(system, seed=args.seed, tol=args.tolerance)
    doc = {
        "schema": "semitoric-classify/1",
        "family": system.family,
        "params": system.params,
        "n_ff": n_ff,
        "records": [
            {"kind": r.kind,
             "critical_value": list(r.critical_value),
             "point": [float(c) for c in r.point.coords],
             "eigenvalues": [[float(e.real), float(e.imag)] for e in r.eigen_data]}
            for r in records
        ],
    }
    if args.format == "json" or args.out:
        _emit(_json_dumps(doc), args, "classify.json")
    else:
        print(f"family {system.family}  params {system.params}")
        print(f"n_FF = {n_ff}")
        for r in records:
            lam, eta = r.critical_value
            print(f"  {r.kind:18s} at F = ({lam:+.8f}, {eta:+.8f})")
    return 0


def cmd_invariants(args):
    system = _build_system(args)
    doc = invariants_document(system, seed=args.seed)
    _emit(_json_dumps(doc), args, "invariants.json")
    return 0


def cmd_scan(args):
    system_family = (args.family or "").lower()
    if not system_family:
        raise CLIConfigError("--family is required")
    threads = args.threads or 1
    if system_family == "twoff" or (system_family == "twoff" and args.axis is None):
        pass
    if args.axis is None and system_family != "twoff":
        raise CLIConfigError("--axis is required for 1-d scans")

    if system_family == "twoff" and args.axis is None:
        if args.R1 is None or args.R2 is None:
            raise CLIConfigError("twoff region scan needs --R1 and --R2")
        rmap = region_map(args.R1, args.R2, resolution=args.grid, threads=threads)
        _emit(rmap.to_csv(), args, "region_map.csv")
        if args.format == "svg":
            from .plots import region_map_figure
            out = Path(args.out or ".")
            out.mkdir(parents=True, exist_ok=True)
            path = region_map_figure(rmap, out / "region_map.svg")
            print(path, file=sys.stderr)
        return 0

    family = system_family
    if family not in catalog.FAMILIES:
        raise CLIConfigError(f"unknown family {args.family!r}")
    axis = args.axis
    if axis == "R":
        axis = "R2"  # weight-ratio scan: vary R2 with R1 fixed
    names = FAMILY_PARAMS[family]
    if axis not in names:
        raise CLIConfigError(f"axis {args.axis!r} is not a parameter of {family}")
    fixed = {n: getattr(args, n) for n in names
             if n != axis and getattr(args, n) is not None}
    lo, hi = args.scan_from, args.scan_to
    if lo is None or hi is None:
        raise CLIConfigError("--from and --to are required")
    values = np.linspace(lo, hi, args.count)
    rows = ["%s,n_ff" % axis]
    from .singularities import _n_ff_at
    for v in values:
        rows.append(f"{v:.10g},{_n_ff_at(family, fixed, axis, float(v))}")
    transitions = transition_scan(family, fixed, axis, lo, hi,
                                  resolution=max(args.count, 16))
    csv_text = "\n".join(rows) + "\n"
    _emit(csv_text, args, "scan.csv")
    tr_text = "\n".join(f"{axis},{t:.12g}" for t in transitions)
    if transitions:
        if args.out:
            out = Path(args.out)
            base = out if not (out.is_dir() or str(args.out).endswith("/")) else out / "scan.csv"
            bpath = base.with_suffix(".boundaries.csv")
            bpath.write_text(f"{axis}\n" + "\n".join(f"{t:.12g}" for t in transitions) + "\n")
            print(str(bpath), file=sys.stderr)
        else:
            print("# boundaries: " + ", ".join(f"{t:.8f}" for t in transitions),
                  file=sys.stderr)
    return 0


def cmd_plot(args):
    kind = args.kind
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    from . import plots
    written = []
    if kind == "toric":
        if (args.family or "hirzebruch").lower() != "hirzebruch":
            raise CLIConfigError("toric plots use --family hirzebruch")
        if args.n is None or args.alpha is None or args.beta is None:
            raise CLIConfigError("toric plot needs --n --alpha --beta")
        written.append(plots.toric_polygon_figure(
            args.n, args.alpha, args.beta,
            outdir / f"toric_n{args.n}.svg"))
    elif kind == "momentum":
        system = _build_system(args)
        if args.values:
            if not args.axis:
                raise CLIConfigError("--values needs --axis")
            for v in args.values:
                sub = catalog.make_system(system.family,
                                          **{**system.params, args.axis: v})
                name = f"momentum_{args.axis}{v:g}.svg"
                written.append(plots.momentum_image(sub, outdir / name))
        else:
            written.append(plots.momentum_image(system, outdir / "momentum.svg"))
    elif kind == "polygon":
        system = _build_system(args)
        n_ff, records = count_focus_focus(system, seed=args.seed)
        signs = None
        if args.eps:
            signs = [int(s) for s in args.eps.split(",")]
        poly = cartographic_polygon(system, signs=signs, records=records)
        if args.twist_shear:
            poly = poly.apply_shear(args.twist_shear)
        if n_ff and not args.no_twist:
            attach_twisting(system, poly, records)
        written.append(plots.polygon_figure(poly, outdir / "polygon.svg",
                                            title=repr(system)))
    elif kind == "region":
        if args.R1 is None or args.R2 is None:
            raise CLIConfigError("region plot needs --R1 and --R2")
        rmap = region_map(args.R1, args.R2, resolution=args.grid,
                          threads=args.threads or 1)
        written.append(plots.region_map_figure(rmap, outdir / "region_map.svg"))
    else:
        raise CLIConfigError(f"unknown plot kind {kind!r}")
    for w in written:
        print(w, file=sys.stderr)
    return 0


def build_parser():
    base = _base_parser()
    parser = argparse.ArgumentParser(
        prog="semitoric",
        description="Symplectic invariants of semitoric integrable systems")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[base],
                   help="find and classify rank-0 singular points")
    sub.add_parser("invariants", parents=[base],
                   help="compute the five symplectic invariants")

    ps = sub.add_parser("scan", parents=[base],
                        help="sweep a parameter or the coupling square")
    ps.add_argument("--axis", type=str, default=None,
                    help="parameter to sweep (t, R, s1, s2); omit for 2-d twoff map")
    ps.add_argument("--from", dest="scan_from", type=float, default=None)
    ps.add_argument("--to", dest="scan_to", type=float, default=None)
    ps.add_argument("-n", "--count", type=int, default=64,
                    help="number of samples along the axis")

    pp = sub.add_parser("plot", parents=[base], help="render SVG figures")
    pp.add_argument("--kind", type=str, required=True,
                    choices=["momentum", "polygon", "region", "toric"])
    pp.add_argument("--axis", type=str, default=None)
    pp.add_argument("--values", type=float, nargs="*", default=None,
                    help="montage values of --axis")
    pp.add_argument("--eps", type=str, default=None,
                    help="comma-separated cut signs, e.g. '+1,-1'")
    pp.add_argument("--twist-shear", type=int, default=0,
                    help="apply T^k to the polygon before rendering")
    pp.add_argument("--no-twist", action="store_true",
                    help="skip twisting-index computation in polygon plots")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
        if args.command == "classify":
            return cmd_classify(args)
        if args.command == "invariants":
            return cmd_invariants(args)
        if args.command == "scan":
            return cmd_scan(args)
        if args.command == "plot":
            return cmd_plot(args)
        raise CLIConfigError(f"unknown command {args.command!r}")
    except CLIConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NearDegenerateError as exc:
        print(f"near-degenerate parameters: {exc}", file=sys.stderr)
        return 4
    except SemitoricError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
