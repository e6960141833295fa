"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 classification failure,
3 pipeline failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import catalog
from .classify import classify_all
from .coeffs import TaylorCoefficients, angular_derivative_coeffs, angular_primitive_coeffs
from .errors import ClassificationError, CircleChainError, DomainError, PipelineError
from .evalcore import RhoLadder, boundary_values, eval_inner_many
from .fileio import CoefficientFile, FileFormatError, format_float
from .reconstruct import reconstruct, verify_roundtrip

EXIT_OK, EXIT_USAGE, EXIT_CLASSIFY, EXIT_PIPELINE = 0, 1, 2, 3
THREADS_ENV = "CIRCLECHAIN_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise UsageError(f"{THREADS_ENV} must be >= 0")
    return n or (os.cpu_count() or 1)


def _entry(name):
    try:
        return catalog.get(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def probe_grid(points, count=64, clearance=0.3):
    """``count`` uniform angles kept at least ``clearance`` from every singular point."""
    pts = np.asarray(points, dtype=float)
    grid = -math.pi + 2 * math.pi * (np.arange(8 * count) + 0.5) / (8 * count)
    if pts.size:
        dist = np.min(np.abs(np.angle(np.exp(1j * (grid[:, None] - pts[None, :])))), axis=1)
        grid = grid[dist >= clearance]
    idx = np.linspace(0, grid.size - 1, min(count, grid.size)).round().astype(int)
    return grid[idx]


# -- commands ---------------------------------------------------------------

def cmd_list(args, out):
    for name, e in catalog.CATALOG.items():
        cls = "; ".join(f"{k} {d}" if k != "none" else "none" for k, d in e.expected)
        out.write(f"{name:14s} {e.description}  [{cls}]\n")
    return EXIT_OK


def cmd_analyze(args, out):
    e = _entry(args.name)
    sf = e.sectioned()
    try:
        recs = classify_all(sf, args.nmax, workers=worker_count())
    except ClassificationError as exc:
        sys.stderr.write(f"classification failed ({exc.outcome}): {exc}\n")
        if args.json:
            out.write(json.dumps({"function": e.name, "outcome": exc.outcome, "message": str(exc)}) + "\n")
        return EXIT_CLASSIFY
    if args.json:
        rows = [{"location": format_float(r.location), "kind": r.kind, "degree": r.degree} for r in recs]
        out.write(json.dumps({"function": e.name, "points": rows}, sort_keys=True) + "\n")
        return EXIT_OK
    out.write(f"{e.name}: {len(recs)} singular point(s)\n")
    for r in recs:
        p = r.evidence.get("p_hat")
        extra = f"  p_hat={p:.3f}" if p is not None else ""
        out.write(f"  point {r.location:.6g}: {r.kind}, degree {r.degree}{extra}\n")
    return EXIT_OK


def _provenance(e, res, reduced):
    return {
        "source": e.name,
        "n_used": res.n_used,
        "alpha0": float(res.alpha0),
        "reduced": reduced,
        "theta0": float(res.diagnostics["theta0"]),
        "deltas": [
            {"location": d.location, "order": d.order, "amplitude": d.amplitude, "uncertainty": d.uncertainty}
            for d in res.deltas_removed
        ],
        "walk": [],
    }


def cmd_reconstruct(args, out):
    e = _entry(args.name)
    sf = e.sectioned()
    try:
        res = reconstruct(sf, args.order, reduce=args.reduce, nmax=args.nmax, derivatives=args.derivatives)
    except PipelineError as exc:
        sys.stderr.write(f"pipeline failed at stage {exc.stage}: {exc}\n")
        return EXIT_PIPELINE
    path = args.output or f"{e.name}.coeffs.json"
    CoefficientFile(res.tc_full, _provenance(e, res, False)).write(path)
    written = [path]
    if args.reduce:
        rpath = args.reduced_output or path.replace(".json", "") + ".reduced.json"
        CoefficientFile(res.tc_reduced, _provenance(e, res, True)).write(rpath)
        written.append(rpath)
    probes = probe_grid(sf.singular_points)
    rep = verify_roundtrip(res, sf, probes)
    out.write(f"function: {e.name}\n")
    out.write(f"K: {args.order}\n")
    out.write(f"n_used: {res.n_used}\n")
    out.write(f"alpha0: {format_float(res.alpha0)}\n")
    out.write(f"theta0: {format_float(res.diagnostics['theta0'])}\n")
    if res.deltas_removed:
        for d in res.deltas_removed:
            out.write(f"delta removed: location={d.location:.6g} order={d.order} "
                      f"amplitude={format_float(d.amplitude)} +- {d.uncertainty:.1e}\n")
    else:
        out.write("deltas removed: none\n")
    out.write(f"roundtrip: max={rep.max_residual:.3e} mean={rep.mean_residual:.3e} probes={len(probes)}\n")
    for p in written:
        out.write(f"wrote {p}\n")
    return EXIT_OK


def _theta_grid(args):
    if args.theta:
        return np.array(args.theta, dtype=float)
    n = args.theta_count
    if n < 1:
        raise UsageError("--theta-count must be positive")
    return -math.pi + 2 * math.pi * (np.arange(n) + 1) / n


def cmd_eval(args, out):
    cf = CoefficientFile.read(args.file)
    rhos = np.array(args.rho, dtype=float)
    if np.any(rhos < 0) or np.any(rhos >= 1):
        raise UsageError("every rho must lie in [0, 1)")
    thetas = _theta_grid(args)
    tc = cf.coefficients
    ladder = RhoLadder.for_order(tc.K)
    workers = worker_count()
    chunks = np.array_split(np.arange(thetas.size), max(1, min(workers, thetas.size)))

    def job(ix):
        vals, _, div = boundary_values(tc, thetas[ix], ladder)
        inner = eval_inner_many(tc, rhos[:, None], thetas[ix][None, :])
        return vals, div, inner

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, chunks))
    else:
        parts = [job(ix) for ix in chunks]
    bvals = np.concatenate([p[0] for p in parts])
    bdiv = np.concatenate([p[1] for p in parts])
    inner = np.concatenate([p[2] for p in parts], axis=1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rho", "theta", "re", "im", "boundary"])
    for i, rho in enumerate(rhos):
        for j, th in enumerate(thetas):
            b = "divergent" if bdiv[j] else format_float(bvals[j])
            z = inner[i, j]
            w.writerow([format_float(rho), format_float(th), format_float(z.real), format_float(z.imag), b])
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_chain(args, out):
    cf = CoefficientFile.read(args.file)
    if args.steps == 0:
        raise UsageError("--steps must be nonzero")
    tc = cf.coefficients
    if args.steps > 0:
        new = angular_derivative_coeffs(tc, args.steps)
    else:
        new = angular_primitive_coeffs(tc, -args.steps)
    prov = dict(cf.provenance)
    prov["walk"] = list(prov.get("walk", [])) + [int(args.steps)]
    path = args.output or args.file.replace(".json", "") + f".chain{args.steps:+d}.json"
    CoefficientFile(new, prov).write(path)
    out.write(f"wrote {path} (K={new.K}, steps={args.steps:+d})\n")
    return EXIT_OK


def cmd_compare(args, out):
    e = _entry(args.name)
    cf = CoefficientFile.read(args.file)
    tc = cf.coefficients
    sf = e.sectioned()
    report = {"function": e.name, "K": tc.K, "provenance": e.provenance}
    if e.taylor is not None:
        exact = e.taylor(tc.K)
        kmax = min(64, tc.K)
        err = np.abs(tc.c[1:kmax + 1] - exact[1:kmax + 1]) / np.maximum(1.0, np.abs(exact[1:kmax + 1]))
        report["coefficient_max_rel_error_k_le_64"] = float(np.max(err))
        report["c0_error"] = float(abs(tc.c[0] - exact[0]))
    if e.exact is not None:
        probes = probe_grid(sf.singular_points)
        vals, _, div = boundary_values(tc, probes, RhoLadder.for_order(tc.K))
        target = np.asarray(e.exact(probes), dtype=float)
        r = np.abs(vals - target) / np.maximum(1.0, np.abs(target))
        report["boundary_max_rel_residual"] = float(np.max(r)) if not np.any(div) else float("inf")
        report["divergent_probes"] = int(np.count_nonzero(div))
    for k, v in report.items():
        out.write(f"{k}: {format_float(v) if isinstance(v, float) and math.isfinite(v) else v}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="circlechain", description="Inner analytic representations of functions on the unit circle.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("list", help="list catalog functions").set_defaults(func=cmd_list)

    a = sub.add_parser("analyze", help="classify the singular points of a catalog function")
    a.add_argument("name")
    a.add_argument("--nmax", type=int, default=4)
    a.add_argument("--json", action="store_true", help="machine-readable output")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("reconstruct", help="compute Taylor coefficients for a catalog function")
    r.add_argument("name")
    r.add_argument("--order", "-K", type=int, default=256)
    r.add_argument("--reduce", action="store_true", help="detect and subtract delta components")
    r.add_argument("--nmax", type=int, default=4)
    r.add_argument("--derivatives", type=int, default=0, choices=(0, 1),
                   help="represent the angular derivative of the function instead")
    r.add_argument("--output", "-o")
    r.add_argument("--reduced-output")
    r.set_defaults(func=cmd_reconstruct)

    e = sub.add_parser("eval", help="evaluate a coefficient file on a polar grid")
    e.add_argument("file")
    e.add_argument("--rho", type=float, nargs="+", default=[0.5, 0.9, 0.99])
    e.add_argument("--theta-count", type=int, default=16)
    e.add_argument("--theta", type=float, nargs="+", help="explicit angles instead of a uniform grid")
    e.add_argument("--output", "-o")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("chain", help="walk the integral-differential chain")
    c.add_argument("file")
    c.add_argument("--steps", type=int, required=True, help="positive: derivatives, negative: primitives")
    c.add_argument("--output", "-o")
    c.set_defaults(func=cmd_chain)

    m = sub.add_parser("compare", help="residuals of a coefficient file against a catalog oracle")
    m.add_argument("name")
    m.add_argument("file")
    m.set_defaults(func=cmd_compare)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (FileFormatError, DomainError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_USAGE
    except PipelineError as exc:
        sys.stderr.write(f"pipeline failed at stage {exc.stage}: {exc}\n")
        return EXIT_PIPELINE
    except CircleChainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PIPELINE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    raise SystemExit(main())
