"""Reconstruct every catalog function and report coefficient and boundary errors.

    python3 scripts/reconstruct_catalog.py [-K 256] [--reduce]

Coefficient errors are relative to max(1, |c_k|) over k <= 64 and use the
closed-form oracle where the catalog has one; boundary residuals are taken
at 64 probes at least 0.3 away from every singular point.
"""
import argparse
import time

import numpy as np

from circlechain import catalog, reconstruct, verify_roundtrip
from circlechain.cli import probe_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-K", "--order", type=int, default=256)
    ap.add_argument("--reduce", action="store_true")
    args = ap.parse_args()
    print(f"{'function':14s} {'n':>2s} {'deltas':>6s} {'coef err':>9s} {'boundary':>9s} {'time':>6s}")
    for name in catalog.names():
        e = catalog.get(name)
        sf = e.sectioned()
        t = time.perf_counter()
        res = reconstruct(sf, args.order, reduce=args.reduce)
        dt = time.perf_counter() - t
        tc = res.tc_reduced if args.reduce else res.tc_full
        if e.taylor is not None:
            ex = e.taylor(args.order)[1:65]
            cerr = f"{np.max(np.abs(tc.c[1:65] - ex) / np.maximum(1, np.abs(ex))):9.1e}"
        else:
            cerr = f"{'-':>9s}"
        rep = verify_roundtrip(res, sf, probe_grid(sf.singular_points), relative=True)
        print(f"{name:14s} {res.n_used:2d} {len(res.deltas_removed):6d} {cerr} {rep.max_residual:9.1e} {dt:6.2f}")


if __name__ == "__main__":
    main()
