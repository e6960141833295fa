"""Compare boundary-limit regulators on truncated series with known limits.

For each test series and truncation order the script prints the error of
the Abel ladder with Richardson extrapolation and of the flat kernel that
``RhoLadder.for_order`` picks for K >= 32.

    python3 scripts/kernel_study.py [--orders 64 256 1024]
"""
import argparse
import math

import numpy as np

from circlechain import TaylorCoefficients, limit_to_circle
from circlechain.evalcore import RhoLadder

CASES = {
    "cot/2 (c_k = -i)": (lambda K: np.r_[0, np.full(K, -1j)], lambda t: 0.5 / math.tan(t / 2)),
    "csc^2/4 (c_k = -k)": (lambda K: -np.arange(K + 1.0), lambda t: 0.25 / math.sin(t / 2) ** 2),
    "sum cos (c_k = 1)": (lambda K: np.r_[0.0, np.ones(K)], lambda t: -0.5),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--orders", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--thetas", type=float, nargs="+", default=[0.3, 1.0, math.pi])
    args = ap.parse_args()
    print(f"{'series':22s} {'K':>5s} {'theta':>6s} {'abel+richardson':>16s} {'flat':>10s}")
    for label, (coeffs, exact) in CASES.items():
        for K in args.orders:
            tc = TaylorCoefficients(coeffs(K))
            flat = RhoLadder.for_order(K)
            for t in args.thetas:
                ea = abs(limit_to_circle(tc, t, RhoLadder()).value - exact(t))
                ef = abs(limit_to_circle(tc, t, flat).value - exact(t))
                print(f"{label:22s} {K:5d} {t:6.3f} {ea:16.2e} {ef:10.2e}")


if __name__ == "__main__":
    main()
