"""Phase time versus barrier width: saturation below the barrier, linear growth above.

    python scripts/hartman_curve.py --V 2 --out hartman.csv
"""

import argparse
import csv
import math

import numpy as np

from tunneltime import ParticleContext, barrier_phase_time, hartman_limit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--V", type=float, default=2.0)
    ap.add_argument("--fractions", type=float, nargs="+", default=[0.1, 0.25, 0.5, 0.75, 1.5])
    ap.add_argument("--a-max", type=float, default=10.0)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--out", default="hartman.csv")
    args = ap.parse_args()

    widths = np.linspace(args.a_max / args.n, args.a_max, args.n)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["E_over_V", "a", "T", "v_eff", "T_limit"])
        for f in args.fractions:
            ctx = ParticleContext(args.m, f * args.V)
            limit = hartman_limit(ctx, args.V).value if f < 1 else math.nan
            for a in widths:
                T = barrier_phase_time(ctx, args.V, a).value
                w.writerow([f, a, T, a / T, limit])
            if f < 1:
                print(f"E = {f:g} V: T(a_max) = {T:.6g}, thick limit {limit:.6g}")
            else:
                print(f"E = {f:g} V: T(a_max) = {T:.6g} (grows with a)")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
