"""Phase, weak-measurement and dwell times side by side over the sub-barrier range."""

import argparse

import numpy as np

from tunneltime import ParticleContext
from tunneltime.weak_time import partition_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--V", type=float, default=2.0)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=12)
    args = ap.parse_args()

    print(f"{'E':>8} {'T_phase':>12} {'T_weak':>12} {'T_dwell':>12} {'T/T_s':>9} {'T_D - T':>11}")
    worst = 0.0
    for E in np.geomspace(1e-3, 0.98, args.n) * args.V:
        c = partition_check(ParticleContext(args.m, E), args.V, args.a)
        worst = max(worst, abs(c.T_dwell - c.T_steinberg) / c.T_steinberg)
        print(f"{E:8.4g} {c.T_phase:12.6g} {c.T_steinberg:12.6g} {c.T_dwell:12.6g} "
              f"{c.ratio:9.4g} {c.partition_residual:11.3e}")
    print(f"max |T_dwell - T_weak| / T_weak = {worst:.2e}")


if __name__ == "__main__":
    main()
