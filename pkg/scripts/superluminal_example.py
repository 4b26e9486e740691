"""E = V/2 = m c^2 / 8: where the thick-barrier phase time implies v_eff > c."""

import argparse
import math
import warnings

from tunneltime import ParticleContext, barrier_phase_time, solve_barrier
from tunneltime.phase_clock import effective_velocity, superluminal_threshold
from tunneltime.scattering import transmission_thick_approx


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--V", type=float, default=2.0)
    args = ap.parse_args()

    E = args.V / 2
    c = math.sqrt(8 * E / args.m)
    ctx = ParticleContext(args.m, E, c)
    a_star = superluminal_threshold(ctx, args.V)
    p = math.sqrt(2 * args.m * (args.V - E))
    print(f"c = {c:.6g}, onset width a* = {a_star:.6g} (p a* = {p * a_star:.6g})")
    for scale in (0.5, 1.0, 1.5, 2.0):
        a = scale * a_star
        T = barrier_phase_time(ctx, args.V, a)
        P_t = solve_barrier(ctx, args.V, a).P_t
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            approx = transmission_thick_approx(ctx, args.V, a) if p * a >= 3 else math.nan
        v = effective_velocity(T, a)
        print(f"a = {a:8.4g}  v_eff/c = {v / c:7.4f}  P_t = {P_t:.4e}  opaque estimate {approx:.4e}")


if __name__ == "__main__":
    main()
