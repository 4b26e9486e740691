"""Acceptance criteria, one test per criterion at the stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import csv
import math

import numpy as np
import pytest

from tunneltime import cli, weak_time
from tunneltime.errors import RegimeWarning
from tunneltime.kinematics import ParticleContext
from tunneltime.oracle import phase_time_numeric
from tunneltime.phase_clock import (Channel, FlightWindow, antiresonance_time, antiresonance_width,
                                    barrier_phase_time, delta_family_height, effective_velocity,
                                    free_flight_time, hartman_limit, resonance_time,
                                    step_round_trip_time, superluminal_threshold)
from tunneltime.scattering import (PiecewisePotential, solve_barrier, solve_piecewise,
                                   transmission_thick_approx)

M, V = 1.0, 2.0
GUARD = 0.02
RNG = np.random.default_rng(20261014)

# 20 x 20 (E, a) grid with a guard band of 0.02 V around E = V (and away from E = 0)
SUB_E = np.linspace(GUARD, 1 - GUARD, 10) * V
ABOVE_E = np.linspace(1 + GUARD, 3.0, 10) * V
GRID_E = np.concatenate([SUB_E, ABOVE_E])
GRID_A = np.geomspace(0.1, 5.0, 20)

SOLVED = []  # every solution built below, rechecked by the flux criterion


def rel(x, y):
    return abs(x - y) / abs(y)


def solved(ctx, pot):
    sol = solve_piecewise(ctx, pot)
    SOLVED.append(sol)
    return sol


def crit(number, title):
    return pytest.mark.criterion(number, title)


@crit(1, "free flight equals distance over velocity (1e-10, 100 points)")
def test_free_flight():
    worst = 0.0
    for m, E, L in zip(RNG.uniform(0.1, 10, 100), RNG.uniform(0.01, 10, 100),
                       RNG.uniform(0.01, 50, 100)):
        ctx = ParticleContext(m, E)
        T = free_flight_time(ctx, FlightWindow(0.0, L)).value
        numeric = phase_time_numeric(PiecewisePotential.free(L), ctx).value
        v = math.sqrt(2 * E / m)
        worst = max(worst, rel(T, L / v), rel(numeric, L / v))
    assert worst < 1e-10, worst


@crit(2, "zero-height barrier gives m a / k (1e-10, 50 points)")
def test_free_barrier_limit():
    worst = 0.0
    for m, E, a in zip(RNG.uniform(0.1, 10, 50), RNG.uniform(0.01, 10, 50),
                       RNG.uniform(0.05, 10, 50)):
        ctx = ParticleContext(m, E)
        worst = max(worst, rel(barrier_phase_time(ctx, 0.0, a).value, m * a / ctx.k))
    assert worst < 1e-10, worst


@crit(3, "half-height barrier gives tanh(ka)/E (1e-10)")
def test_half_height():
    ctx = ParticleContext(M, V / 2)
    worst = max(rel(barrier_phase_time(ctx, V, a).value, math.tanh(ctx.k * a) / ctx.E)
                for a in np.linspace(0.1, 10, 100))
    assert worst < 1e-10, worst


@crit(4, "closed forms match the numeric phase derivative on a 20x20 grid (1e-8)")
def test_oracle_equivalence():
    worst = {"transmit": 0.0, "reflect": 0.0, "step": 0.0}
    for E in GRID_E:
        ctx = ParticleContext(M, E)
        for a in GRID_A:
            pot = PiecewisePotential.barrier(V, a)
            solved(ctx, pot)
            num = phase_time_numeric(pot, ctx).value
            worst["transmit"] = max(worst["transmit"], rel(barrier_phase_time(ctx, V, a).value, num))
            if E < V:
                num_r = phase_time_numeric(pot, ctx, Channel.REFLECT).value
                closed_r = barrier_phase_time(ctx, V, a, Channel.REFLECT).value
                worst["reflect"] = max(worst["reflect"], rel(closed_r, num_r))
                num_s = phase_time_numeric(PiecewisePotential.step(V), ctx, Channel.ROUND_TRIP,
                                           b=a).value
                worst["step"] = max(worst["step"], rel(step_round_trip_time(ctx, V, a).value, num_s))
    assert max(worst.values()) < 1e-8, worst


@crit(5, "reflection and transmission phase times coincide below the barrier (1e-8)")
def test_reflection_equals_transmission():
    worst = 0.0
    for E in SUB_E:
        ctx = ParticleContext(M, E)
        for a in GRID_A:
            pot = PiecewisePotential.barrier(V, a)
            t = phase_time_numeric(pot, ctx, Channel.TRANSMIT).value
            r = phase_time_numeric(pot, ctx, Channel.REFLECT).value
            worst = max(worst, rel(r, t))
    assert worst < 1e-8, worst


@crit(6, "thick-barrier saturation at pa = 20 and its minimum at E = V/2")
def test_saturation():
    for frac in (0.25, 0.5, 0.75):
        ctx = ParticleContext(M, frac * V)
        limit = 1 / math.sqrt(ctx.E * (V - ctx.E))
        assert hartman_limit(ctx, V).value == pytest.approx(limit, rel=1e-15)
        p = math.sqrt(2 * M * (V - ctx.E))
        assert abs(barrier_phase_time(ctx, V, 20 / p).value - limit) < 1e-8 * limit
    Es = np.linspace(0.01, 0.99, 981) * V
    limits = [hartman_limit(ParticleContext(M, E), V).value for E in Es]
    assert Es[int(np.argmin(limits))] == pytest.approx(V / 2, abs=1e-12)


@crit(7, "worked superluminal example: P_t = sech^2(4) and the opaque-barrier estimate")
def test_worked_example():
    c = math.sqrt(8 * (V / 2) / M)  # E = V/2 = m c^2 / 8
    ctx = ParticleContext(M, V / 2, c)
    p = math.sqrt(2 * M * (V - ctx.E))
    a = 4 / p
    P_t = solved(ctx, PiecewisePotential.barrier(V, a)).P_t
    assert P_t == pytest.approx(1 / math.cosh(4) ** 2, rel=1e-12)
    assert abs(P_t - 4 * math.exp(-8)) < 0.01 * 4 * math.exp(-8)
    with pytest.warns(RegimeWarning):
        approx = transmission_thick_approx(ctx, V, a)
    assert abs(approx - P_t) < 0.002 * P_t
    assert p * superluminal_threshold(ctx, V) == pytest.approx(4, rel=1e-12)


@crit(8, "weak-measurement relations: ratio identity, ordering, thick limit")
def test_weak_measurement_relations():
    ratio_dev, ordered = 0.0, True
    for E in np.linspace(0.05, 0.95, 37) * V:
        if abs(E - V / 2) <= 0.01 * V:
            continue
        ctx = ParticleContext(M, E)
        for a in np.linspace(0.1, 5, 25):
            T = barrier_phase_time(ctx, V, a).value
            Ts = weak_time.steinberg_time(ctx, V, a).value
            ratio_dev = max(ratio_dev, rel(weak_time.time_ratio(ctx, V, a), T / Ts))
            ordered &= Ts < T
    assert ratio_dev < 1e-8, ratio_dev
    assert ordered
    for frac in (0.25, 0.5, 0.75):
        ctx = ParticleContext(M, frac * V)
        p = math.sqrt(2 * M * (V - ctx.E))
        limit = (ctx.E / V) / math.sqrt(ctx.E * (V - ctx.E))
        assert abs(weak_time.steinberg_time(ctx, V, 20 / p).value - limit) < 1e-6 * limit


@crit(9, "towards E = 0 the phase time grows while the weak-measurement time falls")
def test_low_energy_opposites():
    rep = weak_time.steinberg_low_energy_behavior(ParticleContext(M, 0.1), V, 1.0,
                                                  [1e-1, 1e-2, 1e-3])
    assert rep.phase_increasing and rep.steinberg_decreasing


@crit(10, "over the barrier: resonances, anti-resonances, v_eff below c")
def test_above_barrier():
    for E in (2.5, 3.0, 4.5):
        ctx = ParticleContext(M, E)
        for n in (1, 2, 5):
            res = resonance_time(ctx, V, n)
            pot = PiecewisePotential.barrier(V, res.a)
            assert solved(ctx, pot).P_t == pytest.approx(1.0, abs=1e-12)
            num = phase_time_numeric(pot, ctx).value
            assert rel(res.time.value, num) < 1e-8
            a = antiresonance_width(ctx, V, n)
            anti = antiresonance_time(ctx, V, a)
            exact = ctx.k * a / (2 * E - V)
            assert rel(barrier_phase_time(ctx, V, a).value, exact) < 1e-8
            assert rel(anti.time.value, exact) < 1e-8
    # the particle itself is sub-relativistic on the whole grid: E_max = m c^2 / 8
    c = math.sqrt(8 * ABOVE_E.max() / M)
    for E in ABOVE_E:
        ctx = ParticleContext(M, E, c)
        for a in GRID_A:
            v_eff = effective_velocity(barrier_phase_time(ctx, V, a), a)
            assert v_eff < c
            assert v_eff < ctx.k / M


@crit(11, "delta-like barriers with V a^2 fixed give T -> 0")
def test_delta_family():
    ctx = ParticleContext(M, 1.0)
    times = [barrier_phase_time(ctx, delta_family_height(1.0, a, "Va2"), a).value
             for a in (0.1, 0.03, 0.01)]
    assert times[0] > times[1] > times[2] > 0
    assert times[2] < 0.02


@crit(12, "flux conservation and matching residuals below 1e-10 on every solved potential")
def test_flux_and_matching():
    extra = [
        (ParticleContext(M, 0.7), PiecewisePotential.from_list([(0, 1, 2.0), (1, 2.5, 0.3),
                                                                 (2.5, 3, 2.5)])),
        (ParticleContext(M, 1.3), PiecewisePotential.from_list([(0, 1, -1.0), (1, 2, 2.0),
                                                                 (2, 4, 0.5)])),
        (ParticleContext(M, 1.0), PiecewisePotential.step(2.0)),
        (ParticleContext(M, 3.0), PiecewisePotential.step(2.0)),
        (ParticleContext(M, 0.5), PiecewisePotential.well(-1.0, 2.2)),
    ]
    for ctx, pot in extra:
        solved(ctx, pot)
    for E in GRID_E:
        for a in GRID_A:
            solved(ParticleContext(M, E), PiecewisePotential.barrier(V, a))
    assert len(SOLVED) > 400
    assert max(s.flux_residual() for s in SOLVED) < 1e-10
    assert max(max(s.matching_residuals()) for s in SOLVED) < 1e-10


@crit(13, "dwell quadrature converges and the comparison is recorded by compare")
def test_dwell_comparison(tmp_path, capsys):
    out = tmp_path / "compare.csv"
    code = cli.main(["compare", "--V", "2", "--a", "1", "--E-min", "0.05", "--E-max", "1.95",
                     "--steps", "20", "--out", str(out)])
    summary = capsys.readouterr().out
    assert code == 0
    assert "dwell vs steinberg" in summary and "partition residual with phase times" in summary
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 20
    for r in rows:
        assert float(r["dwell_error"]) < 1e-10
        assert abs(float(r["dwell_minus_steinberg"])) < 1e-8 * float(r["T_steinberg"])
        assert abs(float(r["residual_phase"])) > 1e-6
    direct = weak_time.dwell_time(solve_barrier(ParticleContext(M, 1.0), V, 1.0))
    assert direct.error < 1e-10
