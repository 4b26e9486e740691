import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tunneltime import weak_time
from tunneltime.kinematics import ParticleContext, Regime, classify_regime, wavenumbers
from tunneltime.phase_clock import barrier_phase_time, free_flight_time, FlightWindow
from tunneltime.scattering import PiecewisePotential, solve_barrier, solve_piecewise

masses = st.floats(0.1, 10.0)
energies = st.floats(0.01, 10.0)
widths = st.floats(0.05, 5.0)
heights = st.floats(-5.0, 10.0)


@given(masses, energies, heights)
def test_wavenumber_identities(m, E, V):
    assume(abs(E - V) > 1e-6 * max(abs(V), E))
    wn = wavenumbers(ParticleContext(m, E), V)
    assert math.isclose(wn.k ** 2, 2 * m * E, rel_tol=1e-12)
    if wn.evanescent:
        assert math.isclose(wn.p ** 2, 2 * m * (V - E), rel_tol=1e-12)
        assert math.isclose(wn.k ** 2 + wn.p ** 2, 2 * m * V, rel_tol=1e-12)
    else:
        assert math.isclose(wn.beta ** 2, 2 * m * (E - V), rel_tol=1e-12)


@given(masses, energies, st.floats(0.0, 50.0))
def test_free_flight(m, E, L):
    ctx = ParticleContext(m, E)
    T = free_flight_time(ctx, FlightWindow(0.0, L))
    assert math.isclose(T.value, L / math.sqrt(2 * E / m), rel_tol=1e-10, abs_tol=1e-300)


@given(masses, energies, heights, widths)
@settings(max_examples=60)
def test_flux_conservation(m, E, V, a):
    assume(abs(E - V) > 1e-6 * max(abs(V), E))
    assume(V <= E or math.sqrt(2 * m * (V - E)) * a < 300)
    sol = solve_barrier(ParticleContext(m, E), V, a)
    assert abs(sol.P_t + sol.P_r - 1) < 1e-10
    assert max(sol.matching_residuals()) < 1e-10


@given(energies, widths, st.floats(0.1, 0.9), st.floats(0.5, 5.0))
@settings(max_examples=40)
def test_splitting_a_segment_is_invisible(E, a, frac, V):
    assume(abs(E - V) > 1e-6 * max(V, E))
    assume(V <= E or math.sqrt(2 * (V - E)) * a < 300)
    ctx = ParticleContext(1.0, E)
    whole = PiecewisePotential.barrier(V, a)
    split = whole.split(0, frac * a)
    s1, s2 = solve_piecewise(ctx, whole), solve_piecewise(ctx, split)
    assert abs(s1.t - s2.t) < 1e-9 * max(abs(s1.t), 1e-300) + 1e-300
    assert abs(s1.A - s2.A) < 1e-9


@given(st.floats(0.05, 0.95), widths, st.floats(0.5, 5.0))
def test_ratio_identity(frac, a, V):
    assume(abs(frac - 0.5) > 0.01)
    ctx = ParticleContext(1.0, frac * V)
    direct = barrier_phase_time(ctx, V, a).value / weak_time.steinberg_time(ctx, V, a).value
    assert math.isclose(weak_time.time_ratio(ctx, V, a), direct, rel_tol=1e-8)


@given(masses, st.floats(0.02, 0.98), st.floats(0.05, 10.0), st.floats(0.1, 10.0))
def test_weak_time_below_phase_time(m, frac, a, V):
    ctx = ParticleContext(m, frac * V)
    assert weak_time.steinberg_time(ctx, V, a).value <= barrier_phase_time(ctx, V, a).value


@given(energies, heights, st.floats(0.0, 5.0))
def test_classification_is_pure(E, V, a):
    ctx = ParticleContext(1.0, E)
    r1, r2 = classify_regime(ctx, V, a), classify_regime(ctx, V, a)
    assert r1 == r2
    if r1.regime is Regime.SUB_BARRIER:
        assert E < V
    elif r1.regime is Regime.ABOVE_BARRIER:
        assert E > V


@given(st.lists(st.floats(-2.0, 4.0), min_size=1, max_size=4), st.floats(0.2, 3.0))
@settings(max_examples=40)
def test_piecewise_flux(values, E):
    assume(all(abs(E - v) > 1e-3 for v in values))
    segs = [(i * 0.7, (i + 1) * 0.7, v) for i, v in enumerate(values)]
    sol = solve_piecewise(ParticleContext(1.0, E), PiecewisePotential.from_list(segs))
    assert abs(sol.P_t + sol.P_r - 1) < 1e-10
    fluxes = [r.flux(1.0) for r in sol.regions]
    assert np.allclose(fluxes, fluxes[0], rtol=1e-9, atol=1e-12)
