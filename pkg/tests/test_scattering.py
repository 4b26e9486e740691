import math

import numpy as np
import pytest

from tunneltime.errors import DomainError, RegimeWarning, ThresholdError, WidthOverflowError
from tunneltime.kinematics import ParticleContext
from tunneltime.scattering import (PiecewisePotential, solve_barrier, solve_piecewise,
                                   solve_step, transmission_thick_approx)

CTX = ParticleContext(1.0, 1.0)


def test_step_half_height_reflects_with_minus_i():
    sol = solve_step(CTX, 2.0)
    assert abs(sol.A - (-1j)) < 1e-15
    assert abs(sol.A) == pytest.approx(1.0, abs=1e-15)
    assert sol.P_t == 0.0
    k = p = math.sqrt(2)
    assert abs(sol.A - (-(p + 1j * k) / (p - 1j * k))) < 1e-15


def test_step_infinite_height():
    # |A + 1| ~ 2k/p -> 0 and the penetration depth 1/p -> 0
    devs = [abs(solve_step(CTX, V).A + 1) for V in (1e4, 1e8, 1e12)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] == pytest.approx(2 * CTX.k / math.sqrt(2e12), rel=1e-6)


def test_step_above_is_real_and_flux_weighted():
    ctx = ParticleContext(1.0, 2.0)
    sol = solve_step(ctx, 1.0)
    k, beta = 2.0, math.sqrt(2.0)
    assert abs(sol.A.imag) < 1e-15 and sol.A.real == pytest.approx((k - beta) / (k + beta))
    assert sol.P_t == pytest.approx(4 * k * beta / (k + beta) ** 2, rel=1e-14)
    assert sol.flux_residual() < 1e-14


def test_step_threshold():
    with pytest.raises(ThresholdError):
        solve_step(ParticleContext(1.0, 2.0), 2.0)


def test_barrier_half_height_sech2():
    a = 4 / math.sqrt(2)  # p a = 4
    sol = solve_barrier(CTX, 2.0, a)
    assert sol.P_t == pytest.approx(1 / math.cosh(4) ** 2, rel=1e-12)
    assert sol.P_t == pytest.approx(1.341e-3, rel=1e-3)
    approx = 4 * math.exp(-8)
    assert approx == pytest.approx(1.342e-3, rel=1e-3)
    assert abs(sol.P_t - approx) / sol.P_t < 1e-3


def test_barrier_without_potential():
    sol = solve_barrier(CTX, 0.0, 1.0)
    assert abs(sol.A) < 1e-15
    assert sol.P_t == pytest.approx(1.0, abs=1e-15)
    assert abs(sol.t - np.exp(1j * math.sqrt(2))) < 1e-15
    assert abs(sol.D - 1) < 1e-15


def test_barrier_coefficients_match_textbook():
    # B e^{px} + C e^{-px} inside, D e^{ikx} outside
    k = p = math.sqrt(2)
    a = 1.0
    sol = solve_barrier(CTX, 2.0, a)
    den = 2 * k * p * math.cosh(p * a) + 1j * (p * p - k * k) * math.sinh(p * a)
    assert abs(sol.D - 2 * k * p * np.exp(-1j * k * a) / den) < 1e-14


@pytest.mark.parametrize("a", np.linspace(0.1, 10, 12))
def test_sech2_grid(a):
    assert abs(solve_barrier(CTX, 2.0, a).P_t - 1 / math.cosh(math.sqrt(2) * a) ** 2) < 1e-10


def test_piecewise_single_segment_matches_barrier():
    pot = PiecewisePotential.from_list([(0, 1.3, 2.0)])
    s1, s2 = solve_piecewise(CTX, pot), solve_barrier(CTX, 2.0, 1.3)
    for (a1, b1), (a2, b2) in zip(s1.amplitudes, s2.amplitudes):
        assert abs(a1 - a2) < 1e-15 and abs(b1 - b2) < 1e-15


def test_segment_splitting_invariance():
    whole = solve_barrier(CTX, 2.0, 1.0)
    halves = solve_piecewise(CTX, PiecewisePotential.barrier(2.0, 1.0).split(0, 0.5))
    assert abs(whole.A - halves.A) < 1e-10
    assert abs(whole.t - halves.t) < 1e-10


def test_double_barrier_conserves_flux():
    pot = PiecewisePotential.from_list([(0, 1, 2.0), (1, 3, 0.0), (3, 4, 2.0)])
    sol = solve_piecewise(CTX, pot)
    assert sol.flux_residual() < 1e-10
    assert max(sol.matching_residuals()) < 1e-10
    fluxes = [r.flux(1.0) for r in sol.regions]
    assert np.ptp(fluxes) < 1e-12


def test_well_resonance_full_transmission():
    ctx = ParticleContext(1.0, 0.5)
    V = -1.0
    beta = math.sqrt(2 * (0.5 - V))
    for n in (1, 2, 3):
        sol = solve_barrier(ctx, V, n * math.pi / beta)
        assert sol.P_t == pytest.approx(1.0, abs=1e-12)


def test_wavefunction_continuous():
    sol = solve_barrier(CTX, 2.0, 1.0)
    eps = 1e-9
    for x in (0.0, 1.0):
        assert abs(sol.psi(x - eps) - sol.psi(x + eps)) < 1e-8
    assert sol.psi(np.array([-1.0, 0.5, 2.0])).shape == (3,)


def test_width_overflow():
    with pytest.raises(WidthOverflowError):
        solve_barrier(CTX, 2.0, 800 / math.sqrt(2))


def test_invalid_potentials():
    with pytest.raises(DomainError):
        PiecewisePotential.from_list([(0, 1, 1), (1.5, 2, 1)])
    with pytest.raises(DomainError):
        PiecewisePotential.from_list([(0, math.inf, 1), (1, 2, 1)])
    with pytest.raises(DomainError):
        PiecewisePotential.well(1.0, 1.0)
    with pytest.raises(ThresholdError) as exc:
        solve_piecewise(CTX, PiecewisePotential.from_list([(0, 1, 2), (1, 2, 1.0)]))
    assert exc.value.segment == 1


def test_thick_approx():
    a4 = 4 / math.sqrt(2)
    with pytest.warns(RegimeWarning):
        assert transmission_thick_approx(CTX, 2.0, a4) == pytest.approx(4 * math.exp(-8), rel=1e-14)
    a10 = 10 / math.sqrt(2)
    exact = solve_barrier(CTX, 2.0, a10).P_t
    assert abs(transmission_thick_approx(CTX, 2.0, a10) - exact) / exact < 1e-8
    with pytest.raises(DomainError):
        transmission_thick_approx(CTX, 1.0, 3.0)
    with pytest.raises(DomainError):
        transmission_thick_approx(CTX, 2.0, 1.0)


def test_thick_approx_linear_in_energy():
    # fixed p a, shrinking E: prefactor 16 E (V - E) / V^2 -> 16 E / V
    V, pa = 2.0, 10.0
    vals = []
    for E in (1e-3, 1e-4):
        ctx = ParticleContext(1.0, E)
        a = pa / math.sqrt(2 * (V - E))
        vals.append(transmission_thick_approx(ctx, V, a))
    assert vals[0] / vals[1] == pytest.approx(10.0, rel=1e-3)
