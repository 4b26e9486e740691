"""
Phase times measured by a weakly coupled stationary clock.

The traversal time between two points is the energy derivative of the phase
difference the stationary wave acquires between them.  This module holds
the phase extraction from scattering solutions, the closed-form derivatives
for the step and the square barrier, and their limiting forms.

Sign conventions
----------------
Phases are ``arg`` of the amplitudes in :mod:`tunneltime.scattering`, so a
free segment of width ``a`` contributes ``+k a`` and every closed form
reduces to ``+a/v`` at ``V = 0``.  Above the barrier the closed form is the
continuation ``p -> i beta`` of the sub-barrier expression:

    T = 2m [k (k^2+b^2) a - (k^2-b^2)^2 sin(2ba) / (2kb)]
        / [(k^2+b^2)^2 - (k^2-b^2)^2 cos^2(ba)]

which is positive and agrees with the numerical derivative in
:mod:`tunneltime.oracle`.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (DomainError, MissingLightSpeedError, RegimeWarning,
                     ThresholdError, UndefinedPhaseError)
from .kinematics import (DEFAULT_ANGLE_TOL, ParticleContext, RegimeReport,
                         classical_velocity, classify_regime, is_threshold,
                         wavenumbers)
from .scattering import MAX_EVANESCENT_EXPONENT, ScatteringSolution

#: amplitudes below this magnitude have no usable phase
PHASE_FLOOR = 1e-300
#: |A| below this (relative to 1) is treated as perfect transmission
RESONANCE_FLOOR = 1e-12
#: thin-barrier expansion is trusted for p*a (or beta*a) below this
THIN_LIMIT = 0.3


class Definition(str, enum.Enum):
    PHASE = "phase"
    STEINBERG = "steinberg"
    DWELL = "dwell"


class Channel(str, enum.Enum):
    TRANSMIT = "transmit"
    REFLECT = "reflect"
    ROUND_TRIP = "round_trip"


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC_DERIVATIVE = "numeric_derivative"
    ASYMPTOTIC = "asymptotic"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class TimeResult:
    value: float
    definition: Definition
    channel: Channel
    regime: RegimeReport
    method: Method
    error: Optional[float] = None
    notes: tuple = field(default=())


@dataclass(frozen=True)
class FlightWindow:
    x_from: float
    x_to: float

    def __post_init__(self):
        if self.x_to < self.x_from:
            raise DomainError("flight window must satisfy x_from <= x_to")

    @property
    def length(self) -> float:
        return self.x_to - self.x_from


@dataclass(frozen=True)
class EvanescentTransit:
    """Transit into a forbidden region: the phase shift is imaginary, no real time exists."""

    imaginary_phase: float
    regime: RegimeReport
    reason: str = "evanescent - no real traversal time"


def _require_not_threshold(ctx, V):
    if is_threshold(ctx.E, V):
        raise ThresholdError(
            f"E={ctx.E!r} is at the threshold V={V!r}; the phase time diverges there")


# ---------------------------------------------------------------------------
# phases
# ---------------------------------------------------------------------------

def nearest_branch(phase: float, reference: float) -> float:
    """``phase + 2 pi n`` closest to ``reference``."""
    return phase + 2.0 * math.pi * round((reference - phase) / (2.0 * math.pi))


def unwrap_phases(phases) -> np.ndarray:
    """Continuous branch along a sweep (jumps larger than pi are folded)."""
    return np.unwrap(np.asarray(phases, dtype=float))


def transmission_phase(sol: ScatteringSolution, reference: Optional[float] = None) -> float:
    """Phase of the transmitted wave at the exit relative to the incident wave at the entrance.

    The branch is the one nearest ``reference``; by default that is the free
    phase ``k_out * L`` over the structure length ``L``, so an empty segment
    returns exactly ``k a``.
    """
    t = sol.t
    if abs(t) < PHASE_FLOOR:
        raise UndefinedPhaseError("transmitted amplitude vanishes; phase undefined")
    if reference is None:
        pot = sol.potential
        length = 0.0 if pot.semi_infinite else pot.x_right - pot.x_left
        reference = sol.k_out * length
    return nearest_branch(cmath.phase(t), reference)


def reflection_phase(sol: ScatteringSolution, reference: Optional[float] = None) -> float:
    """Phase of the reflection amplitude ``A`` (principal branch unless ``reference`` is given)."""
    A = sol.A
    if abs(A) < max(PHASE_FLOOR, RESONANCE_FLOOR):
        raise UndefinedPhaseError("reflection amplitude vanishes (resonant transmission)",
                                  resonance=True)
    ph = cmath.phase(A)
    return ph if reference is None else nearest_branch(ph, reference)


# ---------------------------------------------------------------------------
# free particle and step
# ---------------------------------------------------------------------------

def free_flight_time(ctx: ParticleContext, window: FlightWindow) -> TimeResult:
    return TimeResult(ctx.m * window.length / ctx.k, Definition.PHASE, Channel.TRANSMIT,
                      classify_regime(ctx, 0.0, window.length), Method.CLOSED_FORM)


def step_round_trip_time(ctx: ParticleContext, V: float, b: float) -> TimeResult:
    """Time to travel from ``x = -b`` to a step at ``x = 0`` and back.

    Below the step this is ``2b/v + 2m/(kp)``, i.e. the particle also spends
    ``2d/v`` inside the step with penetration depth ``d = 1/p``.  Above the
    step the reflection phase is constant and the time is ``2b/v``.
    """
    if not V > 0:
        raise DomainError("step height must be positive")
    if b < 0:
        raise DomainError("distance to the step must be non-negative")
    _require_not_threshold(ctx, V)
    wn = wavenumbers(ctx, V)
    T = 2.0 * b / classical_velocity(ctx)
    if wn.evanescent:
        T += 2.0 * ctx.m / (wn.k * wn.p)
    return TimeResult(T, Definition.PHASE, Channel.ROUND_TRIP, classify_regime(ctx, V),
                      Method.CLOSED_FORM)


def penetration_depth(ctx: ParticleContext, V: float) -> float:
    wn = wavenumbers(ctx, V)
    if not wn.evanescent:
        raise DomainError("penetration depth is defined only below the step")
    return 1.0 / wn.p


def step_transit_time(ctx: ParticleContext, V: float, b: float, b_after: float):
    """Time from ``x = -b`` to ``x = b_after > 0`` across a step.

    Above the step the two legs simply add, ``b/v + b_after/v'``.  Below it
    the phase picked up beyond the step is imaginary and an
    :class:`EvanescentTransit` is returned instead of a time.
    """
    if b < 0 or b_after < 0:
        raise DomainError("distances must be non-negative")
    _require_not_threshold(ctx, V)
    wn = wavenumbers(ctx, V)
    regime = classify_regime(ctx, V)
    if wn.evanescent:
        return EvanescentTransit(-wn.p * b_after, regime)
    T = ctx.m * b / wn.k + ctx.m * b_after / wn.beta
    return TimeResult(T, Definition.PHASE, Channel.TRANSMIT, regime, Method.CLOSED_FORM)


# ---------------------------------------------------------------------------
# square barrier
# ---------------------------------------------------------------------------

def _sub_barrier_time(m: float, k: float, p: float, a: float) -> float:
    # numerator and denominator divided by cosh^2(pa) to stay finite for thick barriers
    k2, p2 = k * k, p * p
    sech = 1.0 / math.cosh(p * a)
    sech2 = sech * sech
    num = k * (p2 - k2) * a * sech2 + (p2 + k2) ** 2 / (k * p) * math.tanh(p * a)
    den = (p2 + k2) ** 2 - (p2 - k2) ** 2 * sech2
    return 2.0 * m * num / den


def _above_barrier_time(m: float, k: float, beta: float, a: float) -> float:
    k2, b2 = k * k, beta * beta
    num = k * (k2 + b2) * a - (k2 - b2) ** 2 / (2.0 * k * beta) * math.sin(2.0 * beta * a)
    den = (k2 + b2) ** 2 - (k2 - b2) ** 2 * math.cos(beta * a) ** 2
    return 2.0 * m * num / den


def barrier_phase_time(ctx: ParticleContext, V: float, a: float,
                       channel: Channel = Channel.TRANSMIT) -> TimeResult:
    """Closed-form phase time for the square barrier (or well) on ``[0, a]``.

    Transmission and reflection share the same value.  For ``p a > 700`` the
    thick-barrier constant ``1/sqrt(E (V - E))`` is returned with
    ``method=asymptotic``.
    """
    if not a > 0:
        raise DomainError("barrier width must be positive")
    if channel is Channel.ROUND_TRIP:
        raise DomainError("use step_round_trip_time for round trips")
    _require_not_threshold(ctx, V)
    wn = wavenumbers(ctx, V)
    regime = classify_regime(ctx, V, a)
    if wn.evanescent:
        if wn.p * a > MAX_EVANESCENT_EXPONENT:
            T = hartman_limit(ctx, V)
            return TimeResult(T.value, Definition.PHASE, channel, regime, Method.ASYMPTOTIC,
                              notes=("p*a > 700: thick-barrier limit",))
        T = _sub_barrier_time(ctx.m, wn.k, wn.p, a)
    else:
        T = _above_barrier_time(ctx.m, wn.k, wn.beta, a)
    return TimeResult(T, Definition.PHASE, channel, regime, Method.CLOSED_FORM)


def thin_barrier_time(ctx: ParticleContext, V: float, a: float) -> TimeResult:
    """First-order small-width form ``(m a / 2k) (3 + p^2/k^2)``.

    Above the barrier ``p^2`` becomes ``-beta^2``.  Warns when ``p a`` (or
    ``beta a``) exceeds 0.3.
    """
    _require_not_threshold(ctx, V)
    wn = wavenumbers(ctx, V)
    q = wn.pq
    if q * a >= THIN_LIMIT:
        warnings.warn(f"width {a!r} is not thin (q*a = {q * a:.3g})", RegimeWarning,
                      stacklevel=2)
    ratio = (q / wn.k) ** 2
    T = ctx.m * a / (2.0 * wn.k) * (3.0 + (ratio if wn.evanescent else -ratio))
    return TimeResult(T, Definition.PHASE, Channel.TRANSMIT, classify_regime(ctx, V, a),
                      Method.ASYMPTOTIC)


def hartman_limit(ctx: ParticleContext, V: float) -> TimeResult:
    """Width-independent thick-barrier phase time ``2m/(kp) = 1/sqrt(E (V - E))``."""
    E = ctx.E
    if not 0 < E < V or is_threshold(E, V):
        raise DomainError("the thick-barrier limit needs 0 < E < V")
    return TimeResult(1.0 / math.sqrt(E * (V - E)), Definition.PHASE, Channel.TRANSMIT,
                      classify_regime(ctx, V), Method.ASYMPTOTIC)


def effective_velocity(T: TimeResult, a: float) -> float:
    """``a / T``; ``inf`` when the time vanishes (delta-function limit)."""
    if T.value == 0:
        return math.inf
    if T.value < 0:
        raise DomainError("effective velocity needs a positive time")
    return a / T.value


def thick_effective_velocity(ctx: ParticleContext, V: float, a: float) -> float:
    """``a sqrt(E (V - E))``: width over the thick-barrier time, unbounded in ``a``."""
    return a / hartman_limit(ctx, V).value


def superluminal_pa(ctx: ParticleContext) -> float:
    """Critical ``p a = 2 m c / k`` (twice de Broglie over Compton wavelength)."""
    if ctx.c is None:
        raise MissingLightSpeedError("superluminal analysis needs ctx.c")
    return 2.0 * ctx.m * ctx.c / ctx.k


def superluminal_threshold(ctx: ParticleContext, V: float) -> float:
    """Barrier width ``a* = 2mc/(kp)`` beyond which the thick-barrier velocity exceeds ``c``."""
    if ctx.c is None:
        raise MissingLightSpeedError("superluminal analysis needs ctx.c")
    if not 0 < ctx.E < V or is_threshold(ctx.E, V):
        raise DomainError("superluminal onset exists only below the barrier")
    wn = wavenumbers(ctx, V)
    return superluminal_pa(ctx) / wn.p


@dataclass(frozen=True)
class ResonancePoint:
    a: float
    time: TimeResult
    v_eff: float
    v_eff_formula: float


def resonance_time(ctx: ParticleContext, V: float, n: int) -> ResonancePoint:
    """Over-barrier resonance ``beta a = n pi``, where ``P_t = 1``.

    Returns the resonant width, ``T = m a (k^2 + beta^2) / (2 k beta^2)`` and
    the effective velocity both as ``a/T`` and as ``v (E - V)/(E - V/2)``.
    """
    if int(n) != n or n < 1:
        raise DomainError("resonance order must be a positive integer")
    if not ctx.E > V or is_threshold(ctx.E, V):
        raise DomainError("resonances need E > V")
    wn = wavenumbers(ctx, V)
    k, beta = wn.k, wn.beta
    a = n * math.pi / beta
    T = ctx.m * a * (k * k + beta * beta) / (2.0 * k * beta * beta)
    v = classical_velocity(ctx)
    res = TimeResult(T, Definition.PHASE, Channel.TRANSMIT, classify_regime(ctx, V, a),
                     Method.CLOSED_FORM)
    return ResonancePoint(a, res, a / T, v * (ctx.E - V) / (ctx.E - V / 2.0))


@dataclass(frozen=True)
class AntiResonancePoint:
    a: float
    time: TimeResult
    v_eff: float
    mean_velocity: float  # (v + v')/2, the average of outside and over-barrier velocities


def antiresonance_width(ctx: ParticleContext, V: float, n: int = 0) -> float:
    """Width with ``beta a = (n + 1/2) pi``."""
    wn = wavenumbers(ctx, V)
    if wn.evanescent:
        raise DomainError("anti-resonances need E > V")
    return (n + 0.5) * math.pi / wn.beta


def antiresonance_time(ctx: ParticleContext, V: float, a: float,
                       angle_tol: float = DEFAULT_ANGLE_TOL) -> AntiResonancePoint:
    """Anti-resonance ``cos(beta a) = 0``, where ``T = k a / (2E - V)`` holds exactly."""
    if not ctx.E > V or is_threshold(ctx.E, V):
        raise DomainError("anti-resonances need E > V")
    wn = wavenumbers(ctx, V)
    if abs(math.cos(wn.beta * a)) > angle_tol:
        raise DomainError(f"cos(beta a) = {math.cos(wn.beta * a):.3g} is not zero")
    T = wn.k * a / (2.0 * ctx.E - V)
    res = TimeResult(T, Definition.PHASE, Channel.TRANSMIT, classify_regime(ctx, V, a, angle_tol=angle_tol),
                     Method.CLOSED_FORM)
    mean_v = 0.5 * (wn.k + wn.beta) / ctx.m
    return AntiResonancePoint(a, res, a / T, mean_v)


def large_width_time(ctx: ParticleContext, V: float, a: float) -> float:
    """Secular part ``2 m k a / (k^2 + beta^2)`` of the over-barrier time."""
    wn = wavenumbers(ctx, V)
    if wn.evanescent:
        raise DomainError("the linear-growth form applies above the barrier")
    return 2.0 * ctx.m * wn.k * a / (wn.k ** 2 + wn.beta ** 2)


def delta_family_height(C: float, a: float, law: str = "Va2") -> float:
    """Barrier height for the delta-function family at width ``a``.

    ``law="Va2"`` keeps ``V a^2 = C`` (the scaling under which the phase time
    vanishes); ``law="Va"`` keeps the conventional strength ``V a = C``.
    """
    if law == "Va2":
        return C / (a * a)
    if law == "Va":
        return C / a
    raise DomainError(f"unknown delta-family law {law!r}")
