"""
Independent numerical checks of the closed-form times.

:func:`phase_time_numeric` differentiates the phase of a transfer-matrix
solution with respect to energy (central differences + Richardson
extrapolation) and shares nothing with the closed forms beyond the solver.
:func:`verify_identities` runs every closed form and identity against it on
a grid and returns a machine-readable report.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import phase_clock, weak_time
from .errors import BranchJumpError, DomainError, NonConvergenceError, ThresholdError
from .kinematics import ParticleContext, classify_regime, is_threshold, wavenumbers
from .phase_clock import Channel, Definition, FlightWindow, Method, TimeResult
from .scattering import PiecewisePotential, solve_barrier, solve_piecewise

#: largest base step allowed, as a fraction of min(E, |V - E|)
MAX_STEP_FRACTION = 1e-4


@dataclass(frozen=True)
class DerivativeConfig:
    """Probe settings for the numerical energy derivative.

    ``base_step`` is the initial energy offset; ``None`` picks the largest
    allowed value, ``1e-4 * min(E, |V - E|)`` over all segments.
    """

    base_step: Optional[float] = None
    richardson_levels: int = 3
    max_relative_error: float = 1e-8

    def __post_init__(self):
        if self.richardson_levels < 1:
            raise DomainError("need at least one Richardson level")
        if self.base_step is not None and not self.base_step > 0:
            raise DomainError("base_step must be positive")


def energy_scale(pot: PiecewisePotential, E: float) -> float:
    """``min(E, |V_j - E|)`` over every segment: the distance to the nearest singular energy."""
    return min([E] + [abs(s.V - E) for s in pot.segments])


def resolve_step(pot: PiecewisePotential, E: float, cfg: DerivativeConfig) -> float:
    limit = MAX_STEP_FRACTION * energy_scale(pot, E)
    if cfg.base_step is None:
        return limit
    if cfg.base_step > limit * (1 + 1e-12):
        raise DomainError(f"base_step {cfg.base_step:.3g} exceeds 1e-4 * min(E, |V-E|) = {limit:.3g}")
    return cfg.base_step


def richardson(f: Callable[[float], float], x: float, h: float, levels: int):
    """Central-difference derivative of ``f`` at ``x`` with Richardson extrapolation.

    Steps are ``h, h/2, ...``; the tableau removes even error orders.  Returns
    the final estimate and the sequence of level-to-level error estimates.
    """
    table = []
    errors = []
    for i in range(levels):
        hi = h / 2 ** i
        row = [(f(x + hi) - f(x - hi)) / (2.0 * hi)]
        for j in range(1, i + 1):
            prev = table[i - 1][j - 1]
            row.append(row[j - 1] + (row[j - 1] - prev) / (4 ** j - 1))
        if i:
            errors.append(abs(row[i] - table[i - 1][i - 1]))
        table.append(row)
    return table[-1][-1], errors


def _phase_function(pot: PiecewisePotential, ctx: ParticleContext, channel: Channel,
                    b: float) -> Callable[[float], float]:
    def raw(E: float) -> float:
        sol = solve_piecewise(ctx.with_energy(E), pot)
        if channel is Channel.TRANSMIT:
            return phase_clock.transmission_phase(sol, reference=0.0)
        ph = phase_clock.reflection_phase(sol)
        if channel is Channel.ROUND_TRIP:
            ph += 2.0 * sol.k * b
        return ph
    return raw


def phase_time_numeric(pot: PiecewisePotential, ctx: ParticleContext,
                       channel: Channel = Channel.TRANSMIT,
                       cfg: DerivativeConfig = DerivativeConfig(),
                       b: float = 0.0) -> TimeResult:
    """Phase time as the numerical energy derivative of the scattering phase.

    ``channel`` picks the transmission phase, the reflection phase, or the
    round trip from ``x = x_left - b`` back to the same point (reflection
    phase plus ``2 k b``).

    Raises
    ------
    BranchJumpError
        If five probe energies around ``E`` do not lie on one smooth branch.
    NonConvergenceError
        If the Richardson error estimate exceeds ``cfg.max_relative_error``.
    """
    E = ctx.E
    for s in pot.segments:
        if is_threshold(E, s.V):
            raise ThresholdError(f"E is at the threshold of segment V={s.V!r}")
    h = resolve_step(pot, E, cfg)
    raw = _phase_function(pot, ctx, channel, b)

    centre = raw(E)
    probes = np.unwrap([raw(E + j * h) for j in (-2, -1, 0, 1, 2)])
    if np.max(np.abs(np.diff(probes))) > math.pi / 2:
        raise BranchJumpError(f"phase jumps by more than pi/2 within {4 * h:.3g} of E={E!r}")

    def lifted(x: float) -> float:
        return phase_clock.nearest_branch(raw(x), centre)

    value, errors = richardson(lifted, E, h, cfg.richardson_levels)
    err = errors[-1] if errors else math.nan
    if errors and err > cfg.max_relative_error * max(abs(value), 1e-300):
        raise NonConvergenceError(f"derivative error estimate {err:.3g} too large at E={E!r}")
    V = max((s.V for s in pot.segments), key=abs)
    width = 0.0 if pot.semi_infinite else pot.x_right - pot.x_left
    return TimeResult(value, Definition.PHASE, channel, classify_regime(ctx, V, width),
                      Method.NUMERIC_DERIVATIVE, error=err)


# ---------------------------------------------------------------------------
# batch verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Points for :func:`verify_identities`.

    Energies are fractions of ``V``; values closer than ``guard`` (also a
    fraction of ``V``) to ``V``, ``V/2`` or ``0`` are dropped where the
    identity in question is singular there.
    """

    m: float = 1.0
    V: float = 2.0
    sub_fractions: tuple = (0.1, 0.3, 0.5, 0.7, 0.9)
    above_fractions: tuple = (1.2, 1.6, 2.5, 4.0)
    widths: tuple = (0.3, 1.0, 2.0, 4.0)
    step_b: float = 1.0
    c: float = 20.0
    guard: float = 0.02
    tol: Optional[float] = None  # overrides every per-identity tolerance


DEFAULT_TOLERANCES = {
    "free_flight vs numeric": 1e-9,
    "barrier_phase_time vs numeric": 1e-8,
    "above_barrier_phase_time vs numeric": 1e-8,
    "step_round_trip_time vs numeric": 1e-8,
    "reflection vs transmission time": 1e-8,
    "time_ratio formula vs direct": 1e-8,
    "steinberg_time vs dwell quadrature": 1e-8,
    "steinberg below phase time": 0.0,
    "hartman saturation": 1e-8,
    "flux conservation": 1e-10,
    "matching residual": 1e-10,
    "over-barrier velocity below c": 0.0,
}


@dataclass
class IdentityResult:
    name: str
    tolerance: float
    max_deviation: float = 0.0
    n_points: int = 0
    worst_point: Optional[dict] = None
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.max_deviation <= self.tolerance

    def record(self, deviation: float, point: dict):
        self.n_points += 1
        if not math.isfinite(deviation):
            self.failures.append({"point": point, "error": "non-finite deviation"})
            return
        if deviation >= self.max_deviation:
            self.max_deviation = deviation
            self.worst_point = point

    def fail(self, point: dict, exc: Exception):
        self.n_points += 1
        self.failures.append({"point": point, "error": f"{type(exc).__name__}: {exc}"})

    def to_dict(self) -> dict:
        return {"name": self.name, "tolerance": self.tolerance,
                "max_deviation": self.max_deviation, "n_points": self.n_points,
                "passed": self.passed, "worst_point": self.worst_point,
                "failures": self.failures}


@dataclass
class VerificationReport:
    grid: GridSpec
    results: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def to_dict(self) -> dict:
        return {"passed": self.passed, "grid": asdict(self.grid),
                "identities": {k: v.to_dict() for k, v in self.results.items()}}

    def summary_lines(self) -> list:
        out = []
        for r in self.results.values():
            status = "PASS" if r.passed else "FAIL"
            out.append(f"{status}  {r.name:40s} max_dev={r.max_deviation:.3e} "
                       f"tol={r.tolerance:.1e} n={r.n_points}")
        return out


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def verify_identities(grid: GridSpec = GridSpec(),
                      cfg: DerivativeConfig = DerivativeConfig()) -> VerificationReport:
    """Check every closed form and identity on ``grid``; failures are data, not exceptions."""
    tols = {k: (grid.tol if grid.tol is not None and v > 0 else v)
            for k, v in DEFAULT_TOLERANCES.items()}
    res = {k: IdentityResult(k, tols[k]) for k in DEFAULT_TOLERANCES}
    m, V = grid.m, grid.V

    def guarded(frac: float, singular) -> bool:
        return all(abs(frac - s) > grid.guard for s in singular)

    def attempt(name: str, point: dict, fn: Callable[[], float]):
        try:
            res[name].record(fn(), point)
        except Exception as exc:  # failures are data
            res[name].fail(point, exc)

    for a in grid.widths:
        pot = PiecewisePotential.free(a)
        ctx = ParticleContext(m, 1.0)
        attempt("free_flight vs numeric", {"a": a},
                lambda: _rel(phase_time_numeric(pot, ctx, cfg=cfg).value,
                             phase_clock.free_flight_time(ctx, FlightWindow(0.0, a)).value))

    for frac in grid.sub_fractions:
        if not guarded(frac, (0.0, 1.0)):
            continue
        ctx = ParticleContext(m, frac * V, grid.c)
        for a in grid.widths:
            pt = {"E": ctx.E, "V": V, "a": a}
            pot = PiecewisePotential.barrier(V, a)

            def closed_vs_numeric():
                T = phase_clock.barrier_phase_time(ctx, V, a).value
                return _rel(phase_time_numeric(pot, ctx, cfg=cfg).value, T)

            def refl_vs_trans():
                Tt = phase_time_numeric(pot, ctx, Channel.TRANSMIT, cfg).value
                Tr = phase_time_numeric(pot, ctx, Channel.REFLECT, cfg).value
                return _rel(Tr, Tt)

            def steinberg_vs_dwell():
                Ts = weak_time.steinberg_time(ctx, V, a).value
                return _rel(weak_time.dwell_time(solve_barrier(ctx, V, a)).value, Ts)

            def ordering():
                Ts = weak_time.steinberg_time(ctx, V, a).value
                T = phase_clock.barrier_phase_time(ctx, V, a).value
                return max(0.0, Ts - T)

            def flux():
                return solve_barrier(ctx, V, a).flux_residual()

            def matching():
                return max(solve_barrier(ctx, V, a).matching_residuals())

            attempt("barrier_phase_time vs numeric", pt, closed_vs_numeric)
            attempt("reflection vs transmission time", pt, refl_vs_trans)
            attempt("steinberg_time vs dwell quadrature", pt, steinberg_vs_dwell)
            attempt("steinberg below phase time", pt, ordering)
            attempt("flux conservation", pt, flux)
            attempt("matching residual", pt, matching)
            if guarded(frac, (0.5,)):
                attempt("time_ratio formula vs direct", pt,
                        lambda: _rel(weak_time.time_ratio(ctx, V, a),
                                     phase_clock.barrier_phase_time(ctx, V, a).value
                                     / weak_time.steinberg_time(ctx, V, a).value))

        pt = {"E": ctx.E, "V": V, "b": grid.step_b}
        attempt("step_round_trip_time vs numeric", pt,
                lambda: _rel(phase_time_numeric(PiecewisePotential.step(V), ctx,
                                                Channel.ROUND_TRIP, cfg, b=grid.step_b).value,
                             phase_clock.step_round_trip_time(ctx, V, grid.step_b).value))

        def hartman():
            p = wavenumbers(ctx, V).p
            exact = phase_clock.barrier_phase_time(ctx, V, 20.0 / p).value
            return _rel(exact, phase_clock.hartman_limit(ctx, V).value)

        attempt("hartman saturation", {"E": ctx.E, "V": V, "pa": 20.0}, hartman)

    for frac in grid.above_fractions:
        if not guarded(frac, (1.0,)):
            continue
        ctx = ParticleContext(m, frac * V, grid.c)
        for a in grid.widths:
            pt = {"E": ctx.E, "V": V, "a": a}
            pot = PiecewisePotential.barrier(V, a)
            attempt("above_barrier_phase_time vs numeric", pt,
                    lambda: _rel(phase_time_numeric(pot, ctx, cfg=cfg).value,
                                 phase_clock.barrier_phase_time(ctx, V, a).value))
            attempt("flux conservation", pt, lambda: solve_barrier(ctx, V, a).flux_residual())
            attempt("matching residual", pt,
                    lambda: max(solve_barrier(ctx, V, a).matching_residuals()))

            def below_c():
                T = phase_clock.barrier_phase_time(ctx, V, a)
                return max(0.0, phase_clock.effective_velocity(T, a) - grid.c)

            attempt("over-barrier velocity below c", pt, below_c)
        pt = {"E": ctx.E, "V": V, "b": grid.step_b}
        attempt("step_round_trip_time vs numeric", pt,
                lambda: _rel(phase_time_numeric(PiecewisePotential.step(V), ctx,
                                                Channel.ROUND_TRIP, cfg, b=grid.step_b).value,
                             phase_clock.step_round_trip_time(ctx, V, grid.step_b).value))

    return VerificationReport(grid, res)
