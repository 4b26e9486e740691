"""
Units, wavenumbers and regime classification.

Everything is in natural units with hbar = 1.  A particle of mass ``m`` and
energy ``E`` has free wavenumber ``k = sqrt(2 m E)`` and classical velocity
``v = k / m``.  Inside a region of constant potential ``V`` the wave function
is either evanescent with decay constant ``p = sqrt(2 m (V - E))`` (E < V) or
oscillatory with wavenumber ``beta = sqrt(2 m (E - V))`` (E > V).

The light speed ``c`` is a free parameter and only enters the superluminal
analysis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import DomainError, ThresholdError

#: relative width of the band around E == V where closed forms are refused
THRESHOLD_GUARD = 1e-12
#: default fraction used for the "near E = 0" / "near E = V" warnings
DEFAULT_ETA = 0.05
#: default angular tolerance (radians) for resonance / anti-resonance detection
DEFAULT_ANGLE_TOL = 1e-6
#: relative offset used for one-sided evaluation next to the threshold
ONE_SIDED_OFFSET = 1e-6


@dataclass(frozen=True)
class ParticleContext:
    """Mass, energy and (optionally) the light speed of the incident particle."""

    m: float
    E: float
    c: Optional[float] = None

    def __post_init__(self):
        if not (self.m > 0 and math.isfinite(self.m)):
            raise DomainError(f"mass must be positive and finite, got {self.m!r}")
        if not (self.E > 0 and math.isfinite(self.E)):
            raise DomainError(f"energy must be positive and finite, got {self.E!r}")
        if self.c is not None and not (self.c > 0):
            raise DomainError(f"light speed must be positive, got {self.c!r}")

    @property
    def k(self) -> float:
        return math.sqrt(2.0 * self.m * self.E)

    def with_energy(self, E: float) -> "ParticleContext":
        return replace(self, E=E)


@dataclass(frozen=True)
class Wavenumbers:
    """``k`` plus exactly one of ``p`` (E < V) and ``beta`` (E > V)."""

    k: float
    p: Optional[float] = None
    beta: Optional[float] = None

    @property
    def evanescent(self) -> bool:
        return self.p is not None

    @property
    def pq(self) -> float:
        """Whichever of ``p`` / ``beta`` is populated."""
        return self.p if self.p is not None else self.beta


class Regime(str, enum.Enum):
    SUB_BARRIER = "sub_barrier"
    ABOVE_BARRIER = "above_barrier"
    THRESHOLD = "threshold"
    FREE = "free"


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    near_zero_energy: bool = False
    near_threshold: bool = False
    resonance_order: Optional[int] = None
    anti_resonance: bool = False

    @property
    def trustworthy(self) -> bool:
        """False near E = 0 or E = V, where the clock's perturbative expansion fails."""
        return not (self.near_zero_energy or self.near_threshold
                    or self.regime is Regime.THRESHOLD)

    def flags(self) -> list[str]:
        out = []
        if self.near_zero_energy:
            out.append("near_zero_energy")
        if self.near_threshold:
            out.append("near_threshold")
        if self.resonance_order is not None:
            out.append(f"resonance_n{self.resonance_order}")
        if self.anti_resonance:
            out.append("anti_resonance")
        return out

    def label(self) -> str:
        return "+".join([self.regime.value] + self.flags())


def is_threshold(E: float, V: float) -> bool:
    """True when ``E`` sits inside the guard band around ``V``."""
    return abs(E - V) <= THRESHOLD_GUARD * max(abs(V), abs(E))


def wavenumbers(ctx: ParticleContext, V: float) -> Wavenumbers:
    """Wavenumbers of ``ctx`` in a region of constant potential ``V``.

    Raises
    ------
    ThresholdError
        If ``E`` equals ``V`` within the guard band.
    """
    if is_threshold(ctx.E, V):
        raise ThresholdError(f"E={ctx.E!r} is at the threshold V={V!r}")
    k = ctx.k
    if ctx.E < V:
        return Wavenumbers(k=k, p=math.sqrt(2.0 * ctx.m * (V - ctx.E)))
    return Wavenumbers(k=k, beta=math.sqrt(2.0 * ctx.m * (ctx.E - V)))


def classical_velocity(ctx: ParticleContext) -> float:
    return ctx.k / ctx.m


def classify_regime(ctx: ParticleContext, V: float, a: float = 0.0,
                    eta: float = DEFAULT_ETA,
                    angle_tol: float = DEFAULT_ANGLE_TOL) -> RegimeReport:
    """Classify ``(E, V, a)`` and flag the points where phase times are unreliable.

    ``near_zero_energy`` and ``near_threshold`` use the fraction ``eta`` of
    ``|V|``.  Over the barrier, ``resonance_order`` is the integer ``n >= 1``
    with ``|beta a - n pi| <= angle_tol`` and ``anti_resonance`` marks
    ``|cos(beta a)| <= angle_tol``.
    """
    if a < 0:
        raise DomainError(f"width must be non-negative, got {a!r}")
    if not 0 < eta < 1:
        raise DomainError(f"eta must lie in (0, 1), got {eta!r}")
    E = ctx.E
    scale = abs(V)
    near_zero = E < eta * scale
    near_thr = abs(E - V) < eta * scale
    if V == 0:
        return RegimeReport(Regime.FREE)
    if is_threshold(E, V):
        return RegimeReport(Regime.THRESHOLD, near_zero, True)
    if E < V:
        return RegimeReport(Regime.SUB_BARRIER, near_zero, near_thr)
    beta = math.sqrt(2.0 * ctx.m * (E - V))
    phase = beta * a
    n = round(phase / math.pi)
    order = n if n >= 1 and abs(phase - n * math.pi) <= angle_tol else None
    anti = a > 0 and abs(math.cos(phase)) <= angle_tol
    return RegimeReport(Regime.ABOVE_BARRIER, near_zero, near_thr, order, anti)


def one_sided_context(ctx: ParticleContext, V: float, side: int) -> ParticleContext:
    """Context moved to ``E = V (1 + side * 1e-6)`` for one-sided threshold probes.

    Results computed there lie in the untrustworthy band and carry the
    ``near_threshold`` flag.
    """
    if side not in (-1, 1):
        raise DomainError("side must be -1 (below) or +1 (above)")
    if V <= 0:
        raise DomainError("one-sided probes need a positive threshold V")
    return ctx.with_energy(V * (1.0 + side * ONE_SIDED_OFFSET))
