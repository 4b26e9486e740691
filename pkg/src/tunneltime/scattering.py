"""
Stationary scattering off piecewise-constant potentials.

The particle comes in from the left, where ``V = 0``.  Each region carries
its own pair of basis functions referenced to the region's left edge ``x0``:

* oscillatory (E > V):  ``exp(+i q (x - x0))``, ``exp(-i q (x - x0))``
* evanescent  (E < V):  ``exp(+p (x - x0))``,  ``exp(-p (x - x0))``

The left lead is referenced to the first interface and holds ``(1, A)``.
The right lead holds ``(t, 0)`` when it is oscillatory and ``(0, B)`` (pure
decay) when it is a semi-infinite forbidden region such as a high step.
Coefficients are obtained by propagating the value/derivative pair from the
right lead to the left one and normalising the incident amplitude to 1.

For the square barrier on ``[0, a]`` this reproduces the familiar notation
``e^{ikx} + A e^{-ikx}``, ``B e^{px} + C e^{-px}``, ``D e^{ikx}`` with
``D = t e^{-ika}``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, RegimeWarning, ThresholdError, WidthOverflowError
from .kinematics import ParticleContext, is_threshold

#: largest p * width accepted for a single evanescent segment
MAX_EVANESCENT_EXPONENT = 700.0


@dataclass(frozen=True)
class Segment:
    x_start: float
    x_end: float
    V: float

    @property
    def width(self) -> float:
        return self.x_end - self.x_start


@dataclass(frozen=True)
class PiecewisePotential:
    """Contiguous constant-potential segments between two leads.

    The left lead (``x < segments[0].x_start``) always has ``V = 0``.  The
    right lead has ``V = 0`` unless the last segment runs to ``+inf``, in
    which case that segment *is* the right lead (the potential step).
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*map(float, s))
                     for s in self.segments)
        if not segs:
            raise DomainError("a potential needs at least one segment")
        for i, s in enumerate(segs):
            if not math.isfinite(s.x_start):
                raise DomainError(f"segment {i} has a non-finite start")
            if not s.x_end > s.x_start:
                raise DomainError(f"segment {i} has non-positive width")
            if not math.isfinite(s.V):
                raise DomainError(f"segment {i} has a non-finite potential")
            if math.isinf(s.x_end) and i != len(segs) - 1:
                raise DomainError("only the last segment may extend to infinity")
        for i, (s0, s1) in enumerate(zip(segs, segs[1:])):
            if s0.x_end != s1.x_start:
                raise DomainError(f"segments {i} and {i + 1} are not contiguous")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def from_list(cls, triples: Sequence) -> "PiecewisePotential":
        return cls(tuple(Segment(*map(float, t)) for t in triples))

    @classmethod
    def step(cls, V: float) -> "PiecewisePotential":
        return cls((Segment(0.0, math.inf, V),))

    @classmethod
    def barrier(cls, V: float, a: float) -> "PiecewisePotential":
        return cls((Segment(0.0, a, V),))

    @classmethod
    def well(cls, V: float, a: float) -> "PiecewisePotential":
        if not V < 0:
            raise DomainError(f"a well needs V < 0, got {V!r}")
        return cls.barrier(V, a)

    @classmethod
    def free(cls, width: float) -> "PiecewisePotential":
        return cls.barrier(0.0, width)

    @property
    def x_left(self) -> float:
        return self.segments[0].x_start

    @property
    def x_right(self) -> float:
        return self.segments[-1].x_end

    @property
    def semi_infinite(self) -> bool:
        return math.isinf(self.x_right)

    @property
    def right_lead_V(self) -> float:
        return self.segments[-1].V if self.semi_infinite else 0.0

    @property
    def interior(self) -> tuple:
        """Finite segments, i.e. everything except a semi-infinite right lead."""
        return self.segments[:-1] if self.semi_infinite else self.segments

    def potential_at(self, x: float) -> float:
        for s in self.segments:
            if s.x_start <= x < s.x_end:
                return s.V
        return self.right_lead_V if x >= self.x_right else 0.0

    def split(self, index: int, at: float) -> "PiecewisePotential":
        """Same potential with segment ``index`` cut in two at ``at``."""
        s = self.segments[index]
        if not s.x_start < at < s.x_end:
            raise DomainError("split point must lie strictly inside the segment")
        parts = (Segment(s.x_start, at, s.V), Segment(at, s.x_end, s.V))
        return PiecewisePotential(self.segments[:index] + parts + self.segments[index + 1:])


@dataclass(frozen=True)
class Region:
    """One region of constant potential and its two basis coefficients."""

    x_start: float  # -inf for the left lead
    x_end: float    # +inf for the right lead
    x_ref: float
    V: float
    evanescent: bool
    q: float        # beta (oscillatory) or p (evanescent)
    c1: complex
    c2: complex

    def basis(self, x):
        d = x - self.x_ref
        if self.evanescent:
            return np.exp(self.q * d), np.exp(-self.q * d)
        return np.exp(1j * self.q * d), np.exp(-1j * self.q * d)

    def psi(self, x):
        f1, f2 = self.basis(x)
        return self.c1 * f1 + self.c2 * f2

    def dpsi(self, x):
        f1, f2 = self.basis(x)
        if self.evanescent:
            return self.q * (self.c1 * f1 - self.c2 * f2)
        return 1j * self.q * (self.c1 * f1 - self.c2 * f2)

    def flux(self, m: float) -> float:
        """Probability current ``Im(psi* psi') / m`` (position independent)."""
        if self.evanescent:
            return -2.0 * self.q * (self.c1.conjugate() * self.c2).imag / m
        return self.q * (abs(self.c1) ** 2 - abs(self.c2) ** 2) / m


@dataclass(frozen=True)
class ScatteringSolution:
    ctx: ParticleContext
    potential: PiecewisePotential
    regions: tuple

    @property
    def A(self) -> complex:
        """Reflection amplitude, referenced to the first interface."""
        return self.regions[0].c2

    @property
    def t(self) -> complex:
        """Transmitted amplitude at the exit point (zero for a blocking step)."""
        last = self.regions[-1]
        return 0j if last.evanescent else last.c1

    @property
    def D(self) -> complex:
        """Transmitted amplitude with both leads referenced to the first interface."""
        last = self.regions[-1]
        if last.evanescent:
            return 0j
        return last.c1 * cmath.exp(-1j * last.q * (last.x_ref - self.potential.x_left))

    @property
    def k(self) -> float:
        return self.regions[0].q

    @property
    def k_out(self) -> float:
        last = self.regions[-1]
        return 0.0 if last.evanescent else last.q

    @property
    def P_r(self) -> float:
        return abs(self.A) ** 2

    @property
    def P_t(self) -> float:
        """Flux-weighted transmission probability ``(k_out / k) |t|^2``."""
        return self.k_out / self.k * abs(self.t) ** 2

    @property
    def amplitudes(self) -> list:
        return [(r.c1, r.c2) for r in self.regions]

    def region_at(self, x: float) -> Region:
        for r in self.regions:
            if r.x_start <= x < r.x_end:
                return r
        return self.regions[-1]

    def psi(self, x):
        """Wave function at scalar or array ``x``."""
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape, dtype=complex)
        for r in self.regions:
            mask = (x >= r.x_start) & (x < r.x_end)
            if r is self.regions[-1]:
                mask |= x >= r.x_end
            if mask.any():
                out[mask] = r.psi(x[mask])
        return out[()] if out.ndim == 0 else out

    def flux_residual(self) -> float:
        """``|1 - P_r - P_t|``; zero when probability current is conserved."""
        return abs(1.0 - self.P_r - self.P_t)

    def matching_residuals(self) -> list:
        """Relative jumps of psi and psi' at every interface."""
        out = []
        for left, right in zip(self.regions, self.regions[1:]):
            x = right.x_start
            u_l, u_r = left.psi(x), right.psi(x)
            d_l, d_r = left.dpsi(x), right.dpsi(x)
            scale_u = max(abs(u_l), abs(u_r), 1.0)
            scale_d = max(abs(d_l), abs(d_r), self.k)
            out.append(max(abs(u_l - u_r) / scale_u, abs(d_l - d_r) / scale_d))
        return out


def _coeffs_from_value(u: complex, du: complex, evanescent: bool, q: float,
                       offset: float) -> tuple:
    """Basis coefficients of a region reproducing ``(psi, psi')`` at ``x_ref + offset``."""
    if evanescent:
        g = math.exp(-q * offset)
        return 0.5 * (u + du / q) * g, 0.5 * (u - du / q) / g
    ph = cmath.exp(-1j * q * offset)
    return 0.5 * (u - 1j * du / q) * ph, 0.5 * (u + 1j * du / q) / ph


def _region_kind(ctx: ParticleContext, V: float, index) -> tuple:
    if is_threshold(ctx.E, V):
        where = "lead" if index is None else f"segment {index}"
        raise ThresholdError(f"E={ctx.E!r} equals V={V!r} in {where}", segment=index)
    if ctx.E < V:
        return True, math.sqrt(2.0 * ctx.m * (V - ctx.E))
    return False, math.sqrt(2.0 * ctx.m * (ctx.E - V))


def solve_piecewise(ctx: ParticleContext, pot: PiecewisePotential) -> ScatteringSolution:
    """Solve the matching problem for an arbitrary piecewise-constant potential.

    Raises
    ------
    ThresholdError
        If ``E`` equals the potential of any segment.
    WidthOverflowError
        If an evanescent segment has ``p * width > 700``.
    """
    layout = [(-math.inf, pot.x_left, pot.x_left, 0.0, None)]
    for i, s in enumerate(pot.interior):
        layout.append((s.x_start, s.x_end, s.x_start, s.V, i))
    if pot.semi_infinite:
        last = pot.segments[-1]
        layout.append((last.x_start, math.inf, last.x_start, last.V, len(pot.segments) - 1))
    else:
        layout.append((pot.x_right, math.inf, pot.x_right, 0.0, None))

    kinds = []
    for x0, x1, _, V, idx in layout:
        ev, q = _region_kind(ctx, V, idx)
        if ev and math.isfinite(x1) and math.isfinite(x0) and q * (x1 - x0) > MAX_EVANESCENT_EXPONENT:
            raise WidthOverflowError(
                f"segment {idx} has p*w = {q * (x1 - x0):.1f} > {MAX_EVANESCENT_EXPONENT:.0f}; "
                "use the thick-barrier asymptotics instead")
        kinds.append((ev, q))

    # right lead: outgoing wave or pure decay, unnormalised
    ev, q = kinds[-1]
    coeffs = [None] * len(layout)
    coeffs[-1] = (0j, 1 + 0j) if ev else (1 + 0j, 0j)
    for j in range(len(layout) - 1, 0, -1):
        ev_r, q_r = kinds[j]
        c1, c2 = coeffs[j]
        u = c1 + c2
        du = (q_r if ev_r else 1j * q_r) * (c1 - c2)
        ev_l, q_l = kinds[j - 1]
        x_int = layout[j][2]
        offset = x_int - layout[j - 1][2]
        coeffs[j - 1] = _coeffs_from_value(u, du, ev_l, q_l, offset)

    incident = coeffs[0][0]
    if not (cmath.isfinite(incident) and incident != 0):
        raise WidthOverflowError("transfer propagation overflowed; reduce the evanescent widths")
    regions = []
    for (x0, x1, xref, V, _), (ev, q), (c1, c2) in zip(layout, kinds, coeffs):
        regions.append(Region(x0, x1, xref, V, ev, q, c1 / incident, c2 / incident))
    return ScatteringSolution(ctx, pot, tuple(regions))


def solve_step(ctx: ParticleContext, V: float) -> ScatteringSolution:
    """Potential step of height ``V > 0`` at ``x = 0``."""
    if not V > 0:
        raise DomainError(f"step height must be positive, got {V!r}")
    return solve_piecewise(ctx, PiecewisePotential.step(V))


def solve_barrier(ctx: ParticleContext, V: float, a: float) -> ScatteringSolution:
    """Square barrier (``V > 0``) or well (``V < 0``) occupying ``[0, a]``."""
    if not a > 0:
        raise DomainError(f"barrier width must be positive, got {a!r}")
    return solve_piecewise(ctx, PiecewisePotential.barrier(V, a))


def transmission_thick_approx(ctx: ParticleContext, V: float, a: float) -> float:
    """Opaque-barrier transmission ``16 (E / V^2) (V - E) exp(-2 p a)``.

    Only meaningful for ``p a >> 1``: refused below 3, warned below 5.
    """
    E = ctx.E
    if E >= V:
        raise DomainError("thick-barrier transmission needs E < V")
    p = math.sqrt(2.0 * ctx.m * (V - E))
    pa = p * a
    if pa < 3:
        raise DomainError(f"p*a = {pa:.3g} is too small for the opaque-barrier form")
    if pa < 5:
        warnings.warn(f"p*a = {pa:.3g} < 5: opaque-barrier transmission is rough",
                      RegimeWarning, stacklevel=2)
    return 16.0 * (E / V ** 2) * (V - E) * math.exp(-2.0 * pa)
