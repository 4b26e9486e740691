"""Traversal times for stationary scattering off 1D piecewise-constant potentials."""

from .errors import (BranchJumpError, DomainError, MissingLightSpeedError,
                     NonConvergenceError, RegimeWarning, ThresholdError, TunnelTimeError,
                     UndefinedPhaseError, WidthOverflowError)
from .kinematics import (ParticleContext, Regime, RegimeReport, Wavenumbers,
                         classical_velocity, classify_regime, one_sided_context, wavenumbers)
from .oracle import DerivativeConfig, GridSpec, phase_time_numeric, verify_identities
from .phase_clock import (Channel, Definition, FlightWindow, Method, TimeResult,
                          antiresonance_time, barrier_phase_time, effective_velocity,
                          free_flight_time, hartman_limit, reflection_phase, resonance_time,
                          step_round_trip_time, superluminal_threshold, thin_barrier_time,
                          transmission_phase)
from .scattering import (PiecewisePotential, ScatteringSolution, Segment, solve_barrier,
                         solve_piecewise, solve_step, transmission_thick_approx)
from .weak_time import (DefinitionComparison, dwell_time, partition_check,
                        steinberg_low_energy_behavior, steinberg_time, time_ratio)

__version__ = "0.1.0"
