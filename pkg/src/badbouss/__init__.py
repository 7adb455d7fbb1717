"""Damped Fourier solver and verification workbench for the "bad" Boussinesq
equation u_tt - u_xx - (u^2)_xx - u_xxxx = 0.

The solver evolves the truncated Fourier coefficients of the equivalent
first-order system with a smooth damping ramp at the window edges; the
verification side provides exact solitons, the direct-scattering transform
of the initial data, and the long-time asymptotic references built from it.
"""

from .scheme import SchemeConfig, prepare_initial_state
from .spectral import PeriodicGrid, PhysicalField, SpectralField
from .timestep import BlowUpError, Trajectory, reconstruct, simulate
from .waves import (
    GaussianSum,
    PerturbedSoliton,
    SolitonDescriptor,
    SolitonWave,
    initial_state,
    linf_error,
    soliton_value,
    track_peak,
)

__all__ = [
    "BlowUpError",
    "GaussianSum",
    "PeriodicGrid",
    "PerturbedSoliton",
    "PhysicalField",
    "SchemeConfig",
    "SolitonDescriptor",
    "SolitonWave",
    "SpectralField",
    "Trajectory",
    "initial_state",
    "linf_error",
    "prepare_initial_state",
    "reconstruct",
    "simulate",
    "soliton_value",
    "track_peak",
]

__version__ = "0.1.0"
