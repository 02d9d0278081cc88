"""Spectral simulator for the quantum bouncer.

A particle under a constant downward force above a hard wall, expanded in
the Airy eigenbasis and evolved exactly in time.  Covers the short-term
quasi-classical motion, the collapsed phase, and the revivals through
expectation values, uncertainties, and the autocorrelation function.
"""

from .airy import airy_ai, airy_zero
from .classical import (
    ClassicalMoments,
    ClassicalState,
    Timescales,
    classical_moments,
    classical_momentum_density,
    classical_position_density,
    momentum_band,
    timescales,
    trajectory,
    trajectory_series,
)
from .evolution import (
    EvolutionMatrices,
    IntegrationError,
    MomentumDensity,
    ObservableSeries,
    autocorrelation,
    expect_momentum,
    expect_position,
    local_average,
    mean_energy,
    momentum_density,
    observable_series,
    wavefunction_at,
    write_density_csv,
    write_series_csv,
)
from .reference_models import (
    AcceleratingPacket,
    ShoPacket,
    accelerating_observables,
    sho_observables,
    spread_envelope,
)
from .spectrum import (
    PAPER_UNITS,
    Basis,
    Eigenstate,
    SolverError,
    UnitSystem,
    bouncer_basis,
    load_basis,
    numerov_eigenstates,
    save_basis,
)
from .wavepacket import (
    CoefficientSet,
    InsufficientBasisError,
    PacketSpec,
    StaleCacheError,
    gaussian_amplitude,
    load_coeffs,
    project,
    save_coeffs,
    suggest_nmax,
)

__version__ = "0.1.0"

__all__ = [
    "airy_ai",
    "airy_zero",
    "UnitSystem",
    "PAPER_UNITS",
    "Eigenstate",
    "Basis",
    "SolverError",
    "bouncer_basis",
    "numerov_eigenstates",
    "save_basis",
    "load_basis",
    "PacketSpec",
    "CoefficientSet",
    "InsufficientBasisError",
    "StaleCacheError",
    "gaussian_amplitude",
    "project",
    "suggest_nmax",
    "save_coeffs",
    "load_coeffs",
    "EvolutionMatrices",
    "IntegrationError",
    "ObservableSeries",
    "MomentumDensity",
    "wavefunction_at",
    "expect_position",
    "expect_momentum",
    "momentum_density",
    "autocorrelation",
    "mean_energy",
    "observable_series",
    "local_average",
    "write_series_csv",
    "write_density_csv",
    "ClassicalState",
    "Timescales",
    "ClassicalMoments",
    "timescales",
    "trajectory",
    "trajectory_series",
    "momentum_band",
    "classical_position_density",
    "classical_momentum_density",
    "classical_moments",
    "AcceleratingPacket",
    "ShoPacket",
    "accelerating_observables",
    "sho_observables",
    "spread_envelope",
    "__version__",
]
