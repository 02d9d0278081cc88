"""Classical bouncer: trajectories, characteristic times, ensemble densities.

Flight segments are exact parabolas; bounces are event-driven (quadratic
root for the impact time, elastic reflection p -> -p), so energy is
conserved to machine precision over any number of bounces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import UnitSystem
from .wavepacket import PacketSpec

__all__ = [
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
]


@dataclass(frozen=True)
class ClassicalState:
    z: float
    p: float


@dataclass(frozen=True)
class Timescales:
    """Classical period, revival time, collapse time."""

    t_cl: float
    t_rev: float
    t_coll: float


@dataclass(frozen=True)
class ClassicalMoments:
    """First and second moments of the classical ensemble densities."""

    mean_z: float | None = None
    mean_z2: float | None = None
    sigma_z: float | None = None
    mean_p: float | None = None
    mean_p2: float | None = None
    sigma_p: float | None = None


def timescales(spec: PacketSpec, units: UnitSystem) -> Timescales:
    """T_cl = 2 sqrt(2 m z0 / F), T_rev = (4/pi)(2 m z0^2 / hbar) and the
    collapse time, which reads T_cl^3/(8 dz0) in hbar = 2m = F = 1 units.

    Dimensionally the collapse time is restored here as
    (F/(2m)) T_cl^3 / (8 dz0), which reduces to the dimensionless form in
    those units (F/(2m) is the half-acceleration appearing in the drop
    z0 - (F/2m) t^2).
    """
    t_cl = 2.0 * math.sqrt(2.0 * units.mass * spec.z0 / units.force)
    t_rev = (4.0 / math.pi) * (2.0 * units.mass * spec.z0 ** 2 / units.hbar)
    t_coll = (units.force / (2.0 * units.mass)) * t_cl ** 3 / (8.0 * spec.dz0)
    return Timescales(t_cl=t_cl, t_rev=t_rev, t_coll=t_coll)


def _flight(z, p, g, mass, tau):
    """Position and momentum after coasting time tau inside one segment."""
    v = p / mass
    return z + v * tau - 0.5 * g * tau * tau, p - mass * g * tau


def _time_to_wall(z, p, g, mass):
    """Time until z(tau) = 0 for the current segment (always finite, g > 0)."""
    v = p / mass
    disc = math.sqrt(v * v + 2.0 * g * z)
    return (v + disc) / g


def trajectory(z_init: float, p_init: float, units: UnitSystem,
               t: float) -> ClassicalState:
    """State at time t for an elastic bouncer released from (z_init, p_init).

    Negative times resolve through time reversal: evolve (z, -p) forward by
    |t| and flip the momentum of the result.
    """
    if z_init < 0.0:
        raise ValueError("z_init must be non-negative")
    if t < 0.0:
        state = trajectory(z_init, -p_init, units, -t)
        return ClassicalState(z=state.z, p=-state.p)
    g = units.force / units.mass
    mass = units.mass
    z, p = float(z_init), float(p_init)
    if z == 0.0 and p < 0.0:
        p = -p
    remaining = float(t)
    while True:
        hit = _time_to_wall(z, p, g, mass)
        if hit >= remaining:
            z_new, p_new = _flight(z, p, g, mass, remaining)
            return ClassicalState(z=max(z_new, 0.0), p=p_new)
        _, p_impact = _flight(z, p, g, mass, hit)
        z, p = 0.0, -p_impact
        remaining -= hit


def trajectory_series(z_init: float, p_init: float, units: UnitSystem,
                      t_grid) -> np.ndarray:
    """z(t), p(t) on a sorted grid of non-negative times in one segment walk.

    Returns an array of shape (len(t_grid), 2) with columns (z, p).
    """
    t = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t) < 0.0):
        raise ValueError("t_grid must be sorted")
    if np.any(t < 0.0):
        raise ValueError("trajectory_series expects non-negative times")
    g = units.force / units.mass
    mass = units.mass
    out = np.empty((len(t), 2))
    z, p = float(z_init), float(p_init)
    if z == 0.0 and p < 0.0:
        p = -p
    seg_start = 0.0
    seg_end = _time_to_wall(z, p, g, mass)
    for i, ti in enumerate(t):
        while ti > seg_start + seg_end:
            _, p_impact = _flight(z, p, g, mass, seg_end)
            seg_start += seg_end
            z, p = 0.0, -p_impact
            seg_end = _time_to_wall(z, p, g, mass)
        zi, pi = _flight(z, p, g, mass, ti - seg_start)
        out[i, 0] = max(zi, 0.0)
        out[i, 1] = pi
    return out


def momentum_band(z_init: float, p_offsets, units: UnitSystem,
                  t_grid) -> np.ndarray:
    """p(t) series for particles released from z_init with the given initial
    momenta; shape (len(p_offsets), len(t_grid))."""
    offsets = np.asarray(p_offsets, dtype=float)
    return np.vstack([
        trajectory_series(z_init, p0, units, t_grid)[:, 1] for p0 in offsets
    ])


def classical_position_density(turning_point: float, z):
    """P(z) = 1 / (2 sqrt(A (A - z))) on 0 < z < A, zero outside.

    The inverse-square-root endpoint singularity at z = A is integrable;
    moments below use the substitution z = A (1 - s^2) which removes it.
    """
    if turning_point <= 0.0:
        raise ValueError("turning point must be positive")
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    zv = np.atleast_1d(z)
    dens = np.zeros_like(zv)
    inside = (zv > 0.0) & (zv < turning_point)
    dens[inside] = 1.0 / (
        2.0 * np.sqrt(turning_point * (turning_point - zv[inside])))
    return float(dens[0]) if scalar else dens


def classical_momentum_density(p_max: float, p):
    """Uniform density 1/(2 p_M) on |p| <= p_M, zero outside."""
    if p_max <= 0.0:
        raise ValueError("p_max must be positive")
    p = np.asarray(p, dtype=float)
    dens = np.where(np.abs(p) <= p_max, 1.0 / (2.0 * p_max), 0.0)
    if dens.ndim == 0:
        return float(dens)
    return dens


def classical_moments(turning_point: float | None = None,
                      p_max: float | None = None) -> ClassicalMoments:
    """Closed-form ensemble moments: <z> = 2A/3, <z^2> = 8A^2/15,
    dz = 2A/sqrt(45); <p> = 0, <p^2> = p_M^2/3, dp = p_M/sqrt(3)."""
    kw = {}
    if turning_point is not None:
        if turning_point < 0.0:
            raise ValueError("turning point must be non-negative")
        a = float(turning_point)
        kw.update(mean_z=2.0 * a / 3.0, mean_z2=8.0 * a * a / 15.0,
                  sigma_z=2.0 * a / math.sqrt(45.0))
    if p_max is not None:
        if p_max < 0.0:
            raise ValueError("p_max must be non-negative")
        pm = float(p_max)
        kw.update(mean_p=0.0, mean_p2=pm * pm / 3.0,
                  sigma_p=pm / math.sqrt(3.0))
    if not kw:
        raise ValueError("provide a turning point, a p_max, or both")
    return ClassicalMoments(**kw)
