"""Closed-form Gaussian packet oracles used to validate the spectral engine.

Two exactly solvable references: the uniformly accelerated free Gaussian
(momentum distribution translates rigidly, position spread grows like the
free particle) and the harmonic-oscillator Gaussian (widths breathe at twice
the classical frequency).  Plus the cyclic spread envelope overlaid on the
bouncer's first periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import UnitSystem

__all__ = [
    "AcceleratingPacket",
    "ShoPacket",
    "accelerating_observables",
    "sho_observables",
    "spread_envelope",
]


@dataclass(frozen=True)
class AcceleratingPacket:
    """Gaussian packet under a constant force (potential -F x).

    ``alpha`` is the momentum-space width parameter; the position spread is
    dx0 = hbar alpha / sqrt(2) and the spreading time t0 = m hbar alpha^2
    = 2 m dx0^2 / hbar.  ``force`` is signed: positive accelerates toward
    +x, negative models the falling side of the bouncer.
    """

    x0: float
    p0: float
    alpha: float
    units: UnitSystem
    force: float | None = None

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.force is None:
            object.__setattr__(self, "force", self.units.force)

    @classmethod
    def from_position_spread(cls, x0, dx0, p0, units, force=None):
        return cls(x0=x0, p0=p0, alpha=math.sqrt(2.0) * dx0 / units.hbar,
                   units=units, force=force)

    @property
    def dx0(self) -> float:
        return self.units.hbar * self.alpha / math.sqrt(2.0)

    @property
    def t0(self) -> float:
        return self.units.mass * self.units.hbar * self.alpha ** 2


def accelerating_observables(pkt: AcceleratingPacket, t):
    """(<x>, dx, <p>, dp) of the accelerating Gaussian at time(s) t.

    <x> = x0 + p0 t/m + F t^2/(2m); dx = dx0 sqrt(1 + (t/t0)^2);
    <p> = p0 + F t; dp = 1/(alpha sqrt(2)), constant.
    """
    t = np.asarray(t, dtype=float)
    m = pkt.units.mass
    mean_x = pkt.x0 + pkt.p0 * t / m + pkt.force * t ** 2 / (2.0 * m)
    sigma_x = pkt.dx0 * np.sqrt(1.0 + (t / pkt.t0) ** 2)
    mean_p = pkt.p0 + pkt.force * t
    sigma_p = np.full_like(t, 1.0 / (pkt.alpha * math.sqrt(2.0)))
    return mean_x, sigma_x, mean_p, sigma_p


@dataclass(frozen=True)
class ShoPacket:
    """Gaussian packet in V = m omega^2 x^2 / 2 with width scale L.

    At L = sqrt(hbar / (m omega)) the packet is coherent and the widths are
    time independent.
    """

    x0: float
    L: float
    omega: float
    units: UnitSystem

    def __post_init__(self):
        if self.L <= 0.0 or self.omega <= 0.0:
            raise ValueError("L and omega must be positive")


def sho_observables(pkt: ShoPacket, t):
    """(<x>, dx, <p>, dp) for the oscillator Gaussian at time(s) t.

    dx = L(t)/sqrt(2), dp = p_L(t)/sqrt(2) with
    L(t)^2 = L^2 cos^2 + (hbar/(m omega L))^2 sin^2 and
    p_L(t)^2 = (hbar/L)^2 cos^2 + (L m omega)^2 sin^2; widths are
    pi/omega-periodic (half the classical period).
    """
    t = np.asarray(t, dtype=float)
    m = pkt.units.mass
    hbar = pkt.units.hbar
    w = pkt.omega
    c = np.cos(w * t)
    s = np.sin(w * t)
    mean_x = pkt.x0 * c
    mean_p = -m * w * pkt.x0 * s
    lt = np.sqrt(pkt.L ** 2 * c ** 2 + (hbar / (m * w * pkt.L)) ** 2 * s ** 2)
    plt = np.sqrt((hbar / pkt.L) ** 2 * c ** 2 + (pkt.L * m * w) ** 2 * s ** 2)
    return mean_x, lt / math.sqrt(2.0), mean_p, plt / math.sqrt(2.0)


def spread_envelope(dz0: float, t_cl: float, t0: float, t):
    """Cyclic dashed-envelope pair for the packet spread over one period.

    rising  = dz0 sqrt(1 + (tau/t0)^2)
    falling = dz0 sqrt(1 + ((t_cl - tau)/t0)^2),  tau = t mod t_cl.

    Both branches extend cyclically to later periods.
    """
    if min(dz0, t_cl, t0) <= 0.0:
        raise ValueError("dz0, t_cl and t0 must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("t must be non-negative")
    tau = np.mod(t, t_cl)
    rising = dz0 * np.sqrt(1.0 + (tau / t0) ** 2)
    falling = dz0 * np.sqrt(1.0 + ((t_cl - tau) / t0) ** 2)
    return rising, falling
