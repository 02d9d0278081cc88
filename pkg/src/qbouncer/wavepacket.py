"""Gaussian initial states and their projection onto the eigenbasis.

The initial packet represents a particle released at height z0 with spread
dz0 and mean momentum p0.  Expansion coefficients come from direct
Gauss-Legendre quadrature of the overlap integrals; the expansion is
truncated at the first coefficient after the peak that drops below the
working tolerance (default 1e-6).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .quadrature import panel_rule
from .spectrum import Basis, UnitSystem

__all__ = [
    "PacketSpec",
    "CoefficientSet",
    "InsufficientBasisError",
    "StaleCacheError",
    "gaussian_amplitude",
    "project",
    "suggest_nmax",
    "save_coeffs",
    "load_coeffs",
]

#: Gaussian support used for overlap quadrature; |amp|^2 < 1e-37 outside.
_SUPPORT_SIGMAS = 14.0


class InsufficientBasisError(ValueError):
    """Basis too small for the requested packet; carries ``suggested_nmax``."""

    def __init__(self, message, suggested_nmax=None):
        super().__init__(message)
        self.suggested_nmax = suggested_nmax


class StaleCacheError(RuntimeError):
    """Cached coefficients belong to a different basis."""


@dataclass(frozen=True)
class PacketSpec:
    """Initial Gaussian parameters (release height, spread, mean momentum)."""

    z0: float
    dz0: float
    p0: float = 0.0

    def __post_init__(self):
        if not (self.z0 > 0.0 and self.dz0 > 0.0):
            raise ValueError("z0 and dz0 must be positive")
        if self.z0 / self.dz0 < 5.0:
            warnings.warn(
                f"z0/dz0 = {self.z0 / self.dz0:.2f} < 5: the wall clips a "
                "non-negligible part of the packet", stacklevel=2)


@dataclass(frozen=True)
class CoefficientSet:
    """Truncated expansion {c_n} with its provenance.

    ``coeffs[k]`` belongs to eigenstate n = k+1; ``energies`` are carried
    along so that time evolution and the autocorrelation need no basis
    lookup.  ``norm`` records sum |c_n|^2 as computed, never renormalised.
    """

    coeffs: np.ndarray
    energies: np.ndarray
    tol: float
    norm: float
    basis_ref: str
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        object.__setattr__(self, "energies", np.asarray(self.energies, dtype=float))
        if self.coeffs.shape != self.energies.shape:
            raise ValueError("coeffs and energies must align")

    @property
    def n_states(self) -> int:
        return len(self.coeffs)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2


def gaussian_amplitude(spec: PacketSpec, units: UnitSystem, z):
    """Initial wavefunction (2 pi dz0^2)^(-1/4) exp(-(z-z0)^2/(4 dz0^2))
    exp(i p0 z / hbar), evaluated for z >= 0.

    Real-valued ndarray when p0 == 0, complex otherwise.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0):
        raise ValueError("heights must be non-negative")
    norm = (2.0 * math.pi * spec.dz0 ** 2) ** (-0.25)
    envelope = norm * np.exp(-((z - spec.z0) ** 2) / (4.0 * spec.dz0 ** 2))
    if spec.p0 == 0.0:
        return envelope
    return envelope * np.exp(1j * spec.p0 * z / units.hbar)


def suggest_nmax(spec: PacketSpec, units: UnitSystem, tol: float = 1e-6) -> int:
    """Basis size estimate: enough states to reach the energy where both the
    position and momentum tails of the packet have fallen below ``tol``."""
    log_inv = math.log(1.0 / tol)
    z_tail = 2.0 * spec.dz0 * math.sqrt(log_inv)
    p_tail = abs(spec.p0) + (units.hbar / spec.dz0) * math.sqrt(log_inv)
    e_need = units.force * (spec.z0 + z_tail) + p_tail ** 2 / (2.0 * units.mass)
    # invert the asymptotic zero location |a_n| ~ (3 pi (4n-1)/8)^(2/3)
    a_need = e_need / units.energy_scale
    n = (a_need ** 1.5) * 2.0 / (3.0 * math.pi) + 0.25
    return int(math.ceil(n)) + 4


def project(spec: PacketSpec, basis: Basis, tol: float = 1e-6) -> CoefficientSet:
    """Expansion coefficients c_n = int_0^inf u_n(z) amp(z) dz.

    Composite Gauss-Legendre quadrature with panels no wider than
    min(dz0, l)/8 over the packet support.  The expansion keeps coefficients
    through the first |c_n| <= tol after the peak; a basis whose last
    coefficient is still above tol raises InsufficientBasisError with a
    suggested extension.
    """
    units = basis.units
    e_floor = units.force * (spec.z0 + 6.0 * spec.dz0)
    if basis.energies[-1] < e_floor:
        raise InsufficientBasisError(
            f"basis tops out at E={basis.energies[-1]:.4g} < "
            f"F(z0+6dz0)={e_floor:.4g}",
            suggested_nmax=suggest_nmax(spec, units, tol))

    lo = max(0.0, spec.z0 - _SUPPORT_SIGMAS * spec.dz0)
    hi = min(basis.z_max, spec.z0 + _SUPPORT_SIGMAS * spec.dz0)
    panel = min(spec.dz0, units.length_scale) / 8.0
    zg, wg = panel_rule(lo, hi, panel)
    amp = gaussian_amplitude(spec, units, zg)
    u = basis.eval_matrix(zg)
    coeffs = u @ (wg * amp)

    mags = np.abs(coeffs)
    peak = int(np.argmax(mags))
    tail = np.nonzero(mags[peak:] <= tol)[0]
    if tail.size == 0 or mags[-1] > tol:
        # log-linear extrapolation of the decaying tail to estimate the need
        suggestion = suggest_nmax(spec, units, tol)
        if mags[-1] > tol and len(mags) - peak > 3 and mags[-1] < mags[-3]:
            rate = (math.log(mags[-3]) - math.log(mags[-1])) / 2.0
            extra = int(math.ceil(math.log(mags[-1] / tol) / rate)) + 2
            suggestion = max(suggestion, len(mags) + extra)
        raise InsufficientBasisError(
            f"|c_n| = {mags[-1]:.3e} > tol = {tol:.3e} at n_max = "
            f"{basis.n_max}; extend the basis to about n_max = {suggestion}",
            suggested_nmax=suggestion)

    keep = peak + int(tail[0]) + 1
    coeffs = coeffs[:keep]
    norm = float(np.sum(np.abs(coeffs) ** 2))
    return CoefficientSet(coeffs=coeffs, energies=basis.energies[:keep],
                          tol=float(tol), norm=norm,
                          basis_ref=basis.identifier, hbar=units.hbar)


# ---------------------------------------------------------------------------
# cache file: basis identifier, tol, then one row per state


def save_coeffs(cs: CoefficientSet, path):
    if cs.n_states == 0:
        raise ValueError("refusing to save an empty coefficient set")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# qbouncer coefficient cache\n")
        fh.write(f"# basis {cs.basis_ref}\n")
        fh.write(f"# tol {cs.tol!r}\n")
        fh.write(f"# norm {cs.norm!r}\n")
        fh.write(f"# hbar {cs.hbar!r}\n")
        fh.write("# n energy re_c im_c\n")
        for k in range(cs.n_states):
            c = complex(cs.coeffs[k])
            fh.write(f"{k + 1} {float(cs.energies[k])!r} "
                     f"{c.real!r} {c.imag!r}\n")


def load_coeffs(path, basis: Basis | None = None) -> CoefficientSet:
    """Read a coefficient cache; if ``basis`` is given, reject stale files."""
    basis_ref = None
    tol = None
    norm = None
    hbar = 1.0
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split(None, 1)
                if len(parts) == 2 and parts[0] == "basis":
                    basis_ref = parts[1].strip()
                elif len(parts) == 2 and parts[0] == "tol":
                    tol = float(parts[1])
                elif len(parts) == 2 and parts[0] == "norm":
                    norm = float(parts[1])
                elif len(parts) == 2 and parts[0] == "hbar":
                    hbar = float(parts[1])
                continue
            _, e_str, re_str, im_str = line.split()
            rows.append((float(e_str), float(re_str), float(im_str)))
    if not rows or basis_ref is None or tol is None:
        raise ValueError(f"{path} is not a coefficient cache")
    if basis is not None and basis.identifier != basis_ref:
        raise StaleCacheError(
            f"cache was built for basis '{basis_ref}', not "
            f"'{basis.identifier}'")
    energies = np.array([r[0] for r in rows])
    coeffs = np.array([complex(r[1], r[2]) for r in rows])
    if norm is None:
        norm = float(np.sum(np.abs(coeffs) ** 2))
    return CoefficientSet(coeffs=coeffs, energies=energies, tol=tol,
                          norm=norm, basis_ref=basis_ref, hbar=hbar)
