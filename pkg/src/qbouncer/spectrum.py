"""Bouncer eigenbasis: Airy route and Numerov shooting route.

The bouncer potential is V(z) = F z for z > 0 with a hard wall at z = 0.
Its eigenfunctions are shifted Airy functions u_n(z) = N_n Ai(z/l - |a_n|)
with energies E_n = eps |a_n|, where l = (hbar^2/(2 m F))^(1/3) and
eps = F l.  The Numerov solver handles general confining potentials on the
half line and serves as the independent cross-check of the Airy route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .airy import airy_ai, airy_zero
from .quadrature import panel_rule

__all__ = [
    "UnitSystem",
    "PAPER_UNITS",
    "Eigenstate",
    "Basis",
    "SolverError",
    "bouncer_basis",
    "numerov_eigenstates",
    "save_basis",
    "load_basis",
]


class SolverError(RuntimeError):
    """Eigenvalue search failed (e.g. potential not confining on the grid)."""


@dataclass(frozen=True)
class UnitSystem:
    """The (hbar, mass, force) triple that fixes every scale in the problem."""

    hbar: float = 1.0
    mass: float = 0.5
    force: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "force"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {v}")

    @property
    def length_scale(self) -> float:
        """Characteristic length l = (hbar^2 / (2 m F))^(1/3)."""
        return (self.hbar ** 2 / (2.0 * self.mass * self.force)) ** (1.0 / 3.0)

    @property
    def energy_scale(self) -> float:
        """Characteristic energy eps = F l."""
        return self.force * self.length_scale


#: hbar = 1, 2m = 1, F = 1
PAPER_UNITS = UnitSystem(hbar=1.0, mass=0.5, force=1.0)


class Eigenstate:
    """A single bound state: quantum number, energy, evaluable wavefunction.

    ``eval`` and ``deriv`` accept scalars or arrays of heights z >= 0.
    """

    __slots__ = ("n", "energy", "norm_const", "_eval", "_deriv")

    def __init__(self, n, energy, norm_const, eval_fn, deriv_fn):
        self.n = int(n)
        self.energy = float(energy)
        self.norm_const = float(norm_const)
        self._eval = eval_fn
        self._deriv = deriv_fn

    def eval(self, z):
        return self._eval(z)

    def deriv(self, z):
        return self._deriv(z)

    def __repr__(self):
        return f"Eigenstate(n={self.n}, energy={self.energy:.8g})"


@dataclass(frozen=True)
class Basis:
    """Ordered set of orthonormal eigenstates on [0, z_max].

    Immutable after construction; evaluation is pure, so instances can be
    shared freely across threads.
    """

    units: UnitSystem
    states: tuple
    z_max: float
    kind: str = "airy"
    label: str = ""

    @property
    def n_max(self) -> int:
        return len(self.states)

    @property
    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.states])

    @property
    def identifier(self) -> str:
        u = self.units
        tag = self.label or self.kind
        return (f"{tag};hbar={u.hbar!r};mass={u.mass!r};force={u.force!r};"
                f"nmax={self.n_max};zmax={self.z_max!r}")

    def eval_matrix(self, z) -> np.ndarray:
        """u_n(z_j) for all states at once, shape (n_max, len(z))."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if self.kind == "airy":  # one vectorised Airy call for the whole block
            vals, _ = airy_ai(self._airy_args(z))
            return self._norms[:, None] * vals
        return np.vstack([s.eval(z) for s in self.states])

    def deriv_matrix(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if self.kind == "airy":
            _, ders = airy_ai(self._airy_args(z))
            return self._norms[:, None] * ders / self.units.length_scale
        return np.vstack([s.deriv(z) for s in self.states])

    def eval_deriv_matrices(self, z):
        """(u_n(z_j), u_n'(z_j)) in a single pass where the backend allows."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if self.kind == "airy":
            vals, ders = airy_ai(self._airy_args(z))
            norms = self._norms[:, None]
            return norms * vals, norms * ders / self.units.length_scale
        return self.eval_matrix(z), self.deriv_matrix(z)

    def _airy_args(self, z):
        ell = self.units.length_scale
        return z[None, :] / ell - self.energies[:, None] / self.units.energy_scale

    @property
    def _norms(self) -> np.ndarray:
        return np.array([s.norm_const for s in self.states])


def _airy_eval_matrix(basis_energies, norms, units, z):
    ell = units.length_scale
    eps = units.energy_scale
    args = z[None, :] / ell - basis_energies[:, None] / eps
    vals, _ = airy_ai(args)
    return norms[:, None] * vals


def bouncer_basis(units: UnitSystem, n_max: int, *, z_max=None, verify=True) -> Basis:
    """Airy eigenbasis of the bouncer: E_n = eps |a_n|, u_n = N_n Ai(z/l - |a_n|).

    ``N_n = 1/(sqrt(l) |Ai'(a_n)|)`` comes from the closed-form normalisation
    integral int_0^inf Ai(z - |a|)^2 dz = Ai'(a)^2; with ``verify=True`` every
    norm is re-checked by quadrature to 1e-8.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ell = units.length_scale
    eps = units.energy_scale
    zeros = np.array([airy_zero(n) for n in range(1, n_max + 1)])
    energies = eps * np.abs(zeros)
    _, derivs_at_zeros = airy_ai(zeros)
    norms = 1.0 / (math.sqrt(ell) * np.abs(derivs_at_zeros))

    if z_max is None:
        z_max = energies[-1] / units.force + 15.0 * ell
    z_max = float(z_max)

    states = []
    for i in range(n_max):
        an_abs = abs(zeros[i])
        nc = norms[i]

        def eval_fn(z, an_abs=an_abs, nc=nc):
            val, _ = airy_ai(np.asarray(z, dtype=float) / ell - an_abs)
            return nc * val

        def deriv_fn(z, an_abs=an_abs, nc=nc):
            _, der = airy_ai(np.asarray(z, dtype=float) / ell - an_abs)
            return nc * der / ell

        states.append(Eigenstate(i + 1, energies[i], nc, eval_fn, deriv_fn))

    basis = Basis(units=units, states=tuple(states), z_max=z_max, kind="airy")

    if verify:
        zg, wg = panel_rule(0.0, z_max, ell / 8.0)
        u = _airy_eval_matrix(energies, norms, units, zg)
        quad_norms = (u * u) @ wg
        worst = np.max(np.abs(quad_norms - 1.0))
        if worst > 1e-8:
            raise SolverError(
                f"basis normalisation check failed: max |norm-1| = {worst:.3e}")
    return basis


# ---------------------------------------------------------------------------
# Numerov route


def _numerov_node_counts(coeff_T, psi_start=1e-10):
    """Node counts of the Numerov solution psi'' = f psi for a batch of
    energies; coeff_T has shape (nE, nz) and holds h^2 f / 12."""
    n_e, n_z = coeff_T.shape
    psi_prev = np.zeros(n_e)
    psi_cur = np.full(n_e, psi_start)
    negative = psi_cur < 0.0
    nodes = np.zeros(n_e, dtype=np.int64)
    c_prev = 1.0 - coeff_T[:, 0]
    c_cur = 1.0 - coeff_T[:, 1]
    for i in range(1, n_z - 1):
        c_next = 1.0 - coeff_T[:, i + 1]
        psi_next = ((12.0 - 10.0 * c_cur) * psi_cur - c_prev * psi_prev) / c_next
        neg_next = psi_next < 0.0
        nodes += (neg_next != negative) & (psi_next != 0.0)
        big = np.abs(psi_next) > 1e100
        if big.any():
            scale = np.where(big, 1e-100, 1.0)
            psi_next = psi_next * scale
            psi_cur = psi_cur * scale
        psi_prev = psi_cur
        psi_cur = psi_next
        negative = neg_next
        c_prev, c_cur = c_cur, c_next
    return nodes


def _numerov_wavefunction(f, z):
    """Two-sided Numerov integration glued at the outermost turning point."""
    h2 = (z[1] - z[0]) ** 2
    c = 1.0 - h2 * f / 12.0
    nz = len(z)
    allowed = np.nonzero(f < 0.0)[0]
    im = int(allowed[-1]) if allowed.size else nz // 2
    im = min(max(im, 2), nz - 3)

    psi_l = np.zeros(nz)
    psi_l[1] = 1e-10
    for i in range(1, im + 1):
        psi_l[i + 1] = ((12.0 - 10.0 * c[i]) * psi_l[i] - c[i - 1] * psi_l[i - 1]) / c[i + 1]
        if abs(psi_l[i + 1]) > 1e100:
            psi_l[: i + 2] *= 1e-100
    psi_r = np.zeros(nz)
    psi_r[-2] = 1e-10
    for i in range(nz - 2, im - 1, -1):
        psi_r[i - 1] = ((12.0 - 10.0 * c[i]) * psi_r[i] - c[i + 1] * psi_r[i + 1]) / c[i - 1]
        if abs(psi_r[i - 1]) > 1e100:
            psi_r[i - 1:] *= 1e-100

    # avoid gluing at a near-node of either branch
    peak = np.max(np.abs(psi_l[: im + 1]))
    while im > 2 and (abs(psi_l[im]) < 1e-3 * peak or psi_r[im] == 0.0):
        im -= 1
    psi = np.concatenate([psi_l[:im], psi_r[im:] * (psi_l[im] / psi_r[im])])
    norm = math.sqrt(np.trapezoid(psi * psi, z))
    psi /= norm
    if psi[np.nonzero(np.abs(psi) > 1e-3 * np.max(np.abs(psi)))[0][0]] < 0.0:
        psi = -psi  # convention: positive slope off the left wall
    return psi


def numerov_eigenstates(potential, units: UnitSystem, n_max: int, grid) -> Basis:
    """Bound states of -hbar^2/(2m) psi'' + V psi = E psi with psi(0) = 0.

    Parameters
    ----------
    potential : callable
        V(z), continuous and confining on the grid; must accept ndarrays.
    units : UnitSystem
    n_max : int
        Number of states, counted from the ground state.
    grid : (step, extent) pair
        Uniform grid spacing and outer boundary; ``step=None`` selects the
        default 1e-3 * length_scale.  Dirichlet conditions at both ends.

    Eigenvalues come from bisection on the node count of the rightward
    Numerov solution (exact for the discretised problem); eigenfunctions from
    a two-sided integration glued at the outer turning point, normalised by
    quadrature.  Energies are strictly increasing by construction.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    step, extent = grid
    if step is None:
        step = 1e-3 * units.length_scale
    n_z = int(round(extent / step)) + 1
    z = np.linspace(0.0, extent, n_z)
    step = z[1] - z[0]
    v = np.asarray(potential(z), dtype=float)
    if not np.all(np.isfinite(v)):
        raise SolverError("potential not finite on the grid")
    k2m = 2.0 * units.mass / units.hbar ** 2
    h2_12 = step * step / 12.0

    def counts(energies):
        coeff = h2_12 * k2m * (v[None, :] - energies[:, None])
        return _numerov_node_counts(coeff)

    v_min = float(v.min())
    v_cap = float(v.max())
    e_hi = v_min + max(units.energy_scale, 1e-6 * (v_cap - v_min + 1.0))
    while counts(np.array([e_hi]))[0] < n_max:
        e_hi = v_min + 2.0 * (e_hi - v_min)
        if e_hi > v_cap:
            raise SolverError(
                f"potential does not confine {n_max} states below the grid "
                f"boundary (needed E > max V = {v_cap:.6g})")

    lo = np.full(n_max, v_min)
    hi = np.full(n_max, e_hi)
    targets = np.arange(1, n_max + 1)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = counts(mid) >= targets
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.max(hi - lo) <= 1e-12 * max(1.0, abs(e_hi)):
            break
    energies = 0.5 * (lo + hi)

    states = []
    for i, en in enumerate(energies):
        psi = _numerov_wavefunction(k2m * (v - en), z)
        spline = CubicSpline(z, psi)
        dspline = spline.derivative()
        states.append(Eigenstate(i + 1, en, 1.0, spline, dspline))
    return Basis(units=units, states=tuple(states), z_max=float(extent),
                 kind="numerov")


# ---------------------------------------------------------------------------
# columnar export / import (Airy basis only: wavefunctions are recomputed)


def save_basis(basis: Basis, path):
    if basis.kind != "airy":
        raise ValueError("only the Airy bouncer basis can be exported; "
                         "Numerov wavefunctions are grid data")
    u = basis.units
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# units hbar={u.hbar!r} mass={u.mass!r} force={u.force!r}\n")
        fh.write(f"# zmax {basis.z_max!r}\n")
        fh.write("# n energy norm_const\n")
        for s in basis.states:
            fh.write(f"{s.n} {s.energy!r} {s.norm_const!r}\n")


def load_basis(path) -> Basis:
    """Rebuild an Airy basis from an exported file and verify it against the
    stored energies and normalisation constants."""
    header = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts and parts[0] == "units":
                    for item in parts[1:]:
                        key, val = item.split("=")
                        header[key] = float(val)
                elif parts and parts[0] == "zmax":
                    header["zmax"] = float(parts[1])
                continue
            n_str, e_str, nc_str = line.split()
            rows.append((int(n_str), float(e_str), float(nc_str)))
    if not rows:
        raise ValueError(f"no basis rows in {path}")
    units = UnitSystem(hbar=header["hbar"], mass=header["mass"],
                       force=header["force"])
    basis = bouncer_basis(units, len(rows), z_max=header.get("zmax"),
                          verify=False)
    for state, (n, energy, norm_const) in zip(basis.states, rows):
        if state.n != n or abs(state.energy - energy) > 1e-9 * max(1.0, abs(energy)) \
                or abs(state.norm_const - norm_const) > 1e-9 * norm_const:
            raise ValueError(f"stored basis row n={n} disagrees with "
                             "recomputation; file is stale or corrupt")
    return basis
