"""Command-line front end: spectrum/projection runs and figure CSV bundles.

Subcommands
-----------
spectrum : energy table plus orthonormality / shooting-solver verification
project  : compute and cache the packet's expansion coefficients
fig N    : emit the CSV bundle for figure N (1..7)
report   : one-page summary with pass/fail checks; nonzero exit on failure

Configuration is a flat key=value text file overridden by CLI flags; the
environment variable BOUNCER_OUT provides the default output directory.
All CSVs are UTF-8, comma separated, with '#'-prefixed comment headers.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from .classical import classical_moments, momentum_band, timescales, trajectory_series
from .evolution import (
    EvolutionMatrices,
    autocorrelation,
    local_average,
    momentum_density,
    observable_series,
    wavefunction_at,
    write_density_csv,
    write_series_csv,
)
from .reference_models import spread_envelope
from .spectrum import PAPER_UNITS, bouncer_basis, numerov_eigenstates
from .wavepacket import (
    PacketSpec,
    StaleCacheError,
    load_coeffs,
    project,
    save_coeffs,
    suggest_nmax,
)

__all__ = ["RunConfig", "CacheMissError", "main",
           "cmd_spectrum", "cmd_project", "cmd_fig", "cmd_report"]


class CacheMissError(RuntimeError):
    """--no-compute was set but the coefficient cache is absent or stale."""


_CONFIG_KEYS = {"z0", "dz0", "p0", "nmax", "tol", "out", "cache"}
_RANGE_KEYS = {f"fig{k}_{which}" for k in range(1, 8)
               for which in ("tmin", "tmax", "step")}


@dataclass(frozen=True)
class RunConfig:
    """Packet parameters, basis size, tolerance, I/O paths, figure ranges."""

    z0: float = 25.0
    dz0: float = 1.0
    p0: float = 0.0
    nmax: int | None = None          # None -> automatic estimate
    tol: float = 1e-6
    out: str = "."
    cache: str | None = None
    no_compute: bool = False
    ranges: dict = field(default_factory=dict)

    @property
    def packet(self) -> PacketSpec:
        return PacketSpec(z0=self.z0, dz0=self.dz0, p0=self.p0)

    def effective_nmax(self) -> int:
        if self.nmax is not None:
            return self.nmax
        return suggest_nmax(self.packet, PAPER_UNITS, self.tol)

    def content_hash(self) -> str:
        parts = [f"z0={self.z0!r}", f"dz0={self.dz0!r}", f"p0={self.p0!r}",
                 f"nmax={self.effective_nmax()}", f"tol={self.tol!r}"]
        parts += [f"{k}={self.ranges[k]!r}" for k in sorted(self.ranges)]
        return hashlib.sha256("\n".join(parts).encode()).hexdigest()[:16]


def read_config(path) -> dict:
    """Flat key=value lines; '#' comments and blank lines ignored."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in _CONFIG_KEYS and key not in _RANGE_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = val
    return values


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    file_vals = read_config(args.config) if args.config else {}

    def pick(key, flag_val, cast):
        if flag_val is not None:
            return cast(flag_val)
        if key in file_vals:
            return cast(file_vals[key])
        return getattr(cfg, key)

    ranges = {k: float(v) for k, v in file_vals.items() if k in _RANGE_KEYS}
    out = args.out or file_vals.get("out") or os.environ.get("BOUNCER_OUT") or "."
    return RunConfig(
        z0=pick("z0", args.z0, float),
        dz0=pick("dz0", args.dz0, float),
        p0=pick("p0", args.p0, float),
        nmax=pick("nmax", args.nmax, int) if (args.nmax is not None or "nmax" in file_vals) else None,
        tol=pick("tol", args.tol, float),
        out=out,
        cache=args.cache or file_vals.get("cache"),
        no_compute=bool(getattr(args, "no_compute", False)),
        ranges=ranges,
    )


def _prepare(config: RunConfig):
    """Basis + coefficients, honouring the cache contract."""
    units = PAPER_UNITS
    basis = bouncer_basis(units, config.effective_nmax())
    cs = None
    if config.cache and os.path.exists(config.cache):
        try:
            cs = load_coeffs(config.cache, basis)
        except StaleCacheError as exc:
            if config.no_compute:
                raise CacheMissError(
                    f"cache {config.cache} is stale and --no-compute is set: "
                    f"{exc}") from exc
    if cs is None:
        if config.no_compute:
            raise CacheMissError(
                f"no usable coefficient cache at {config.cache!r} and "
                "--no-compute is set")
        cs = project(config.packet, basis, config.tol)
        if config.cache:
            save_coeffs(cs, config.cache)
    return units, basis, cs


def _grid(config, key_prefix, tmin, tmax, step):
    r = config.ranges
    tmin = r.get(f"{key_prefix}_tmin", tmin)
    tmax = r.get(f"{key_prefix}_tmax", tmax)
    step = r.get(f"{key_prefix}_step", step)
    n = int(round((tmax - tmin) / step))
    return np.linspace(tmin, tmax, n + 1)


def _figdir(config, name):
    path = os.path.join(config.out, name)
    os.makedirs(path, exist_ok=True)
    return path


def _write_manifest(path, config, basis, entries, extra=None):
    manifest = {
        "config_hash": config.content_hash(),
        "basis_id": basis.identifier,
        "files": entries,
    }
    if extra:
        manifest.update(extra)
    with open(os.path.join(path, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(config: RunConfig, stream=sys.stdout) -> int:
    units = PAPER_UNITS
    n = config.effective_nmax()
    basis = bouncer_basis(units, n)
    out = _figdir(config, "spectrum")

    with open(os.path.join(out, "energies.csv"), "w", encoding="utf-8") as fh:
        fh.write("# bouncer energy levels (units hbar=%r mass=%r force=%r)\n"
                 % (units.hbar, units.mass, units.force))
        fh.write("n,energy\n")
        for s in basis.states:
            fh.write(f"{s.n},{s.energy:.12g}\n")

    from .quadrature import panel_rule
    zg, wg = panel_rule(0.0, basis.z_max, units.length_scale / 8.0)
    u = basis.eval_matrix(zg)
    gram = (u * wg) @ u.T
    ortho_resid = float(np.max(np.abs(gram - np.eye(basis.n_max))))

    n_check = min(basis.n_max, 12)
    zmax_check = basis.energies[n_check - 1] / units.force + 12.0 * units.length_scale
    numerov = numerov_eigenstates(lambda z: units.force * z, units, n_check,
                                  (2e-3 * units.length_scale, zmax_check))
    cross_resid = float(np.max(np.abs(numerov.energies
                                      - basis.energies[:n_check])))

    lines = [
        f"states: {basis.n_max}",
        f"orthonormality residual: {ortho_resid:.3e} (tolerance 1e-08)",
        f"shooting-solver cross-check residual (n <= {n_check}): "
        f"{cross_resid:.3e} (tolerance 1e-04)",
    ]
    ok = ortho_resid <= 1e-8 and cross_resid <= 1e-4
    lines.append("status: " + ("PASS" if ok else "FAIL"))
    report = "\n".join(lines) + "\n"
    with open(os.path.join(out, "verification.txt"), "w", encoding="utf-8") as fh:
        fh.write(report)
    stream.write(report)
    return 0 if ok else 1


def cmd_project(config: RunConfig, stream=sys.stdout) -> int:
    units, basis, cs = _prepare(config)
    stream.write(f"states kept: {cs.n_states}\n")
    stream.write(f"max |c_n|: {float(np.max(np.abs(cs.coeffs))):.6f}\n")
    stream.write(f"sum |c_n|^2: {cs.norm:.12f}\n")
    stream.write(f"norm deficit: {abs(1.0 - cs.norm):.3e}\n")
    if config.cache:
        stream.write(f"cache: {config.cache}\n")
    return 0


def _classical_overlay_csv(path, t_grid, z0, fname="classical.csv"):
    series = trajectory_series(z0, 0.0, PAPER_UNITS, t_grid)
    full = os.path.join(path, fname)
    with open(full, "w", encoding="utf-8") as fh:
        fh.write("# classical trajectory released from rest at z0\n")
        fh.write("t,z_cl,p_cl\n")
        for ti, (zi, pi) in zip(t_grid, series):
            fh.write(f"{ti:.12g},{zi:.12g},{pi:.12g}\n")
    return fname


def cmd_fig(figure: int, config: RunConfig, stream=sys.stdout) -> int:
    units = PAPER_UNITS
    if figure == 2:  # purely classical; skip projection and verification
        basis = bouncer_basis(units, config.effective_nmax(), verify=False)
        cs = mats = None
    else:
        units, basis, cs = _prepare(config)
        mats = EvolutionMatrices(basis, n_states=cs.n_states)
    scales = timescales(config.packet, units)
    t_cl, t_rev, t_coll = scales.t_cl, scales.t_rev, scales.t_coll
    p_m = math.sqrt(2.0 * units.mass * units.force * config.z0)
    name = f"fig{figure}"
    out = _figdir(config, name)
    entries = {}
    extra = {}
    comments = [f"config {config.content_hash()}"]

    if figure == 1:
        slice_times = [float(k) for k in range(0, int(round(t_cl)) + 1)]
        z_hi = config.z0 + 10.0 * config.dz0
        z_grid = np.linspace(0.0, z_hi, 1401)
        p_span = p_m + 8.0 * units.hbar / config.dz0
        p_grid = np.linspace(-p_span, p_span, 1201)
        for t in slice_times:
            psi = wavefunction_at(cs, basis, t, z_grid)
            fname = f"psi_t{t:g}.csv"
            write_density_csv(z_grid, np.abs(psi) ** 2,
                              os.path.join(out, fname), ("z", "density"),
                              comments + [f"position density at t={t:g}"])
            entries[fname] = "position density |psi(z,t)|^2"
            md = momentum_density(cs, basis, t, p_grid, matrices=mats)
            fname = f"phi_t{t:g}.csv"
            write_density_csv(p_grid, md.density, os.path.join(out, fname),
                              ("p", "density"),
                              comments + [f"momentum density at t={t:g}"])
            entries[fname] = "momentum density |phi(p,t)|^2"
        tracks = _grid(config, "fig1", 0.0, t_cl, t_cl / 200.0)
        series = observable_series(cs, basis, tracks, matrices=mats)
        write_series_csv(series, os.path.join(out, "tracks.csv"), comments)
        entries["tracks.csv"] = "quantum expectation tracks"
        entries[_classical_overlay_csv(out, tracks, config.z0)] = \
            "classical overlay"
        extra["momentum_markers"] = [0.0, p_m, -p_m]

    elif figure == 2:
        dp0 = units.hbar / (2.0 * config.dz0)
        offsets = [-2.0 * dp0, -dp0, 0.0, dp0, 2.0 * dp0]
        t_grid = _grid(config, "fig2", 0.0, 1.2 * t_cl, t_cl / 500.0)
        band = momentum_band(config.z0, offsets, units, t_grid)
        with open(os.path.join(out, "band.csv"), "w", encoding="utf-8") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            fh.write("t," + ",".join(f"p_offset_{k:+d}" for k in range(-2, 3))
                     + "\n")
            for j, tj in enumerate(t_grid):
                fh.write(f"{tj:.12g}," +
                         ",".join(f"{band[i, j]:.12g}" for i in range(5)) + "\n")
        entries["band.csv"] = "classical p(t) for initial momenta 0, +-dp, +-2dp"
        extra["dp0"] = dp0

    elif figure in (3, 4):
        t_grid = _grid(config, f"fig{figure}", 0.0, 8.0 * t_cl, t_cl / 200.0)
        series = observable_series(cs, basis, t_grid, matrices=mats)
        write_series_csv(series, os.path.join(out, "series.csv"), comments)
        entries["series.csv"] = "observables over the first eight periods"
        entries[_classical_overlay_csv(out, t_grid, config.z0)] = \
            "classical overlay"
        if figure == 4:
            t0 = 2.0 * units.mass * config.dz0 ** 2 / units.hbar
            rising, falling = spread_envelope(config.dz0, t_cl, t0, t_grid)
            with open(os.path.join(out, "envelope.csv"), "w",
                      encoding="utf-8") as fh:
                for line in comments:
                    fh.write(f"# {line}\n")
                fh.write("t,rising,falling\n")
                for tj, r, f in zip(t_grid, rising, falling):
                    fh.write(f"{tj:.12g},{r:.12g},{f:.12g}\n")
            entries["envelope.csv"] = "cyclic free-spreading envelope"
            extra["sigma_p_classical"] = p_m / math.sqrt(3.0)
        else:
            extra["mean_z_classical"] = 2.0 * config.z0 / 3.0

    elif figure in (5, 6):
        t_grid = _grid(config, f"fig{figure}", 0.0, 2.2 * t_rev, t_cl / 10.0)
        series = observable_series(cs, basis, t_grid, matrices=mats)
        write_series_csv(series, os.path.join(out, "series.csv"), comments)
        entries["series.csv"] = "observables through two revivals"
        probs = cs.probabilities
        extra["plateau_lines"] = {
            "mean_z": 2.0 * config.z0 / 3.0,
            "mean_p": 0.0,
            "sigma_z": 2.0 * config.z0 / math.sqrt(45.0),
            "sigma_p": p_m / math.sqrt(3.0),
            "autocorr2": float(np.sum(probs ** 2)),
        }
        extra["markers"] = {
            "revivals": [t_rev, 2.0 * t_rev],
            "collapse_windows": [[0.0, t_coll],
                                 [t_rev - t_coll, t_rev + t_coll],
                                 [2.0 * t_rev - t_coll, 2.0 * t_rev + t_coll]],
        }

    elif figure == 7:
        t_grid = _grid(config, "fig7", t_rev - 4.0 * t_cl, t_rev + 4.0 * t_cl,
                       t_cl / 200.0)
        series = observable_series(cs, basis, t_grid, matrices=mats)
        write_series_csv(series, os.path.join(out, "series.csv"), comments)
        entries["series.csv"] = "observables in an eight-period window at the revival"
        entries[_classical_overlay_csv(out, t_grid, config.z0)] = \
            "classical overlay"
        t_early = t_grid - t_grid[0]
        a2_early = np.abs(autocorrelation(cs, t_early)) ** 2
        with open(os.path.join(out, "early_autocorr.csv"), "w",
                  encoding="utf-8") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            fh.write("# row k aligns with row k of series.csv; "
                     "t_early = t - t_window_start\n")
            fh.write("t_early,autocorr2\n")
            for tj, a in zip(t_early, a2_early):
                fh.write(f"{tj:.12g},{a:.12g}\n")
        entries["early_autocorr.csv"] = "|A(t)|^2 over the first eight periods"
        extra["revival_marker"] = t_rev

    else:
        raise ValueError("figure must be in 1..7")

    _write_manifest(out, config, basis, entries, extra)
    stream.write(f"{name}: wrote {len(entries) + 1} files to {out}\n")
    return 0


def cmd_report(config: RunConfig, stream=sys.stdout) -> int:
    units, basis, cs = _prepare(config)
    mats = EvolutionMatrices(basis, n_states=cs.n_states)
    scales = timescales(config.packet, units)
    t_cl, t_rev, t_coll = scales.t_cl, scales.t_rev, scales.t_coll
    p_m = math.sqrt(2.0 * units.mass * units.force * config.z0)
    plateau = float(np.sum(cs.probabilities ** 2))
    checks = []

    def check(name, value, target, tol_abs):
        ok = abs(value - target) <= tol_abs
        checks.append(ok)
        stream.write(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.6g} "
                     f"(target {target:.6g} +- {tol_abs:.3g})\n")

    stream.write(f"timescales: T_cl={t_cl:.6g}  T_rev={t_rev:.2f}  "
                 f"T_coll={t_coll:.6g}\n")
    stream.write(f"states kept: {cs.n_states}   "
                 f"norm deficit: {abs(1.0 - cs.norm):.3e}\n")
    check("norm", cs.norm, 1.0, 1e-6)

    # collapsed-phase plateaus, locally averaged over one classical period
    lo, hi = 2.0 * t_coll, t_rev - 2.0 * t_coll
    t_grid = np.arange(lo - t_cl, hi + t_cl + 1e-9, t_cl / 10.0)
    series = observable_series(cs, basis, t_grid, matrices=mats)
    window = (t_grid >= lo) & (t_grid <= hi)
    cmom = classical_moments(turning_point=config.z0, p_max=p_m)
    for label, col, target, tol_abs in [
        ("plateau <z>", series.mean_z, cmom.mean_z, 0.02 * cmom.mean_z),
        ("plateau <p>", series.mean_p, 0.0, 0.1),
        ("plateau dz", series.sigma_z, cmom.sigma_z, 0.02 * cmom.sigma_z),
        ("plateau dp", series.sigma_p, cmom.sigma_p, 0.02 * cmom.sigma_p),
        ("plateau |A|^2", series.autocorr2, plateau, 1e-3),
    ]:
        smoothed = local_average(t_grid, col, t_cl)
        check(label, float(np.mean(smoothed[window])), target, tol_abs)

    # revival
    t_scan = np.arange(t_rev - 50.0, t_rev + 50.0 + 1e-9, t_cl / 200.0)
    a2 = np.abs(autocorrelation(cs, t_scan)) ** 2
    peak_at = float(t_scan[np.argmax(a2)])
    peak = float(np.max(a2))
    stream.write(f"revival peak: |A|^2 = {peak:.4f} at t = {peak_at:.2f} "
                 f"(T_rev = {t_rev:.2f})\n")
    check("revival peak location", peak_at, t_rev, t_cl)
    ok_prom = peak >= 5.0 * plateau
    checks.append(ok_prom)
    stream.write(f"{'PASS' if ok_prom else 'FAIL'}  revival prominence: "
                 f"peak {peak:.4f} >= 5 x plateau {plateau:.4f}\n")

    failed = checks.count(False)
    stream.write(f"checks: {len(checks) - failed}/{len(checks)} passed\n")
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qbouncer",
        description="Quantum bouncer spectral simulator (CSV output).")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--z0", type=float, default=None, help="release height")
        p.add_argument("--dz0", type=float, default=None, help="initial spread")
        p.add_argument("--p0", type=float, default=None, help="initial momentum")
        p.add_argument("--nmax", type=int, default=None,
                       help="basis size (default: automatic)")
        p.add_argument("--tol", type=float, default=None,
                       help="coefficient truncation tolerance")
        p.add_argument("--out", default=None,
                       help="output directory (default $BOUNCER_OUT or .)")
        p.add_argument("--cache", default=None, help="coefficient cache path")
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--no-compute", action="store_true", dest="no_compute",
                       help="fail instead of recomputing missing coefficients")

    add_common(sub.add_parser("spectrum", help="energy table + verification"))
    add_common(sub.add_parser("project", help="compute/cache coefficients"))
    fig_p = sub.add_parser("fig", help="figure CSV bundle")
    fig_p.add_argument("figure", type=int, choices=range(1, 8))
    add_common(fig_p)
    add_common(sub.add_parser("report", help="summary with pass/fail checks"))

    args = parser.parse_args(argv)
    config = build_config(args)
    try:
        if args.command == "spectrum":
            return cmd_spectrum(config)
        if args.command == "project":
            return cmd_project(config)
        if args.command == "fig":
            return cmd_fig(args.figure, config)
        if args.command == "report":
            return cmd_report(config)
    except CacheMissError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
