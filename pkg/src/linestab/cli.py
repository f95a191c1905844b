"""Command-line interface: validate / scan / semiclassical / compare.

Exit codes: 0 success, 1 check failure, 2 usage or config error,
3 numerical failure.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import click
import numpy as np

from . import output
from .config import ConfigError, RunConfig, build_config
from .eigensolver import EigenConvergenceError
from .operators import assemble_schrodinger, build_grid
from .scan import ScanFailure, detect_bifurcations, rho_scan, track_all_branches
from .semiclassical import (
    MODES,
    NonContractionError,
    ResolutionError,
    compare_routes,
    lyapunov_schmidt_solve,
    sommerfeld_solve,
)
from .specfun import abs_gamma_sq, log_gamma

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_CONFIG_OPTIONS = [
    click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                 help="Flat key = value config file."),
    click.option("--out", "out_dir", type=click.Path(), default=None,
                 help="Output directory."),
    click.option("--grid-n", type=int, default=None, help="Grid points N (even)."),
    click.option("--grid-l", type=float, default=None, help="Half-length L."),
    click.option("--scheme", type=str, default=None,
                 help="fourier_collocation or finite_difference_4."),
    click.option("--format", "fmt_kind", type=click.Choice(["csv", "json"]), default=None),
    click.option("--threads", type=int, default=None, help="Parallel workers."),
]


def _with_config_options(fn):
    for opt in reversed(_CONFIG_OPTIONS):
        fn = opt(fn)
    return fn


def _build(config_path, **overrides) -> RunConfig:
    try:
        return build_config(config_path, **overrides)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_USAGE)


def _outdir(cfg: RunConfig) -> Path:
    p = Path(cfg.out_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


@click.group()
def main():
    """Transverse-instability spectrum of the hyperbolic-NLS line soliton."""


# --- validate ---------------------------------------------------------------

def _check_l0_bound_states(cfg: RunConfig):
    from .semiclassical import E0, E1

    grid = build_grid(cfg.grid_l, cfg.grid_n, cfg.scheme)
    w = np.linalg.eigvalsh(assemble_schrodinger(grid, 4.0, 0.0).entries)
    err = max(abs(w[0] + E0), abs(w[1] + E1))
    return err <= 1e-6, f"bound-state error {err:.3e} (tol 1e-6)"


def _check_zero_mode(cfg: RunConfig, well: float, odd: bool):
    grid = build_grid(cfg.grid_l, cfg.grid_n, cfg.scheme)
    w, v = np.linalg.eigh(assemble_schrodinger(grid, well, 1.0).entries)
    i = int(np.argmin(np.abs(w)))
    ref = grid.sech()
    if odd:
        ref = ref * np.tanh(grid.nodes)
    ref = ref / np.linalg.norm(ref)
    overlap = abs(ref @ v[:, i])
    ok = abs(w[i]) <= 1e-8 and overlap >= 1.0 - 1e-6
    return ok, f"|eigenvalue| {abs(w[i]):.3e} (tol 1e-8), overlap {overlap:.8f}"


def _check_gamma_identities(cfg: RunConfig):
    errs = [
        abs(log_gamma(1.0)),
        abs(abs_gamma_sq(0.5, 0.0) - math.pi),
    ]
    for x, y in ((0.7, 3.0), (2.5, 10.0), (5.0, 0.5)):
        lhs = abs_gamma_sq(x + 1.0, y)
        rhs = (x * x + y * y) * abs_gamma_sq(x, y)
        errs.append(abs(lhs - rhs) / rhs)
        errs.append(abs(abs_gamma_sq(x, y) - abs_gamma_sq(x, -y)))
    err = max(errs)
    return err <= 1e-12, f"worst identity error {err:.3e} (tol 1e-12)"


def _check_gaussian_sommerfeld(cfg: RunConfig):
    grid = build_grid(20.0, 4096, "fourier_collocation")
    k = 2.0
    f = np.exp(-grid.nodes**2).astype(complex)
    _, a = sommerfeld_solve(grid, f, complex(k))
    exact = math.sqrt(math.pi) * math.exp(-k * k / 4.0) / (2j * k)
    rel = abs(a - exact) / abs(exact)
    return rel <= 1e-8, f"tail amplitude rel error {rel:.3e} (tol 1e-8)"


VALIDATION_CHECKS = [
    ("l0_bound_states", _check_l0_bound_states),
    ("lminus_zero_mode", lambda cfg: _check_zero_mode(cfg, 2.0, odd=False)),
    ("lplus_zero_mode", lambda cfg: _check_zero_mode(cfg, 6.0, odd=True)),
    ("gamma_identities", _check_gamma_identities),
    ("gaussian_sommerfeld", _check_gaussian_sommerfeld),
]


@main.command()
@_with_config_options
def validate(config_path, out_dir, grid_n, grid_l, scheme, fmt_kind, threads):
    """Run the analytic self-checks and report pass/fail per check."""
    cfg = _build(config_path, out_dir=out_dir, grid_n=grid_n, grid_l=grid_l,
                 scheme=scheme, format=fmt_kind, threads=threads)
    failed = []
    for name, check in VALIDATION_CHECKS:
        try:
            ok, detail = check(cfg)
        except Exception as exc:  # numerical failure inside a check
            ok, detail = False, f"exception: {exc}"
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        if not ok:
            failed.append(name)
    if failed:
        click.echo(f"failed checks: {', '.join(failed)}", err=True)
        sys.exit(EXIT_CHECK_FAILED)


# --- scan -------------------------------------------------------------------

@main.command()
@click.option("--rho-start", type=float, default=None)
@click.option("--rho-end", type=float, default=None)
@click.option("--rho-step", type=float, default=None)
@_with_config_options
def scan(rho_start, rho_end, rho_step, config_path, out_dir, grid_n, grid_l,
         scheme, fmt_kind, threads):
    """Sweep rho, classify each slice, and detect bifurcations."""
    cfg = _build(config_path, rho_start=rho_start, rho_end=rho_end,
                 rho_step=rho_step, out_dir=out_dir, grid_n=grid_n,
                 grid_l=grid_l, scheme=scheme, format=fmt_kind, threads=threads)
    if cfg.rho_start is None:
        click.echo("usage error: scan requires --rho-start and --rho-end", err=True)
        sys.exit(EXIT_USAGE)
    grid = build_grid(cfg.grid_l, cfg.grid_n, cfg.scheme)
    out = _outdir(cfg)
    ext = "json" if cfg.format == "json" else "csv"
    try:
        slices = rho_scan(grid, cfg.rho_start, cfg.rho_end, cfg.rho_step,
                          localization_threshold=cfg.localization_threshold,
                          continuum_margin=cfg.continuum_margin,
                          workers=cfg.threads)
    except ScanFailure as exc:
        # flush completed slices with an error trailer row
        output.write_scan(out / f"scan.{ext}", exc.partial, cfg.format,
                          trailer=f"error:{exc}")
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    output.write_scan(out / f"scan.{ext}", slices, cfg.format)
    branches = track_all_branches(slices, cfg.continuation_jump_bound)
    events = detect_bifurcations(branches, scan_start=cfg.rho_start,
                                 re_threshold=cfg.re_threshold)
    output.write_events(out / "events.json", events)
    click.echo(f"wrote {out / f'scan.{ext}'} ({len(slices)} slices) and "
               f"{out / 'events.json'} ({len(events)} events)")


# --- semiclassical ----------------------------------------------------------

@main.command()
@click.option("--epsilons", type=str, default=None, help="Comma list, each in (0, 0.6].")
@click.option("--modes", type=str, default=None, help="Comma list from {mode0, mode1}.")
@_with_config_options
def semiclassical(epsilons, modes, config_path, out_dir, grid_n, grid_l, scheme,
                  fmt_kind, threads):
    """Converge the radiating fixed point for each (epsilon, mode)."""
    over = {}
    if epsilons is not None:
        over["epsilons"] = [float(s) for s in epsilons.split(",") if s.strip()]
    if modes is not None:
        over["modes"] = [s.strip() for s in modes.split(",") if s.strip()]
    cfg = _build(config_path, out_dir=out_dir, grid_n=grid_n, grid_l=grid_l,
                 scheme=scheme, format=fmt_kind, threads=threads, **over)
    if not cfg.epsilons:
        click.echo("usage error: semiclassical requires a nonempty --epsilons list",
                   err=True)
        sys.exit(EXIT_USAGE)
    sols = []
    try:
        for eps in cfg.epsilons:
            for mname in cfg.modes:
                sols.append(lyapunov_schmidt_solve(eps, MODES[mname]))
    except (NonContractionError, ResolutionError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    out = _outdir(cfg)
    ext = "json" if cfg.format == "json" else "csv"
    path = output.write_semiclassical(out / f"semiclassical.{ext}", sols, cfg.format)
    click.echo(f"wrote {path} ({len(sols)} solutions)")


# --- compare ----------------------------------------------------------------

@main.command()
@click.option("--epsilons", type=str, default=None, help="Comma list, each in (0, 0.6].")
@_with_config_options
def compare(epsilons, config_path, out_dir, grid_n, grid_l, scheme, fmt_kind, threads):
    """Growth rates per (epsilon, mode) from all four routes."""
    over = {}
    if epsilons is not None:
        over["epsilons"] = [float(s) for s in epsilons.split(",") if s.strip()]
    cfg = _build(config_path, out_dir=out_dir, grid_n=grid_n, grid_l=grid_l,
                 scheme=scheme, format=fmt_kind, threads=threads, **over)
    if not cfg.epsilons:
        click.echo("usage error: compare requires a nonempty --epsilons list", err=True)
        sys.exit(EXIT_USAGE)
    grid = build_grid(cfg.grid_l, cfg.grid_n, cfg.scheme)
    try:
        rows = compare_routes(cfg.epsilons, grid,
                              tuple(MODES[m] for m in cfg.modes))
    except EigenConvergenceError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    out = _outdir(cfg)
    ext = "json" if cfg.format == "json" else "csv"
    path = output.write_compare(out / f"compare.{ext}", rows, cfg.format)
    click.echo(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
