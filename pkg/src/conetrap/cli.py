"""Command line driver.

``conetrap <command> --config <path> [--out <path>] [--format csv|json] [--jobs N]``

Commands: ``exponents``, ``sweep-delta``, ``scan-contrast``, ``flux-check``
and ``validate``.  Exit status is 0 on success, 2 when the run completed
with degeneracy warnings only (vanishing weighted norm, empty weight
window), and 1 on errors.  ``CONETRAP_JOBS`` overrides ``--jobs``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Optional, Tuple

from . import __version__
from .config import COMMANDS, FORMATS, RunConfig, parse_config
from .errors import ConetrapError, EndpointDegeneracy, MultiplicityWarning, WindowEmpty
from .flux import flux_report
from .model import Material
from .singularity import analyze, perturbation_slope, scan_contrast, sweep_delta
from .tables import SweepTable, write_table
from .validation import run_validation

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DEGENERATE = 2


@contextmanager
def _mapper(jobs: int):
    """``map``-like callable; order-preserving over a thread pool when ``jobs > 1``."""
    if jobs <= 1:
        yield map
        return
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        yield pool.map


def _analysis(cfg: RunConfig, map_fn):
    n = cfg.numerics
    return analyze(
        cfg.tip_geometry(),
        cfg.make_material(),
        modes=range(n.m_max + 1),
        n_elements=n.n_elements,
        order=n.element_order,
        discretization=n.discretization,
        refinement=n.refinement,
        tol=n.critical_tol,
        solver_tol=n.solver_tol,
        tol_D=n.tol_D,
        map_fn=map_fn,
    )


def _mode_of(exponent):
    m = exponent.mode
    return m.m if hasattr(m, "m") else None


def _pair_info(exponent):
    return {"mode_m": _mode_of(exponent), "eta": exponent.eta, "mu": exponent.mu, "D": exponent.D, "orientation": exponent.orientation}


def _run_exponents(cfg, table, map_fn, flags):
    an = _analysis(cfg, map_fn)
    for p in an.pairs:
        table.append(_mode_of(p), p.eta, p.D, an.beta0, an.beta_max, perturbation_slope(p))
    for p in an.degenerate:
        flags.add(EndpointDegeneracy.code)
        table.append(_mode_of(p), p.eta, p.D, an.beta0, an.beta_max, None)
    table.header["pairs"] = len(an.pairs)
    table.header["lambda_out"] = [[p.lambda_out.real, p.lambda_out.imag] for p in an.pairs]


def _run_sweep(cfg, table, map_fn, flags):
    an = _analysis(cfg, map_fn)
    if an.degenerate:
        flags.add(EndpointDegeneracy.code)
    deltas = cfg.sweep.deltas
    tol = cfg.numerics.tracking_tol
    sweeps = list(map_fn(lambda p: sweep_delta(p, deltas, tracking_tol=tol), an.pairs))
    table.header["pairs"] = [dict(_pair_info(p), rows=len(s)) for p, s in zip(an.pairs, sweeps)]
    for rows in sweeps:
        for r in rows:
            if r.window_empty:
                flags.add("window_empty")
            table.append(r.delta, r.lambda_delta.real, r.lambda_delta.imag, r.eta_delta.real, r.eta_delta.imag, r.in_window, r.tracking_distance)


def _run_scan(cfg, table, map_fn, flags):
    n = cfg.numerics
    mat = cfg.material
    factory = None
    if mat.override:

        def factory(kappa):
            return Material.validation_override(mat.eps_plus, kappa * mat.eps_plus)

    def one(m):
        return scan_contrast(
            math.radians(cfg.geometry.alpha_degrees),
            cfg.sweep.kappas,
            modes=[m],
            n_elements=n.n_elements,
            order=n.element_order,
            eps_plus=mat.eps_plus,
            minus_side=cfg.geometry.minus_side,
            tol=n.critical_tol,
            tol_D=n.tol_D,
            bisection_width=n.bisection_width,
            material_factory=factory,
        )

    results = list(map_fn(one, range(n.m_max + 1)))
    intervals, unresolved = [], []
    for res in results:
        for r in res.rows:
            if "endpoint_degeneracy" in r.flags:
                flags.add(EndpointDegeneracy.code)
            if "unresolved" in r.flags:
                unresolved.append([r.kappa, r.mode, r.eta])
            table.append(r.kappa, r.mode, r.eta, r.D)
        for e in res.endpoints:
            if "endpoint_degeneracy" in e.flags:
                flags.add(EndpointDegeneracy.code)
            intervals.append(
                {"mode_m": e.mode, "kappa_lo": e.kappa_lo, "kappa_hi": e.kappa_hi, "kappa_inside": e.kappa_inside, "eta": e.eta, "D": e.D, "flags": list(e.flags)}
            )
    table.header["endpoints"] = intervals
    table.header["unresolved"] = unresolved
    table.header["critical_intervals"] = _critical_intervals(results, cfg.sweep.kappas)


def _critical_intervals(results, kappas):
    """Maximal runs of grid contrasts carrying a resolved pair, per mode."""
    out = []
    for res in results:
        for m in res.modes:
            hit = [any("unresolved" not in r.flags for r in res.critical(k, m)) for k in kappas]
            i = 0
            while i < len(kappas):
                if hit[i]:
                    j = i
                    while j + 1 < len(kappas) and hit[j + 1]:
                        j += 1
                    out.append({"mode_m": m, "kappa_min": kappas[i], "kappa_max": kappas[j]})
                    i = j + 1
                else:
                    i += 1
    return out


def _run_flux(cfg, table, map_fn, flags):
    an = _analysis(cfg, map_fn)
    if an.degenerate:
        flags.add(EndpointDegeneracy.code)
    taus = cfg.sweep.taus or (cfg.cutoff.r_one / 2,)
    reports = list(map_fn(lambda p: [flux_report(p, tau, cfg.cutoff) for tau in taus], an.pairs))
    table.header["pairs"] = [dict(_pair_info(p), rows=len(r)) for p, r in zip(an.pairs, reports)]
    for rows in reports:
        for r in rows:
            table.append(
                r.tau,
                r.surface_flux.real,
                r.surface_flux.imag,
                r.volume_integral.real,
                r.volume_integral.imag,
                r.eta_D,
                r.residual_identity,
            )


def _run_validate(cfg, table, map_fn, flags):
    n = cfg.numerics
    checks = run_validation(
        refinement=n.refinement,
        n_elements=n.harmonic_elements,
        oracle_refinement=n.oracle_refinement,
        oracle_n_elements=n.n_elements,
        map_fn=map_fn,
    )
    for c in checks:
        table.append(c.name, c.passed, c.value, c.tolerance, c.detail)
    failed = [c.name for c in checks if not c.passed]
    table.header["failed_checks"] = failed
    if failed:
        flags.add("validation_failed")


_RUNNERS = {
    "exponents": _run_exponents,
    "sweep-delta": _run_sweep,
    "scan-contrast": _run_scan,
    "flux-check": _run_flux,
    "validate": _run_validate,
}


def _mesh_header(cfg: RunConfig) -> dict:
    n = cfg.numerics
    if cfg.command == "validate":
        return {"harmonic_elements": n.harmonic_elements, "refinement": n.refinement, "oracle_refinement": n.oracle_refinement, "oracle_n_elements": n.n_elements}
    if n.discretization == "sphere":
        return {"discretization": "sphere", "refinement": n.refinement}
    return {"discretization": "axisym", "n_elements": n.n_elements, "element_order": n.element_order, "m_max": n.m_max}


def run_command(config: RunConfig, jobs: int = 1) -> Tuple[SweepTable, int]:
    """Execute ``config.command`` and return its table and exit code.

    Module errors do not propagate: they are recorded in the header as
    ``status: error`` with the error's machine-readable code.
    """
    table = SweepTable(config.command)
    table.header.update(
        {
            "command": config.command,
            "version": __version__,
            "config": config.echo(),
            "mesh": _mesh_header(config),
        }
    )
    flags = set()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WindowEmpty)
            warnings.simplefilter("ignore", MultiplicityWarning)
            with _mapper(jobs) as map_fn:
                _RUNNERS[config.command](config, table, map_fn, flags)
    except ConetrapError as exc:
        table.header["status"] = "error"
        table.header["error_code"] = exc.code
        table.header["error"] = str(exc)
        return table, EXIT_ERROR
    table.header["warnings"] = sorted(flags - {"validation_failed"})
    if "validation_failed" in flags:
        table.header["status"] = "failed"
        return table, EXIT_ERROR
    if flags:
        table.header["status"] = "degenerate"
        return table, EXIT_DEGENERATE
    table.header["status"] = "ok"
    return table, EXIT_OK


def _jobs(arg: Optional[int]) -> int:
    env = os.environ.get("CONETRAP_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SystemExit(f"conetrap: CONETRAP_JOBS must be an integer, got {env!r}")
    return max(1, arg or 1)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conetrap", description="Black-hole singular exponents at conical tips.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="TOML run configuration")
    p.add_argument("--out", help="output file (default: [output] path, else stdout)")
    p.add_argument("--format", choices=FORMATS, help="table format (default: [output] format, else csv)")
    p.add_argument("--jobs", type=int, default=None, help="worker threads (CONETRAP_JOBS overrides)")
    p.add_argument("--version", action="version", version=f"conetrap {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"conetrap: cannot read config: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = parse_config(text, args.command)
    except ConetrapError as exc:
        print(f"conetrap: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    table, code = run_command(cfg, _jobs(args.jobs))
    fmt = args.format or cfg.output.format
    out = args.out or cfg.output.path
    try:
        text = write_table(table, fmt, out)
    except ConetrapError as exc:
        print(f"conetrap: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if out is None:
        sys.stdout.write(text)
    if code == EXIT_ERROR and "error" in table.header:
        print(f"conetrap: {table.header['error_code']}: {table.header['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
