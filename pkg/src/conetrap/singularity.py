"""Black-hole exponents ``lambda = -1/2 + i eta`` of the weighted pencil.

The pipeline is: solve the lossless pencil, keep the real eigenvalues
``mu < -1/4`` (:func:`find_black_hole_pairs`), orient ``eta`` so that
``eta * D > 0`` with ``D`` the epsilon-weighted norm of the eigenfunction
(:func:`select_outgoing`), measure the spectral gap ``beta0`` around the
critical line (:func:`compute_beta0`), and follow the exponent when a
dissipation ``delta`` is switched on (:func:`sweep_delta`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, List, Optional, Sequence

import numpy as np

from .discretization import assemble_axisym, assemble_sphere, axisym_parts, build_latitude_mesh, build_sphere_mesh
from .discretization.pencil import WeightedPencil
from .eigensolver import (
    DEFAULT_TOL,
    EigenSolution,
    mu_to_lambda,
    pencil_eigenvalues,
    refine_eigenpair,
    solve_gevp,
)
from .errors import (
    EndpointDegeneracy,
    MassMatrixSingular,
    MultiplicityWarning,
    NoConvergence,
    NoSpectralGap,
    NotOutgoing,
    TrackingAmbiguity,
    WindowEmpty,
)
from .model import AzimuthalMode, Material, TipGeometry, as_mode, make_cap_geometry

CRITICAL_TOL = 1e-6
TOL_D = 1e-8
TRACKING_TOL = 1e-8
# pairs whose radial frequency exceeds this many oscillations per element are
# mesh artifacts (they accumulate at kappa = -1) and get flagged "unresolved"
ETA_RESOLUTION = 1.0


@dataclass(frozen=True, eq=False)
class SingularExponent:
    """A critical pair ``-1/2 +- i eta`` with its real eigenfunction.

    ``eta`` is stored positive; ``orientation`` (``+1`` or ``-1``, ``0``
    before selection) gives the sign of the outgoing ``eta``, so the
    outgoing exponent is ``-1/2 + i * orientation * eta``.
    """

    eta: float
    mu: float
    phi: np.ndarray
    D: float
    pencil: WeightedPencil = field(repr=False)
    orientation: int = 0
    beta0: Optional[float] = None
    beta_max: Optional[float] = None

    @property
    def mode(self):
        return self.pencil.mode

    @property
    def basis(self):
        return self.pencil.basis

    @property
    def signed_eta(self) -> float:
        if self.orientation == 0:
            raise NotOutgoing("outgoing orientation has not been selected")
        return self.orientation * self.eta

    @property
    def lambda_out(self) -> complex:
        return complex(-0.5, self.signed_eta)

    @property
    def lambda_in(self) -> complex:
        return complex(-0.5, -self.signed_eta)

    def flipped(self) -> "SingularExponent":
        """Same exponent with the eigenfunction's sign reversed."""
        return replace(self, phi=-self.phi)


def _d_threshold(pencil: WeightedPencil, tol_D: float) -> float:
    mat = pencil.material
    scale = abs(mat.eps_minus) + abs(mat.eps_plus) if mat is not None else 1.0
    return tol_D * scale


def _real_normalized(pencil: WeightedPencil, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    k = int(np.argmax(np.abs(x)))
    x = np.real(x * np.exp(-1j * np.angle(x[k])))
    return x / math.sqrt(pencil.mass_norm2(x))


def _candidate(pencil: WeightedPencil, mu: float, vector) -> SingularExponent:
    eta = math.sqrt(-mu - 0.25)
    phi = _real_normalized(pencil, vector)
    D = float(np.real(pencil.quadratic(pencil.B, phi)))
    return SingularExponent(eta=eta, mu=-(eta * eta) - 0.25, phi=phi, D=D, pencil=pencil)


def _is_critical(mu: complex, tol: float) -> bool:
    return abs(mu.imag) <= tol and mu.real < -0.25 - tol


def find_black_hole_pairs(
    solutions: Sequence[EigenSolution], pencil: WeightedPencil, tol: float = CRITICAL_TOL
) -> List[SingularExponent]:
    """Real eigenvalues ``mu < -1/4`` of a lossless pencil, as exponent pairs.

    The eigenvectors are made real and normalized to unit ``L^2`` norm on
    the sphere.  A :class:`MultiplicityWarning` is issued when more than one
    distinct ``|eta|`` shows up.
    """
    pairs = []
    for sol in solutions:
        if not _is_critical(sol.mu, tol):
            continue
        vector = sol.vector
        if vector is None:
            vector = refine_eigenpair(pencil, sol.mu).vector
        pairs.append(_candidate(pencil, sol.mu.real, vector))
    etas = sorted(p.eta for p in pairs)
    distinct = [e for i, e in enumerate(etas) if i == 0 or e - etas[i - 1] > 1e-6 * max(1.0, e)]
    if len(distinct) > 1:
        warnings.warn(f"{len(distinct)} distinct |eta| values found: {distinct}", MultiplicityWarning, stacklevel=2)
    return pairs


def select_outgoing(candidate: SingularExponent, pencil: Optional[WeightedPencil] = None, tol_D: float = TOL_D) -> SingularExponent:
    """Fix the sign of ``eta`` so that ``eta * D > 0``."""
    pencil = candidate.pencil if pencil is None else pencil
    D = float(np.real(pencil.quadratic(pencil.B, candidate.phi)))
    if abs(D) < _d_threshold(pencil, tol_D):
        raise EndpointDegeneracy(f"weighted norm D={D:.3e} vanishes; eta={candidate.eta:.6g}")
    return replace(candidate, D=D, orientation=1 if D > 0 else -1, pencil=pencil)


def _mus(spectrum) -> np.ndarray:
    return np.array([s.mu if isinstance(s, EigenSolution) else complex(s) for s in spectrum], dtype=complex)


def compute_beta0(spectrum: Iterable, critical: Optional[SingularExponent] = None, tol: float = CRITICAL_TOL):
    """Distance from the critical line to the nearest other exponent.

    ``spectrum`` holds :class:`EigenSolution` objects or raw ``mu`` values.
    Returns ``(beta0, min(1/2, beta0))``.
    """
    mus = _mus(spectrum)
    gaps = np.abs(np.real(np.sqrt(0.25 + mus)))
    keep = gaps > tol
    if critical is not None:
        keep &= np.abs(mus - critical.mu) > tol * max(1.0, abs(critical.mu))
    if not np.any(keep):
        raise NoSpectralGap("every eigenvalue lies on the critical line")
    beta0 = float(np.min(gaps[keep]))
    return beta0, min(0.5, beta0)


def perturbation_slope(exponent: SingularExponent, pencil: Optional[WeightedPencil] = None, tol_D: float = TOL_D, as_complex: bool = False):
    """First-order drift ``lambda'`` of the outgoing exponent under dissipation.

    ``lambda' = (int_L |grad Phi|^2 + (eta^2 + 1/4) int_L |Phi|^2) / (2 eta D)``
    where ``L`` is the lossy part of the sphere and ``eta`` the outgoing
    (signed) value.  The result is real and positive; ``as_complex=True``
    returns the raw complex quotient so its imaginary part can be checked.
    """
    pencil = exponent.pencil if pencil is None else pencil
    if exponent.orientation == 0 or exponent.signed_eta * exponent.D <= 0:
        raise NotOutgoing("perturbation_slope needs an outgoing-selected exponent (eta * D > 0)")
    if abs(exponent.D) < _d_threshold(pencil, tol_D):
        raise EndpointDegeneracy(f"weighted norm D={exponent.D:.3e} vanishes")
    regions = pencil.lossy_regions()
    x = exponent.phi
    grad = pencil.quadratic(pencil.unit_stiffness(regions), x)
    mass = pencil.quadratic(pencil.unit_mass(regions), x)
    numerator = grad + (exponent.eta**2 + 0.25) * mass
    slope = complex(numerator / (2 * exponent.signed_eta * exponent.D))
    return slope if as_complex else slope.real


@dataclass(frozen=True)
class DeltaSweepRow:
    delta: float
    lambda_delta: complex
    eta_delta: complex
    in_window: bool
    tracking_distance: float
    window_empty: bool = False


def sweep_delta(
    exponent: SingularExponent,
    deltas: Sequence[float],
    pencil: Optional[WeightedPencil] = None,
    tracking_tol: float = TRACKING_TOL,
) -> List[DeltaSweepRow]:
    """Follow the outgoing exponent through increasing dissipation.

    At each ``delta`` the exponent with ``Re lambda > -1/2`` nearest to the
    previous one is kept.  Rows flag whether ``Re lambda`` lies below
    ``-1/2 + beta0 - sqrt(delta)``; a :class:`WindowEmpty` warning is issued
    when that bound does not exceed ``-1/2``.
    """
    pencil = exponent.pencil if pencil is None else pencil
    deltas = [float(d) for d in deltas]
    if any(d < 0 for d in deltas) or any(b < a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be nonnegative and sorted ascending")
    if exponent.beta0 is None:
        raise ValueError("exponent has no beta0; run compute_beta0 first")
    prev = exponent.lambda_out
    rows = []
    for delta in deltas:
        if delta == 0.0:
            lam, dist = exponent.lambda_out, 0.0
        else:
            mus = pencil_eigenvalues(pencil.with_delta(delta))
            roots = np.array([mu_to_lambda(mu) for mu in mus]).ravel()
            roots = roots[roots.real > -0.5]
            dists = np.abs(roots - prev)
            order = np.argsort(dists)
            if len(order) > 1 and dists[order[1]] - dists[order[0]] <= tracking_tol:
                raise TrackingAmbiguity(f"two exponents equally close to {prev:.6g} at delta={delta}")
            lam, dist = complex(roots[order[0]]), float(dists[order[0]])
        bound = exponent.beta0 - math.sqrt(delta)
        empty = bound <= 0
        if empty:
            warnings.warn(f"weight window is empty at delta={delta} (beta0={exponent.beta0:.4g})", WindowEmpty, stacklevel=2)
        in_window = (not empty) and (-0.5 < lam.real < -0.5 + bound if delta > 0 else lam.real < -0.5 + bound)
        rows.append(DeltaSweepRow(delta, lam, -1j * (lam + 0.5), bool(in_window), dist, empty))
        prev = lam
    return rows


@dataclass
class ExponentAnalysis:
    """Everything computed for one configuration on the lossless pencil."""

    pairs: List[SingularExponent]
    pencils: dict
    spectra: dict
    beta0: Optional[float] = None
    beta_max: Optional[float] = None
    degenerate: list = field(default_factory=list)


def analyze(
    geometry: TipGeometry,
    material: Material,
    modes: Sequence = range(4),
    n_elements: int = 256,
    order: int = 2,
    discretization: str = "axisym",
    refinement: int = 4,
    tol: float = CRITICAL_TOL,
    solver_tol: float = DEFAULT_TOL,
    tol_D: float = TOL_D,
    map_fn=map,
) -> ExponentAnalysis:
    """Solve the lossless pencil(s) and return outgoing-selected pairs.

    ``beta0`` is taken over the union of all spectra computed (all listed
    azimuthal modes, or the full sphere).  Pairs whose weighted norm
    vanishes are listed in ``degenerate`` instead of raising.  ``map_fn``
    (e.g. ``executor.map``) runs the per-mode solves; results are merged in
    input order.
    """
    lossless = material.with_delta(0.0)
    if discretization == "axisym":
        mesh = build_latitude_mesh(geometry, n_elements)
        jobs = [(as_mode(m).m, lambda mode=as_mode(m): assemble_axisym(mesh, lossless, mode, order)) for m in modes]
    elif discretization == "sphere":
        jobs = [("sphere", lambda: assemble_sphere(build_sphere_mesh(geometry, refinement), lossless))]
    else:
        raise ValueError(f"unknown discretization {discretization!r}")

    def solve(job):
        key, build = job
        pencil = build()
        spectrum = solve_gevp(pencil, tol=solver_tol)
        pairs, degenerate = [], []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MultiplicityWarning)
            for cand in find_black_hole_pairs(spectrum, pencil, tol):
                try:
                    pairs.append(select_outgoing(cand, tol_D=tol_D))
                except EndpointDegeneracy:
                    degenerate.append(cand)
        return key, pencil, spectrum, pairs, degenerate

    pencils, spectra, pairs, degenerate = {}, {}, [], []
    for key, pencil, spectrum, p, d in map_fn(solve, jobs):
        pencils[key], spectra[key] = pencil, spectrum
        pairs += p
        degenerate += d
    etas = sorted({round(p.eta, 6) for p in pairs})
    if len(etas) > 1:
        warnings.warn(f"{len(etas)} distinct |eta| values found: {etas}", MultiplicityWarning, stacklevel=2)
    all_mus = [s.mu for sols in spectra.values() for s in sols]
    analysis = ExponentAnalysis(pairs, pencils, spectra, degenerate=degenerate)
    if all_mus:
        gap_mus = [mu for mu in all_mus if not _is_critical(mu, tol)]
        beta0, beta_max = compute_beta0(gap_mus, tol=tol)
        analysis.beta0, analysis.beta_max = beta0, beta_max
        analysis.pairs = [replace(p, beta0=beta0, beta_max=beta_max) for p in pairs]
    return analysis


@dataclass(frozen=True)
class ScanRow:
    kappa: float
    mode: int
    eta: Optional[float]
    D: Optional[float]
    flags: tuple = ()


@dataclass(frozen=True)
class ScanEndpoint:
    mode: int
    kappa_lo: float
    kappa_hi: float
    kappa_inside: float
    eta: Optional[float]
    D: Optional[float]
    flags: tuple = ()


@dataclass
class ContrastScanResult:
    alpha: float
    modes: List[int]
    rows: List[ScanRow]
    endpoints: List[ScanEndpoint]

    def critical(self, kappa: float, mode: Optional[int] = None) -> List[ScanRow]:
        return [r for r in self.rows if r.kappa == kappa and r.eta is not None and (mode is None or r.mode == mode)]


def _critical_mus(pencil, tol):
    mus = pencil_eigenvalues(pencil)
    return [mu for mu in mus if _is_critical(mu, tol)]


def scan_contrast(
    alpha: float,
    kappa_grid: Sequence[float],
    modes: Sequence = range(4),
    n_elements: int = 256,
    order: int = 2,
    eps_plus: float = 1.0,
    minus_side: str = "north",
    tol: float = CRITICAL_TOL,
    tol_D: float = TOL_D,
    bisection_width: float = 1e-3,
    material_factory=None,
) -> ContrastScanResult:
    """Presence of black-hole pairs along a contrast grid, per azimuthal mode.

    Sign changes of the indicator "some real ``mu < -1/4``" between grid
    neighbours are refined by bisection down to ``bisection_width``; the
    weighted norm ``D`` is reported on the side where the pair survives.
    Pairs with ``eta * h_max > ETA_RESOLUTION`` are flagged ``"unresolved"``.
    ``material_factory(kappa)`` may replace the default
    ``Material(eps_plus, kappa * eps_plus)`` (e.g. for positive-contrast
    validation runs).
    """
    kappas = [float(k) for k in kappa_grid]
    if any(b <= a for a, b in zip(kappas, kappas[1:])):
        raise ValueError("kappa grid must be strictly increasing")
    if material_factory is None:
        if any(k >= 0 for k in kappas):
            raise ValueError("kappa grid must be negative")

        def material_factory(kappa):
            return Material(eps_plus, kappa * eps_plus)

    geometry = make_cap_geometry(alpha, minus_side)
    mesh = build_latitude_mesh(geometry, n_elements)
    rows, endpoints = [], []
    for m in modes:
        mode = as_mode(m)
        parts_k, parts_m, basis = axisym_parts(mesh, mode, order)

        def pencil_at(kappa):
            return WeightedPencil.from_parts(parts_k, parts_m, material_factory(kappa), basis=basis, mode=mode)

        def probe(kappa):
            try:
                return _critical_mus(pencil_at(kappa), tol), ()
            except (MassMatrixSingular, NoConvergence) as exc:
                return [], (exc.code,)

        def describe(kappa, mus):
            pencil = pencil_at(kappa)
            out = []
            for mu in mus:
                try:
                    cand = _candidate(pencil, mu.real, refine_eigenpair(pencil, mu).vector)
                except NoConvergence as exc:
                    out.append((None, None, (exc.code,)))
                    continue
                flags = ("endpoint_degeneracy",) if abs(cand.D) < _d_threshold(pencil, tol_D) else ()
                if cand.eta * mesh.h_max > ETA_RESOLUTION:
                    flags += ("unresolved",)
                out.append((cand.eta, cand.D, flags))
            return out

        present = []
        for kappa in kappas:
            mus, flags = probe(kappa)
            present.append(bool(mus))
            if not mus:
                rows.append(ScanRow(kappa, mode.m, None, None, flags))
            for eta, D, f in describe(kappa, mus):
                rows.append(ScanRow(kappa, mode.m, eta, D, flags + f))
        for i in range(len(kappas) - 1):
            if present[i] == present[i + 1]:
                continue
            lo, hi = kappas[i], kappas[i + 1]
            lo_in = present[i]
            while hi - lo > bisection_width:
                mid = 0.5 * (lo + hi)
                if bool(probe(mid)[0]) == lo_in:
                    lo = mid
                else:
                    hi = mid
            inside = lo if lo_in else hi
            mus, flags = probe(inside)
            desc = describe(inside, mus)
            # the pair closest to the critical line is the one being born or dying
            eta, D, f = min(desc, key=lambda t: np.inf if t[0] is None else t[0]) if desc else (None, None, ())
            endpoints.append(ScanEndpoint(mode.m, lo, hi, inside, eta, D, flags + f))
    return ContrastScanResult(alpha, [as_mode(m).m for m in modes], rows, endpoints)
