"""Self-checks of the discretizations against known spectra.

Two families of checks:

* the harmonic suite: with ``eps = 1`` everywhere the pencil is the
  Laplace-Beltrami operator, whose eigenvalues are ``l (l + 1)`` with
  multiplicity ``2 l + 1``;
* the oracle comparison: for a circular cap the axisymmetric reduction and
  the full surface mesh must produce the same spectrum, mode by mode.  Sphere
  eigenvectors are assigned an azimuthal index by a Fourier analysis along
  latitude circles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .discretization import assemble_axisym, assemble_sphere, build_latitude_mesh, build_sphere_mesh
from .eigensolver import pencil_eigenvalues, solve_gevp
from .model import Material, make_cap_geometry

HARMONIC_TARGETS = (0.0, 2.0, 6.0, 12.0)


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


@dataclass(frozen=True)
class HarmonicConvergence:
    """Eigenvalue estimates of the ``eps = 1`` pencil on two meshes.

    ``orders[i]`` is ``log2(err_coarse / err_fine)`` for target ``i``
    (``nan`` when the coarse error is already at round-off level).
    """

    targets: Tuple[float, ...]
    sizes: Tuple[float, float]
    estimates: Tuple[np.ndarray, np.ndarray]
    errors: Tuple[np.ndarray, np.ndarray]
    orders: np.ndarray


def _errors(est, targets):
    t = np.asarray(targets, dtype=float)
    return np.abs(est - t) / np.maximum(1.0, np.abs(t))


def _orders(e_coarse, e_fine, ratio):
    out = np.full(len(e_coarse), np.nan)
    ok = e_coarse > 1e-11
    out[ok] = np.log(e_coarse[ok] / np.maximum(e_fine[ok], 1e-300)) / math.log(ratio)
    return out


def harmonic_axisym(n_elements: int = 32, order: int = 1, targets: Sequence[float] = HARMONIC_TARGETS, alpha: float = math.pi / 2) -> HarmonicConvergence:
    """Axisymmetric ``m = 0`` estimates of ``l (l + 1)`` at ``n`` and ``2 n`` elements."""
    geometry = make_cap_geometry(alpha)
    material = Material.validation_override()
    ests, hs = [], []
    for n in (n_elements, 2 * n_elements):
        mesh = build_latitude_mesh(geometry, n)
        mus = np.sort(pencil_eigenvalues(assemble_axisym(mesh, material, 0, order)).real)
        ests.append(mus[: len(targets)])
        hs.append(mesh.h_max)
    errs = [_errors(e, targets) for e in ests]
    return HarmonicConvergence(tuple(targets), tuple(hs), tuple(ests), tuple(errs), _orders(errs[0], errs[1], hs[0] / hs[1]))


def sphere_harmonic_targets(l_max: int = 2) -> np.ndarray:
    """``l (l + 1)`` repeated ``2 l + 1`` times, ``l = 0..l_max``."""
    return np.array([l * (l + 1) for l in range(l_max + 1) for _ in range(2 * l + 1)], dtype=float)


def harmonic_sphere(refinement: int = 4, alpha: float = math.pi / 2, l_max: int = 2) -> Tuple[np.ndarray, np.ndarray]:
    """Lowest ``(l_max + 1)^2`` eigenvalues of the ``eps = 1`` surface pencil.

    Returns ``(estimates, relative_errors)``; errors are measured against
    ``max(1, l (l + 1))`` so the zero eigenvalue is checked absolutely.
    """
    targets = sphere_harmonic_targets(l_max)
    mesh = build_sphere_mesh(make_cap_geometry(alpha), refinement)
    mus = np.sort(pencil_eigenvalues(assemble_sphere(mesh, Material.validation_override())).real)
    est = mus[: len(targets)]
    return est, _errors(est, targets)


def azimuthal_content(basis, x, k_max: int = 8, n_theta: int = 64, n_lat: int = 48) -> np.ndarray:
    """Energy of ``x`` in each azimuthal index ``|k| = 0..k_max``.

    The function is sampled on ``n_lat`` latitude circles (Gauss nodes in
    ``sin(phi)``, so each circle carries an equal-area weight) and Fourier
    transformed along each circle.
    """
    g, w = np.polynomial.legendre.leggauss(n_lat)
    phi = np.arcsin(g)
    theta = -math.pi + 2 * math.pi * np.arange(n_theta) / n_theta
    T, P = np.meshgrid(theta, phi)
    vals, _, _ = basis.evaluate_angular(np.asarray(x), T.ravel(), P.ravel())
    F = np.fft.fft(vals.reshape(n_lat, n_theta), axis=1) / n_theta
    power = np.abs(F) ** 2 * w[:, None]
    out = np.zeros(k_max + 1)
    out[0] = power[:, 0].sum()
    for k in range(1, k_max + 1):
        out[k] = power[:, k].sum() + power[:, -k].sum()
    return out


def dominant_azimuthal_index(basis, x, k_max: int = 8) -> int:
    return int(np.argmax(azimuthal_content(basis, x, k_max)))


@dataclass
class OracleComparison:
    """Cross-check of the axisymmetric and surface spectra of one cap.

    ``forward`` holds ``(m, mu_axisym, mu_sphere_nearest, error)`` for every
    axisymmetric eigenvalue with ``|mu| < mu_max``; ``backward`` holds
    ``(m_identified, mu_sphere, mu_axisym_nearest, error)`` for every sphere
    eigenvalue with ``|mu| < mu_max`` identified as ``m <= max(modes)``.
    Errors are relative to ``max(1, |mu|)``.
    """

    alpha: float
    kappa: float
    refinement: int
    n_elements: int
    tol: float
    forward: List[tuple] = field(default_factory=list)
    backward: List[tuple] = field(default_factory=list)

    @property
    def max_error(self) -> float:
        errs = [r[3] for r in self.forward + self.backward]
        return max(errs) if errs else 0.0

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol


def _nearest(values, mu):
    d = np.abs(values - mu)
    k = int(np.argmin(d))
    return complex(values[k]), float(d[k] / max(1.0, abs(mu)))


def compare_axisym_sphere(
    alpha: float,
    kappa: float,
    refinement: int = 3,
    n_elements: int = 256,
    modes: Sequence[int] = (0, 1, 2),
    mu_max: float = 30.0,
    tol: float = 5e-2,
    order: int = 2,
    minus_side: str = "north",
) -> OracleComparison:
    """Match axisymmetric and surface eigenvalues in both directions."""
    geometry = make_cap_geometry(alpha, minus_side)
    material = Material(1.0, float(kappa), override=kappa > 0)
    mesh = build_latitude_mesh(geometry, n_elements)
    ax = {m: pencil_eigenvalues(assemble_axisym(mesh, material, m, order)) for m in modes}
    ax_all = np.concatenate(list(ax.values()))
    pencil = assemble_sphere(build_sphere_mesh(geometry, refinement), material)
    sols = solve_gevp(pencil)
    sphere_mus = np.array([s.mu for s in sols])
    out = OracleComparison(alpha, kappa, refinement, n_elements, tol)
    for m in modes:
        for mu in ax[m]:
            if abs(mu) < mu_max:
                near, err = _nearest(sphere_mus, mu)
                out.forward.append((m, complex(mu), near, err))
    k_max = max(8, max(modes) + 4)
    for sol in sols:
        if abs(sol.mu) >= mu_max:
            continue
        m = dominant_azimuthal_index(pencil.basis, sol.vector, k_max)
        if m <= max(modes):
            near, err = _nearest(ax_all, sol.mu)
            out.backward.append((m, sol.mu, near, err))
    return out


def run_validation(
    refinement: int = 4,
    n_elements: int = 32,
    order_min: float = 1.8,
    sphere_tol: float = 2e-2,
    oracle_alphas_deg: Sequence[float] = (60.0, 90.0, 120.0),
    oracle_kappas: Sequence[float] = (-0.5, -1.9),
    oracle_refinement: int = 3,
    oracle_n_elements: int = 256,
    oracle_tol: float = 5e-2,
    map_fn=map,
) -> List[ValidationCheck]:
    """Run the harmonic suite and the oracle comparison; one check per item.

    ``map_fn`` (e.g. ``executor.map``) runs the independent oracle cases.
    """
    checks = []
    conv = harmonic_axisym(n_elements)
    for t, est, err, p in zip(conv.targets, conv.estimates[1], conv.errors[1], conv.orders):
        if np.isnan(p):
            checks.append(ValidationCheck(f"axisym_p1_mu{t:g}_error", bool(err < 1e-8), float(err), 1e-8, f"estimate {est:.10g}"))
        else:
            checks.append(ValidationCheck(f"axisym_p1_mu{t:g}_order", bool(p >= order_min), float(p), order_min, f"estimate {est:.10g}, rel error {err:.3e}"))
    levels = (refinement - 1, refinement) if refinement >= 2 else (refinement,)
    errs = [harmonic_sphere(r)[1] for r in levels]
    targets = sphere_harmonic_targets()
    err = errs[-1]
    checks.append(ValidationCheck(f"sphere_p1_r{refinement}_max_rel_error", bool(np.max(err) <= sphere_tol), float(np.max(err)), sphere_tol, f"targets {targets.tolist()}"))
    if len(levels) == 2:
        nz = targets > 0
        p = float(np.min(np.log2(errs[0][nz] / np.maximum(errs[1][nz], 1e-300))))
        checks.append(ValidationCheck(f"sphere_p1_r{levels[0]}_r{levels[1]}_min_order", bool(p >= order_min), p, order_min, "log2 of error ratio per refinement"))
    cases = [(a, k) for a in oracle_alphas_deg for k in oracle_kappas]

    def one(case):
        a, k = case
        return compare_axisym_sphere(math.radians(a), k, oracle_refinement, oracle_n_elements, tol=oracle_tol)

    for (a, k), cmp in zip(cases, map_fn(one, cases)):
        checks.append(
            ValidationCheck(
                f"oracle_alpha{a:g}_kappa{k:g}",
                cmp.passed,
                cmp.max_error,
                oracle_tol,
                f"{len(cmp.forward)} axisym / {len(cmp.backward)} sphere eigenvalues matched",
            )
        )
    return checks
