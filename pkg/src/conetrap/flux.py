"""Cut-off singular functions and their energy-flux integrals.

``s(x) = chi(r) r^a Phi(theta, phi)`` with ``a = -1/2 + i eta`` for the
outgoing function and ``a = -1/2 - i eta`` for the ingoing one, where
``eta`` is the outgoing (signed) value.  Because ``r^a Phi`` is harmonic
for the weighted operator in the cone, ``div(eps grad conj(s)) s`` only
involves derivatives of ``chi`` and the volume integral separates into an
angular factor and a radial factor supported in ``[r_one, rho]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EndpointDegeneracy, PointOutsideChart, QuadratureNotConverged, TauOutsidePlateau
from .model import MINUS, CutoffProfile, eval_cutoff
from .singularity import TOL_D, SingularExponent, _d_threshold


@dataclass(frozen=True)
class SingularFieldSample:
    point: tuple
    value: complex
    gradient: np.ndarray  # components along (e_r, e_theta, e_phi)


@dataclass(frozen=True)
class FluxReport:
    tau: float
    surface_flux: complex
    volume_integral: complex
    denominator: complex
    eta_D: float

    @property
    def residual_identity(self) -> float:
        return abs(self.volume_integral.imag - self.eta_D)


def _exponent(exponent: SingularExponent, sign: str) -> complex:
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    eta = exponent.signed_eta
    return complex(-0.5, eta if sign == "+" else -eta)


def eval_singular_function(exponent: SingularExponent, cutoff: CutoffProfile, point, sign: str = "+") -> SingularFieldSample:
    """Value and gradient of ``s^{+}`` (or ``s^{-}``) at ``(r, theta, phi)``.

    The gradient is expressed in the local frame ``(e_r, e_theta, e_phi)``.
    """
    r, theta, phi = (float(c) for c in point)
    if not (math.isfinite(theta) and math.isfinite(phi)) or abs(phi) >= math.pi / 2 or r <= 0:
        raise PointOutsideChart(f"point {point} is outside the spherical chart (r > 0, |phi| < pi/2)")
    a = _exponent(exponent, sign)
    chi, dchi, _ = eval_cutoff(cutoff, r)
    val, d_theta, d_phi = exponent.basis.evaluate_angular(exponent.phi, np.array([theta]), np.array([phi]))
    val, d_theta, d_phi = float(val[0]), float(d_theta[0]), float(d_phi[0])
    ra = r**a
    radial = chi * ra
    d_radial = dchi * ra + chi * a * ra / r
    grad = np.array([d_radial * val, radial * d_theta / (r * math.cos(phi)), radial * d_phi / r], dtype=complex)
    return SingularFieldSample((r, theta, phi), complex(radial * val), grad)


def _weights_eps(exponent: SingularExponent, regions):
    mat = exponent.pencil.material
    eps = np.where(regions == MINUS, mat.eps_minus, mat.eps_plus)
    return eps


def angular_moment(exponent: SingularExponent, n_gauss: int = 6) -> float:
    """``int_{S^2} eps |Phi|^2`` by quadrature of the finite element function."""
    _, _, w, vals, regions = exponent.basis.angular_quadrature(exponent.phi, n_gauss)
    return float(np.sum(w * _weights_eps(exponent, regions) * vals**2))


def surface_flux(exponent: SingularExponent, tau: float, cutoff: CutoffProfile = CutoffProfile(), n_gauss: int = 6, sign: str = "+") -> complex:
    """``int_{|x| = tau} eps conj(d_r s) s ds`` by angular quadrature.

    Equals ``-(1/2 + i eta) D`` for the outgoing function (``sign="+"``) and
    its conjugate for the ingoing one, whatever ``tau`` in the plateau.
    """
    if not (0 < tau <= cutoff.r_one):
        raise TauOutsidePlateau(f"tau={tau} must lie in (0, r_one={cutoff.r_one}]")
    a = _exponent(exponent, sign)
    _, _, w, vals, regions = exponent.basis.angular_quadrature(exponent.phi, n_gauss)
    chi, dchi, _ = eval_cutoff(cutoff, tau)
    s = chi * tau**a * vals
    ds = (dchi * tau**a + chi * a * tau ** (a - 1)) * vals
    return complex(np.sum(w * _weights_eps(exponent, regions) * np.conj(ds) * s) * tau**2)


def _radial_factor(abar: complex, cutoff: CutoffProfile, n: int) -> complex:
    g, w = np.polynomial.legendre.leggauss(n)
    lo, hi = cutoff.r_one, cutoff.rho
    r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g
    chi, d1, d2 = eval_cutoff(cutoff, r)
    integrand = chi * (2 * abar * d1 + r * d2 + 2 * d1)
    return complex(0.5 * (hi - lo) * np.sum(w * integrand))


def volume_flux_integral(
    exponent: SingularExponent,
    cutoff: CutoffProfile = CutoffProfile(),
    sign: str = "+",
    order: int = 24,
    max_order: int = 3072,
    rtol: float = 1e-12,
    n_gauss: int = 6,
) -> complex:
    """``int_Omega div(eps grad conj(s)) s dx`` with ``Omega`` the ball of radius ``rho``.

    Equals ``int eps|Phi|^2 * int chi (2 conj(a) chi' + r chi'' + 2 chi') dr``;
    its imaginary part is ``eta * D`` for the outgoing function whatever the
    cutoff.  The Gauss order of the radial factor is doubled until two
    successive orders agree to ``rtol``.
    """
    abar = np.conj(_exponent(exponent, sign))
    lo = _radial_factor(abar, cutoff, order)
    while True:
        order *= 2
        if order > max_order:
            raise QuadratureNotConverged(f"radial factor not converged at Gauss order {order // 2}")
        hi = _radial_factor(abar, cutoff, order)
        if abs(hi - lo) <= rtol * max(1.0, abs(hi)):
            break
        lo = hi
    return angular_moment(exponent, n_gauss) * hi


def coefficient_denominator(exponent: SingularExponent, cutoff: CutoffProfile = CutoffProfile(), tol_D: float = TOL_D) -> complex:
    """``int_Omega div(eps grad s+) conj(s+) dx``, the conjugate of the volume flux."""
    if abs(exponent.D) < _d_threshold(exponent.pencil, tol_D):
        raise EndpointDegeneracy(f"weighted norm D={exponent.D:.3e} vanishes; denominator may be zero")
    return complex(np.conj(volume_flux_integral(exponent, cutoff)))


def flux_report(exponent: SingularExponent, tau: float, cutoff: CutoffProfile = CutoffProfile()) -> FluxReport:
    volume = volume_flux_integral(exponent, cutoff)
    return FluxReport(
        tau=tau,
        surface_flux=surface_flux(exponent, tau, cutoff),
        volume_integral=volume,
        denominator=coefficient_denominator(exponent, cutoff),
        eta_D=exponent.signed_eta * exponent.D,
    )
