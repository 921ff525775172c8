"""Physical and geometric configuration of a conical tip.

Latitude ``phi`` runs over ``[-pi/2, pi/2]`` and longitude ``theta`` over
``[-pi, pi]``; a point of the unit sphere is
``(cos(theta) cos(phi), sin(theta) cos(phi), sin(phi))``.  A circular cap of
aperture ``alpha`` is the set ``phi < -pi/2 + alpha`` around the south pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import AlphaOutOfRange, NegativeDissipation, SignViolation

MINUS = 0
PLUS = 1

CIRCULAR_CAP = "circular_cap"
GENERAL_REGION = "general_region"


@dataclass(frozen=True)
class TipGeometry:
    """Region of the unit sphere cut out by the cone.

    Parameters
    ----------
    kind : str
        ``"circular_cap"`` or ``"general_region"``.
    alpha : float, optional
        Cap aperture in radians (circular caps only).
    mesh_ref : path, optional
        Labeled sphere mesh file (general regions only).
    minus_side : {"north", "south"}
        Which side of the interface circle holds the negative material.
        ``"north"`` places it on ``phi > -pi/2 + alpha``, the convention under
        which ``alpha = 2 pi / 3``, ``kappa = -1.9`` carries the
        ``eta = 0.965`` pair.  ``"south"`` puts it inside the cap.
    """

    kind: str
    alpha: Optional[float] = None
    mesh_ref: Optional[Union[str, Path]] = None
    minus_side: str = "north"

    @property
    def phi_interface(self) -> float:
        if self.kind != CIRCULAR_CAP:
            raise AttributeError("phi_interface is only defined for circular caps")
        return -math.pi / 2 + self.alpha

    def region_of(self, phi):
        """Region label (MINUS or PLUS) of latitude ``phi`` for a circular cap.

        Points exactly on the interface are assigned to the minus side.
        """
        phi = np.asarray(phi, dtype=float)
        if self.minus_side == "north":
            minus = phi >= self.phi_interface
        else:
            minus = phi <= self.phi_interface
        return np.where(minus, MINUS, PLUS)


def make_cap_geometry(alpha: float, minus_side: str = "north") -> TipGeometry:
    """Circular conical tip of aperture ``alpha`` (radians)."""
    if not (0.0 < alpha < math.pi) or not math.isfinite(alpha):
        raise AlphaOutOfRange(f"alpha must lie in (0, pi), got {alpha!r}")
    if minus_side not in ("north", "south"):
        raise ValueError(f"minus_side must be 'north' or 'south', got {minus_side!r}")
    return TipGeometry(kind=CIRCULAR_CAP, alpha=float(alpha), minus_side=minus_side)


def make_region_geometry(mesh_ref: Union[str, Path]) -> TipGeometry:
    """General region read from a labeled ``SPHEREMESH 1`` file.

    The file is parsed eagerly so that malformed input fails here.
    """
    from .discretization.sphere import read_sphere_mesh

    read_sphere_mesh(mesh_ref)
    return TipGeometry(kind=GENERAL_REGION, mesh_ref=mesh_ref)


@dataclass(frozen=True)
class Material:
    """Permittivities on both sides of the interface plus dissipation.

    ``lossy`` selects where ``i*delta`` is added: ``"minus"`` (the negative
    material only, the default) or ``"all"`` (both materials).
    """

    eps_plus: float
    eps_minus: float
    delta: float = 0.0
    lossy: str = "minus"
    override: bool = False

    @property
    def kappa(self) -> float:
        return self.eps_minus / self.eps_plus

    def lossy_mask(self):
        """Boolean flags ``(minus, plus)`` telling which regions carry ``delta``."""
        return (True, self.lossy == "all")

    def eps(self, region: int, delta: Optional[float] = None) -> complex:
        """Complex permittivity of ``region`` (MINUS or PLUS)."""
        d = self.delta if delta is None else delta
        if region == MINUS:
            return complex(self.eps_minus, d)
        return complex(self.eps_plus, d if self.lossy == "all" else 0.0)

    def with_delta(self, delta: float) -> "Material":
        if delta < 0:
            raise NegativeDissipation(f"delta must be >= 0, got {delta!r}")
        return Material(self.eps_plus, self.eps_minus, float(delta), self.lossy, self.override)

    def scaled(self, t: float) -> "Material":
        """Material with both permittivities multiplied by ``t`` (delta unchanged)."""
        return Material(t * self.eps_plus, t * self.eps_minus, self.delta, self.lossy, self.override)

    @classmethod
    def validation_override(cls, eps_plus=1.0, eps_minus=1.0, delta=0.0, lossy="minus"):
        """Material that skips the sign checks (positive weights for validation runs)."""
        if delta < 0:
            raise NegativeDissipation(f"delta must be >= 0, got {delta!r}")
        return cls(float(eps_plus), float(eps_minus), float(delta), lossy, override=True)


def make_material(eps_plus: float, eps_minus: float, delta: float = 0.0, lossy: str = "minus") -> Material:
    if not eps_plus > 0 or not eps_minus < 0:
        raise SignViolation(
            f"need eps_plus > 0 and eps_minus < 0, got eps_plus={eps_plus!r}, eps_minus={eps_minus!r}"
        )
    if not delta >= 0:
        raise NegativeDissipation(f"delta must be >= 0, got {delta!r}")
    if lossy not in ("minus", "all"):
        raise ValueError(f"lossy must be 'minus' or 'all', got {lossy!r}")
    return Material(float(eps_plus), float(eps_minus), float(delta), lossy)


@dataclass(frozen=True)
class AzimuthalMode:
    """Azimuthal Fourier index ``m`` of a separated solution ``cos(m theta) f(phi)``."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"azimuthal mode must be a nonnegative integer, got {self.m!r}")

    @property
    def measure(self) -> float:
        """Integral of ``cos(m theta)**2`` over a full turn."""
        return 2 * math.pi if self.m == 0 else math.pi


def as_mode(m) -> AzimuthalMode:
    return m if isinstance(m, AzimuthalMode) else AzimuthalMode(int(m))


POLYNOMIAL_C2 = "polynomial"
SMOOTH_BUMP = "bump"


@dataclass(frozen=True)
class CutoffProfile:
    """Radial cutoff equal to one on ``[0, r_one]`` and zero beyond ``rho``."""

    r_one: float = 0.5
    rho: float = 1.0
    family: str = POLYNOMIAL_C2

    def __post_init__(self):
        if not (0 < self.r_one < self.rho):
            raise ValueError(f"need 0 < r_one < rho, got r_one={self.r_one}, rho={self.rho}")
        if self.family not in (POLYNOMIAL_C2, SMOOTH_BUMP):
            raise ValueError(f"unknown cutoff family {self.family!r}")


def _smoothstep(t):
    s = t * t * t * (10 - 15 * t + 6 * t * t)
    ds = 30 * t * t * (1 - t) ** 2
    dds = 60 * t * (1 - t) * (1 - 2 * t)
    return s, ds, dds


def _bump_step(t):
    # S = f(t) / (f(t) + f(1 - t)) with f(t) = exp(-1/t); all derivatives vanish at 0 and 1.
    def f(x):
        safe = np.where(x > 1e-3, x, 1.0)
        v = np.exp(-1.0 / safe)
        d1 = v / safe**2
        d2 = v * (1.0 / safe**4 - 2.0 / safe**3)
        keep = x > 1e-3
        return np.where(keep, v, 0.0), np.where(keep, d1, 0.0), np.where(keep, d2, 0.0)

    f0, f1, f2 = f(t)
    g0, g1, g2 = f(1 - t)
    g1 = -g1
    den = f0 + g0
    s = f0 / den
    num1 = f1 * g0 - f0 * g1
    ds = num1 / den**2
    dds = ((f2 * g0 - f0 * g2) * den - 2 * num1 * (f1 + g1)) / den**3
    return s, ds, dds


def eval_cutoff(profile: CutoffProfile, r):
    """Return ``(chi, chi', chi'')`` at radius ``r`` (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("cutoff is only defined for r >= 0")
    width = profile.rho - profile.r_one
    t = np.clip((r_arr - profile.r_one) / width, 0.0, 1.0)
    step = _smoothstep if profile.family == POLYNOMIAL_C2 else _bump_step
    s, ds, dds = step(t)
    inside = (r_arr > profile.r_one) & (r_arr < profile.rho)
    chi = np.where(r_arr <= profile.r_one, 1.0, np.where(r_arr >= profile.rho, 0.0, 1.0 - s))
    d1 = np.where(inside, -ds / width, 0.0)
    d2 = np.where(inside, -dds / width**2, 0.0)
    if np.ndim(r) == 0:
        return float(chi), float(d1), float(d2)
    return chi, d1, d2
