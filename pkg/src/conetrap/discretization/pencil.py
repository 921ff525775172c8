"""The epsilon-weighted matrix pencil ``A x = mu B x``."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Optional, Tuple

import numpy as np
from scipy import sparse

from ..model import MINUS, PLUS, Material


def _dense(m):
    return m.toarray() if sparse.issparse(m) else np.asarray(m)


def _combine(parts, coeffs):
    out = None
    for part, c in zip(parts, coeffs):
        if c == 0:
            continue
        term = _dense(part) * (c.real if c.imag == 0 else c)
        out = term if out is None else out + term
    if out is None:
        out = np.zeros(_dense(parts[0]).shape)
    return out


@dataclass(frozen=True, eq=False)
class WeightedPencil:
    """Stiffness ``A`` and mass ``B`` weighted by the complex permittivity.

    When built by an assembler, the pencil also keeps the unit-weight
    stiffness and mass restricted to each region (``stiffness_parts`` and
    ``mass_parts``, ordered ``(minus, plus)``), so that pencils for other
    materials are cheap linear combinations.

    ``measure`` converts discrete quadratic forms into integrals over the
    unit sphere (``2 pi`` or ``pi`` for azimuthal modes, ``1`` for the
    triangulated sphere).
    """

    A: np.ndarray
    B: np.ndarray
    stiffness_parts: Optional[Tuple[Any, Any]] = None
    mass_parts: Optional[Tuple[Any, Any]] = None
    basis: Any = None
    mode: Any = None
    material: Optional[Material] = None

    def __post_init__(self):
        if self.A.shape != self.B.shape or self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError(f"pencil matrices must be square and equal-sized, got {self.A.shape}, {self.B.shape}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def measure(self) -> float:
        return 1.0 if self.basis is None else self.basis.measure

    @classmethod
    def from_parts(cls, stiffness_parts, mass_parts, material, basis=None, mode=None):
        coeffs = (material.eps(MINUS), material.eps(PLUS))
        A = _combine(stiffness_parts, coeffs)
        B = _combine(mass_parts, coeffs)
        return cls(A, B, tuple(stiffness_parts), tuple(mass_parts), basis, mode, material)

    def with_material(self, material: Material) -> "WeightedPencil":
        if self.stiffness_parts is None:
            raise ValueError("pencil was built from raw matrices; it cannot be re-weighted")
        return WeightedPencil.from_parts(self.stiffness_parts, self.mass_parts, material, self.basis, self.mode)

    def with_delta(self, delta: float) -> "WeightedPencil":
        return self.with_material(self.material.with_delta(delta))

    def unit_stiffness(self, regions=(MINUS, PLUS)):
        return _combine(self.stiffness_parts, [1.0 + 0j if r in regions else 0 for r in (MINUS, PLUS)])

    def unit_mass(self, regions=(MINUS, PLUS)):
        return _combine(self.mass_parts, [1.0 + 0j if r in regions else 0 for r in (MINUS, PLUS)])

    def lossy_regions(self):
        return (MINUS, PLUS) if self.material.lossy == "all" else (MINUS,)

    def quadratic(self, matrix, x) -> complex:
        """``measure * x^T M x`` (bilinear, no conjugation)."""
        return self.measure * complex(x @ (matrix @ x))

    def mass_norm2(self, x) -> float:
        """Unweighted ``integral of |Phi|^2`` over the sphere."""
        m = self.unit_mass()
        return self.measure * float(np.real(np.conj(x) @ (m @ x)))

    def with_matrices(self, A, B) -> "WeightedPencil":
        return replace(self, A=A, B=B)
