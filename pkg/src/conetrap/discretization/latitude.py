"""Axisymmetric reduction: 1D finite elements in latitude.

For a circular cap the weighted problem separates as
``Phi = cos(m theta) f(phi)``, which leaves a Sturm-Liouville problem on
``[-pi/2, pi/2]`` with the weight ``cos(phi)`` (area element) and the
centrifugal term ``m^2 / cos(phi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import GeometryKindMismatch, PoleQuadratureFailure
from ..model import CIRCULAR_CAP, MINUS, PLUS, AzimuthalMode, Material, TipGeometry, as_mode
from .pencil import WeightedPencil


@dataclass(frozen=True, eq=False)
class LatitudeMesh:
    nodes: np.ndarray
    interface_index: int
    element_region: np.ndarray
    geometry: TipGeometry

    @property
    def n_elements(self) -> int:
        return len(self.nodes) - 1

    @property
    def h_max(self) -> float:
        return float(np.max(np.diff(self.nodes)))


def build_latitude_mesh(geometry: TipGeometry, n_elements: int) -> LatitudeMesh:
    """Quasi-uniform mesh of ``[-pi/2, pi/2]`` with a node on the interface."""
    if geometry.kind != CIRCULAR_CAP:
        raise GeometryKindMismatch("latitude meshes need a circular cap geometry")
    if n_elements < 4:
        raise ValueError(f"need at least 4 elements, got {n_elements}")
    phi_i = geometry.phi_interface
    n_south = int(round(n_elements * (phi_i + math.pi / 2) / math.pi))
    n_south = min(max(n_south, 1), n_elements - 1)
    south = np.linspace(-math.pi / 2, phi_i, n_south + 1)
    north = np.linspace(phi_i, math.pi / 2, n_elements - n_south + 1)
    nodes = np.concatenate([south[:-1], north])
    nodes[n_south] = phi_i
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    return LatitudeMesh(nodes, n_south, geometry.region_of(mids), geometry)


def _shape(order, x):
    x = np.asarray(x, dtype=float)
    if order == 1:
        N = np.array([(1 - x) / 2, (1 + x) / 2])
        dN = np.array([-0.5 * np.ones_like(x), 0.5 * np.ones_like(x)])
    elif order == 2:
        N = np.array([x * (x - 1) / 2, 1 - x * x, x * (x + 1) / 2])
        dN = np.array([x - 0.5, -2 * x, x + 0.5])
    else:
        raise ValueError(f"element order must be 1 or 2, got {order}")
    return N, dN


class AxisymBasis:
    """Lagrange P1/P2 basis on a latitude mesh for one azimuthal mode."""

    def __init__(self, mesh: LatitudeMesh, order: int, mode: AzimuthalMode):
        self.mesh = mesh
        self.order = order
        self.mode = mode
        ne = mesh.n_elements
        self.n_global = order * ne + 1
        self.connectivity = order * np.arange(ne)[:, None] + np.arange(order + 1)[None, :]
        if mode.m >= 1:
            self.free = np.arange(1, self.n_global - 1)
        else:
            self.free = np.arange(self.n_global)

    @property
    def measure(self) -> float:
        return self.mode.measure

    @property
    def n(self) -> int:
        return len(self.free)

    def expand(self, x):
        full = np.zeros(self.n_global, dtype=np.result_type(x, float))
        full[self.free] = x
        return full

    def evaluate(self, x, phi):
        """Values and latitude derivatives of ``f`` at ``phi``."""
        full = self.expand(x)
        nodes = self.mesh.nodes
        phi = np.asarray(phi, dtype=float)
        e = np.clip(np.searchsorted(nodes, phi, side="right") - 1, 0, self.mesh.n_elements - 1)
        a, b = nodes[e], nodes[e + 1]
        h = b - a
        xi = (2 * phi - a - b) / h
        N, dN = _shape(self.order, xi)
        c = full[self.connectivity[e]].T
        return np.sum(N * c, axis=0), np.sum(dN * c, axis=0) * 2 / h

    def evaluate_angular(self, x, theta, phi):
        """``Phi``, ``dPhi/dtheta`` and ``dPhi/dphi`` at ``(theta, phi)``."""
        f, fp = self.evaluate(x, phi)
        m = self.mode.m
        c, s = np.cos(m * np.asarray(theta)), np.sin(m * np.asarray(theta))
        return f * c, -m * f * s, fp * c

    def angular_quadrature(self, x, n_gauss: int = 6):
        """Tensor quadrature of the unit sphere adapted to the mesh.

        Returns ``(theta, phi, weights, values, regions)``; ``weights``
        include the area element ``cos(phi)``.
        """
        g, w = np.polynomial.legendre.leggauss(n_gauss)
        nodes = self.mesh.nodes
        a, b = nodes[:-1, None], nodes[1:, None]
        phi = (0.5 * (a + b) + 0.5 * (b - a) * g).ravel()
        wphi = (0.5 * (b - a) * w).ravel() * np.cos(phi)
        regions = np.repeat(self.mesh.element_region, n_gauss)
        n_theta = 4 * (self.mode.m + 1)
        theta = -math.pi + 2 * math.pi * np.arange(n_theta) / n_theta
        f, _ = self.evaluate(x, phi)
        T, P = np.meshgrid(theta, phi)
        W = np.outer(wphi, np.full(n_theta, 2 * math.pi / n_theta))
        V = np.outer(f, np.cos(self.mode.m * theta))
        R = np.repeat(regions[:, None], n_theta, axis=1)
        return T.ravel(), P.ravel(), W.ravel(), V.ravel(), R.ravel()


def axisym_parts(mesh: LatitudeMesh, mode, order: int = 2, n_gauss: int = 4):
    """Unit-weight stiffness and mass restricted to each region.

    Returns ``((K_minus, K_plus), (M_minus, M_plus), basis)`` on the free dofs.
    """
    mode = as_mode(mode)
    basis = AxisymBasis(mesh, order, mode)
    g, w = np.polynomial.legendre.leggauss(n_gauss)
    N, dN = _shape(order, g)
    a, b = mesh.nodes[:-1], mesh.nodes[1:]
    h = b - a
    x = 0.5 * (a + b)[:, None] + 0.5 * h[:, None] * g[None, :]
    cosx = np.cos(x)
    if np.any(cosx <= 0) or np.any(np.abs(x) >= math.pi / 2):
        raise PoleQuadratureFailure("a quadrature node sits on a pole")
    wq = 0.5 * h[:, None] * w[None, :]
    dphys = dN[None, :, :] * (2 / h)[:, None, None]
    m2 = mode.m**2
    Ke = np.einsum("eiq,ejq,eq->eij", dphys, dphys, wq * cosx)
    if m2:
        Ke = Ke + m2 * np.einsum("iq,jq,eq->eij", N, N, wq / cosx)
    Me = np.einsum("iq,jq,eq->eij", N, N, wq * cosx)

    parts_k, parts_m = [], []
    conn = basis.connectivity
    rows = np.repeat(conn, order + 1, axis=1)
    cols = np.tile(conn, (1, order + 1))
    for region in (MINUS, PLUS):
        sel = mesh.element_region == region
        K = np.zeros((basis.n_global, basis.n_global))
        M = np.zeros_like(K)
        np.add.at(K, (rows[sel].ravel(), cols[sel].ravel()), Ke[sel].reshape(-1))
        np.add.at(M, (rows[sel].ravel(), cols[sel].ravel()), Me[sel].reshape(-1))
        f = basis.free
        parts_k.append(K[np.ix_(f, f)])
        parts_m.append(M[np.ix_(f, f)])
    return tuple(parts_k), tuple(parts_m), basis


def assemble_axisym(mesh: LatitudeMesh, material: Material, mode, order: int = 2, n_gauss: int = 4) -> WeightedPencil:
    """Weighted pencil of one azimuthal mode.

    ``A_ij = int eps (f_i' f_j' cos(phi) + m^2 f_i f_j / cos(phi)) dphi`` and
    ``B_ij = int eps f_i f_j cos(phi) dphi``; pole values are pinned to zero
    for ``m >= 1``.
    """
    mode = as_mode(mode)
    parts_k, parts_m, basis = axisym_parts(mesh, mode, order, n_gauss)
    return WeightedPencil.from_parts(parts_k, parts_m, material, basis=basis, mode=mode)
