"""Labeled triangulations of the unit sphere and P1 surface finite elements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from ..errors import DegenerateTriangle, MeshFileInvalid, PointOutsideChart
from ..model import CIRCULAR_CAP, GENERAL_REGION, MINUS, PLUS, Material, TipGeometry
from .pencil import WeightedPencil


@dataclass(frozen=True, eq=False)
class SphereMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    labels: np.ndarray
    interface_edges: np.ndarray
    geometry: Optional[TipGeometry] = None

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edges(self) -> np.ndarray:
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges()) + len(self.triangles)

    def areas(self) -> np.ndarray:
        v = self.vertices[self.triangles]
        return 0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)

    def region_areas(self):
        a = self.areas()
        return float(a[self.labels == MINUS].sum()), float(a[self.labels == PLUS].sum())

    @property
    def h_max(self) -> float:
        e = self.edges()
        return float(np.max(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)))


def _icosahedron():
    z = 1 / math.sqrt(5)
    r = 2 / math.sqrt(5)
    verts = [(0.0, 0.0, 1.0)]
    verts += [(r * math.cos(2 * math.pi * k / 5), r * math.sin(2 * math.pi * k / 5), z) for k in range(5)]
    verts += [(r * math.cos(2 * math.pi * (k + 0.5) / 5), r * math.sin(2 * math.pi * (k + 0.5) / 5), -z) for k in range(5)]
    verts.append((0.0, 0.0, -1.0))
    tris = []
    for k in range(5):
        u0, u1 = 1 + k, 1 + (k + 1) % 5
        l0, l1 = 6 + k, 6 + (k + 1) % 5
        tris += [(0, u0, u1), (u0, l0, u1), (u1, l0, l1), (11, l1, l0)]
    return np.array(verts), np.array(tris)


def _orient_outward(vertices, triangles):
    v = vertices[triangles]
    n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    flip = np.einsum("ij,ij->i", n, v.sum(axis=1)) < 0
    triangles = triangles.copy()
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return triangles


def icosphere(refinement: int):
    """Midpoint-subdivided icosahedron (vertices on the unit sphere)."""
    if refinement < 0:
        raise ValueError(f"refinement must be >= 0, got {refinement}")
    verts, tris = _icosahedron()
    verts = list(map(tuple, verts))
    for _ in range(refinement):
        cache = {}

        def midpoint(i, j):
            key = (i, j) if i < j else (j, i)
            if key not in cache:
                p = np.add(verts[i], verts[j])
                verts.append(tuple(p / np.linalg.norm(p)))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in tris:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        tris = new
    V = np.array(verts)
    V /= np.linalg.norm(V, axis=1)[:, None]
    T = _orient_outward(V, np.array(tris, dtype=np.int64))
    return V, T


def _latitude(v):
    return np.arcsin(np.clip(v[..., 2], -1.0, 1.0))


def _interface_edges(triangles, labels):
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    owner = np.tile(np.arange(len(triangles)), 3)
    e = np.sort(e, axis=1)
    order = np.lexsort((e[:, 1], e[:, 0]))
    e, owner = e[order], owner[order]
    same = np.all(e[1:] == e[:-1], axis=1)
    pairs = np.nonzero(same)[0]
    diff = labels[owner[pairs]] != labels[owner[pairs + 1]]
    return e[pairs[diff]]


def _snap_cap(vertices, triangles, geometry: TipGeometry):
    phi_i = geometry.phi_interface
    V = vertices.copy()
    d = _latitude(V) - phi_i
    side = np.sign(d)
    side[np.abs(d) < 1e-13] = 0
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    for i, j in e:
        if side[i] * side[j] < 0:
            k = i if abs(d[i]) <= abs(d[j]) else j
            side[k] = 0
    snapped = np.nonzero((side == 0) & (np.abs(d) > 0))[0]
    theta = np.arctan2(V[snapped, 1], V[snapped, 0])
    V[snapped] = np.column_stack(
        [np.cos(theta) * math.cos(phi_i), np.sin(theta) * math.cos(phi_i), np.full(len(snapped), math.sin(phi_i))]
    )
    tri_side = side[triangles]
    north = np.any(tri_side > 0, axis=1)
    south = np.any(tri_side < 0, axis=1)
    flat = ~north & ~south
    centroid_lat = _latitude(vertices[triangles].mean(axis=1))
    north = north | (flat & (centroid_lat > phi_i))
    minus = north if geometry.minus_side == "north" else ~north
    labels = np.where(minus, MINUS, PLUS)
    return V, labels


def build_sphere_mesh(geometry: TipGeometry, refinement: int) -> SphereMesh:
    """Icosphere whose cap boundary is resolved by mesh edges.

    For a circular cap, every edge that crosses the interface circle has
    its nearer endpoint moved onto the circle (longitude kept), so no
    triangle straddles the interface.  General regions are read from the
    geometry's mesh file and ``refinement`` is ignored.
    """
    if geometry.kind == GENERAL_REGION:
        mesh = read_sphere_mesh(geometry.mesh_ref)
        return SphereMesh(mesh.vertices, mesh.triangles, mesh.labels, mesh.interface_edges, geometry)
    if geometry.kind != CIRCULAR_CAP:
        raise ValueError(f"unknown geometry kind {geometry.kind!r}")
    V, T = icosphere(refinement)
    V, labels = _snap_cap(V, T, geometry)
    T = _orient_outward(V, T)
    return SphereMesh(V, T, labels, _interface_edges(T, labels), geometry)


def read_sphere_mesh(path) -> SphereMesh:
    """Parse a ``SPHEREMESH 1`` file (0-based indices, label 0 = minus)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MeshFileInvalid(f"cannot read mesh file {path}: {exc}") from exc
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0].split() != ["SPHEREMESH", "1"]:
        raise MeshFileInvalid(f"{path}: missing 'SPHEREMESH 1' header")
    verts, tris, labels = [], [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        tok = ln.split()
        try:
            if tok[0] == "v" and len(tok) == 4:
                verts.append([float(t) for t in tok[1:]])
            elif tok[0] == "t" and len(tok) == 5:
                tris.append([int(t) for t in tok[1:4]])
                labels.append(int(tok[4]))
            else:
                raise ValueError(ln)
        except ValueError as exc:
            raise MeshFileInvalid(f"{path}: malformed record {ln!r} (line {lineno} of content)") from exc
    if not verts or not tris:
        raise MeshFileInvalid(f"{path}: no vertices or no triangles")
    V = np.array(verts)
    T = np.array(tris, dtype=np.int64)
    L = np.array(labels)
    if np.any(np.abs(np.linalg.norm(V, axis=1) - 1) > 1e-12):
        raise MeshFileInvalid(f"{path}: vertices must be unit vectors")
    if T.min() < 0 or T.max() >= len(V):
        raise MeshFileInvalid(f"{path}: triangle index out of range")
    if not set(np.unique(L)) <= {MINUS, PLUS}:
        raise MeshFileInvalid(f"{path}: labels must be 0 or 1")
    if not (np.any(L == MINUS) and np.any(L == PLUS)):
        raise MeshFileInvalid(f"{path}: both region labels must be present")
    T = _orient_outward(V, T)
    return SphereMesh(V, T, L, _interface_edges(T, L))


def write_sphere_mesh(mesh: SphereMesh, path) -> None:
    with open(path, "w") as fh:
        fh.write("SPHEREMESH 1\n")
        for x, y, z in mesh.vertices:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for (i, j, k), lab in zip(mesh.triangles, mesh.labels):
            fh.write(f"t {i} {j} {k} {lab}\n")


def _direction_to_angles(p):
    u = p / np.linalg.norm(p, axis=-1, keepdims=True)
    return np.arctan2(u[..., 1], u[..., 0]), _latitude(u)


class SphereBasis:
    """Piecewise linear functions on a flat-triangle sphere mesh.

    Point values at a direction are taken at the intersection of the ray
    with the triangle it crosses, which makes the extension homogeneous of
    degree zero and its gradient tangential.
    """

    measure = 1.0

    def __init__(self, mesh: SphereMesh):
        self.mesh = mesh
        v = mesh.vertices[mesh.triangles]
        self._v0 = v[:, 0]
        self._normal = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        c = v.mean(axis=1)
        self._tree = cKDTree(c / np.linalg.norm(c, axis=1)[:, None])
        # rows map a point in the triangle plane to barycentric coordinates
        E = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]], axis=2)
        G = np.einsum("tki,tkj->tij", E, E)
        self._bary_map = np.einsum("tij,tkj->tik", np.linalg.inv(G), E)

    @property
    def n(self) -> int:
        return self.mesh.n_vertices

    def expand(self, x):
        return x

    def _locate(self, u):
        k = min(12, len(self.mesh.triangles))
        _, cand = self._tree.query(u, k=k)
        cand = np.atleast_2d(cand)
        found = np.full(len(u), -1)
        bary = np.zeros((len(u), 3))
        for col in range(cand.shape[1]):
            todo = np.nonzero(found < 0)[0]
            if not len(todo):
                break
            t = cand[todo, col]
            b = self._bary(u[todo], t)
            ok = np.all(b >= -1e-12, axis=1) & (np.einsum("ij,ij->i", self._normal[t], u[todo]) > 0)
            found[todo[ok]] = t[ok]
            bary[todo[ok]] = b[ok]
        for i in np.nonzero(found < 0)[0]:
            t = np.arange(len(self.mesh.triangles))
            b = self._bary(np.repeat(u[i : i + 1], len(t), axis=0), t)
            ok = np.all(b >= -1e-9, axis=1) & (self._normal @ u[i] > 0)
            j = np.nonzero(ok)[0][0]
            found[i], bary[i] = j, b[j]
        return found, bary

    def _bary(self, u, t):
        n = self._normal[t]
        s = np.einsum("ij,ij->i", n, self._v0[t]) / np.einsum("ij,ij->i", n, u)
        p = u * s[:, None]
        l12 = np.einsum("tij,tj->ti", self._bary_map[t], p - self._v0[t])
        return np.column_stack([1 - l12.sum(axis=1), l12])

    def evaluate_angular(self, x, theta, phi):
        """``Phi``, ``dPhi/dtheta`` and ``dPhi/dphi`` at ``(theta, phi)``."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        if np.any(~np.isfinite(theta)) or np.any(np.abs(phi) > math.pi / 2):
            raise PointOutsideChart("latitude must lie in [-pi/2, pi/2] and longitude be finite")
        u = np.column_stack([np.cos(theta) * np.cos(phi), np.sin(theta) * np.cos(phi), np.sin(phi)])
        t, b = self._locate(u)
        tri = self.mesh.triangles[t]
        vals = x[tri]
        value = np.sum(b * vals, axis=1)
        # gradient of the plane interpolant, then chain rule through the ray projection
        g12 = np.einsum("tij,ti->tj", self._bary_map[t], vals[:, 1:] - vals[:, :1])
        n = self._normal[t]
        nu = np.einsum("ij,ij->i", n, u)
        scale = np.einsum("ij,ij->i", n, self._v0[t]) / nu
        grad = scale[:, None] * (g12 - n * (np.einsum("ij,ij->i", g12, u) / nu)[:, None])
        e_theta = np.column_stack([-np.sin(theta), np.cos(theta), np.zeros_like(theta)])
        e_phi = np.column_stack([-np.cos(theta) * np.sin(phi), -np.sin(theta) * np.sin(phi), np.cos(phi)])
        d_theta = np.cos(phi) * np.einsum("ij,ij->i", grad, e_theta)
        d_phi = np.einsum("ij,ij->i", grad, e_phi)
        return value, d_theta, d_phi

    def angular_quadrature(self, x, n_gauss: int = 3):
        """Edge-midpoint rule on the flat triangles (exact for P1 products)."""
        v = self.mesh.vertices[self.mesh.triangles]
        mids = np.stack([(v[:, 0] + v[:, 1]) / 2, (v[:, 1] + v[:, 2]) / 2, (v[:, 2] + v[:, 0]) / 2], axis=1)
        xv = np.asarray(x)[self.mesh.triangles]
        vals = np.stack([(xv[:, 0] + xv[:, 1]) / 2, (xv[:, 1] + xv[:, 2]) / 2, (xv[:, 2] + xv[:, 0]) / 2], axis=1)
        w = np.repeat(self.mesh.areas()[:, None] / 3, 3, axis=1)
        theta, phi = _direction_to_angles(mids.reshape(-1, 3))
        regions = np.repeat(self.mesh.labels[:, None], 3, axis=1)
        return theta, phi, w.ravel(), vals.ravel(), regions.ravel()


def sphere_parts(mesh: SphereMesh):
    """Unit-weight P1 stiffness and mass per region (sparse)."""
    v = mesh.vertices[mesh.triangles]
    area = mesh.areas()
    bad = area < 1e-14
    if np.any(bad):
        raise DegenerateTriangle(f"{int(bad.sum())} triangle(s) with area < 1e-14")
    e = np.stack([v[:, 2] - v[:, 1], v[:, 0] - v[:, 2], v[:, 1] - v[:, 0]], axis=1)
    Ke = np.einsum("tik,tjk->tij", e, e) / (4 * area)[:, None, None]
    Me = (np.ones((3, 3)) + np.eye(3))[None] * (area / 12)[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1)
    cols = np.tile(mesh.triangles, (1, 3))
    n = mesh.n_vertices
    parts_k, parts_m = [], []
    for region in (MINUS, PLUS):
        sel = mesh.labels == region
        r, c = rows[sel].ravel(), cols[sel].ravel()
        parts_k.append(sparse.csr_matrix((Ke[sel].ravel(), (r, c)), shape=(n, n)))
        parts_m.append(sparse.csr_matrix((Me[sel].ravel(), (r, c)), shape=(n, n)))
    return tuple(parts_k), tuple(parts_m), SphereBasis(mesh)


def assemble_sphere(mesh: SphereMesh, material: Material) -> WeightedPencil:
    """P1 surface pencil with the permittivity constant on each triangle."""
    parts_k, parts_m, basis = sphere_parts(mesh)
    return WeightedPencil.from_parts(parts_k, parts_m, material, basis=basis, mode="sphere")
