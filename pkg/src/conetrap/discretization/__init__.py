"""Meshes of the unit sphere and assembly of the weighted pencil."""

from .latitude import AxisymBasis, LatitudeMesh, assemble_axisym, axisym_parts, build_latitude_mesh
from .pencil import WeightedPencil
from .sphere import (
    SphereBasis,
    SphereMesh,
    assemble_sphere,
    build_sphere_mesh,
    icosphere,
    read_sphere_mesh,
    sphere_parts,
    write_sphere_mesh,
)

__all__ = [
    "AxisymBasis",
    "LatitudeMesh",
    "SphereBasis",
    "SphereMesh",
    "WeightedPencil",
    "assemble_axisym",
    "assemble_sphere",
    "axisym_parts",
    "build_latitude_mesh",
    "build_sphere_mesh",
    "icosphere",
    "read_sphere_mesh",
    "sphere_parts",
    "write_sphere_mesh",
]
