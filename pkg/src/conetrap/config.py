"""Run configuration: TOML parsing and validation.

A config document has the sections ``[geometry]``, ``[material]``,
``[cutoff]``, ``[numerics]``, ``[sweep]`` and ``[output]``; which of them are
required depends on the command.  Example::

    [geometry]
    alpha_degrees = 120

    [material]
    eps_plus = 1.0
    eps_minus = -1.9

    [sweep]
    deltas = [0.0, 0.001, 0.01, 0.05, 0.1]
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConetrapError, ConfigParseError, ConfigValidationError
from .model import CutoffProfile, Material, TipGeometry, make_cap_geometry, make_material, make_region_geometry
from .singularity import CRITICAL_TOL, TOL_D, TRACKING_TOL

COMMANDS = ("exponents", "sweep-delta", "scan-contrast", "flux-check", "validate")
FORMATS = ("csv", "json")

_REQUIRED = {
    "exponents": ("geometry", "material"),
    "sweep-delta": ("geometry", "material", "sweep"),
    "scan-contrast": ("geometry", "sweep"),
    "flux-check": ("geometry", "material"),
    "validate": (),
}

_KNOWN = {
    "geometry": {"alpha_degrees", "minus_side", "mesh"},
    "material": {"eps_plus", "eps_minus", "delta", "lossy", "override"},
    "cutoff": {"r_one", "rho", "family"},
    "numerics": {
        "n_elements",
        "refinement",
        "element_order",
        "m_max",
        "discretization",
        "critical_tol",
        "tol_D",
        "tracking_tol",
        "solver_tol",
        "bisection_width",
        "oracle_refinement",
        "harmonic_elements",
    },
    "sweep": {"deltas", "kappas", "taus"},
    "output": {"path", "format"},
}


@dataclass(frozen=True)
class GeometryConfig:
    alpha_degrees: Optional[float] = None
    minus_side: str = "north"
    mesh: Optional[str] = None


@dataclass(frozen=True)
class MaterialConfig:
    eps_plus: float = 1.0
    eps_minus: float = -1.0
    delta: float = 0.0
    lossy: str = "minus"
    override: bool = False


@dataclass(frozen=True)
class NumericsConfig:
    n_elements: int = 256
    refinement: int = 4
    element_order: int = 2
    m_max: int = 3
    discretization: str = "axisym"
    critical_tol: float = CRITICAL_TOL
    tol_D: float = TOL_D
    tracking_tol: float = TRACKING_TOL
    solver_tol: float = 1e-10
    bisection_width: float = 1e-3
    oracle_refinement: int = 3
    harmonic_elements: int = 32


@dataclass(frozen=True)
class SweepConfig:
    deltas: Tuple[float, ...] = ()
    kappas: Tuple[float, ...] = ()
    taus: Tuple[float, ...] = ()


@dataclass(frozen=True)
class OutputConfig:
    path: Optional[str] = None
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    command: str
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    material: MaterialConfig = field(default_factory=MaterialConfig)
    cutoff: CutoffProfile = field(default_factory=CutoffProfile)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sections: Tuple[str, ...] = ()

    def tip_geometry(self) -> TipGeometry:
        g = self.geometry
        if g.mesh is not None:
            return make_region_geometry(g.mesh)
        return make_cap_geometry(math.radians(g.alpha_degrees), g.minus_side)

    def make_material(self, eps_minus: Optional[float] = None) -> Material:
        m = self.material
        eps_minus = m.eps_minus if eps_minus is None else eps_minus
        if m.override:
            return Material.validation_override(m.eps_plus, eps_minus, m.delta, m.lossy)
        return make_material(m.eps_plus, eps_minus, m.delta, m.lossy)

    def echo(self) -> dict:
        """Plain-dict view of the effective configuration (for table headers)."""
        d = asdict(self)
        d.pop("sections")
        for key in ("deltas", "kappas", "taus"):
            d["sweep"][key] = list(d["sweep"][key])
        return d


def _invalid(msg):
    return ConfigValidationError(msg)


def _number(section, key, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _invalid(f"[{section}] {key}: expected a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise _invalid(f"[{section}] {key}: expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise _invalid(f"[{section}] {key}: must be finite, got {value!r}")
    return float(value)


def _floats(section, key, value):
    if not isinstance(value, list):
        raise _invalid(f"[{section}] {key}: expected a list of numbers")
    return tuple(_number(section, key, v) for v in value)


def _fill(section, cls, data, types):
    values = {}
    for key, value in data.items():
        kind = types.get(key)
        if kind in (int, float):
            values[key] = _number(section, key, value, kind)
        elif kind is bool:
            if not isinstance(value, bool):
                raise _invalid(f"[{section}] {key}: expected true or false")
            values[key] = value
        elif kind is str:
            if not isinstance(value, str):
                raise _invalid(f"[{section}] {key}: expected a string")
            values[key] = value
        else:
            values[key] = value
    return cls(**values)


def parse_config(text: str, command: Optional[str] = None) -> RunConfig:
    """Parse and validate a TOML config document.

    ``command`` overrides a top-level ``command = "..."`` key; when neither
    is given the command defaults to ``exponents``.

    Raises
    ------
    ConfigParseError
        Malformed TOML (the message carries line and column).
    ConfigValidationError
        Missing sections, unknown keys, wrong types, or contract violations
        (unsorted delta list, nonnegative kappa grid, ...).
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+), column (\d+)", str(exc))
        where = f" (line {m.group(1)}, column {m.group(2)})" if m else ""
        raise ConfigParseError(f"malformed config{where}: {exc}") from exc

    cmd = command if command is not None else doc.pop("command", "exponents")
    doc.pop("command", None)
    if cmd not in COMMANDS:
        raise _invalid(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    for name, body in doc.items():
        if name not in _KNOWN:
            raise _invalid(f"unknown section [{name}]")
        if not isinstance(body, dict):
            raise _invalid(f"[{name}] must be a table")
        extra = set(body) - _KNOWN[name]
        if extra:
            raise _invalid(f"[{name}] unknown key(s): {', '.join(sorted(extra))}")
    missing = [s for s in _REQUIRED[cmd] if s not in doc]
    if missing:
        raise _invalid(f"command {cmd!r} needs section(s): {', '.join('[' + s + ']' for s in missing)}")

    geometry = _fill("geometry", GeometryConfig, doc.get("geometry", {}), {"alpha_degrees": float, "minus_side": str, "mesh": str})
    if "geometry" in doc:
        if (geometry.alpha_degrees is None) == (geometry.mesh is None):
            raise _invalid("[geometry] needs exactly one of alpha_degrees or mesh")
        if geometry.alpha_degrees is not None and not 0 < geometry.alpha_degrees < 180:
            raise _invalid(f"[geometry] alpha_degrees must lie in (0, 180), got {geometry.alpha_degrees}")
        if geometry.minus_side not in ("north", "south"):
            raise _invalid("[geometry] minus_side must be 'north' or 'south'")

    mat = doc.get("material", {})
    if "material" in doc and cmd != "scan-contrast":
        for key in ("eps_plus", "eps_minus"):
            if key not in mat:
                raise _invalid(f"[material] missing {key}")
    material = _fill(
        "material",
        MaterialConfig,
        mat,
        {"eps_plus": float, "eps_minus": float, "delta": float, "lossy": str, "override": bool},
    )
    if material.lossy not in ("minus", "all"):
        raise _invalid("[material] lossy must be 'minus' or 'all'")
    if material.delta < 0:
        raise _invalid(f"[material] delta must be >= 0, got {material.delta}")
    if not material.override:
        if not material.eps_plus > 0:
            raise _invalid(f"[material] eps_plus must be > 0, got {material.eps_plus}")
        if cmd != "scan-contrast" and not material.eps_minus < 0:
            raise _invalid(f"[material] eps_minus must be < 0 (set override = true for validation runs), got {material.eps_minus}")

    try:
        cutoff = _fill("cutoff", CutoffProfile, doc.get("cutoff", {}), {"r_one": float, "rho": float, "family": str})
    except ValueError as exc:
        if isinstance(exc, ConetrapError):
            raise
        raise _invalid(f"[cutoff] {exc}") from exc

    numerics = _fill(
        "numerics",
        NumericsConfig,
        doc.get("numerics", {}),
        {
            "n_elements": int,
            "refinement": int,
            "element_order": int,
            "m_max": int,
            "discretization": str,
            "critical_tol": float,
            "tol_D": float,
            "tracking_tol": float,
            "solver_tol": float,
            "bisection_width": float,
            "oracle_refinement": int,
            "harmonic_elements": int,
        },
    )
    if numerics.n_elements < 4:
        raise _invalid("[numerics] n_elements must be >= 4")
    if not 0 <= numerics.refinement <= 6 or not 0 <= numerics.oracle_refinement <= 6:
        raise _invalid("[numerics] refinement levels must lie in 0..6")
    if numerics.element_order not in (1, 2):
        raise _invalid("[numerics] element_order must be 1 or 2")
    if numerics.m_max < 0:
        raise _invalid("[numerics] m_max must be >= 0")
    if numerics.discretization not in ("axisym", "sphere"):
        raise _invalid("[numerics] discretization must be 'axisym' or 'sphere'")
    if geometry.mesh is not None and numerics.discretization != "sphere":
        raise _invalid("a [geometry] mesh file needs discretization = 'sphere'")
    for key in ("critical_tol", "tol_D", "tracking_tol", "solver_tol", "bisection_width"):
        if not getattr(numerics, key) > 0:
            raise _invalid(f"[numerics] {key} must be > 0")

    sw = doc.get("sweep", {})
    sweep = SweepConfig(
        deltas=_floats("sweep", "deltas", sw["deltas"]) if "deltas" in sw else (),
        kappas=_floats("sweep", "kappas", sw["kappas"]) if "kappas" in sw else (),
        taus=_floats("sweep", "taus", sw["taus"]) if "taus" in sw else (),
    )
    if any(d < 0 for d in sweep.deltas):
        raise _invalid("[sweep] deltas must be >= 0")
    if list(sweep.deltas) != sorted(sweep.deltas):
        raise _invalid("[sweep] deltas must be sorted ascending")
    if cmd == "sweep-delta" and not sweep.deltas:
        raise _invalid("sweep-delta needs a nonempty [sweep] deltas list")
    if cmd == "scan-contrast":
        if geometry.mesh is not None:
            raise _invalid("scan-contrast needs a circular cap (alpha_degrees)")
        if not sweep.kappas:
            raise _invalid("scan-contrast needs a nonempty [sweep] kappas list")
        if not material.override and any(k >= 0 for k in sweep.kappas):
            raise _invalid("[sweep] kappas must be negative")
        if any(b <= a for a, b in zip(sweep.kappas, sweep.kappas[1:])):
            raise _invalid("[sweep] kappas must be strictly increasing")
    if any(not 0 < t <= cutoff.r_one for t in sweep.taus):
        raise _invalid(f"[sweep] taus must lie in (0, r_one={cutoff.r_one}]")

    out = doc.get("output", {})
    output = _fill("output", OutputConfig, out, {"path": str, "format": str})
    if output.format not in FORMATS:
        raise _invalid(f"[output] format must be one of {', '.join(FORMATS)}")

    return RunConfig(cmd, geometry, material, cutoff, numerics, sweep, output, tuple(doc))
