"""Singular exponents of the electrostatic problem at conical tips.

Between a positive dielectric and a negative material, the weighted
Laplace-Beltrami pencil on the unit sphere can have exponents
``lambda = -1/2 + i eta`` ("black-hole" pairs).  This package discretizes
the pencil, finds and orients those pairs, follows them under dissipation,
and evaluates the energy-flux integrals of the associated singular
functions.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .model import (  # noqa: E402
    CIRCULAR_CAP,
    GENERAL_REGION,
    MINUS,
    PLUS,
    AzimuthalMode,
    CutoffProfile,
    Material,
    TipGeometry,
    eval_cutoff,
    make_cap_geometry,
    make_material,
    make_region_geometry,
)
from .eigensolver import EigenSolution, mu_to_lambda, pencil_eigenvalues, refine_eigenpair, solve_gevp  # noqa: E402
from .singularity import (  # noqa: E402
    DeltaSweepRow,
    ExponentAnalysis,
    SingularExponent,
    analyze,
    compute_beta0,
    find_black_hole_pairs,
    perturbation_slope,
    scan_contrast,
    select_outgoing,
    sweep_delta,
)
from .flux import (  # noqa: E402
    FluxReport,
    angular_moment,
    coefficient_denominator,
    eval_singular_function,
    flux_report,
    surface_flux,
    volume_flux_integral,
)
