"""Exception and warning types.

Every error carries a short machine-readable ``code`` so that the command
line driver can report failures in table headers.
"""


class ConetrapError(Exception):
    """Base class for all errors raised by conetrap."""

    code = "error"


class AlphaOutOfRange(ConetrapError, ValueError):
    code = "alpha_out_of_range"


class SignViolation(ConetrapError, ValueError):
    code = "sign_violation"


class NegativeDissipation(ConetrapError, ValueError):
    code = "negative_dissipation"


class GeometryKindMismatch(ConetrapError, TypeError):
    code = "geometry_kind_mismatch"


class MeshFileInvalid(ConetrapError, ValueError):
    code = "mesh_file_invalid"


class PoleQuadratureFailure(ConetrapError, ArithmeticError):
    code = "pole_quadrature_failure"


class DegenerateTriangle(ConetrapError, ValueError):
    code = "degenerate_triangle"


class MassMatrixSingular(ConetrapError, ArithmeticError):
    code = "mass_matrix_singular"


class NoConvergence(ConetrapError, ArithmeticError):
    code = "no_convergence"


class EndpointDegeneracy(ConetrapError, ArithmeticError):
    """The weighted norm of the eigenfunction vanishes (or nearly so)."""

    code = "endpoint_degeneracy"


class NotOutgoing(ConetrapError, ValueError):
    code = "not_outgoing"


class NoSpectralGap(ConetrapError, ArithmeticError):
    code = "no_spectral_gap"


class TrackingAmbiguity(ConetrapError, ArithmeticError):
    code = "tracking_ambiguity"


class PointOutsideChart(ConetrapError, ValueError):
    code = "point_outside_chart"


class TauOutsidePlateau(ConetrapError, ValueError):
    code = "tau_outside_plateau"


class QuadratureNotConverged(ConetrapError, ArithmeticError):
    code = "quadrature_not_converged"


class ConfigParseError(ConetrapError, ValueError):
    code = "config_parse_error"


class ConfigValidationError(ConetrapError, ValueError):
    code = "config_validation_error"


class TableIOError(ConetrapError, OSError):
    code = "io_error"


class MultiplicityWarning(UserWarning):
    """More than one distinct |eta| was detected."""


class WindowEmpty(UserWarning):
    """The weight window beta0 - sqrt(delta) is empty for this delta."""
