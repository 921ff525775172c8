"""Dense generalized eigenproblem ``A x = mu B x`` and the map ``mu -> lambda``.

The pencil is reduced to the standard matrix ``B^{-1} A`` through a
partially pivoted LU factorization of ``B``; its eigenvalues are found by
LAPACK's balanced Hessenberg QR iteration (``*geev``), and eigenpairs whose
residual on the original pencil is too large are polished by inverse
iteration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .discretization.pencil import WeightedPencil
from .errors import MassMatrixSingular, NoConvergence

DEFAULT_TOL = 1e-10
DEFAULT_COND_MAX = 1e12


def mu_to_lambda(mu: complex) -> Tuple[complex, complex]:
    """Both roots of ``lambda (lambda + 1) = mu`` (principal square root).

    >>> mu_to_lambda(0)
    ((-1+0j), 0j)
    """
    s = np.sqrt(0.25 + complex(mu))
    lam_minus = -0.5 - s
    return complex(lam_minus), complex(-1.0 - lam_minus)


@dataclass(frozen=True, eq=False)
class EigenSolution:
    mu: complex
    lambda_minus: complex
    lambda_plus: complex
    vector: Optional[np.ndarray]
    residual: float

    @classmethod
    def build(cls, mu, vector, residual):
        lm, lp = mu_to_lambda(mu)
        return cls(complex(mu), lm, lp, vector, float(residual))


def _matrices(pencil):
    if isinstance(pencil, WeightedPencil):
        return pencil.A, pencil.B
    A, B = pencil
    return np.asarray(A), np.asarray(B)


def _norm(M) -> float:
    return float(np.linalg.norm(M, 1))


def _factor_mass(B, cond_max):
    with warnings.catch_warnings():
        # a singular B is reported below as MassMatrixSingular
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(B, check_finite=True)
    if np.any(np.diag(lu) == 0):
        raise MassMatrixSingular("mass matrix has an exact zero pivot")
    gecon = lapack.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, _norm(B), norm="1")
    if info != 0 or rcond == 0 or 1.0 / rcond > cond_max:
        cond = np.inf if rcond == 0 else 1.0 / rcond
        raise MassMatrixSingular(f"mass matrix condition estimate {cond:.3e} exceeds {cond_max:.1e}")
    return lu, piv


def residuals(A, B, mus, V) -> np.ndarray:
    """Scaled residuals ``|A v - mu B v| / ((|A| + |mu| |B|) |v|)`` (1-norms)."""
    V = np.atleast_2d(V.T).T
    mus = np.atleast_1d(mus)
    R = A @ V - (B @ V) * mus[None, :]
    scale = (_norm(A) + np.abs(mus) * _norm(B)) * np.linalg.norm(V, 1, axis=0)
    return np.linalg.norm(R, 1, axis=0) / scale


def _canonical_order(mus):
    return np.lexsort((mus.imag, mus.real))


def pencil_eigenvalues(pencil, cond_max: float = DEFAULT_COND_MAX) -> np.ndarray:
    """All generalized eigenvalues, sorted by ``(Re mu, Im mu)``; no vectors."""
    A, B = _matrices(pencil)
    lu = _factor_mass(B, cond_max)
    C = sla.lu_solve(lu, A)
    try:
        mus = sla.eigvals(C, check_finite=False).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"QR iteration failed: {exc}") from exc
    return mus[_canonical_order(mus)]


def _inverse_iteration(A, B, mu, x0, tol, maxiter):
    n = A.shape[0]
    shift = mu + 1e-12 * max(1.0, abs(mu))
    lu = sla.lu_factor(A - shift * B, check_finite=False)
    x = x0 / np.linalg.norm(x0)
    res = np.inf
    for _ in range(maxiter):
        y = sla.lu_solve(lu, B @ x)
        x = y / np.linalg.norm(y)
        bx = x @ (B @ x)
        ax = x @ (A @ x)
        if abs(bx) > 1e-8 * _norm(B):
            mu_new = ax / bx
        else:
            mu_new = (np.conj(x) @ (A @ x)) / (np.conj(x) @ (B @ x))
        res = residuals(A, B, np.array([mu_new]), x[:, None])[0]
        mu = mu_new
        if res <= tol:
            break
    return complex(mu), x, float(res)


def refine_eigenpair(pencil, mu0: complex, tol: float = DEFAULT_TOL, maxiter: int = 10, x0=None) -> EigenSolution:
    """Eigenpair near ``mu0`` by shifted inverse iteration on the pencil."""
    A, B = _matrices(pencil)
    if x0 is None:
        x0 = np.random.default_rng(0).standard_normal(A.shape[0]) + 0j
    mu, x, res = _inverse_iteration(A, B, complex(mu0), np.asarray(x0, dtype=complex), tol, maxiter)
    if res > tol:
        raise NoConvergence(f"inverse iteration near mu={mu0} stalled at residual {res:.2e}")
    return EigenSolution.build(mu, x, res)


def solve_gevp(pencil, tol: float = DEFAULT_TOL, cond_max: float = DEFAULT_COND_MAX, maxiter: int = 5) -> List[EigenSolution]:
    """All ``n`` eigenpairs of the pencil, canonically ordered.

    Parameters
    ----------
    pencil : WeightedPencil or (A, B)
    tol : float
        Bound on the scaled residual of every returned pair.
    cond_max : float
        Largest accepted condition estimate of ``B``.

    Raises
    ------
    MassMatrixSingular
        If ``B`` is numerically singular.
    NoConvergence
        If the QR iteration fails or a pair cannot be refined below ``tol``.
    """
    A, B = _matrices(pencil)
    lu = _factor_mass(B, cond_max)
    C = sla.lu_solve(lu, A)
    try:
        mus, V = sla.eig(C, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"QR iteration failed: {exc}") from exc
    mus = mus.astype(complex)
    V = V.astype(complex)
    V /= np.linalg.norm(V, axis=0)[None, :]
    res = residuals(A, B, mus, V)
    for k in np.nonzero(res > tol)[0]:
        mu, x, r = _inverse_iteration(A, B, mus[k], V[:, k], tol, maxiter)
        if r > tol:
            raise NoConvergence(f"eigenpair {k} (mu={mus[k]:.6g}) residual {r:.2e} > {tol:.1e}")
        mus[k], V[:, k], res[k] = mu, x, r
    order = _canonical_order(mus)
    return [EigenSolution.build(mus[k], V[:, k], res[k]) for k in order]
