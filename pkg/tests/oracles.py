"""Independent reference computations used by the tests.

None of these reuse the package's assembly or eigensolver code paths.
"""

import math

import mpmath as mp
import numpy as np
from scipy.optimize import linear_sum_assignment


def random_complex_symmetric_pencil(rng, n):
    """``(A, B)`` complex symmetric with ``B`` safely invertible."""
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = X + X.T
    B = (Y + Y.T) / 4 + n * np.eye(n)
    return A, B


def det_poly_roots(A, B, newton_steps=8):
    """Roots of ``det(A - mu B)`` by interpolation + companion matrix + Newton.

    The characteristic polynomial has degree ``n``; its coefficients come
    from values on a circle (a discrete Fourier transform), its roots from
    the companion matrix (``np.roots``), and each root is polished with
    Newton's method using ``d/dmu log det = -tr((A - mu B)^{-1} B)``.
    """
    n = A.shape[0]
    radius = max(1.0, np.linalg.norm(A, 2) / np.linalg.svd(B, compute_uv=False)[-1])
    z = radius * np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    vals = np.array([np.linalg.det(A - zk * B) for zk in z])
    c = np.fft.fft(vals) / (n + 1)  # p(radius * w) = sum c_k w^k
    coeffs = c * radius ** (-np.arange(n + 1.0))
    roots = np.roots(coeffs[::-1])
    out = []
    for mu in roots:
        for _ in range(newton_steps):
            M = A - mu * B
            try:
                g = -np.trace(np.linalg.solve(M, B))
            except np.linalg.LinAlgError:
                break
            if g == 0:
                break
            step = 1.0 / g
            mu = mu - step
            if abs(step) < 1e-15 * max(1.0, abs(mu)):
                break
        out.append(mu)
    return np.array(out)


def match_sets(a, b):
    """Largest relative distance after optimal one-to-one matching."""
    a, b = np.asarray(a), np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :]) / np.maximum(1.0, np.abs(a))[:, None]
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def _legendre_p(nu, x):
    # Legendre function of the first kind, regular at x = 1
    return mp.hyp2f1(-nu, nu + 1, 1, (1 - x) / 2)


def _legendre_dp(nu, x):
    a, b = -nu, nu + 1
    return -a * b / 2 * mp.hyp2f1(a + 1, b + 1, 2, (1 - x) / 2)


def conical_eta(alpha, kappa, guess, minus_north=True):
    """Exact axisymmetric (``m = 0``) black-hole ``eta`` of a circular cap.

    With ``nu = -1/2 + i eta`` the regular solutions on both sides of the
    interface latitude are conical (Legendre) functions in ``x = sin(phi)``;
    continuity of ``f`` and of ``eps f'`` gives a real secular equation.
    """
    mp.mp.dps = 30
    xi = mp.sin(-mp.pi / 2 + alpha)
    e_n, e_s = (kappa, 1.0) if minus_north else (1.0, kappa)

    def secular(eta):
        nu = mp.mpf(-0.5) + 1j * eta
        return mp.re(e_n * _legendre_dp(nu, xi) * _legendre_p(nu, -xi) + e_s * _legendre_dp(nu, -xi) * _legendre_p(nu, xi))

    return float(mp.findroot(secular, guess))


def conical_D(alpha, kappa, eta, minus_north=True):
    """``int eps |Phi|^2 / int |Phi|^2`` for the exact ``m = 0`` eigenfunction."""
    mp.mp.dps = 20
    nu = mp.mpf(-0.5) + 1j * mp.mpf(eta)
    xi = mp.sin(-mp.pi / 2 + alpha)
    north = lambda x: mp.re(_legendre_p(nu, x)) / mp.re(_legendre_p(nu, xi))
    south = lambda x: mp.re(_legendre_p(nu, -x)) / mp.re(_legendre_p(nu, -xi))
    In = mp.quad(lambda x: north(x) ** 2, [xi, 1])
    Is = mp.quad(lambda x: south(x) ** 2, [-1, 0, xi] if xi > 0 else [-1, xi])
    e_n, e_s = (kappa, 1.0) if minus_north else (1.0, kappa)
    return float((e_n * In + e_s * Is) / (In + Is))


def laplace_beltrami_spectrum(l_max):
    """``l (l + 1)`` with multiplicity ``2 l + 1``."""
    return np.array([l * (l + 1) for l in range(l_max + 1) for _ in range(2 * l + 1)], dtype=float)


def cap_area(alpha):
    """Area of the spherical cap of aperture ``alpha``."""
    return 2 * math.pi * (1 - math.cos(alpha))
