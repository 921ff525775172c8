import math
from dataclasses import replace

import numpy as np
import pytest

from conetrap import CutoffProfile, analyze, make_cap_geometry, make_material
from conetrap.errors import EndpointDegeneracy, MultiplicityWarning, PointOutsideChart, QuadratureNotConverged, TauOutsidePlateau
from conetrap.flux import (
    angular_moment,
    coefficient_denominator,
    eval_singular_function,
    flux_report,
    surface_flux,
    volume_flux_integral,
)

from conftest import BENCH_ALPHA


@pytest.fixture(scope="module")
def mode1_pair():
    with pytest.warns(MultiplicityWarning):
        an = analyze(make_cap_geometry(BENCH_ALPHA), make_material(1, -1.1), modes=[1], n_elements=96)
    (pair,) = [p for p in an.pairs if p.eta < 1.0]
    return pair


def _fd_gradient(exponent, cutoff, point, h=1e-5):
    r, t, p = point

    def f(rr, tt, pp):
        return eval_singular_function(exponent, cutoff, (rr, tt, pp)).value

    dr = (f(r + h, t, p) - f(r - h, t, p)) / (2 * h)
    dt = (f(r, t + h, p) - f(r, t - h, p)) / (2 * h)
    dp = (f(r, t, p + h) - f(r, t, p - h)) / (2 * h)
    return np.array([dr, dt / (r * math.cos(p)), dp / r])


@pytest.mark.parametrize("which", ["coarse_pair", "mode1_pair"])
def test_gradient_matches_finite_differences(which, request):
    exponent = request.getfixturevalue(which)
    cutoff = CutoffProfile()
    rng = np.random.default_rng(2024)
    for _ in range(10):
        point = (rng.uniform(0.1, 0.95), rng.uniform(0, 2 * math.pi), rng.uniform(-1.4, 1.4))
        grad = eval_singular_function(exponent, cutoff, point).gradient
        fd = _fd_gradient(exponent, cutoff, point)
        assert np.linalg.norm(grad - fd) <= 1e-5 * max(1.0, np.linalg.norm(grad))


def test_value_modulus_and_support(coarse_pair):
    cutoff = CutoffProfile()
    point = (0.2, 0.3, 0.4)
    s = eval_singular_function(coarse_pair, cutoff, point)
    angular = eval_singular_function(coarse_pair, cutoff, (1e-3, 0.3, 0.4)).value * 1e-3**0.5
    assert abs(s.value) == pytest.approx(0.2**-0.5 * abs(angular), rel=1e-12)
    far = eval_singular_function(coarse_pair, cutoff, (2 * cutoff.rho, 0.3, 0.4))
    assert far.value == 0 and np.all(far.gradient == 0)


def test_ingoing_is_conjugate_in_plateau(coarse_pair):
    cutoff = CutoffProfile()
    plus = eval_singular_function(coarse_pair, cutoff, (0.3, 1.0, 0.2), sign="+")
    minus = eval_singular_function(coarse_pair, cutoff, (0.3, 1.0, 0.2), sign="-")
    assert minus.value == pytest.approx(np.conj(plus.value), rel=1e-14)


@pytest.mark.parametrize("point", [(0.3, 0.0, math.pi / 2), (0.3, 0.0, -2.0), (0.0, 0.0, 0.0), (0.3, float("nan"), 0.0)])
def test_point_outside_chart(coarse_pair, point):
    with pytest.raises(PointOutsideChart):
        eval_singular_function(coarse_pair, CutoffProfile(), point)


def test_surface_flux_identity(bench_pair):
    expected = -(0.5 + 1j * bench_pair.signed_eta) * bench_pair.D
    for tau in (0.05, 0.25, 0.5):
        assert surface_flux(bench_pair, tau) == pytest.approx(expected, rel=1e-10)


def test_surface_flux_ingoing_conjugate(bench_pair):
    out = surface_flux(bench_pair, 0.3)
    assert surface_flux(bench_pair, 0.3, sign="-") == pytest.approx(np.conj(out), rel=1e-12)


@pytest.mark.parametrize("tau", [0.0, -0.1, 0.6])
def test_tau_outside_plateau(bench_pair, tau):
    with pytest.raises(TauOutsidePlateau):
        surface_flux(bench_pair, tau)


def test_angular_moment_is_D(bench_pair):
    assert angular_moment(bench_pair) == pytest.approx(bench_pair.D, rel=1e-10)


@pytest.mark.parametrize(
    "cutoff",
    [CutoffProfile(), CutoffProfile(family="bump"), CutoffProfile(0.2, 0.9), CutoffProfile(0.1, 0.15, "bump")],
)
def test_volume_imaginary_part_is_eta_D(bench_pair, cutoff):
    vol = volume_flux_integral(bench_pair, cutoff)
    assert vol.imag == pytest.approx(bench_pair.signed_eta * bench_pair.D, rel=1e-9)


def test_volume_ingoing_has_opposite_imaginary_part(bench_pair):
    plus = volume_flux_integral(bench_pair, sign="+")
    minus = volume_flux_integral(bench_pair, sign="-")
    assert minus.imag == pytest.approx(-plus.imag, rel=1e-10)


def test_denominator_is_conjugate(bench_pair):
    assert coefficient_denominator(bench_pair) == pytest.approx(np.conj(volume_flux_integral(bench_pair)), rel=1e-14)


def test_denominator_degenerate(bench_pair):
    with pytest.raises(EndpointDegeneracy):
        coefficient_denominator(replace(bench_pair, D=1e-14))


def test_quadrature_not_converged(bench_pair):
    with pytest.raises(QuadratureNotConverged):
        volume_flux_integral(bench_pair, max_order=24)


def test_flux_report(bench_pair):
    rep = flux_report(bench_pair, 0.25)
    assert rep.residual_identity <= 1e-10
    assert rep.eta_D > 0
    assert rep.denominator == pytest.approx(np.conj(rep.volume_integral))


def test_bad_sign(bench_pair):
    with pytest.raises(ValueError):
        surface_flux(bench_pair, 0.3, sign="x")
