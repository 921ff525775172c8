import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conetrap import (
    AzimuthalMode,
    CutoffProfile,
    Material,
    eval_cutoff,
    make_cap_geometry,
    make_material,
)
from conetrap.errors import AlphaOutOfRange, NegativeDissipation, SignViolation
from conetrap.model import MINUS, PLUS


def test_cap_interface_latitude():
    assert make_cap_geometry(2 * math.pi / 3).phi_interface == pytest.approx(math.pi / 6, abs=1e-15)
    assert make_cap_geometry(math.pi / 2).phi_interface == 0.0


@pytest.mark.parametrize("alpha", [0.0, math.pi, -0.1, 4.0, float("nan")])
def test_cap_alpha_out_of_range(alpha):
    with pytest.raises(AlphaOutOfRange):
        make_cap_geometry(alpha)


def test_region_sides():
    north = make_cap_geometry(2 * math.pi / 3)
    south = make_cap_geometry(2 * math.pi / 3, minus_side="south")
    assert north.region_of(1.0) == MINUS and north.region_of(-1.0) == PLUS
    assert south.region_of(1.0) == PLUS and south.region_of(-1.0) == MINUS


def test_material_contrast():
    assert make_material(1, -1.9).kappa == pytest.approx(-1.9)
    assert make_material(2, -3.8).kappa == pytest.approx(-1.9)


@pytest.mark.parametrize("eps_plus, eps_minus", [(1, 0.5), (0, -1), (-1, -1), (1, 0)])
def test_material_sign_violation(eps_plus, eps_minus):
    with pytest.raises(SignViolation):
        make_material(eps_plus, eps_minus)


def test_material_negative_dissipation():
    with pytest.raises(NegativeDissipation):
        make_material(1, -1, delta=-1e-3)
    with pytest.raises(NegativeDissipation):
        make_material(1, -1).with_delta(-1.0)


def test_material_complex_permittivity():
    m = make_material(1, -1.9, delta=0.1)
    assert m.eps(MINUS) == complex(-1.9, 0.1)
    assert m.eps(PLUS) == complex(1.0, 0.0)
    assert make_material(1, -1.9, delta=0.1, lossy="all").eps(PLUS) == complex(1.0, 0.1)


def test_validation_override_skips_sign_check():
    m = Material.validation_override(1.0, 2.0)
    assert m.kappa == 2.0 and m.override


@given(st.floats(0.01, 100), st.floats(0.01, 10), st.floats(-10, -0.01))
def test_contrast_scale_invariant(t, ep, em):
    assert make_material(t * ep, t * em).kappa == pytest.approx(make_material(ep, em).kappa, rel=1e-12)


def test_azimuthal_mode():
    assert AzimuthalMode(0).measure == pytest.approx(2 * math.pi)
    assert AzimuthalMode(3).measure == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        AzimuthalMode(-1)


@pytest.mark.parametrize("family", ["polynomial", "bump"])
def test_cutoff_plateau_and_support(family):
    prof = CutoffProfile(family=family)
    assert eval_cutoff(prof, 0.0) == (1.0, 0.0, 0.0)
    assert eval_cutoff(prof, 2 * prof.rho) == (0.0, 0.0, 0.0)
    r = np.linspace(0, 2, 401)
    chi, _, _ = eval_cutoff(prof, r)
    assert np.all((chi >= 0) & (chi <= 1))


def test_cutoff_rejects_bad_profiles():
    with pytest.raises(ValueError):
        CutoffProfile(r_one=1.0, rho=0.5)
    with pytest.raises(ValueError):
        CutoffProfile(family="gaussian")
    with pytest.raises(ValueError):
        eval_cutoff(CutoffProfile(), -1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(1.05, 4.0), st.sampled_from(["polynomial", "bump"]))
def test_cutoff_chi_chiprime_integral(r_one, ratio, family):
    # d(chi^2 / 2) integrates to -1/2 whatever the profile
    prof = CutoffProfile(r_one, r_one * ratio, family)
    g, w = np.polynomial.legendre.leggauss(64)
    a, b = prof.r_one, prof.rho
    r = 0.5 * (a + b) + 0.5 * (b - a) * g
    chi, d1, _ = eval_cutoff(prof, r)
    assert abs(0.5 * (b - a) * np.sum(w * chi * d1) + 0.5) <= 1e-8


def test_cutoff_chi_chiprime_integral_adaptive():
    prof = CutoffProfile()
    val, _ = quad(lambda r: np.prod(eval_cutoff(prof, r)[:2]), prof.r_one, prof.rho, epsabs=1e-13)
    assert val == pytest.approx(-0.5, abs=1e-10)


@pytest.mark.parametrize("family", ["polynomial", "bump"])
def test_cutoff_derivatives_match_differences(family):
    prof = CutoffProfile(family=family)
    r = np.linspace(0.52, 0.98, 9)
    h = 1e-5
    chi_p, _, _ = eval_cutoff(prof, r + h)
    chi_m, _, _ = eval_cutoff(prof, r - h)
    _, d1_p, _ = eval_cutoff(prof, r + h)
    _, d1_m, _ = eval_cutoff(prof, r - h)
    _, d1, d2 = eval_cutoff(prof, r)
    assert np.allclose((chi_p - chi_m) / (2 * h), d1, atol=1e-6)
    assert np.allclose((d1_p - d1_m) / (2 * h), d2, atol=1e-4)


@pytest.mark.parametrize("family", ["polynomial", "bump"])
@pytest.mark.parametrize("edge", [0.5, 1.0])
def test_cutoff_c2_across_breakpoints(family, edge):
    # one-sided values of chi, chi', chi'' close in at least linearly in h
    prof = CutoffProfile(family=family)
    gaps = []
    for h in (1e-3, 1e-4, 1e-5):
        left = eval_cutoff(prof, edge - h)
        right = eval_cutoff(prof, edge + h)
        gaps.append([abs(l - r) for l, r in zip(left, right)])
    gaps = np.array(gaps)
    assert np.all(gaps[2] <= 1e3 * 1e-5)
    assert np.all(gaps[2] <= 0.2 * gaps[0] + 1e-14)
