import math

import numpy as np
import pytest

from conetrap import make_cap_geometry
from conetrap.discretization.sphere import SphereBasis, _direction_to_angles, build_sphere_mesh
from conetrap.validation import (
    azimuthal_content,
    compare_axisym_sphere,
    dominant_azimuthal_index,
    harmonic_axisym,
    harmonic_sphere,
    run_validation,
    sphere_harmonic_targets,
)

from oracles import laplace_beltrami_spectrum


def test_axisym_p1_second_order():
    conv = harmonic_axisym(32, order=1)
    orders = conv.orders[1:]  # the zero eigenvalue is exact
    assert np.all(orders >= 1.8)
    assert conv.errors[1][0] <= 1e-10


def test_axisym_p2_more_accurate_than_p1():
    p1 = harmonic_axisym(16, order=1)
    p2 = harmonic_axisym(16, order=2)
    assert np.all(p2.errors[1][1:] < p1.errors[1][1:])


def test_sphere_targets_match_oracle():
    assert np.array_equal(sphere_harmonic_targets(3), laplace_beltrami_spectrum(3))


def test_sphere_harmonics_refinement():
    _, e3 = harmonic_sphere(3)
    _, e4 = harmonic_sphere(4)
    assert np.max(e4) <= 2e-2
    assert np.all(e4[1:] < e3[1:])


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_azimuthal_content_identifies_index(m):
    mesh = build_sphere_mesh(make_cap_geometry(2 * math.pi / 3), 3)
    basis = SphereBasis(mesh)
    theta, phi = np.array([_direction_to_angles(v) for v in mesh.vertices]).T
    x = np.cos(m * theta + 0.3) * np.cos(phi) ** m
    assert dominant_azimuthal_index(basis, x) == m
    content = azimuthal_content(basis, x)
    assert content[m] >= 0.9 * content.sum()


def test_oracle_comparison_single_case():
    cmp = compare_axisym_sphere(2 * math.pi / 3, -1.9, refinement=3, n_elements=128)
    assert cmp.forward and cmp.backward
    assert cmp.passed
    assert cmp.max_error <= 5e-2


def test_oracle_comparison_positive_contrast():
    cmp = compare_axisym_sphere(math.pi / 3, 2.0, refinement=3, n_elements=128)
    assert cmp.passed


def test_run_validation_small():
    checks = run_validation(refinement=3, sphere_tol=5e-2, oracle_alphas_deg=(90.0,), oracle_kappas=(-0.5,), oracle_n_elements=64)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]
    names = [c.name for c in checks]
    assert "oracle_alpha90_kappa-0.5" in names
    assert any(n.startswith("sphere_p1_r2_r3") for n in names)
