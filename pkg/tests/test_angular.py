import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import sph_harm_y

from hydrosym.angular import (
    GridTooCoarseError,
    ProductEigenfunction,
    SphericalHarmonic,
    apply_runge_lenz,
    coupling_fit,
    predicted_lowering_couplings,
    sphere_quadrature,
    spherical_harmonic,
    twisted_equivariance_defect,
    wronskian_form,
)

LM = [(ell, m) for ell in range(5) for m in range(-ell, ell + 1)]


@pytest.mark.parametrize("ell,m", LM)
def test_harmonic_matches_scipy(ell, m):
    rng = np.random.default_rng(ell * 10 + m + 20)
    th = rng.uniform(0, np.pi, 12)
    ph = rng.uniform(0, 2 * np.pi, 12)
    assert np.allclose(spherical_harmonic(ell, m)(th, ph), sph_harm_y(ell, m, th, ph), atol=1e-13)


def test_harmonic_rejects_bad_indices():
    with pytest.raises(ValueError):
        SphericalHarmonic(1, 2)
    with pytest.raises(ValueError):
        SphericalHarmonic(-1, 0)


def test_gram_matrix_is_identity():
    q = sphere_quadrature(4)
    Y = np.array([SphericalHarmonic(l, m).on_points(q.points) for l, m in LM])
    G = (np.conj(Y) * q.weights) @ Y.T
    assert np.allclose(G, np.eye(len(LM)), atol=1e-13)


def test_quadrature_total_area():
    q = sphere_quadrature(3)
    assert q.integrate(np.ones(len(q.weights))) == pytest.approx(4 * np.pi, rel=1e-14)
    assert np.allclose(np.linalg.norm(q.points, axis=1), 1.0)


@given(st.integers(0, 6), st.integers(0, 6))
def test_quadrature_exact_on_monomials(a, b):
    # int z^a x^b over S^2 in closed form via the beta function
    q = sphere_quadrature(max(a + b, 1))
    vals = q.points[:, 2] ** a * q.points[:, 0] ** b
    if a % 2 or b % 2:
        exact = 0.0
    else:
        c = (a + 1) / 2, (b + 1) / 2, 0.5
        exact = 2 * math.prod(math.gamma(x) for x in c) / math.gamma(sum(c))
    assert q.integrate(vals).real == pytest.approx(exact, abs=1e-13)


@pytest.mark.parametrize("ell", [0, 1, 2, 3])
@pytest.mark.parametrize("op", ["R1", "R2", "R3", "R-"])
def test_runge_lenz_selection_rule(op, ell):
    psi = ProductEigenfunction.regular(ell, min(ell, 1), 0.4, 1)
    prof = apply_runge_lenz(op, psi, [0.8, 1.7])
    assert set(prof) <= {ell - 1, ell + 1}
    assert ell + 1 in prof


def test_r3_on_s_wave_has_no_s_component():
    psi = ProductEigenfunction.regular(0, 0, 0.5, 1)
    prof = apply_runge_lenz("R3", psi, [1.0])
    assert list(prof) == [1]
    assert abs(prof[1][0][0]) > 1e-3
    assert abs(prof[1][1][0]) < 1e-13 and abs(prof[1][-1][0]) < 1e-13


def test_projection_too_coarse_is_reported():
    psi = ProductEigenfunction.regular(2, 0, 0.3, 1)
    with pytest.raises(GridTooCoarseError, match="finer sphere grid"):
        apply_runge_lenz("R3", psi, [1.0], tol=1e-30)


@pytest.mark.parametrize("ell,m,lam", [(0, 0, -1.0), (1, 1, 0.5), (2, -1, 2 + 1j), (3, 2, -0.25)])
@pytest.mark.parametrize("family", ["regular", "singular"])
def test_product_is_eigenfunction(family, ell, m, lam):
    psi = getattr(ProductEigenfunction, family)(ell, m, lam, 1)
    assert psi.eigen_residual([0.5, 1.5, 3.0]) < 1e-9


@pytest.mark.parametrize("ell", [1, 2, 3])
@pytest.mark.parametrize("lam", [0, 1, -0.5, 2 + 1j])
@pytest.mark.parametrize("gamma", [1, 0.5])
def test_lowering_couplings_match_closed_form(ell, lam, gamma):
    fit = coupling_fit("regular", ell, lam, gamma)
    down, up = predicted_lowering_couplings(ell, lam, gamma)
    assert fit.down == pytest.approx(down, rel=1e-8)
    assert fit.up == pytest.approx(up, rel=1e-8)


def test_coupling_values_at_zero():
    down, up = predicted_lowering_couplings(1, 0, 1)
    assert down == pytest.approx(math.sqrt(6))
    assert up == pytest.approx(-math.sqrt(2) / (10 * math.sqrt(15)))
    fit = coupling_fit("regular", 1, 0, 1)
    assert fit.up.real == pytest.approx(-0.036514837167011, rel=1e-9)


def test_singular_s_wave_up_coupling_is_lambda_independent():
    ups = [coupling_fit("singular", 0, lam, 1).up for lam in (0.3, 1.3, 2 + 0.5j)]
    assert np.allclose(ups, -math.sqrt(2 / 3), rtol=1e-8)


def test_coupling_fit_rejects_reducibility_point():
    with pytest.raises(ValueError, match="reducibility"):
        coupling_fit("regular", 2, -0.25, 1)
    with pytest.raises(ValueError, match="family"):
        coupling_fit("other", 1, 0.0, 1)


@pytest.mark.parametrize("X", ["R1", "R2", "R3", "L1", "L3"])
@pytest.mark.parametrize("ell,lam", [(0, 0.5), (1, -0.3), (2, 2 + 1j)])
def test_twisted_equivariance(X, ell, lam):
    m = min(ell, 1)
    phi = ProductEigenfunction.singular(ell, m, lam, 1)
    target = ell + 1 if X.startswith("R") else ell
    psi = ProductEigenfunction.regular(target, -m, lam, 1)
    worst, first = twisted_equivariance_defect(X, phi, psi)
    assert worst < 1e-8 * max(1.0, abs(first))


def test_wronskian_form_is_antisymmetric():
    phi = ProductEigenfunction.singular(1, 1, 0.7, 1)
    psi = ProductEigenfunction.regular(1, -1, 0.7, 1)
    a = wronskian_form(phi, psi, 1.1)
    b = wronskian_form(psi, phi, 1.1)
    assert abs(a) > 1e-3
    assert a == pytest.approx(-b, rel=1e-12)


def test_wronskian_form_is_radius_independent():
    phi = ProductEigenfunction.singular(2, 0, 0.3 + 0.2j, 1)
    psi = ProductEigenfunction.regular(2, 0, 0.3 + 0.2j, 1)
    vals = [wronskian_form(phi, psi, r) for r in (0.4, 1.0, 2.2)]
    assert np.allclose(vals, vals[0], rtol=1e-9)


def test_mismatched_gamma_is_rejected():
    from hydrosym.radial import regular_solution

    with pytest.raises(ValueError, match="disagree"):
        ProductEigenfunction(regular_solution(0, 0.5, 1.0), 0, gamma_exact=2)


def test_points_must_share_a_sphere():
    psi = ProductEigenfunction.regular(1, 0, 0.5, 1)
    with pytest.raises(ValueError, match="single sphere"):
        psi(np.array([[1.0, 0, 0], [0, 2.0, 0]]))
