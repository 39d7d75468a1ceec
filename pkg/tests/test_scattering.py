import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hydrosym.scattering import (
    Bump,
    Resolvent,
    ScatteringError,
    asymptotic_coefficients,
    bound_state_norm,
    bound_state_profile,
    completeness,
    density_shape,
    fit_density,
    greens_apply,
    jost_a,
    kodaira_solution,
    limiting_absorption,
    regular_profile,
    scattering_data,
    spectral_density,
)
from hydrosym.radial import regular_solution, wronskian_spread


def U_oracle(k, gamma, r):
    """Whittaker-function form of the outgoing solution."""
    kap = 1j * gamma / k
    return complex(mp.whitw(kap, 0.5, -2j * k * r) / (r * (-2j * k) ** kap))


def F_oracle(k, gamma, r):
    return complex(mp.exp(1j * k * r) * mp.hyp1f1(1 - 1j * gamma / k, 2, -2j * k * r))


def a_oracle(k, gamma, r=1.2):
    F = lambda x: mp.exp(1j * k * x) * mp.hyp1f1(1 - 1j * gamma / k, 2, -2j * k * x)
    kap = 1j * gamma / k
    U = lambda x: mp.whitw(kap, 0.5, -2j * k * x) / (x * (-2j * k) ** kap)
    return complex(r * r * (mp.diff(F, r) * U(r) - F(r) * mp.diff(U, r)))


@pytest.mark.parametrize("k", [0.3, 1.0, 2.5, 1 + 0.5j, 0.7j])
@pytest.mark.parametrize("gamma", [1.0, 0.5])
@pytest.mark.parametrize("r", [0.2, 1.0, 4.0, 12.0])
def test_kodaira_matches_whittaker(k, gamma, r):
    U = kodaira_solution(k, gamma)
    assert U.value(r) == pytest.approx(U_oracle(k, gamma, r), rel=1e-8)


@pytest.mark.parametrize("k", [0.4, 1.3, 3.0, 1 + 0.5j])
def test_jost_matches_oracle(k):
    assert jost_a(k, 1.0) == pytest.approx(a_oracle(k, 1.0), rel=1e-8)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_outgoing_incoming_wronskian(k):
    # U_{-k} is the incoming solution; their Wronskian is fixed by the asymptotics
    U = kodaira_solution(k, 1.0)
    V = kodaira_solution(-k, 1.0)
    W = []
    for r in (0.7, 2.0, 9.0):
        W.append(r * r * (U.value(r) * V.deriv(r) - U.deriv(r) * V.value(r)))
    assert np.allclose(W, -2j * k, rtol=1e-8)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 6.0])
def test_jost_reflection_symmetry(k):
    assert jost_a(-k, 1.0) == pytest.approx(np.conj(jost_a(k, 1.0)), rel=1e-9)


@pytest.mark.parametrize("k", [0.5, 2.0])
def test_incoming_is_conjugate(k):
    r = np.linspace(0.3, 6, 9)
    assert np.allclose(kodaira_solution(-k, 1.0).value(r), np.conj(kodaira_solution(k, 1.0).value(r)), rtol=1e-9)


def test_decay_in_upper_half_plane():
    U = kodaira_solution(0.5 + 0.8j, 1.0)
    r = np.array([5.0, 10.0, 20.0])
    ratio = np.abs(U.value(r)) / np.abs(U.asymptotic_form(r))
    assert np.allclose(ratio, 1.0, atol=0.1)
    assert abs(U.value(20.0)) < 1e-7


def test_ode_residual_small():
    U = kodaira_solution(1.1, 1.0)
    assert np.max(U.ode_residual(np.linspace(0.5, 10, 15))) < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("gamma", [1.0, 1.5])
def test_bound_state_zeros(n, gamma):
    assert abs(jost_a(1j * gamma / n, gamma)) < 1e-8
    assert abs(jost_a(1j * gamma / (n + 0.5), gamma)) > 1e-3


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_asymptotic_series_terminates_at_bound_states(n):
    b = asymptotic_coefficients(1j / n, 1.0, n + 3)
    assert np.all(b[n:] == 0)
    assert np.all(b[:n] != 0)


@pytest.mark.parametrize("k", [0.6, 1.5])
def test_regular_solution_from_outgoing_pair(k):
    # F = (conj(a) U_k - a U_{-k}) / (2 i k) for real k
    a = jost_a(k, 1.0)
    r = np.linspace(0.5, 7, 8)
    U, V = kodaira_solution(k, 1.0).value(r), kodaira_solution(-k, 1.0).value(r)
    F = (np.conj(a) * U - a * V) / (2j * k)
    assert np.allclose(F, [F_oracle(k, 1.0, x) for x in r], rtol=1e-8)


@pytest.mark.parametrize("lam", [0.3, 2.0, 20.0])
def test_regular_profile_matches_oracle(lam):
    k = math.sqrt(lam)
    r = np.array([0.5, 3.0, 10.0, 50.0])
    ref = np.array([F_oracle(k, 1.0, x).real for x in r])
    assert np.allclose(regular_profile(lam, 1.0, r), ref, rtol=1e-8, atol=1e-12)


def test_density_fit_sign_and_constant():
    fit = fit_density([0.25, 0.5, 1, 2, 4, 9], 1.0)
    assert fit.sign == -1
    assert fit.constant == pytest.approx(-4 * math.pi, rel=1e-6)
    assert fit.max_rel_residual < 1e-6


@pytest.mark.parametrize("gamma", [0.5, 2.0])
def test_density_constant_scales_with_gamma(gamma):
    fit = fit_density([0.5, 1, 4], gamma)
    assert fit.constant == pytest.approx(-4 * math.pi * gamma, rel=1e-6)


def test_density_limit_at_threshold():
    # the density tends to a nonzero constant at the bottom of the continuum
    w = spectral_density(0.0025 * 1.01, 1.0)
    assert w.imag == pytest.approx(4 * math.pi, rel=1e-6)
    assert abs(w.real) < 1e-9


@given(st.floats(0.01, 30))
@settings(max_examples=20)
def test_density_positive_imaginary(lam):
    w = spectral_density(lam, 1.0)
    assert w.imag > 0
    assert abs(w.real) < 1e-12 * abs(w)


def test_density_shape_sign():
    assert density_shape(1.0, 1.0, -1) < 0 < density_shape(1.0, 1.0, 1)


@pytest.mark.parametrize("lam", [0.25, 1.0, 4.0])
def test_limiting_absorption(lam):
    la = limiting_absorption(lam, 1.0)
    assert la.regular_residual < 1e-6
    assert la.ratio == pytest.approx(1.0, abs=1e-4)
    assert np.allclose(la.v_plus, np.conj(la.v_minus), rtol=1e-6)


def test_limiting_absorption_requires_positive():
    with pytest.raises(ValueError):
        limiting_absorption(-1.0, 1.0)


def _fd(res, f, r, h=2e-3):
    g = res.as_function(f)
    pts = np.concatenate([r + j * h for j in (-2, -1, 0, 1, 2)])
    v = g(pts).reshape(5, -1)
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)
    return -d2 - 2 * d1 / r - 2 * res.gamma / r * v[2] - res.lam * v[2]


@pytest.mark.parametrize("lam", [1 + 1j, 2 + 1j, -0.5 + 0.2j])
def test_resolvent_inverts_operator(lam):
    # T = -Laplacian - 2 gamma / r with T F = lam F
    f = Bump(1, 2, 6)
    res = Resolvent(lam, 1.0)
    r = np.linspace(0.6, 2.8, 12)
    lhs = _fd(res, f, r)
    assert np.max(np.abs(lhs - f(r))) < 1e-6


def test_resolvent_consistency_with_operator_sign():
    # check T F = lam F for the regular solution with the same stencil
    lam, h = 1.3 + 0.2j, 2e-3
    F = regular_solution(0, lam, 1.0)
    r = np.array([0.7, 1.4])
    v = [F.value(r + j * h) for j in (-2, -1, 0, 1, 2)]
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)
    assert np.allclose(-d2 - 2 * d1 / r - 2 / r * v[2], lam * v[2], rtol=1e-7)


def test_resolvent_linearity():
    lam = 2 + 1j
    f, g = Bump(1, 2, 6), Bump(0.5, 2.5, 4)
    r = np.linspace(0.3, 3, 10)

    class Combo:
        # same support and breakpoints so both sides use identical panels
        support = (0.5, 2.5)
        breakpoints = (0.5, 1.0, 2.0, 2.5)
        decay = math.inf

        def __call__(self, s):
            return 2 * f(s) - 3j * g(s)

    f.breakpoints = g.breakpoints = Combo.breakpoints
    f.support = g.support = Combo.support
    lhs = greens_apply(lam, Combo(), r_out=r)
    rhs = 2 * greens_apply(lam, f, r_out=r) - 3j * greens_apply(lam, g, r_out=r)
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-14)


def test_resolvent_identity():
    # R(l1) - R(l2) = (l1 - l2) R(l1) R(l2)
    l1, l2 = 1 + 1j, 2 + 1j
    f = Bump(1, 2, 6)
    r = np.linspace(0.8, 2.5, 6)
    R1, R2 = Resolvent(l1), Resolvent(l2)
    lhs = R1.apply(f, r) - R2.apply(f, r)
    rhs = (l1 - l2) * R1.apply(R2.as_function(f), r)
    assert np.allclose(lhs, rhs, rtol=1e-7)


def test_resolvent_rejects_spectrum():
    with pytest.raises(ScatteringError, match="continuous spectrum"):
        Resolvent(2.0)
    with pytest.raises(ScatteringError, match="eigenvalue"):
        Resolvent(-1.0)


def test_k_min_enforced():
    with pytest.raises(ScatteringError, match="k_min"):
        kodaira_solution(0.01, 1.0)
    with pytest.raises(ValueError, match="Im k"):
        kodaira_solution(1 - 0.5j, 1.0)


def test_jost_is_radius_independent():
    a1 = jost_a(0.9, 1.0, radii=(0.5, 1.0))
    a2 = jost_a(0.9, 1.0, radii=(2.0, 3.0))
    assert a1 == pytest.approx(a2, rel=1e-9)


@pytest.mark.parametrize("k", [5.0, 12.0])
def test_jost_at_large_k(k):
    assert jost_a(k, 1.0) == pytest.approx(a_oracle(k, 1.0, r=4 / k), rel=1e-7)


def test_scattering_csv_columns():
    text = scattering_data([0.25, 1.0], 1.0).to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "k_re,k_im,a_re,a_im,lambda,w_re,w_im,residual"
    assert len(lines) == 3
    assert float(lines[2].split(",")[4]) == 1.0
    assert float(lines[1].split(",")[-1]) < 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("gamma", [Fraction(1), Fraction(3, 2)])
def test_bound_state_norm_exact_vs_numeric(n, gamma):
    val, _ = __import__("scipy.integrate", fromlist=["quad"]).quad(
        lambda r: bound_state_profile(n, gamma, r) ** 2 * r * r, 0, np.inf, limit=200)
    assert float(bound_state_norm(n, gamma)) == pytest.approx(val, rel=1e-9)


def test_bound_state_norm_ground():
    assert bound_state_norm(1, 1) == Fraction(1, 4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bound_state_profile_matches_series(n):
    r = np.linspace(0.05, 4, 9)
    assert np.allclose(bound_state_profile(n, 1.0, r), regular_solution(0, -1 / n**2, 1.0).value(r).real,
                       rtol=1e-10)


def test_bound_state_profile_far_out_is_finite():
    v = bound_state_profile(3, 1.0, np.array([800.0]))
    assert np.isfinite(v).all() and abs(v[0]) < 1e-100


def test_completeness_recovers_norm():
    out = completeness()
    assert out["ratio"] == pytest.approx(1.0, abs=2e-3)
    assert out["bound"][0] > out["bound"][1]


def test_wronskian_spread_of_jost_pair():
    F = regular_solution(0, 1.0, 1.0)
    U = kodaira_solution(1.0, 1.0)
    mean, spread = wronskian_spread(F, U, (0.5, 1.0, 2.0))
    assert spread < 1e-9 * abs(mean)
    assert mean == pytest.approx(jost_a(1.0, 1.0))
