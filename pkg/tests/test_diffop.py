from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hydrosym.diffop import (Coeff, DiffOp, build_generators, casimir_values, centralizer_order2_check,
                             commutator, formal_adjoint, involution_checks, levi_civita, multiply, sigma,
                             sigma_prime, theta, verify_structure_constants)
from hydrosym.exactalg import GaussRational

X1, X2, X3 = (Coeff.x(i) for i in range(3))
D1, D2, D3 = (DiffOp.partial(i) for i in range(3))
I = GaussRational(0, 1)


# --- coefficient ring ------------------------------------------------------

def test_x1_squared_is_reduced():
    assert X1 * X1 == Coeff.r(2) - X2 * X2 - X3 * X3
    assert (X1 * X1 + X2 * X2 + X3 * X3) == Coeff.r(2)


def test_units():
    assert Coeff.r(1) * Coeff.r(-1) == Coeff.const(1)


def test_derivative_of_r_power():
    # d1 r^k = k x1 r^(k-2)
    for k in (-3, -1, 1, 2):
        assert Coeff.r(k).deriv(0) == (X1 * Coeff.r(k - 2)).scale(k)


@pytest.mark.parametrize("f", [X1 * X2 * Coeff.r(-1), X1 * X1 * X3 + Coeff.r(-3), Coeff.r(2) * X2])
def test_numeric_evaluation_matches_definition(f):
    p = np.array([0.3, -1.1, 0.7])
    r = np.linalg.norm(p)
    expected = {str(X1 * X2 * Coeff.r(-1)): p[0] * p[1] / r,
                str(X1 * X1 * X3 + Coeff.r(-3)): p[0] ** 2 * p[2] + r ** -3,
                str(Coeff.r(2) * X2): r * r * p[1]}[str(f)]
    assert abs(f(*p) - expected) < 1e-14


# --- composition -----------------------------------------------------------

def test_leibniz_examples():
    assert D1 * DiffOp.mult(X1) == DiffOp.mult(X1) * D1 + DiffOp.identity()
    rinv = Coeff.r(-1)
    assert D1 * DiffOp.mult(rinv) == DiffOp.mult(rinv) * D1 - DiffOp.mult(X1 * Coeff.r(-3))
    assert DiffOp.mult(Coeff.r(1)) * DiffOp.mult(Coeff.r(-1)) == DiffOp.identity()


def test_rotation_acts_on_coordinates():
    G = build_generators(1)
    assert G["L3"].apply(X1) == -X2
    assert G["L3"].apply(X2) == X1
    assert G["L1"].apply(X3) == X2
    assert G["L1"].apply(X2) == -X3


def test_T_on_constant():
    for g in (1, Fraction(3, 2)):
        T = build_generators(g)["T"]
        assert T.apply(Coeff.const(1)) == Coeff.r(-1).scale(-2 * GaussRational.coerce(g))


def test_R3_leading_part():
    G = build_generators(1)
    target = (G["L2"] * D1 - G["L1"] * D2).scale(I)
    assert G["R3"].order == 2
    assert G["R3"].part_of_order(2) == target.part_of_order(2)


def test_nonpositive_gamma_rejected():
    for g in (0, -1, Fraction(-3, 2)):
        with pytest.raises(ValueError, match="gamma must be positive"):
            build_generators(g)


def test_pretty_is_deterministic():
    G = build_generators(1)
    text = G["L3"].pretty()
    assert text.splitlines() == ["[-x2] d1", "[x1] d2"]
    assert G["T"].pretty().splitlines()[-1] == "[-2*r^-1] 1"


# --- bracket tables --------------------------------------------------------

@pytest.mark.parametrize("gamma", [1, Fraction(3, 2)])
def test_structure_constants_exact(gamma):
    report = verify_structure_constants(gamma)
    assert len(report) == 33
    failed = [e["id"] for e in report if not e["pass"]]
    assert not failed


@pytest.mark.parametrize("gamma", [1, Fraction(3, 2)])
def test_casimirs(gamma):
    RL, second = casimir_values(gamma)
    assert RL.is_zero() and second.is_zero()


def test_casimir_detects_wrong_gamma():
    G = build_generators(Fraction(3, 2))
    L = [G[f"L{i}"] for i in (1, 2, 3)]
    R = [G[f"R{i}"] for i in (1, 2, 3)]
    T = G["T"]
    L2 = sum((x * x for x in L), DiffOp())
    R2 = sum((x * x for x in R), DiffOp())
    wrong = T * L2 - R2 - T - DiffOp.mult(Coeff.const(1))
    assert not wrong.is_zero()


@pytest.mark.parametrize("gamma", [1, Fraction(3, 2)])
def test_centralizer_and_control(gamma):
    report = centralizer_order2_check(gamma)
    assert all(e["pass"] for e in report)
    assert any("control" in e["id"] for e in report)


def test_specific_brackets():
    G = build_generators(1)
    assert commutator(G["L1"], G["L1"]).is_zero()
    assert commutator(G["L1"], G["L2"]) == -G["L3"]
    assert commutator(G["R1"], G["R2"]) == G["T"] * G["L3"]


# --- involutions -----------------------------------------------------------

@pytest.mark.parametrize("gamma", [1, Fraction(3, 2)])
def test_involution_report(gamma):
    assert all(e["pass"] for e in involution_checks(gamma))


def test_theta_is_involution_on_products():
    G = build_generators(1)
    A = G["R1"] * G["L2"]
    assert theta(theta(A)) == A


def test_sigma_antimultiplicative_and_sigma_prime_multiplicative():
    G = build_generators(1)
    A, B = G["R1"], G["L2"] + DiffOp.mult(X3)
    assert sigma(A * B) == -(sigma(B) * sigma(A))
    assert sigma_prime(A * B) == sigma_prime(A) * sigma_prime(B)
    assert sigma(sigma_prime(A)) == sigma_prime(sigma(A))


def test_theta_is_linear_over_T():
    G = build_generators(1)
    T = G["T"]
    for name in ("L1", "R2"):
        X = G[name]
        assert theta(T * X) == T * theta(X)


# --- properties ------------------------------------------------------------

monos = st.tuples(st.integers(-2, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
coeffs = st.dictionaries(monos, st.integers(-3, 3).map(GaussRational), max_size=3).map(Coeff)
multi = st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1))
ops = st.dictionaries(multi, coeffs, max_size=2).map(DiffOp)


@given(ops, ops, ops)
def test_composition_associative(A, B, C):
    assert multiply(multiply(A, B), C) == multiply(A, multiply(B, C))


@given(ops, ops, coeffs)
def test_action_is_compatible_with_composition(A, B, f):
    assert (A * B).apply(f) == A.apply(B.apply(f))


@given(coeffs, coeffs, coeffs)
def test_coeff_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@given(coeffs, coeffs)
def test_derivation_rule(a, b):
    for i in range(3):
        assert (a * b).deriv(i) == a.deriv(i) * b + a * b.deriv(i)


@given(coeffs)
def test_partials_commute(a):
    assert a.deriv(0).deriv(1) == a.deriv(1).deriv(0)
    assert a.deriv(1).deriv(2) == a.deriv(2).deriv(1)


@given(ops, ops)
def test_adjoint_antimultiplicative(A, B):
    assert formal_adjoint(A * B) == formal_adjoint(B) * formal_adjoint(A)
    assert formal_adjoint(formal_adjoint(A)) == A


@given(st.sampled_from(["L1", "L2", "L3", "R1", "R2", "R3"]),
       st.sampled_from(["L1", "L2", "L3", "R1", "R2", "R3"]),
       st.sampled_from(["L1", "L2", "L3", "R1", "R2", "R3"]))
def test_jacobi(a, b, c):
    G = build_generators(1)
    X, Y, Z = G[a], G[b], G[c]
    total = (commutator(X, commutator(Y, Z)) + commutator(Y, commutator(Z, X))
             + commutator(Z, commutator(X, Y)))
    assert total.is_zero()


def test_levi_civita():
    assert levi_civita(0, 1, 2) == 1
    assert levi_civita(1, 0, 2) == -1
    assert levi_civita(0, 0, 2) == 0
