from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hydrosym.diffop import levi_civita
from hydrosym.exactalg import PolyLambda
from hydrosym.matfam import (GENERATOR_NAMES, KillingSignature, ad_invariance_defects, inertia, killing_matrix,
                             killing_signature, mat_commutator, matrix_generators, verify_homomorphism)


def killing_oracle(lam0: float) -> np.ndarray:
    """Killing matrix from the abstract bracket table, independent of the 4x4 matrices."""
    ad = np.zeros((6, 6, 6))  # ad[a] is the matrix of ad X_a; basis L1..L3, R1..R3
    for i in range(3):
        for j in range(3):
            for k in range(3):
                e = levi_civita(i, j, k)
                ad[i][k, j] += -e          # [L_i, L_j] = -e L_k
                ad[i][3 + k, 3 + j] += -e  # [L_i, R_j] = -e R_k
                ad[3 + i][3 + k, j] += -e  # [R_i, L_j] = -e R_k
                ad[3 + i][k, 3 + j] += lam0 * e  # [R_i, R_j] = lam e L_k
    return np.array([[np.trace(ad[a] @ ad[b]) for b in range(6)] for a in range(6)])


def test_generator_entries():
    G = matrix_generators()
    one, lam = PolyLambda.const(1), PolyLambda.lam()
    assert G["L3"][0][1] == -one and G["L3"][1][0] == one
    assert G["R1"][0][3] == one and G["R1"][3][0] == lam
    for M in G.values():
        assert sum((M[i][i] for i in range(4)), PolyLambda()).is_zero()


def test_homomorphism_report():
    rep = verify_homomorphism()
    assert len(rep) == 34
    assert all(e["pass"] for e in rep)


def test_named_brackets():
    G = matrix_generators()
    neg_L3 = [[-e for e in row] for row in G["L3"]]
    assert mat_commutator(G["L1"], G["L2"]) == neg_L3
    lam = PolyLambda.lam()
    assert mat_commutator(G["R1"], G["R2"]) == [[lam * e for e in row] for row in G["L3"]]


@pytest.mark.parametrize("lam0", [Fraction(-2), Fraction(-1), Fraction(-1, 4), Fraction(0),
                                  Fraction(1, 4), Fraction(1), Fraction(2)])
def test_killing_matrix_matches_bracket_table(lam0):
    B = np.array(killing_matrix(lam0), dtype=float)
    assert np.allclose(B, killing_oracle(float(lam0)), atol=0)
    assert np.allclose(B, np.diag([-4, -4, -4] + [4 * float(lam0)] * 3))


@pytest.mark.parametrize("lam0, sig", [
    (-2, (0, 6, 0)), (-1, (0, 6, 0)), (Fraction(-1, 4), (0, 6, 0)),
    (Fraction(1, 4), (3, 3, 0)), (1, (3, 3, 0)), (2, (3, 3, 0)), (0, (0, 3, 3)),
])
def test_killing_signature(lam0, sig):
    assert killing_signature(lam0).as_tuple() == sig


@given(st.fractions(min_value=Fraction(1, 50), max_value=100, max_denominator=50))
def test_signature_constant_on_each_half_line(q):
    assert killing_signature(q).as_tuple() == (3, 3, 0)
    assert killing_signature(-q).as_tuple() == (0, 6, 0)


@pytest.mark.parametrize("lam0", [-1, 0, Fraction(1, 3)])
def test_ad_invariance(lam0):
    assert all(d == 0 for d in ad_invariance_defects(lam0))


def test_float_base_point_refused():
    with pytest.raises(TypeError):
        killing_signature(0.5)


sym = st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=4, max_size=4)


@given(sym)
def test_inertia_matches_eigenvalues(rows):
    A = np.array(rows)
    S = A + A.T
    pos, neg, zero = inertia([[Fraction(int(x)) for x in row] for row in S])
    ev = np.linalg.eigvalsh(S.astype(float))
    tol = 1e-9 * max(1.0, np.max(np.abs(ev)))
    assert (pos, neg, zero) == (int(np.sum(ev > tol)), int(np.sum(ev < -tol)), int(np.sum(abs(ev) <= tol)))


def test_signature_type_validates_sum():
    with pytest.raises(ValueError):
        KillingSignature(3, 3, 1)
    assert GENERATOR_NAMES == ("L1", "L2", "L3", "R1", "R2", "R3")
