"""Symmetries of the Coulomb operator in exact arithmetic.

The operator T = -Laplacian - 2 gamma / r commutes with the angular
momenta L_i and the Runge-Lenz operators R_i. Every bracket below is
computed with Gaussian-rational coefficients, so "zero" means zero.
"""

# %%
from fractions import Fraction

from hydrosym.diffop import (build_generators, casimir_values, commutator, theta,
                             verify_structure_constants)

G = build_generators(Fraction(3, 2))
print("L3 =")
print(G["L3"].pretty())
print("order of R1:", G["R1"].order)

# %% [T, R1] vanishes identically
print("[T, R1] is zero:", commutator(G["T"], G["R1"]).is_zero())

# %% the full bracket table of T, L and R
entries = verify_structure_constants(Fraction(3, 2))
print(sum(e["pass"] for e in entries), "of", len(entries), "bracket identities hold exactly")

# %% Casimir relations
RL, second = casimir_values(Fraction(3, 2))
print("sum R_i L_i:", RL.is_zero(), "  T L^2 - R^2 - T - gamma^2:", second.is_zero())

# %% theta negates the Runge-Lenz operators and fixes the rotations
print("theta(R2) = -R2:", theta(G["R2"]) == -G["R2"], "  theta(L2) = L2:", theta(G["L2"]) == G["L2"])
