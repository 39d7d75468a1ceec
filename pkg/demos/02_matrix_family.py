"""A 4x4 matrix model of the symmetry algebra over polynomials in T.

Specializing T to a number lam gives a real Lie algebra whose Killing
form changes signature with the sign of lam: compact for lam < 0,
Lorentzian for lam > 0 and degenerate at lam = 0.
"""

# %%
from fractions import Fraction

from hydrosym.matfam import killing_matrix, killing_signature, verify_homomorphism

checks = verify_homomorphism()
print(sum(c["pass"] for c in checks), "of", len(checks), "homomorphism checks hold")

# %%
for lam0 in (Fraction(-1), Fraction(-1, 4), Fraction(0), Fraction(1, 4), Fraction(2)):
    print(f"lam = {str(lam0):>5}  (n_pos, n_neg, n_zero) =", killing_signature(lam0).as_tuple())

# %% the Killing matrix itself at lam = 1 in the basis L1..L3, R1..R3
for row in killing_matrix(Fraction(1)):
    print([str(x) for x in row])
