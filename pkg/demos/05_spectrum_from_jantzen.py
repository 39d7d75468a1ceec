"""The hydrogen spectrum from positivity of invariant Hermitian forms.

The intertwiner from singular to regular solutions acts on the l-th
K-type by A_l(lam) = prod_{n<=l} (lam n^2 + gamma^2). Where a Jantzen
quotient carries a definite form and is finite-dimensional we find an
eigenvalue, with degeneracy n^2.
"""

# %%
from fractions import Fraction

from hydrosym.family import build_intertwiner, jantzen, recover_spectrum

A = build_intertwiner(1, 4)
for ell in range(4):
    print(f"A_{ell} =", A[ell])

# %% layers at lam = -1/9
for layer in jantzen(1, Fraction(-1, 9), 8).layers:
    print(layer)

# %%
rep = recover_spectrum(1, 4)
print("eigenvalues:", [str(x) for x in rep.discrete])
print("dimensions:", rep.dimensions)
print(rep.to_json())
