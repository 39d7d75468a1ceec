"""Scattering for the s-wave: Kodaira solutions, a(k) and the spectral density.

U_k is fixed by outgoing Coulomb asymptotics and integrated inward.
a(k) = Wr(F, U_k) vanishes at the bound states k = i gamma / n, and
w(lam) = 2 i sqrt(lam) / |a(sqrt lam)|^2 is the continuum density.
"""

# %%
import numpy as np

from hydrosym.scattering import density_shape, fit_density, jost_a, limiting_absorption, scattering_data

for n in (1, 2, 3):
    print(f"|a(i/{n})| = {abs(jost_a(1j / n)):.2e}")

# %%
fit = fit_density([0.25, 0.5, 1, 2, 4, 9])
print("sign", fit.sign, "constant", fit.constant, "= -4 pi gamma:", np.isclose(fit.constant, -4 * np.pi))
print("max relative residual", fit.max_rel_residual)
print("shape at lam = 1:", float(density_shape(1.0)))

# %% the jump of the resolvent across the continuum is w F
la = limiting_absorption(1.0)
print("coefficient / w =", la.ratio)

# %%
print(scattering_data([0.25, 1.0, 4.0]).to_csv())
