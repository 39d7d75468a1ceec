"""Resolvent and spectral projection on spherical functions.

The Green's function built from F and U_k inverts T - lam off the
spectrum. Integrating F_lam <F_lam, f> against the density over an
interval gives the spectral projection, checked for idempotence,
orthogonality to bound states and completeness.
"""

# %%
import numpy as np

from hydrosym.scattering import Bump, completeness, greens_apply, projection_checks

f = Bump(1.0, 2.0, 6)
r = np.linspace(0.5, 3.0, 6)
print(greens_apply(1 + 1j, f, r_out=r))

# %% bound states plus continuum recover ||f||^2
out = completeness()
print("bound-state contributions", np.round(out["bound"], 6))
print("recovered fraction", out["ratio"])

# %% idempotence needs a long radial grid; this takes about a minute
pc = projection_checks()
print("idempotence defect", pc["idempotence"], "orthogonality", pc["orthogonality"])
