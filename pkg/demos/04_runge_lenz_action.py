"""How the lowering Runge-Lenz operator moves between K-types.

R_- = -i R1 - R2 sends F_l Y_ll into the l-1 and l+1 isotypes. The
couplings are measured by sphere quadrature and a radial fit, then
compared with the closed-form action.
"""

# %%
from hydrosym.angular import ProductEigenfunction, apply_runge_lenz, coupling_fit, predicted_lowering_couplings

psi = ProductEigenfunction.regular(1, 1, 0.5, 1)
profiles = apply_runge_lenz("R-", psi, [0.8, 1.6])
print("isotypes reached from l=1:", sorted(profiles))

# %%
for ell in (1, 2, 3):
    for lam in (0, 1, -0.5):
        fit = coupling_fit("regular", ell, lam, 1)
        down, up = predicted_lowering_couplings(ell, lam, 1.0)
        print(f"l={ell} lam={lam:>4}: up {fit.up.real:+.10f} (closed form {up.real:+.10f})"
              f"  down {fit.down.real:.10f} (closed form {down:.10f})")
