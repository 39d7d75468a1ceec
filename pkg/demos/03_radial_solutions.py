"""Regular and singular radial solutions from Frobenius series.

F behaves like r^l at the origin and G like r^-(l+1). Both are entire in
lam; the series is compared with the closed Kummer form here.
"""

# %%
import numpy as np

from hydrosym.radial import (kummer_closed_form, regular_solution, singular_solution,
                             wronskian_spread)

r = np.array([0.1, 1.0, 5.0])
for lam in (-1.0, 1.0, 2 + 1j):
    F = regular_solution(2, lam, 1.0)
    series = F.value(r)
    closed = np.array([kummer_closed_form(2, lam, 1.0, x) for x in r])
    print(f"lam={lam}: max relative difference {np.max(np.abs(series - closed) / np.abs(closed)):.1e}")

# %% the hydrogen ground state
r = np.linspace(0.05, 8, 5)
print(np.max(np.abs(regular_solution(0, -1.0, 1.0).value(r) - np.exp(-r))))

# %% the modified Wronskian r^2 (F' G - F G') equals 2l + 1
for ell in range(4):
    mean, spread = wronskian_spread(regular_solution(ell, 0.3, 1.0), singular_solution(ell, 0.3, 1.0),
                                    (0.5, 1.0, 2.0))
    print(ell, mean, spread)
