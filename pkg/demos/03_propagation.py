# %% [markdown]
# # Steering a wave packet along the control orbit
#
# A minimum-uncertainty Gaussian at (1/2, 0) is shifted onto the orbit,
# propagated with each control scheme and shifted onto (0, 0). The targeting
# error is Delta = 1 - |<beta|psi_final>|^2.

# %%
import numpy as np

from krcontrol import table_one_orbit
from krcontrol.quantum import expectation_qp, run_targeting

orbit = table_one_orbit()
N = 200

for scheme in ("uncontrolled", "unwind_m", "sol_a", "sol_a_improved", "sol_b", "sol_b_improved"):
    res = run_targeting(N, scheme, orbit)
    print(f"{scheme:15s} delta = {res.delta:.4e}")

# %% Centroids follow the classical points
res = run_targeting(N, "sol_a_improved", orbit)
for t, (state, point) in enumerate(zip(res.trace, orbit.full_array)):
    q, p = expectation_qp(state, point)
    print(t, np.round([q, p], 5), np.round(point, 5))
