# %% [markdown]
# # The standard map and its reference control orbit
#
# Iterate the K = 8 standard map from the first row of the bundled orbit and
# compare against the stored rows. Then look at the tangent dynamics: the bare
# map is strongly hyperbolic, while the controlled half steps turn each period
# into a pure rotation.

# %%
import numpy as np

from krcontrol import KickedRotorParams, iterate_map, lyapunov_estimate, table_one_orbit
from krcontrol.torus import stability_step_controlled, trajectory_stability

params = KickedRotorParams(8.0, 2)
orbit = table_one_orbit()
rows = orbit.full_array

traj = iterate_map(*rows[0], orbit.tau, params.K)
print("max deviation from the stored rows:", np.max(np.abs(traj - rows)))

# %%
M = trajectory_stability(rows[:-1, 0], params)
print("uncontrolled tangent map over the orbit:\n", M.array)
print("det:", M.det, " largest |eigenvalue|:", max(abs(np.linalg.eigvals(M.array))))

# %% Each controlled period is a rotation on the orbit
for scheme in ("sol_a", "sol_b"):
    x, h = orbit.points_full[0], orbit.points_half[0]
    R = stability_step_controlled(x, h, x, h, scheme, params)
    print(scheme, "\n", np.round(R.array, 15))

# %% Lyapunov exponent, close to ln(K/2) for large K
mu = lyapunov_estimate(params, n_steps=10_000, n_samples=10)
print(f"lambda = {mu:.4f}, ln(K/2) = {np.log(4):.4f}")
