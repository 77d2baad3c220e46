# %% [markdown]
# # Targeting error against Hilbert-space dimension
#
# Smaller hbar = 1/(pi N) keeps the packet inside the linear region around the
# orbit, so Delta falls with N. Removing the cubic term of the kick makes the
# fall much steeper.

# %%
import numpy as np

from krcontrol import table_one_orbit
from krcontrol.quantum import sweep_dimension, write_sweep_csv

Ns = [50, 100, 200, 400, 800, 1400]
rows = sweep_dimension(Ns, ["sol_a", "unwind_m", "sol_a_improved"], table_one_orbit(), workers=3)

table = {}
for r in rows:
    table.setdefault(r.scheme, []).append(r.delta)
print("N".rjust(16), *(f"{n:>10d}" for n in Ns))
for scheme, deltas in table.items():
    print(scheme.rjust(16), *(f"{d:10.3e}" for d in deltas))

# %% ln Delta against N
for scheme, deltas in table.items():
    slope = np.polyfit(Ns, np.log(deltas), 1)[0]
    print(f"{scheme}: d ln(Delta)/dN = {slope:.2e}")

write_sweep_csv(rows, "sweep.csv", {"Ns": Ns})
