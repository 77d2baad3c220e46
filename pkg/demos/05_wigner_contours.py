# %% [markdown]
# # Phase-space portraits
#
# Wigner densities of the propagated packet, reduced to two contours: 2 sigma
# (area h for a coherent state) and sigma/2. Without the cubic correction the
# packet picks up a visible banana shape by the last step.

# %%
from krcontrol import table_one_orbit
from krcontrol.quantum import run_targeting
from krcontrol.wigner import HALF_SIGMA, TWO_SIGMA, extract_contours, wigner_transform, write_contours_svg

orbit = table_one_orbit()

for scheme in ("sol_a", "sol_a_improved"):
    trace = run_targeting(200, scheme, orbit).trace
    sets = [(t, extract_contours(wigner_transform(s))) for t, s in enumerate(trace)]
    print(scheme)
    for t, cs in sets:
        outer, inner = cs.main(TWO_SIGMA), cs.main(HALF_SIGMA)
        print(f"  t={t}: area {outer.area:.5f}, circularity 2sigma {outer.circularity:.3f}, sigma/2 {inner.circularity:.3f}")
    write_contours_svg(sets, f"contours_{scheme}.svg", config={"scheme": scheme, "N": 200})
