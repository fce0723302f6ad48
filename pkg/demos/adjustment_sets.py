"""Which covariate sets recover a causal effect when covariates go missing?

Run with ``python demos/adjustment_sets.py``.
"""

from madjust import gallery
from madjust.criteria import check_adjustment, check_m_criterion, make_query
from madjust.enumeration import find_min_adj_set, iter_madj

# V_m2 drives X and also whether V_m1 and V_m2 themselves get recorded
g = gallery.load("indicator_dependent")
print(gallery.INDICATOR_DEPENDENT)

for z in [(), ("V_m1",), ("V_m2",), ("V_m1", "V_m2")]:
    q = make_query(g, ["X"], ["Y"], z)
    full = check_adjustment(g, q)
    m = check_m_criterion(g, q)
    print(f"z={set(z) or '{}'}: adjustment set={full.valid}, usable with missing data={m.valid}",
          f"failed={list(m.failed)}" if m.failed else "")

# here every adjustment set works with missing data too; in the next graph
# {Z_m3} adjusts correctly on complete data, but Z_m3 is only recorded
# depending on Z_m1, which is tied to Y through a latent confounder
lat = gallery.load("latent_mnar")
q = make_query(lat, ["X_1", "X_2"], ["Y"], ["Z_m3"])
verdict = check_m_criterion(lat, q)
print("\nlatent_mnar, z={Z_m3}: adjustment set =", check_adjustment(lat, q).valid,
      "| usable with missing data =", verdict.valid, verdict.notes)

print("\nall valid sets:", [sorted(z) for z in iter_madj(g, ["X"], ["Y"])])
print("smallest:", sorted(find_min_adj_set(g, ["X"], ["Y"])))

# the count grows exponentially on this family, but each set arrives quickly
for k in (1, 2, 3, 4):
    fam = gallery.exponential_family(k)
    count = sum(1 for _ in iter_madj(fam, ["X"], ["Y"]))
    print(f"k={k}: {len(fam.variables)} variables, {count} valid sets")
