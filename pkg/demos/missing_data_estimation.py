"""Estimating P(Y | do(X)) from simulated data with missing cells.

Run with ``python demos/missing_data_estimation.py``. Each section samples
from a fixed discrete model, so the exact answer is known.
"""

from madjust import gallery
from madjust.exceptions import CriterionError
from madjust.estimate import estimate_ipw, estimate_m_adjustment, estimate_ms_adjustment
from madjust.simulate import sample, true_effect


def show(label, est, truth):
    p = est.distribution["1"]
    print(f"  {label:<28} {p:.4f}  (truth {truth:.4f}, error {p - truth:+.4f}, rows used {est.n_effective})")


print("1. covariate missing not at random, adjusting for {V_m1}")
scm = gallery.load_scm("indicator_dependent")
data = sample(scm, 100_000)
na = (data.codes["V_m1"] == -1).mean()
print(f"  {na:.0%} of V_m1 values are missing")
for x in ("0", "1"):
    truth = true_effect(scm, {"X": x}, ["Y"])["1"]
    show(f"P(Y=1 | do(X={x})) adjustment", estimate_m_adjustment(data, scm.graph, {"X": x}, ["Y"], ["V_m1"]), truth)
    show(f"P(Y=1 | do(X={x})) weighting", estimate_ipw(data, scm.graph, {"X": x}, ["Y"], ["V_m1"]), truth)

print("\n2. selection bias on top of missing data, adjusting for {V_1}")
scm = gallery.load_scm("selection_mnar")
data = sample(scm, 100_000)
print(f"  {data.n_selected} of {data.n_rows} units selected")
x = {"X_1": "1", "X_2": "0"}
show("P(Y=1 | do(X_1=1, X_2=0))", estimate_ms_adjustment(data, scm.graph, x, ["Y"], ["V_1"]), true_effect(scm, x, ["Y"])["1"])

print("\n3. treatment recorded depending on the outcome: no valid set exists")
scm = gallery.load_scm("confounded_mnar")
data = sample(scm, 100_000)
try:
    estimate_m_adjustment(data, scm.graph, {"X": "1"}, ["Y"], ["Z"])
except CriterionError as exc:
    print(f"  refused: {exc}")
forced = estimate_m_adjustment(data, scm.graph, {"X": "1"}, ["Y"], ["Z"], force=True)
show("forced complete-case estimate", forced, true_effect(scm, {"X": "1"}, ["Y"])["1"])
