"""
Four-dimensional maps: second vs first derivatives of the LD
============================================================

On the generalized Froeschle map the resonances y1 = n, y2 = n and
y1 + y2 = n cross the action plane as straight lines. Thresholding the top
5% of each indicator shows how much of it sits on those lines. At this
reduced resolution and iterate count the two fractions are close; the
full-size comparison (N=250, n=1000) is part of the acceptance tests.
"""
import math

import numpy as np

from ldc import gradient_norm_field, log10_transform, second_diff_field, sweep
from ldc.scenario import load_scenario, run_scenario

from _plot import show_field

sc = load_scenario("gfroeschle-sym-action-dld", {"section.resolution": "150", "ld.window": "500"})
ld = sweep(sc.model, sc.section, sc.ld)
y1, y2 = np.meshgrid(*sc.section.coordinates(), indexing="xy")


def dist(s):
    return np.abs(s - np.round(s))


near = (dist(y1) <= 0.01) | (dist(y2) <= 0.01) | (dist(y1 + y2) / math.sqrt(2) <= 0.01)
for label, f in (("|dLD|", second_diff_field(ld)), ("|grad LD|", gradient_norm_field(ld))):
    thr = np.percentile(f.values, 95)
    top = f.values > thr
    print(f"{label:10s}: {np.mean(near[top]):.3f} of the top 5% lie on primary resonances "
          f"(base rate {near.mean():.3f})")

show_field(log10_transform(second_diff_field(ld)), "generalized Froeschle log10 |dLD|", "gf_dld", cmap="magma")
show_field(log10_transform(gradient_norm_field(ld)), "generalized Froeschle log10 |grad LD|", "gf_grad", cmap="magma")

# %% the 4D Froeschle map on the zoomed section
res = run_scenario(load_scenario("froeschle4d-sigma2", {"section.resolution": "120", "ld.window": "500"}))
show_field(res.result, "4D Froeschle map, log10 |dLD|", "froeschle4d_sigma2", cmap="magma")
