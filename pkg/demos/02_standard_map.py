"""
Standard map: ordered vs chaotic regions from the second difference of the LD
=============================================================================

For k = 0 the map is integrable and the discrete LD is exactly n |y0|. For
k = 0.6 a chaotic layer surrounds the hyperbolic point, and log10 |dLD|
there sits orders of magnitude above the smooth invariant circles.
"""
import numpy as np

from ldc import Axis, LDConfig, MapModel, SectionSpec, ld_map, sweep
from ldc.scenario import load_scenario, run_scenario

from _plot import show_field

# %% the integrable oracle
flat = MapModel("standard", {"k": 0.0})
print("k=0, y0=0.25, n=150 ->", ld_map(flat, [0.0, 0.25], LDConfig(150)).value)

sec = SectionSpec(Axis("x", 0.0, 1.0), Axis("y", 0.0, 0.5), resolution=5)
print(sweep(flat, sec, LDConfig(150)).values)

# %% the built-in scenario at a reduced resolution, with its probe boxes
sc = load_scenario("standard-map-k06", {"section.resolution": "250"})
res = run_scenario(sc)
print("probe boxes:", sc.probes)
for name, med in res.manifest["probe_medians"].items():
    print(f"  median log10 |dLD| in {name} box: {med:.2f}")
show_field(res.result, "standard map k=0.6, log10 |dLD|", "standard_map_k06", cmap="magma")

# %% stronger kick
res1 = run_scenario(load_scenario("standard-map-k1", {"section.resolution": "250"}))
r = res1.manifest["value_range"]
print(f"k=1: log10 |dLD| between {r['min']:.2f} and {r['max']:.2f}")
show_field(res1.result, "standard map k=1, log10 |dLD|", "standard_map_k1", cmap="magma")
