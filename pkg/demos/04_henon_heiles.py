"""
Henon-Heiles: iso-energetic sections and their non-admissible region
=====================================================================

On the section x = 0 the momentum px > 0 follows from the energy. Points
where the energy equation has no positive root are masked; they are drawn
white in the PGM output.
"""
import numpy as np

from ldc import FlowModel, LDConfig, hh_lift, ld_flow
from ldc.scenario import load_scenario, run_scenario

from _plot import show_field

hh = FlowModel("henon-heiles")

# %% the lift and a round trip through the Hamiltonian
px = hh_lift(0.2, 0.1, 0.118)
print("px =", px, " H =", hh.hamiltonian(np.array([0.0, 0.2, px, 0.1])))
print("outside the energy surface:", hh_lift(0.0, 0.5, 0.105))

# %% the E = 0.105 section: mask and indicator
sc = load_scenario("hh-e0105", {"section.resolution": "120", "ld.window": "100"})
res = run_scenario(sc)
print(f"{res.manifest['value_range']['masked']} of {res.result.values.size} cells are non-admissible")
show_field(res.result, "Henon-Heiles E=0.105, log10 |dLD|", "hh_e0105", cmap="magma")

# %% action-type LD: integral of 2T
v = ld_flow(hh, [0.0, 0.1, 0.3, -0.05], LDConfig(50.0, observable="action"))
print("integral of 2T over t in [0, 50]:", v.value)

# %% energy as an axis: the (y, E) section with py = 0
res = run_scenario(load_scenario("hh-ype", {"section.resolution": "100", "ld.window": "100"}))
show_field(res.result, "Henon-Heiles (y, E), log10 |dLD|", "hh_ype", cmap="magma")
