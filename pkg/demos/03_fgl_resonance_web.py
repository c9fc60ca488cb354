"""
Froeschle-Guzzo-Lega Hamiltonian: the resonance web in action space
===================================================================

For eps = 0 every torus is regular and the LD is t sqrt(I1^2 + I2^2 + 1).
For small eps the resonances k1 I1 + k2 I2 + k3 = 0 show up as straight
lines of large |dLD|. The widest ones, I1 = 0 and I2 = 0, are crossed at
their island centres on this section (all angles 0): they appear as smooth
dark bands with bright chaotic borders, which is why the mean over thin
strips around the exact lines barely exceeds the background. A coarse grid
and a shorter window keep this quick; the built-in scenarios use N = 500
and t = 1000.
"""
import math

import numpy as np

from ldc import FlowModel, LDConfig, fgl_resonance_lines, ld_flow
from ldc.scenario import load_scenario, run_scenario

from _plot import show_field

# %% integrable limit: linear growth of the LD
m0 = FlowModel("fgl", {"eps": 0.0})
for t in (10.0, 100.0):
    v = ld_flow(m0, [0.3, 0.1, 0, 0, 0, 0], LDConfig(t)).value
    print(f"t = {t:5.0f}: LD = {v:.6f}   closed form = {t * math.sqrt(0.3**2 + 0.1**2 + 1):.6f}")

# %% low-order resonances drawn in the (I1, I2) plane
print("order <= 2 resonances (k1, k2, k3):", fgl_resonance_lines(2))

# %% the macroscopic section at desk scale
sc = load_scenario("fgl-macro", {"section.resolution": "100", "ld.window": "300"})
res = run_scenario(sc)
f = res.result
I1, I2 = np.meshgrid(*sc.section.coordinates(), indexing="xy")
lines = [k for k in fgl_resonance_lines(2) if k[0] or k[1]]
dist = np.min([np.abs(k[0] * I1 + k[1] * I2 + k[2]) / math.hypot(k[0], k[1]) for k in lines], axis=0)
on, off = dist <= 0.02, dist > 0.02
print(f"mean log10 |dLD| near order<=2 lines {f.values[on].mean():.2f}, elsewhere {f.values[off].mean():.2f}")
show_field(f, "FGL eps=0.01, t=300, log10 |dLD|", "fgl_macro", cmap="magma")
