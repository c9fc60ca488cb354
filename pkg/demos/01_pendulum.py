"""
Pendulum: LD landscape, its second difference, and the geometrical LD
=====================================================================

The pendulum H = I^2/2 - cos(phi) has a separatrix at energy 1 that crosses
phi = 0 at I = +/-2. Along the line phi = 0 the LD is smooth everywhere
except at the elliptic point I = 0 and at the separatrix, and the second
difference picks those points out.
"""
import numpy as np

from ldc import Axis, FlowModel, LDConfig, SectionSpec, geometric_ld_pendulum, landscape_1d, sweep
from ldc import log10_transform, second_diff_field
from ldc.models import pendulum_level_curve

from _plot import plt, show_field, OUT

pendulum = FlowModel("pendulum")
print("separatrix crosses phi=0 at I =", pendulum_level_curve(1.0, 0.0))

# %% 1D landscape along phi = 0
line = SectionSpec(Axis("I", -2.5, 2.5), resolution=500, fixed={"phi": 0.0})
I, ld, dld = landscape_1d(pendulum, line, LDConfig(100.0))

order = np.argsort(dld[1:-1])[::-1][:6] + 1
print("largest interior second differences:")
for i in order:
    print(f"  I = {I[i]:+.4f}   |dLD| = {dld[i]:.3g}")
print("the cusp at the elliptic point:", f"I = {I[249]:+.4f} |dLD| = {dld[249]:.3g}")

if plt is not None:
    OUT.mkdir(exist_ok=True)
    fig, (a, b) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
    a.plot(I, ld)
    a.set_ylabel("LD")
    b.semilogy(I, np.maximum(dld, 1e-16))
    b.set_ylabel("|dLD|")
    b.set_xlabel("I")
    fig.savefig(OUT / "pendulum_landscape.png", dpi=120)
    plt.close(fig)

# %% 2D map of log10 |dLD| on the cylinder (coarse, for speed)
plane = SectionSpec(Axis("phi", -np.pi, np.pi), Axis("I", -2.5, 2.5), resolution=160)
field = log10_transform(second_diff_field(sweep(pendulum, plane, LDConfig(100.0))))
show_field(field, "pendulum log10 |dLD|, t=100", "pendulum_dld")

# %% time-free geometrical LD: length of the level curve H = E
for E in (-0.99, 0.0, 0.9, 0.999, 1.001, 1.1, 2.0):
    print(f"  E = {E:+.3f}   length = {geometric_ld_pendulum(E):.6f}")

# its derivative blows up like |E - 1|^(-1/2) at the separatrix
d = np.geomspace(1e-4, 1e-2, 30)
ell = np.array([geometric_ld_pendulum(1 + x) for x in d])
dl_dE = (ell[2:] - ell[:-2]) / (d[2:] - d[:-2])
slope = np.polyfit(np.log(d[1:-1]), np.log(np.abs(dl_dE)), 1)[0]
print(f"log-log slope of dl/dE above the separatrix: {slope:.3f}")
