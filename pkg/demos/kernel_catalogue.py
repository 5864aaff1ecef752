"""Tour of the self-interaction kernel catalogue.

Walks through the kernel families the solver knows, shows their sign
structure, the truncation at level lam, the unit-scale modulus of the
negative part, and the structural checks each family must pass before a
groundstate run starts.  Figures land in demos/out/.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from choquard import Grid, PotentialSpec, RelaxedPotential, check_assumptions
from choquard.potentials import coarse_modulus, default_bump

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

# the four families the acceptance checks admit, plus a rejected one
newton = PotentialSpec("newton1d", p=2.0, q=1.0, ndim=1)
log2d = PotentialSpec("log2d", p=2.0, q=2.0, ndim=2)
power = PotentialSpec("power_diff", p=2.0, q=1.0, ndim=1, alpha=0.5, beta=1.0)
aniso = PotentialSpec("aniso_log", p=2.0, q=2.0, ndim=2, matrix=((1.0, 0.0), (0.0, 2.0)))
flat = PotentialSpec("custom", p=2.0, q=1.0, ndim=1, profile=((0.0, 1000.0), (-1.0, -1.0)))

print("pointwise values of the 1d kernel 1 - |x|/2:")
for x in (0.0, 1.0, 2.0, 6.0):
    v = newton.eval(x)
    vp, vm = newton.split(x)
    print(f"  V({x:4.1f}) = {v:6.2f}   split into (+{vp:.2f}, -{vm:.2f})")

print("\ntruncation: max(V, -lam) lifts the unbounded negative tail")
relaxed = RelaxedPotential(newton, 3.0)
for x in (0.0, 6.0, 16.4, 40.0):
    print(f"  V_3({x:5.1f}) = {relaxed.eval(x):6.2f}   (raw {newton.eval(x):7.2f})")

print("\nunit-scale modulus of the negative part (coarse continuity):")
for name, spec in [("newton1d", newton), ("log2d", log2d), ("power_diff", power)]:
    print(f"  {name:11s} {coarse_modulus(spec):.6f}")

print("\nstructural checks (integrability, coarse continuity, positive")
print("interaction, confinement) on each family:")
cases = [
    ("newton1d", newton, Grid(1, 20.0, 256)),
    ("log2d", log2d, Grid(2, 8.0, 64)),
    ("power_diff", power, Grid(1, 20.0, 256)),
    ("aniso_log", aniso, Grid(2, 8.0, 64)),
    ("constant -1", flat, Grid(1, 20.0, 256)),
]
for name, spec, grid in cases:
    report = check_assumptions(spec, default_bump(grid))
    verdict = "accepted" if report.all_passed else f"rejected ({', '.join(report.failed)})"
    print(f"  {name:12s} {verdict}")

# figure: radial profiles and their truncations
r = np.linspace(0.01, 12.0, 600)
fig, axes = plt.subplots(1, 2, figsize=(11, 4))
axes[0].plot(r, 1 - r / 2, label="1d newton")
axes[0].plot(r, np.log(1 / r) / (2 * np.pi), label="2d log")
axes[0].plot(r, r**0.5 - r, label=r"$r^{1/2} - r$")
axes[0].axhline(0, color="k", lw=0.5)
axes[0].set_ylim(-4, 1.5)
axes[0].set_xlabel("r")
axes[0].set_title("sign-changing kernels")
axes[0].legend()
for lam in (0.5, 1.5, 3.0):
    axes[1].plot(r, np.maximum(1 - r / 2, -lam), label=rf"$\lambda={lam}$")
axes[1].plot(r, 1 - r / 2, "k--", lw=0.8, label="raw")
axes[1].set_xlabel("r")
axes[1].set_title("relaxation max(V, -lam)")
axes[1].legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "kernel_catalogue.png"), dpi=130)
print(f"\nwrote {os.path.join(OUT, 'kernel_catalogue.png')}")
