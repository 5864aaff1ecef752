"""Why the convolution must be linear, and how it is validated.

The kernels grow at infinity, so circular (periodic) convolution would pull
enormous wrong values across the seam.  The solver samples the kernel on
the doubled lattice and zero-pads, which makes the FFT product reproduce
the direct double sum exactly; this demo measures that equivalence and
shows what the periodic shortcut would have produced instead.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from scipy.fft import irfft, rfft

from choquard import Grid, PotentialSpec, gaussian
from choquard.convolution import conv_bruteforce, conv_fft, sample_kernel

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

pot = PotentialSpec("newton1d", p=2.0, q=1.0, ndim=1)
grid = Grid(1, 8.0, 256)
kernel = sample_kernel(pot, grid)
f = gaussian(grid, 1.0)

linear = conv_fft(kernel, f)
direct = conv_bruteforce(kernel, f)
print(f"max |fft - direct double sum| = {np.max(np.abs(linear.values - direct.values)):.3e}")

# the wrong way: periodic convolution with the kernel on the original box
j = np.arange(grid.n)
j = np.where(j < grid.n // 2, j, j - grid.n)
wrapped = 1.0 - np.abs(j * grid.h) / 2.0
periodic = irfft(rfft(wrapped) * rfft(f.values), n=grid.n) * grid.h
print(f"max |periodic shortcut - direct| = {np.max(np.abs(periodic - direct.values)):.3e}")

print(f"\norigin cell average (analytic): {1 - grid.h / 8:.10f}")
print(f"origin cell sample stored     : {kernel.origin_value:.10f}")

x = grid.axis()
fig, ax = plt.subplots(figsize=(6.5, 4))
ax.plot(x, direct.values, label="linear (correct)")
ax.plot(x, periodic, "--", label="periodic (wrong)")
ax.set_xlabel("x")
ax.set_title("kernel * gaussian: linear vs periodic convolution")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "convolution_oracle.png"), dpi=130)
print(f"\nwrote {os.path.join(OUT, 'convolution_oracle.png')}")
