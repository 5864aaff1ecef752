"""Exact discrete linear convolution against growing, singular kernels.

The kernels here grow at infinity (log or linear), so periodic wrap-around
would be catastrophically wrong.  Convolutions are therefore linear: the
kernel is sampled on the doubled lattice {-n, ..., n-1}^ndim, the field is
zero-padded onto it, and the circular FFT product on the doubled lattice
reproduces the exact double sum

    g_i = h^ndim * sum_j K((i - j) h) f_j,

because every difference i - j of original-lattice indices lies inside the
doubled index range.  Kernel samples are stored in wrapped order (index m
holds K(m h) for m < n and K((m - 2n) h) otherwise), which is exactly the
layout the circular product needs.

The singular origin sample is replaced by the average of the kernel over the
origin cell: closed form for the plain one-dimensional families, tensor
16-point Gauss-Legendre quadrature otherwise.  The quadrature nodes never hit
the singularity, and the log/power singularities are integrable, so the cell
average is finite and second-order consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import irfftn, rfftn
from scipy.special import roots_legendre

from .errors import DomainError, GridMismatch
from .grid import Field, Grid
from .potentials import (
    NEWTON1D,
    POWER_DIFF,
    RIESZ,
    NegativePart,
    PositivePart,
    PotentialSpec,
    RelaxedPotential,
    _riesz_constant,
)

_GL_NODES, _GL_WEIGHTS = roots_legendre(16)


@dataclass(eq=False)
class SampledKernel:
    """Kernel samples on the doubled lattice, wrapped order, spectrum cached."""

    grid: Grid
    values: np.ndarray = field(repr=False)
    spectrum: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        m = 2 * self.grid.n
        expected = (m,) * self.grid.ndim
        if self.values.shape != expected:
            raise ValueError(f"kernel values must have shape {expected}")
        if self.spectrum is None:
            self.spectrum = rfftn(self.values)

    @property
    def origin_value(self) -> float:
        return float(self.values[(0,) * self.grid.ndim])


def _doubled_offsets(grid: Grid) -> np.ndarray:
    """Signed lattice offsets in wrapped order: 0..n-1, -n..-1."""
    m = 2 * grid.n
    j = np.arange(m)
    return np.where(j < grid.n, j, j - m)


def _unwrap_transforms(source):
    """Peel Pos/Neg/Relaxed wrappers down to the underlying spec."""
    transforms = []
    while True:
        if isinstance(source, PositivePart):
            transforms.append(("pos", None))
            source = source.base
        elif isinstance(source, NegativePart):
            transforms.append(("neg", None))
            source = source.base
        elif isinstance(source, RelaxedPotential):
            transforms.append(("relax", source.lam))
            source = source.base
        else:
            return source, transforms[::-1]


def _apply_transforms(vals: np.ndarray, transforms) -> np.ndarray:
    for kind, lam in transforms:
        if kind == "relax":
            vals = np.maximum(vals, -lam)
        elif kind == "pos":
            vals = np.maximum(vals, 0.0)
        else:
            vals = np.maximum(-vals, 0.0)
    return vals


def _closed_form_origin_1d(spec: PotentialSpec, h: float) -> float | None:
    """Exact averages over [-h/2, h/2] for the plain 1d families."""
    if spec.family == NEWTON1D:
        return 1.0 - h / 8.0
    if spec.family == POWER_DIFF:
        a, b = spec.alpha, spec.beta
        return (h / 2.0) ** a / (a + 1.0) - (h / 2.0) ** b / (b + 1.0)
    if spec.family == RIESZ:
        c = _riesz_constant(1, spec.alpha)
        return c * (h / 2.0) ** (spec.alpha - 1.0) / spec.alpha
    return None


def _gl_origin_average(source, grid: Grid) -> float:
    """Tensor Gauss-Legendre average of the (transformed) kernel over the
    origin cell; the even node count keeps the singularity unsampled."""
    a = grid.h / 2.0
    nodes = a * _GL_NODES
    weights = a * _GL_WEIGHTS
    if grid.ndim == 1:
        pts = nodes[:, None]
        vals = source.eval_points(pts)
        return float(np.sum(weights * vals) / grid.h)
    x, y = np.meshgrid(nodes, nodes, indexing="ij")
    pts = np.stack([x.ravel(), y.ravel()], axis=1)
    vals = source.eval_points(pts).reshape(x.shape)
    w2 = np.outer(weights, weights)
    return float(np.sum(w2 * vals) / grid.h**2)


def _origin_average(source, grid: Grid) -> float:
    spec, transforms = _unwrap_transforms(source)
    if grid.ndim == 1:
        closed = _closed_form_origin_1d(spec, grid.h)
        if closed is not None:
            if not transforms:
                return closed
            # reuse the closed form when every wrapper is inactive on the cell
            probe = np.linspace(grid.h / 2048.0, grid.h / 2.0, 64)
            vals = spec._radial(probe)
            inactive = all(
                (kind == "pos" and vals.min() >= 0.0)
                or (kind == "relax" and vals.min() >= -lam)
                for kind, lam in transforms
            )
            if inactive:
                return closed
    return _gl_origin_average(source, grid)


def sample_kernel(source, grid: Grid) -> SampledKernel:
    """Sample a kernel (plain, relaxed, or a sign part) on the doubled lattice.

    ``source`` must expose ``ndim`` and vectorized ``eval_points``; the origin
    sample is replaced by the origin-cell average.
    """
    if source.ndim != grid.ndim:
        raise DomainError(f"kernel is {source.ndim}d, grid is {grid.ndim}d")
    offs = _doubled_offsets(grid) * grid.h
    if grid.ndim == 1:
        pts = offs[:, None]
        vals = source.eval_points(pts)
    else:
        x, y = np.meshgrid(offs, offs, indexing="ij")
        pts = np.stack([x.ravel(), y.ravel()], axis=1)
        vals = source.eval_points(pts).reshape(x.shape)
    vals = np.asarray(vals, dtype=np.float64)
    vals[(0,) * grid.ndim] = _origin_average(source, grid)
    return SampledKernel(grid, vals)


def kernel_lp_norm_pow(kernel: SampledKernel, q: float) -> float:
    """h^ndim * sum |K|^q over the doubled lattice the kernel lives on."""
    return kernel.grid.cell_volume * float(np.sum(np.abs(kernel.values) ** q))


def _check(kernel: SampledKernel, f: Field) -> Grid:
    if kernel.grid != f.grid:
        raise GridMismatch("kernel and field live on different grids")
    return f.grid


def conv_values(kernel: SampledKernel, values: np.ndarray) -> np.ndarray:
    """FFT path on raw arrays; used by the hot loops."""
    grid = kernel.grid
    m = 2 * grid.n
    padded = np.zeros((m,) * grid.ndim)
    padded[(slice(0, grid.n),) * grid.ndim] = values
    prod = rfftn(padded) * kernel.spectrum
    full = irfftn(prod, s=(m,) * grid.ndim)
    return full[(slice(0, grid.n),) * grid.ndim] * grid.cell_volume


def conv_fft(kernel: SampledKernel, f: Field) -> Field:
    """Exact discrete linear convolution K * f via zero-padded FFT."""
    grid = _check(kernel, f)
    return Field(grid, conv_values(kernel, f.values))


def conv_bruteforce(kernel: SampledKernel, f: Field) -> Field:
    """Same contract as :func:`conv_fft` by direct double summation.

    Kept deliberately free of FFTs so it can serve as an independent oracle.
    """
    grid = _check(kernel, f)
    n = grid.n
    # natural order: index a holds K((a - n) h)
    natural = np.roll(kernel.values, n, axis=tuple(range(grid.ndim)))
    if grid.ndim == 1:
        idx = np.arange(n)[:, None] - np.arange(n)[None, :] + n
        out = natural[idx] @ f.values
        return Field(grid, out * grid.cell_volume)
    out = np.empty((n, n))
    rng = np.arange(n)
    for i1 in range(n):
        sub = natural[i1 - rng + n, :]
        for i2 in range(n):
            out[i1, i2] = np.sum(sub[:, i2 - rng + n] * f.values)
    return Field(grid, out * grid.cell_volume)
