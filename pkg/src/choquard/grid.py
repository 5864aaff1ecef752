"""Uniform centered-box grids, discrete fields, norms and translations.

The box is [-L, L)^ndim sampled at n points per axis with spacing h = 2L/n,
so the origin is the lattice point with index n//2 on every axis.  All
integrals are plain cell quadrature with weight h^ndim.  Derivatives use
second-order central differences with zero extension outside the box
(groundstates decay, so homogeneous truncation is the natural choice).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadExponent,
    BadRadius,
    CorruptFile,
    GridMismatch,
    VersionMismatch,
    ZeroField,
)

FIELD_MAGIC = b"CHQF"
FIELD_VERSION = 1


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on the centered box [-L, L)^ndim."""

    ndim: int
    half_width: float
    n: int

    def __post_init__(self):
        if self.ndim not in (1, 2):
            raise ValueError(f"ndim must be 1 or 2, got {self.ndim}")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 16, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.ndim

    @property
    def origin_index(self) -> tuple[int, ...]:
        return (self.n // 2,) * self.ndim

    def axis(self) -> np.ndarray:
        """Coordinates along one axis: -L + h*k for k = 0..n-1."""
        return -self.half_width + self.h * np.arange(self.n)

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays, each shaped like a field on this grid."""
        return tuple(np.meshgrid(*([self.axis()] * self.ndim), indexing="ij"))

    def radii(self) -> np.ndarray:
        """Euclidean distance from the origin, shaped like a field."""
        meshes = self.meshes()
        return np.sqrt(sum(m * m for m in meshes))


@dataclass(eq=False)
class Field:
    """Real samples of a function on a :class:`Grid`, row-major over axes."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} != grid shape {self.grid.shape}"
            )

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        """Sample ``fn(*coordinate_meshes)`` on the grid."""
        return cls(grid, np.asarray(fn(*grid.meshes()), dtype=np.float64))

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape))


def same_grid(u: Field, v: Field) -> Grid:
    if u.grid != v.grid:
        raise GridMismatch(f"fields on {u.grid} and {v.grid}")
    return u.grid


def gaussian(grid: Grid, sigma: float, center=0.0, amplitude: float = 1.0) -> Field:
    """Isotropic Gaussian bump exp(-|x - c|^2 / (2 sigma^2))."""
    center = np.broadcast_to(np.asarray(center, dtype=np.float64), (grid.ndim,))
    meshes = grid.meshes()
    r2 = sum((m - c) ** 2 for m, c in zip(meshes, center))
    return Field(grid, amplitude * np.exp(-r2 / (2.0 * sigma**2)))


def lp_norm_pow(u: Field, r: float) -> float:
    """h^ndim * sum |u|^r, the r-th power of the discrete L^r norm."""
    if r < 1:
        raise BadExponent(f"exponent must be >= 1, got {r}")
    return u.grid.cell_volume * float(np.sum(np.abs(u.values) ** r))


def _gradient_axes(values: np.ndarray, h: float) -> list[np.ndarray]:
    """Central-difference gradient per axis, zero extension outside the box."""
    out = []
    for axis in range(values.ndim):
        g = np.zeros_like(values)
        src = np.moveaxis(values, axis, 0)
        dst = np.moveaxis(g, axis, 0)
        dst[1:-1] = (src[2:] - src[:-2]) / (2.0 * h)
        dst[0] = src[1] / (2.0 * h)
        dst[-1] = -src[-2] / (2.0 * h)
        out.append(g)
    return out


def h1_norm_sq(u: Field) -> float:
    """Discrete H^1 energy: h^ndim * sum(|grad u|^2 + u^2)."""
    total = np.sum(u.values * u.values)
    for g in _gradient_axes(u.values, u.grid.h):
        total += np.sum(g * g)
    return u.grid.cell_volume * float(total)


def h1_inner(u: Field, v: Field) -> float:
    """Symmetric bilinear form with h1_inner(u, u) == h1_norm_sq(u)."""
    grid = same_grid(u, v)
    total = np.sum(u.values * v.values)
    for gu, gv in zip(_gradient_axes(u.values, grid.h), _gradient_axes(v.values, grid.h)):
        total += np.sum(gu * gv)
    return grid.cell_volume * float(total)


def normalize_h1(u: Field) -> Field:
    """Rescale onto the discrete H^1 unit sphere."""
    nrm = h1_norm_sq(u)
    if nrm == 0.0:
        raise ZeroField("cannot normalize the zero field")
    return Field(u.grid, u.values / np.sqrt(nrm))


def laplacian(u: Field) -> Field:
    """Three-point central-difference Laplacian with zero extension."""
    h2 = u.grid.h**2
    out = np.zeros_like(u.values)
    for axis in range(u.grid.ndim):
        src = np.moveaxis(u.values, axis, 0)
        dst = np.moveaxis(out, axis, 0)
        dst[1:-1] += (src[2:] - 2.0 * src[1:-1] + src[:-2]) / h2
        dst[0] += (src[1] - 2.0 * src[0]) / h2
        dst[-1] += (src[-2] - 2.0 * src[-1]) / h2
    return Field(u.grid, out)


def h1_apply(u: Field) -> Field:
    """Apply the operator behind the H^1 form: grad^T grad + identity.

    The gradient is the central difference, so its adjoint composition is the
    wide five-point stencil (2u_i - u_{i-2} - u_{i+2}) / (4 h^2) per axis.
    Satisfies h^ndim * sum(h1_apply(u) * v) == h1_inner(u, v).
    """
    h2 = 4.0 * u.grid.h**2
    out = u.values.copy()
    for axis in range(u.grid.ndim):
        src = np.moveaxis(u.values, axis, 0)
        dst = np.moveaxis(out, axis, 0)
        dst[:] += 2.0 * src / h2
        # only one gradient row references each endpoint, so the diagonal
        # of grad^T grad drops to 1/(4h^2) there
        dst[0] -= src[0] / h2
        dst[-1] -= src[-1] / h2
        dst[2:] -= src[:-2] / h2
        dst[:-2] -= src[2:] / h2
    return Field(u.grid, out)


def translate(u: Field, shift) -> Field:
    """Shift by an integer number of cells; vacated cells are zero."""
    shift = tuple(int(s) for s in np.atleast_1d(shift))
    if len(shift) != u.grid.ndim:
        raise ValueError(f"shift must have {u.grid.ndim} components")
    out = np.zeros_like(u.values)
    src_sl, dst_sl = [], []
    for s in shift:
        n = u.grid.n
        if abs(s) >= n:
            return Field(u.grid, out)
        if s >= 0:
            src_sl.append(slice(0, n - s))
            dst_sl.append(slice(s, n))
        else:
            src_sl.append(slice(-s, n))
            dst_sl.append(slice(0, n + s))
    out[tuple(dst_sl)] = u.values[tuple(src_sl)]
    return Field(u.grid, out)


def recenter(u: Field, mode: str = "peak", power: float = 2.0) -> tuple[Field, tuple[int, ...]]:
    """Translate so the peak of |u| (or the |u|^power barycenter) sits in the
    origin cell.

    Returns the shifted field and the applied lattice shift.  Ties in peak
    mode break toward the lexicographically smallest index (np.argmax order).
    """
    mag = np.abs(u.values)
    total = mag.sum()
    if total == 0.0:
        raise ZeroField("cannot recenter the zero field")
    if mode == "peak":
        idx = np.unravel_index(int(np.argmax(mag)), u.grid.shape)
    elif mode == "barycenter":
        w = mag**power
        axis_coord = u.grid.axis()
        idx = []
        for axis in range(u.grid.ndim):
            other = tuple(a for a in range(u.grid.ndim) if a != axis)
            marg = w.sum(axis=other) if other else w
            b = float(np.sum(axis_coord * marg) / np.sum(marg))
            k = int(round((b + u.grid.half_width) / u.grid.h))
            idx.append(min(max(k, 0), u.grid.n - 1))
        idx = tuple(idx)
    else:
        raise ValueError(f"unknown recenter mode {mode!r}")
    shift = tuple(o - i for o, i in zip(u.grid.origin_index, idx))
    return translate(u, shift), shift


def write_field(u: Field, path) -> None:
    """Dump in the binary field format (little endian).

    Layout: magic ``CHQF``, u32 version, u8 ndim, u64 n, f64 half_width,
    then n^ndim f64 values row-major.
    """
    header = struct.pack(
        "<4sIBQd", FIELD_MAGIC, FIELD_VERSION, u.grid.ndim, u.grid.n, u.grid.half_width
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(u.values, dtype="<f8").tobytes())


_HEADER = struct.Struct("<4sIBQd")


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise CorruptFile(f"{path}: truncated header")
    magic, version, ndim, n, half_width = _HEADER.unpack_from(blob)
    if magic != FIELD_MAGIC:
        raise CorruptFile(f"{path}: bad magic {magic!r}")
    if version != FIELD_VERSION:
        raise VersionMismatch(f"{path}: version {version}, expected {FIELD_VERSION}")
    grid = Grid(ndim, half_width, n)
    count = n**ndim
    payload = blob[_HEADER.size :]
    if len(payload) != 8 * count:
        raise CorruptFile(f"{path}: expected {8 * count} payload bytes, got {len(payload)}")
    values = np.frombuffer(payload, dtype="<f8").reshape(grid.shape)
    if not np.all(np.isfinite(values)):
        raise CorruptFile(f"{path}: payload contains non-finite values")
    return Field(grid, values.copy())


def field_to_csv(u: Field, path) -> None:
    """CSV companion of the binary dump: index coordinates plus value."""
    with open(path, "w") as fh:
        if u.grid.ndim == 1:
            fh.write("i,value\n")
            for i, v in enumerate(u.values):
                fh.write(f"{i},{float(v)!r}\n")
        else:
            fh.write("i,j,value\n")
            for i in range(u.grid.n):
                for j in range(u.grid.n):
                    fh.write(f"{i},{j},{float(u.values[i, j])!r}\n")


def tail_mass_mask(grid: Grid, radius: float) -> np.ndarray:
    """Boolean mask of cells strictly outside the centered ball."""
    if not 0 < radius < grid.half_width:
        raise BadRadius(f"radius must lie in (0, {grid.half_width}), got {radius}")
    return grid.radii() > radius
