"""Numerical experiments for the analytic identities behind the solver.

Three families of checks: the nonlocal Brezis-Lieb identity realized on
translating bumps (the canonical compactness-loss mechanism), the duality
form of Young's convolution inequality (exact on the lattice, since the
discrete convolution is a convolution on the group Z^ndim with weighted
counting measure), and the large-scale Lipschitz bound implied by a finite
unit-scale modulus of the negative part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convolution import conv_values, kernel_lp_norm_pow, sample_kernel
from .errors import InfiniteModulus, MarginViolation
from .functional import ProblemSpec, density, eval_J
from .grid import Field, gaussian, lp_norm_pow, translate
from .potentials import NegativePart, PositivePart, PotentialSpec, coarse_modulus


def _edge_clear(u: Field, cells: int, tag: str) -> None:
    """Require |u| to be negligible within ``cells`` of the box boundary."""
    if cells <= 0:
        return
    scale = float(np.max(np.abs(u.values)))
    if scale == 0.0:
        return
    mask = np.zeros(u.grid.shape, dtype=bool)
    for axis in range(u.grid.ndim):
        sl_lo = [slice(None)] * u.grid.ndim
        sl_hi = [slice(None)] * u.grid.ndim
        sl_lo[axis] = slice(0, cells)
        sl_hi[axis] = slice(u.grid.n - cells, u.grid.n)
        mask[tuple(sl_lo)] = True
        mask[tuple(sl_hi)] = True
    if float(np.max(np.abs(u.values[mask]))) > 1e-12 * scale:
        raise MarginViolation(
            f"{tag} carries mass within {cells} cells of the boundary"
        )


def brezis_lieb_defect(
    spec: ProblemSpec, u: Field, v: Field, separation: float
) -> float:
    """Defect of the nonlocal splitting identity on a translating pair.

    Builds u_n = u + v(. - separation e1) and returns
    | J(u_n) - J(u_n - u) + 2 <K_neg * |u|^p, |u_n - u|^p> - J(u) |
    with every term computed against the relaxed kernel (K_neg its negative
    part).  The translation is an exact lattice shift, so u_n - u is exactly
    the translated v and the defect isolates the cross-interaction terms,
    which decay as the separation grows.
    """
    h = spec.grid.h
    cells = separation / h
    if abs(cells - round(cells)) > 1e-9:
        raise ValueError(f"separation {separation} is not a multiple of h = {h}")
    cells = int(round(cells))
    _edge_clear(u, cells, "u")
    _edge_clear(v, cells, "v")
    shift = (cells,) + (0,) * (spec.grid.ndim - 1)
    tv = translate(v, shift)
    un = Field(spec.grid, u.values + tv.values)
    cross = spec.grid.cell_volume * float(
        np.sum(
            conv_values(spec.relaxed_negative_kernel, density(spec, u))
            * density(spec, tv)
        )
    )
    lhs = eval_J(spec, un) - eval_J(spec, tv) + 2.0 * cross
    return abs(lhs - eval_J(spec, u))


def young_check(spec: ProblemSpec, f: Field) -> tuple[float, float]:
    """Both sides of the duality form of Young's convolution inequality.

    The kernel is the positive part of the potential (the L^q hypothesis
    lives there); both sides are lattice quadratures over the doubled box,
    under which the inequality is exact up to roundoff.
    """
    q = spec.potential.q
    kernel = sample_kernel(PositivePart(spec.potential), spec.grid)
    dens = f.values
    conv = conv_values(kernel, dens)
    lhs = abs(spec.grid.cell_volume * float(np.sum(conv * dens)))
    r = 2.0 * q / (2.0 * q - 1.0)
    rhs = kernel_lp_norm_pow(kernel, q) ** (1.0 / q) * lp_norm_pow(f, r) ** (
        2.0 - 1.0 / q
    )
    return lhs, rhs


def gaussian_mixture(grid, rng, components=(1, 3)) -> Field:
    """Random nonnegative Gaussian mixture, the sweep workhorse."""
    k = int(rng.integers(components[0], components[1] + 1))
    vals = np.zeros(grid.shape)
    for _ in range(k):
        center = rng.uniform(-grid.half_width / 2, grid.half_width / 2, grid.ndim)
        sigma = rng.uniform(0.3, 1.5)
        amp = rng.uniform(0.2, 2.0)
        vals += gaussian(grid, sigma, center, amp).values
    return Field(grid, vals)


def young_sweep(
    spec: ProblemSpec, count: int = 100, seed: int = 1234
) -> tuple[int, float, list[dict]]:
    """Seeded mixture sweep; returns (violations, worst relative slack, rows).

    A violation is lhs > rhs beyond 1e-9 relative slack.
    """
    rng = np.random.default_rng(seed)
    rows = []
    violations = 0
    worst = -math.inf
    for i in range(count):
        f = gaussian_mixture(spec.grid, rng)
        lhs, rhs = young_check(spec, f)
        rel = (lhs - rhs) / rhs if rhs > 0 else 0.0
        worst = max(worst, rel)
        bad = lhs > rhs + 1e-9 * rhs
        violations += bad
        rows.append(
            {
                "experiment": "young",
                "index": i,
                "lhs": lhs,
                "rhs": rhs,
                "relative_slack": rel,
                "violation": int(bad),
            }
        )
    return violations, worst, rows


def coarse_lipschitz_check(
    spec: PotentialSpec,
    samples: int = 10000,
    radius: float = 30.0,
    seed: int = 1234,
    resolution: float = 1.0 / 256.0,
) -> float:
    """Largest ratio |V^-(x) - V^-(y)| / ((|x - y| + 1) modulus) over seeded
    pairs inside the centered ball; stays at or below one whenever the
    unit-scale modulus is finite (chaining unit steps along the segment)."""
    modulus = coarse_modulus(
        spec, search_radius=radius + 2.0, resolution=resolution
    )
    if not math.isfinite(modulus):
        raise InfiniteModulus(f"{spec.family} has no finite unit-scale modulus")
    rng = np.random.default_rng(seed)
    neg = NegativePart(spec)
    got = 0
    max_ratio = 0.0
    while got < samples:
        batch = min(4 * (samples - got), 65536)
        pts = rng.uniform(-radius, radius, size=(batch, 2, spec.ndim))
        keep = np.all(np.linalg.norm(pts, axis=2) <= radius, axis=1)
        pts = pts[keep][: samples - got]
        if len(pts) == 0:
            continue
        got += len(pts)
        vx = neg.eval_points(pts[:, 0, :])
        vy = neg.eval_points(pts[:, 1, :])
        dist = np.linalg.norm(pts[:, 0, :] - pts[:, 1, :], axis=1)
        num = np.abs(vx - vy)
        if modulus == 0.0:
            if float(num.max(initial=0.0)) > 0.0:
                return math.inf
            continue
        ratios = num / ((dist + 1.0) * modulus)
        max_ratio = max(max_ratio, float(ratios.max(initial=0.0)))
    return max_ratio


@dataclass
class SuiteResult:
    """One verification suite outcome with its CSV-ready rows."""

    name: str
    passed: bool
    rows: list

    def __bool__(self) -> bool:
        return self.passed
