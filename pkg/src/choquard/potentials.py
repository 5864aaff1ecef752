"""Catalogue of self-interaction kernels, their splitting and relaxation.

Every kernel here is even.  Except for the anisotropic logarithm they are
radial; the anisotropic one is radial in |A x|, which is all the machinery
below needs.  Pointwise evaluation is exact and pure; cell averaging near
singularities is the convolution module's job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from .errors import (
    AssumptionFailure,
    DomainError,
    NegativeLambda,
    SingularPoint,
)
from .grid import Field, Grid

NEWTON1D = "newton1d"
LOG2D = "log2d"
POWER_DIFF = "power_diff"
ANISO_LOG = "aniso_log"
RIESZ = "riesz"
CUSTOM = "custom"

FAMILIES = (NEWTON1D, LOG2D, POWER_DIFF, ANISO_LOG, RIESZ, CUSTOM)


def _riesz_constant(ndim: int, alpha: float) -> float:
    return math.gamma((ndim - alpha) / 2) / (
        math.gamma(alpha / 2) * math.pi ** (ndim / 2) * 2**alpha
    )


@dataclass(frozen=True)
class PotentialSpec:
    """Symbolic description of a kernel family with its exponents.

    ``p`` is the nonlinearity exponent, ``q`` the integrability exponent
    claimed for the positive part.  ``matrix`` (2x2, anisotropic log) and
    ``profile`` (radii/values knots, custom) are stored as nested tuples so
    specs stay hashable and safely shareable.
    """

    family: str
    p: float
    q: float
    ndim: int
    alpha: Optional[float] = None
    beta: Optional[float] = None
    matrix: Optional[tuple] = None
    profile: Optional[tuple] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.ndim not in (1, 2):
            raise DomainError(f"ndim must be 1 or 2, got {self.ndim}")
        if self.p < 2:
            raise ValueError(f"p must be >= 2, got {self.p}")
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        # exponent compatibility between p, q and the Sobolev range
        lhs = (1.0 / self.p) * (1.0 - 1.0 / (2.0 * self.q))
        if lhs < 0.5 - 1.0 / self.ndim - 1e-15:
            raise ValueError(
                f"(1/p)(1 - 1/(2q)) = {lhs:.6g} violates the lower bound "
                f"{0.5 - 1.0 / self.ndim:.6g} for ndim={self.ndim}"
            )
        if self.family == NEWTON1D and self.ndim != 1:
            raise DomainError("newton1d kernel is one-dimensional")
        if self.family in (LOG2D, ANISO_LOG) and self.ndim != 2:
            raise DomainError(f"{self.family} kernel is two-dimensional")
        if self.family == POWER_DIFF:
            if self.alpha is None or self.beta is None:
                raise ValueError("power_diff needs alpha and beta")
            lo = max((self.ndim - 2) * self.p - 2 * self.ndim, -float(self.ndim))
            if not (lo < self.alpha < self.beta <= 1.0):
                raise ValueError(
                    f"power_diff requires {lo:.6g} < alpha < beta <= 1, "
                    f"got alpha={self.alpha}, beta={self.beta}"
                )
        if self.family == RIESZ:
            if self.alpha is None or not 0 < self.alpha < self.ndim:
                raise ValueError("riesz needs alpha in (0, ndim)")
        if self.family == ANISO_LOG:
            if self.matrix is None:
                raise ValueError("aniso_log needs a 2x2 matrix")
            mat = np.asarray(self.matrix, dtype=np.float64)
            if mat.shape != (2, 2) or abs(np.linalg.det(mat)) < 1e-14:
                raise ValueError("aniso_log matrix must be 2x2 and invertible")
            object.__setattr__(self, "matrix", tuple(tuple(row) for row in mat))
        if self.family == CUSTOM:
            if self.profile is None:
                raise ValueError("custom needs a tabulated radial profile")
            radii = np.asarray(self.profile[0], dtype=np.float64)
            vals = np.asarray(self.profile[1], dtype=np.float64)
            if radii.ndim != 1 or radii.shape != vals.shape or len(radii) < 2:
                raise ValueError("profile must be two equal-length 1d sequences")
            if radii[0] < 0 or np.any(np.diff(radii) <= 0):
                raise ValueError("profile radii must be nonnegative and increasing")
            if not (np.all(np.isfinite(radii)) and np.all(np.isfinite(vals))):
                raise ValueError("profile entries must be finite")
            object.__setattr__(self, "profile", (tuple(radii), tuple(vals)))

    @property
    def singular_at_origin(self) -> bool:
        if self.family in (LOG2D, ANISO_LOG, RIESZ):
            return True
        if self.family == POWER_DIFF:
            return self.alpha < 0
        return False

    def _radial(self, r: np.ndarray) -> np.ndarray:
        """Kernel profile as a function of radius (of |A x| for aniso_log)."""
        r = np.asarray(r, dtype=np.float64)
        if self.family == NEWTON1D:
            return 1.0 - r / 2.0
        if self.family in (LOG2D, ANISO_LOG):
            with np.errstate(divide="ignore"):
                return np.log(1.0 / r) / (2.0 * math.pi)
        if self.family == POWER_DIFF:
            with np.errstate(divide="ignore"):
                return r**self.alpha - r**self.beta
        if self.family == RIESZ:
            c = _riesz_constant(self.ndim, self.alpha)
            with np.errstate(divide="ignore"):
                return c / r ** (self.ndim - self.alpha)
        # custom: linear interpolation inside the tabulated range only
        radii = np.asarray(self.profile[0])
        vals = np.asarray(self.profile[1])
        if np.any(r < radii[0]) or np.any(r > radii[-1]):
            raise DomainError(
                f"custom profile tabulated on [{radii[0]}, {radii[-1]}], "
                f"queried at radius outside it"
            )
        return np.interp(r, radii, vals)

    def _arg_radii(self, points: np.ndarray) -> np.ndarray:
        """Radii fed to the profile: |x|, or |A x| for the anisotropic log."""
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None] if self.ndim == 1 else points[None, :]
        if points.shape[-1] != self.ndim:
            raise DomainError(
                f"points have dimension {points.shape[-1]}, kernel is {self.ndim}d"
            )
        if self.family == ANISO_LOG:
            points = points @ np.asarray(self.matrix).T
        return np.sqrt(np.sum(points * points, axis=-1))

    def eval_points(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at an (m, ndim) array of points."""
        return self._radial(self._arg_radii(points))

    def eval(self, x) -> float:
        """Exact kernel value at one point."""
        arr = np.asarray(x, dtype=np.float64).reshape(-1)
        if arr.size != self.ndim:
            raise DomainError(
                f"point has {arr.size} coordinates, kernel is {self.ndim}d"
            )
        r = float(self._arg_radii(arr[None, :])[0])
        if r == 0.0 and self.singular_at_origin:
            raise SingularPoint(f"{self.family} kernel is singular at the origin")
        return float(self._radial(np.array([r]))[0])

    def split(self, x) -> tuple[float, float]:
        """Positive/negative parts (max(V, 0), max(-V, 0)) at one point."""
        v = self.eval(x)
        return max(v, 0.0), max(-v, 0.0)

    def relax(self, lam: float) -> "RelaxedPotential":
        return RelaxedPotential(self, lam)


@dataclass(frozen=True)
class RelaxedPotential:
    """Pointwise truncation max{V, -lam}; lam = 0 gives the positive part."""

    base: PotentialSpec
    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise NegativeLambda(f"lam must be >= 0, got {self.lam}")

    @property
    def ndim(self) -> int:
        return self.base.ndim

    @property
    def singular_at_origin(self) -> bool:
        return self.base.singular_at_origin

    def eval_points(self, points: np.ndarray) -> np.ndarray:
        return np.maximum(self.base.eval_points(points), -self.lam)

    def eval(self, x) -> float:
        return max(self.base.eval(x), -self.lam)


@dataclass(frozen=True)
class PositivePart:
    """max(V, 0) of the wrapped kernel."""

    base: object

    @property
    def ndim(self) -> int:
        return self.base.ndim

    @property
    def singular_at_origin(self) -> bool:
        return self.base.singular_at_origin

    def eval_points(self, points: np.ndarray) -> np.ndarray:
        return np.maximum(self.base.eval_points(points), 0.0)


@dataclass(frozen=True)
class NegativePart:
    """max(-V, 0) of the wrapped kernel.

    All catalogue kernels are positive or bounded near the origin, so the
    negative part is never singular there.
    """

    base: object

    @property
    def ndim(self) -> int:
        return self.base.ndim

    @property
    def singular_at_origin(self) -> bool:
        return False

    def eval_points(self, points: np.ndarray) -> np.ndarray:
        vals = self.base.eval_points(points)
        # +inf kernel values clip to a zero negative part without NaNs
        return np.maximum(-vals, 0.0)


def eval(spec: PotentialSpec, x) -> float:  # noqa: A001 - mirrors the operation name
    return spec.eval(x)


def split(spec: PotentialSpec, x) -> tuple[float, float]:
    return spec.split(x)


def relax(spec: PotentialSpec, lam: float) -> RelaxedPotential:
    return spec.relax(lam)


def _negative_part_radial(spec: PotentialSpec, radii: np.ndarray) -> np.ndarray:
    """V^- sampled along radii, with the argument stretch for aniso_log."""
    with np.errstate(divide="ignore"):
        vals = spec._radial(radii)
    return np.maximum(-vals, 0.0)


def _aniso_stretch(spec: PotentialSpec) -> float:
    if spec.family == ANISO_LOG:
        return float(np.linalg.svd(np.asarray(spec.matrix), compute_uv=False)[0])
    return 1.0


def coarse_modulus(
    spec: PotentialSpec, search_radius: float = 64.0, resolution: float = 1.0 / 256.0
) -> float:
    """Numerical sup of |V^-(x) - V^-(y)| over pairs with |x - y| <= 1.

    For radial kernels the sup reduces to radii r1, r2 with |r1 - r2| <= 1,
    scanned by a sliding window of width one over a dense radial sampling.
    The anisotropic log is radial in |A x|, where unit steps in x reach
    |A x|-steps up to the top singular value of A; the window widens
    accordingly.  The estimate is a lower bound converging from below as the
    resolution shrinks; a profile still growing at the boundary of the scan
    returns math.inf to flag an unbounded modulus.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    window = _aniso_stretch(spec)
    radii = np.arange(0.0, search_radius + window + resolution, resolution)
    if spec.family == CUSTOM:
        radii = radii[radii <= spec.profile[0][-1]]
        if len(radii) < 2:
            return 0.0
    neg = _negative_part_radial(spec, radii)
    if not np.all(np.isfinite(neg)):
        return math.inf
    # windows of k+1 consecutive samples span exactly the unit (or stretched)
    # pair distance; every admissible pair lies inside one such window
    k = max(int(round(window / resolution)), 1)
    size = k + 1
    osc = maximum_filter1d(neg, size) - minimum_filter1d(neg, size)
    modulus = float(osc.max())
    # divergence proxy: oscillation still climbing at the scan boundary
    edge = osc[int(len(osc) * 0.9) :]
    bulk = osc[: int(len(osc) * 0.8)]
    if len(bulk) and len(edge) and edge.max() > 1.05 * max(bulk.max(), 1e-300):
        return math.inf
    return modulus


@dataclass
class AssumptionReport:
    """Outcome of the four structural checks on a potential.

    ``integrability``      - positive part numerically in L^q and the p-q
                             exponent bound holds;
    ``coarse_continuity``  - finite unit-scale modulus of the negative part;
    ``positive_interaction`` - the self-interaction integral of a bump is
                             positive;
    ``confinement``        - the kernel decreases below zero along growing
                             probe radii.
    """

    integrability: bool
    coarse_continuity: bool
    positive_interaction: bool
    confinement: bool
    details: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return (
            self.integrability
            and self.coarse_continuity
            and self.positive_interaction
            and self.confinement
        )

    @property
    def failed(self) -> list[str]:
        return [
            name
            for name, ok in [
                ("integrability", self.integrability),
                ("coarse_continuity", self.coarse_continuity),
                ("positive_interaction", self.positive_interaction),
                ("confinement", self.confinement),
            ]
            if not ok
        ]


def default_bump(grid: Grid, radius: float = 1.0) -> Field:
    """Squared-cosine bump supported in the centered ball; C^1 and >= 0."""
    r = grid.radii()
    vals = np.where(r <= radius, np.cos(np.pi * r / (2.0 * radius)) ** 2, 0.0)
    return Field(grid, vals)


def _positive_part_lq_converges(spec: PotentialSpec, q: float) -> tuple[bool, float]:
    """Numerical L^q test for V^+ by geometric refinement at both ends.

    Integrates |V^+|^q r^(ndim-1) over nested annuli; convergence is read off
    the increments shrinking geometrically toward the origin and toward
    infinity.  Anisotropic kernels reduce to the radial profile in s = |A x|
    with a constant Jacobian factor, which cannot change convergence.
    """

    def pos_pow(r: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", over="ignore"):
            v = spec._radial(r)
        return np.maximum(v, 0.0) ** q

    def annulus(a: float, b: float) -> float:
        r = np.linspace(a, b, 257)
        return float(np.trapezoid(pos_pow(r) * r ** (spec.ndim - 1), r))

    if spec.family == CUSTOM:
        r_hi = spec.profile[0][-1]
        total = annulus(max(spec.profile[0][0], 1e-12), r_hi)
        return bool(np.isfinite(total)), total

    # geometric annuli toward the singularity and toward infinity; the tail
    # of increments must either vanish or decay clearly (three-octave ratio
    # below 0.9 tolerates logarithmic prefactors)
    def tail_converges(incs: list[float], total: float) -> bool:
        scale = max(abs(total), 1e-300)
        return incs[-1] <= 1e-12 * scale or incs[-1] < 0.9 * incs[-4]

    total = annulus(1.0, 2.0)
    inner = [annulus(2.0**-k, 2.0 ** -(k - 1)) for k in range(1, 27)]
    outer = [annulus(2.0**k, 2.0 ** (k + 1)) for k in range(1, 27)]
    total += sum(inner) + sum(outer)
    ok = (
        tail_converges(inner, total)
        and tail_converges(outer, total)
        and bool(np.isfinite(total))
    )
    return ok, total


def check_assumptions(spec: PotentialSpec, bump: Field) -> AssumptionReport:
    """Run the four structural checks; failures are report entries, not faults.

    The interaction check is existential, so if the supplied bump gives a
    nonpositive integral the check retries with the bump shrunk onto smaller
    balls before reporting failure.  The confinement check is a finite proxy:
    values at radii R, 2R, 4R (R = 10 box half-widths) must strictly decrease
    and end below zero.
    """
    from .convolution import conv_fft, sample_kernel

    details: dict = {}

    # positive-part integrability plus the exponent inequality
    exp_ok = (1.0 / spec.p) * (1.0 - 1.0 / (2.0 * spec.q)) >= 0.5 - 1.0 / spec.ndim - 1e-15
    lq_ok, lq_val = _positive_part_lq_converges(spec, spec.q)
    details["positive_part_lq"] = lq_val
    details["exponent_inequality"] = exp_ok
    v1 = exp_ok and lq_ok

    # finite coarse modulus
    modulus = coarse_modulus(spec)
    details["coarse_modulus"] = modulus
    v2 = math.isfinite(modulus)

    # positive self-interaction of a compactly supported bump
    grid = bump.grid
    v3 = False
    v3_value = None
    candidates = [bump, default_bump(grid, radius=0.5), default_bump(grid, radius=0.25)]
    try:
        kern = sample_kernel(spec, grid)
        for cand in candidates:
            dens = np.abs(cand.values) ** spec.p
            conv = conv_fft(kern, Field(grid, dens))
            val = grid.cell_volume * float(np.sum(conv.values * dens))
            if v3_value is None:
                v3_value = val
            if val > 0.0:
                v3 = True
                v3_value = val
                break
    except DomainError:
        v3 = False
    details["interaction_integral"] = v3_value

    # decay to -infinity probed at three radii
    probe = 10.0 * grid.half_width
    try:
        samples = [spec.eval([probe * m] + [0.0] * (spec.ndim - 1)) for m in (1.0, 2.0, 4.0)]
        v4 = samples[0] > samples[1] > samples[2] and samples[2] < 0.0
        details["confinement_samples"] = samples
    except DomainError:
        v4 = False
        details["confinement_samples"] = None

    return AssumptionReport(v1, v2, v3, v4, details)


def require_assumptions(spec: PotentialSpec, bump: Field) -> AssumptionReport:
    """As :func:`check_assumptions`, but raise on any failure."""
    report = check_assumptions(spec, bump)
    if not report.all_passed:
        raise AssumptionFailure(
            f"potential fails: {', '.join(report.failed)}", failed=report.failed
        )
    return report
