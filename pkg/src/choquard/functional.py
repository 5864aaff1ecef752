"""The relaxed nonlocal objective, its gradient, energies and residuals.

All quantities are built from the double integral

    J(u) = h^ndim * sum (K * |u|^p) |u|^p

with K the relaxed kernel by default, or the raw kernel on request.  J is
homogeneous of degree 2p, which the scaling from maximizer to solution and
the energy identity both exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .convolution import SampledKernel, conv_values, sample_kernel
from .errors import DegenerateDenominator, GridMismatch, NonpositiveA
from .grid import Field, Grid, h1_norm_sq, laplacian
from .potentials import NegativePart, PotentialSpec, RelaxedPotential


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """A potential bound to a grid at one relaxation level."""

    potential: PotentialSpec
    grid: Grid
    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.potential.ndim != self.grid.ndim:
            raise GridMismatch(
                f"potential is {self.potential.ndim}d, grid is {self.grid.ndim}d"
            )

    @property
    def p(self) -> float:
        return self.potential.p

    def at_lambda(self, lam: float) -> "ProblemSpec":
        return ProblemSpec(self.potential, self.grid, lam)

    @cached_property
    def relaxed_kernel(self) -> SampledKernel:
        return sample_kernel(RelaxedPotential(self.potential, self.lam), self.grid)

    @cached_property
    def raw_kernel(self) -> SampledKernel:
        return sample_kernel(self.potential, self.grid)

    @cached_property
    def relaxed_negative_kernel(self) -> SampledKernel:
        return sample_kernel(
            NegativePart(RelaxedPotential(self.potential, self.lam)), self.grid
        )

    def kernel(self, relaxed: bool = True) -> SampledKernel:
        return self.relaxed_kernel if relaxed else self.raw_kernel


def density(spec: ProblemSpec, u: Field) -> np.ndarray:
    return np.abs(u.values) ** spec.p


def signed_density(spec: ProblemSpec, u: Field) -> np.ndarray:
    """|u|^(p-2) u, continuously extended by zero at u = 0 (valid for p >= 2)."""
    if spec.p == 2.0:
        return u.values
    return np.abs(u.values) ** (spec.p - 2.0) * u.values


def eval_J(spec: ProblemSpec, u: Field, relaxed: bool = True) -> float:
    """The nonlocal double integral; may be negative."""
    dens = density(spec, u)
    conv = conv_values(spec.kernel(relaxed), dens)
    return spec.grid.cell_volume * float(np.sum(conv * dens))


def grad_J(spec: ProblemSpec, u: Field, relaxed: bool = True) -> Field:
    """L^2 gradient 2p (K * |u|^p) |u|^(p-2) u of :func:`eval_J`."""
    dens = density(spec, u)
    conv = conv_values(spec.kernel(relaxed), dens)
    return Field(u.grid, 2.0 * spec.p * conv * signed_density(spec, u))


def energy_I(spec: ProblemSpec, u: Field, relaxed: bool = False) -> float:
    """Action value: half the H^1 energy minus the interaction over 2p."""
    return 0.5 * h1_norm_sq(u) - eval_J(spec, u, relaxed=relaxed) / (2.0 * spec.p)


def scale_to_solution(w: Field, a_hat: float, p: float) -> Field:
    """Rescale a unit-sphere maximizer into a solution of the equation.

    By 2p-homogeneity, w maximizing the interaction at level a_hat turns into
    a solution under u = a_hat^(-1/(2p-2)) w.
    """
    if a_hat <= 0:
        raise NonpositiveA(f"scaling requires a positive level, got {a_hat}")
    return Field(w.grid, a_hat ** (-1.0 / (2.0 * p - 2.0)) * w.values)


def nehari_residual(spec: ProblemSpec, u: Field, relaxed: bool = True) -> float:
    """Signed defect of the test-against-the-solution identity:
    interaction integral minus H^1 energy; approximately zero at solutions."""
    return eval_J(spec, u, relaxed=relaxed) - h1_norm_sq(u)


def el_residual(spec: ProblemSpec, u: Field, relaxed: bool = True) -> float:
    """Discrete L^2 norm of -lap(u) + u - (K * |u|^p)|u|^(p-2)u.

    Uses the three-point Laplacian; at a converged maximizer this is pure
    discretization error and shrinks at second order under mesh refinement.
    """
    dens = density(spec, u)
    conv = conv_values(spec.kernel(relaxed), dens)
    res = -laplacian(u).values + u.values - conv * signed_density(spec, u)
    return float(np.sqrt(spec.grid.cell_volume * np.sum(res * res)))


def mu_estimate(spec: ProblemSpec, w: Field, a_hat: float) -> float:
    """Least-squares Lagrange defect of the limit equation.

    Fits the scalar mu minimizing
        || a_hat (-lap(w) + w) - (V * |w|^p)|w|^(p-2)w - mu |w|^(p-2)w ||_{L^2}
    against the raw (unrelaxed) kernel; at the true limit mu vanishes, so the
    fitted value doubles as a convergence diagnostic.
    """
    s = signed_density(spec, w)
    denom = float(np.sum(s * s))
    if denom == 0.0:
        raise DegenerateDenominator("|w|^(p-2) w vanishes identically")
    dens = density(spec, w)
    conv = conv_values(spec.raw_kernel, dens)
    res = a_hat * (-laplacian(w).values + w.values) - conv * s
    return float(np.sum(res * s) / denom)
