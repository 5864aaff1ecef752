"""Groundstates of Choquard equations with sign-changing kernels.

The equation -lap(u) + u = (V * |u|^p) |u|^(p-2) u is solved by maximizing
the nonlocal interaction over the discrete H^1 unit sphere for a truncated
kernel max(V, -lambda), driving the truncation level to convergence, and
rescaling the maximizer into a solution.  The package ships the kernel
catalogue with its structural checks, the exact zero-padded convolution
machinery, the sphere optimizer and continuation driver, an independent
radial shooting oracle, and numerical experiments for the identities that
justify the scheme.
"""

from .continuation import (
    CertificateResult,
    ContinuationPlan,
    GroundstateReport,
    groundstate_certificate,
    run_continuation,
    tail_mass,
)
from .convolution import SampledKernel, conv_bruteforce, conv_fft, sample_kernel
from .errors import ChoquardError
from .functional import (
    ProblemSpec,
    el_residual,
    energy_I,
    eval_J,
    grad_J,
    mu_estimate,
    nehari_residual,
    scale_to_solution,
)
from .grid import (
    Field,
    Grid,
    gaussian,
    h1_inner,
    h1_norm_sq,
    lp_norm_pow,
    normalize_h1,
    read_field,
    recenter,
    translate,
    write_field,
)
from .identities import brezis_lieb_defect, coarse_lipschitz_check, young_check
from .optimize import SolverState, ascend_step, lions_concentration, solve_relaxed
from .oracle import RadialProfile, find_groundstate_radial, shoot_radial
from .potentials import (
    AssumptionReport,
    PotentialSpec,
    RelaxedPotential,
    check_assumptions,
    coarse_modulus,
    default_bump,
)

__all__ = [
    "AssumptionReport",
    "CertificateResult",
    "ChoquardError",
    "ContinuationPlan",
    "Field",
    "Grid",
    "GroundstateReport",
    "PotentialSpec",
    "ProblemSpec",
    "RadialProfile",
    "RelaxedPotential",
    "SampledKernel",
    "SolverState",
    "ascend_step",
    "brezis_lieb_defect",
    "check_assumptions",
    "coarse_lipschitz_check",
    "coarse_modulus",
    "conv_bruteforce",
    "conv_fft",
    "default_bump",
    "el_residual",
    "energy_I",
    "eval_J",
    "find_groundstate_radial",
    "gaussian",
    "grad_J",
    "groundstate_certificate",
    "h1_inner",
    "h1_norm_sq",
    "lions_concentration",
    "lp_norm_pow",
    "mu_estimate",
    "nehari_residual",
    "normalize_h1",
    "read_field",
    "recenter",
    "run_continuation",
    "sample_kernel",
    "scale_to_solution",
    "shoot_radial",
    "solve_relaxed",
    "tail_mass",
    "translate",
    "write_field",
    "young_check",
]

__version__ = "0.1.0"
