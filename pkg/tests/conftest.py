import numpy as np
import pytest

from choquard import (
    ContinuationPlan,
    Grid,
    PotentialSpec,
    ProblemSpec,
    gaussian,
    run_continuation,
)
from choquard.oracle import find_groundstate_radial

REF_L = 20.0
REF_N = 1024


def reference_potential() -> PotentialSpec:
    return PotentialSpec("newton1d", p=2.0, q=1.0, ndim=1)


def reference_problem(n: int = REF_N) -> ProblemSpec:
    return ProblemSpec(reference_potential(), Grid(1, REF_L, n), 0.0)


def reference_plan() -> ContinuationPlan:
    return ContinuationPlan(
        lambda0=1.0,
        ratio=2.0,
        max_stages=12,
        stage_tol=1e-10,
        limit_tol=1e-6,
        tail_radius=10.0,
    )


@pytest.fixture(scope="session")
def ref_report():
    """Converged continuation on the reference problem (newton kernel, p=2,
    L=20, n=1024, levels 2^k)."""
    return run_continuation(reference_problem(), reference_plan())


@pytest.fixture(scope="session")
def ref_report_fine():
    """Same problem at n=2048 for refinement comparisons."""
    return run_continuation(reference_problem(n=2 * REF_N), reference_plan())


@pytest.fixture(scope="session")
def shifted_report():
    """Reference problem started from a lattice-shifted Gaussian.

    Three units snap to 77 cells so the initial shift lies in the exact
    translation symmetry group of the discretization.
    """
    base = reference_problem()
    cells = round(3.0 / base.grid.h)
    init = gaussian(base.grid, sigma=REF_L / 8.0, center=cells * base.grid.h)
    return run_continuation(base, reference_plan(), init=init)


@pytest.fixture(scope="session")
def oracle_profile():
    """Bisected radial groundstate for the reference kernel."""
    return find_groundstate_radial("newton1d", (0.1, 8.0), tol=1e-13)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
