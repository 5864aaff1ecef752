import numpy as np
import pytest

from choquard.errors import InfiniteModulus, MarginViolation
from choquard.functional import ProblemSpec
from choquard.grid import Field, Grid, gaussian
from choquard.identities import (
    brezis_lieb_defect,
    coarse_lipschitz_check,
    gaussian_mixture,
    young_check,
    young_sweep,
)
from choquard.potentials import PotentialSpec


def newton_spec(lam=10.0, n=2048, L=32.0):
    pot = PotentialSpec("newton1d", p=2.0, q=1.0, ndim=1)
    return ProblemSpec(pot, Grid(1, L, n), lam)


def log_spec(lam=1.0, n=128, L=8.0):
    pot = PotentialSpec("log2d", p=2.0, q=2.0, ndim=2)
    return ProblemSpec(pot, Grid(2, L, n), lam)


def test_brezis_lieb_degenerate_cases():
    spec = newton_spec()
    u = gaussian(spec.grid, 1.0)
    zero = Field.zeros(spec.grid)
    # v = 0: the identity collapses to equality
    assert brezis_lieb_defect(spec, u, zero, 4.0) < 1e-10
    # u = 0: both sides vanish termwise
    assert brezis_lieb_defect(spec, zero, u, 4.0) < 1e-10


def test_brezis_lieb_decay_in_separation():
    spec = newton_spec()
    u = gaussian(spec.grid, 1.0)
    v = gaussian(spec.grid, 1.0)
    seps = []
    for target in (4.0, 8.0, 16.0):
        cells = round(target / spec.grid.h)
        seps.append(cells * spec.grid.h)
    defects = [brezis_lieb_defect(spec, u, v, s) for s in seps]
    assert defects[1] < defects[0]
    assert defects[2] < defects[1]
    assert defects[2] <= defects[0] / 2.0


def test_brezis_lieb_separation_validation():
    spec = newton_spec()
    u = gaussian(spec.grid, 1.0)
    with pytest.raises(ValueError):
        brezis_lieb_defect(spec, u, u, spec.grid.h * 2.5)
    wide = gaussian(spec.grid, 6.0)
    with pytest.raises(MarginViolation):
        brezis_lieb_defect(spec, wide, wide, 1024 * spec.grid.h)


def test_young_trivial_and_single_cell():
    spec = newton_spec(lam=0.0, n=64, L=8.0)
    lhs, rhs = young_check(spec, Field.zeros(spec.grid))
    assert (lhs, rhs) == (0.0, 0.0)
    vals = np.zeros(64)
    vals[10] = 1.0
    lhs, rhs = young_check(spec, Field(spec.grid, vals))
    from choquard.convolution import sample_kernel
    from choquard.potentials import PositivePart

    kp = sample_kernel(PositivePart(spec.potential), spec.grid)
    assert lhs == pytest.approx(spec.grid.cell_volume**2 * kp.origin_value, rel=1e-12)
    assert lhs <= rhs


def test_young_sweep_newton_and_log():
    v1, worst1, rows1 = young_sweep(newton_spec(lam=0.0, n=512, L=8.0), 100, 1234)
    assert v1 == 0
    assert worst1 <= 1e-9
    assert len(rows1) == 100
    v2, worst2, rows2 = young_sweep(log_spec(), 100, 1234)
    assert v2 == 0
    assert worst2 <= 1e-9


def test_young_mixture_fields_are_nonnegative(rng):
    grid = Grid(2, 8.0, 64)
    f = gaussian_mixture(grid, rng)
    assert np.all(f.values >= 0.0)
    assert np.max(f.values) > 0.0


def test_coarse_lipschitz_examples():
    spec = PotentialSpec("newton1d", p=2.0, q=1.0, ndim=1)
    # closed-form pair check: x = 0, y = 10 gives |0 - 4| over (10+1) * 0.5
    from choquard.potentials import NegativePart, coarse_modulus

    neg = NegativePart(spec)
    modulus = coarse_modulus(spec, search_radius=34.0)
    vx = float(neg.eval_points(np.array([[0.0]]))[0])
    vy = float(neg.eval_points(np.array([[10.0]]))[0])
    assert abs(vx - vy) == pytest.approx(4.0)
    assert abs(vx - vy) / ((10.0 + 1.0) * modulus) == pytest.approx(8.0 / 11.0, rel=1e-12)


def test_coarse_lipschitz_sweeps():
    newton = PotentialSpec("newton1d", p=2.0, q=1.0, ndim=1)
    power = PotentialSpec("power_diff", p=2.0, q=1.0, ndim=1, alpha=0.5, beta=1.0)
    for spec in (newton, power):
        ratio = coarse_lipschitz_check(spec, samples=10000, radius=30.0, seed=99)
        assert ratio <= 1.0 + 1e-6
    # identical points give ratio zero
    assert coarse_lipschitz_check(newton, samples=10, radius=1e-9, seed=1) == 0.0


def test_coarse_lipschitz_constant_potential():
    spec = PotentialSpec(
        "custom", p=2.0, q=1.0, ndim=1, profile=((0.0, 1000.0), (-3.0, -3.0))
    )
    assert coarse_lipschitz_check(spec, samples=500, radius=20.0, seed=7) == 0.0


def test_coarse_lipschitz_infinite_modulus():
    # a quadratic negative tail has unbounded unit-scale oscillation
    radii = tuple(np.linspace(0.0, 200.0, 401))
    vals = tuple(-(float(r) ** 2) for r in radii)
    spec = PotentialSpec("custom", p=2.0, q=1.0, ndim=1, profile=(radii, vals))
    with pytest.raises(InfiniteModulus):
        coarse_lipschitz_check(spec, samples=100, radius=60.0, seed=3)
