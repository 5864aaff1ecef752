import math

import numpy as np
import pytest

from choquard.errors import DomainError, NegativeLambda, SingularPoint
from choquard.grid import Grid
from choquard.potentials import (
    NegativePart,
    PositivePart,
    PotentialSpec,
    RelaxedPotential,
    check_assumptions,
    coarse_modulus,
    default_bump,
    relax,
    split,
)


def newton():
    return PotentialSpec("newton1d", p=2.0, q=1.0, ndim=1)


def log2d():
    return PotentialSpec("log2d", p=2.0, q=2.0, ndim=2)


def power_diff(alpha=0.5, beta=1.0, ndim=1):
    return PotentialSpec("power_diff", p=2.0, q=1.0, ndim=ndim, alpha=alpha, beta=beta)


def aniso(diag=(1.0, 2.0)):
    return PotentialSpec(
        "aniso_log", p=2.0, q=2.0, ndim=2,
        matrix=((diag[0], 0.0), (0.0, diag[1])),
    )


def constant_minus_one(ndim=1):
    return PotentialSpec(
        "custom", p=2.0, q=1.0, ndim=ndim,
        profile=((0.0, 1000.0), (-1.0, -1.0)),
    )


def test_eval_reference_points():
    assert newton().eval(0.0) == 1.0
    assert newton().eval(2.0) == 0.0
    assert log2d().eval((1.0, 0.0)) == 0.0
    assert power_diff().eval(1.0) == 0.0


def test_eval_errors():
    with pytest.raises(SingularPoint):
        log2d().eval((0.0, 0.0))
    with pytest.raises(SingularPoint):
        PotentialSpec("riesz", p=2.0, q=1.0, ndim=1, alpha=0.5).eval(0.0)
    with pytest.raises(SingularPoint):
        aniso().eval((0.0, 0.0))
    with pytest.raises(DomainError):
        newton().eval((1.0, 1.0))


def test_potential_spec_validation():
    with pytest.raises(ValueError):
        PotentialSpec("newton1d", p=1.5, q=1.0, ndim=1)  # p < 2
    with pytest.raises(ValueError):
        PotentialSpec("newton1d", p=2.0, q=0.5, ndim=1)  # q < 1
    with pytest.raises(DomainError):
        PotentialSpec("newton1d", p=2.0, q=1.0, ndim=2)
    with pytest.raises(DomainError):
        PotentialSpec("log2d", p=2.0, q=1.0, ndim=1)
    with pytest.raises(ValueError):
        power_diff(alpha=1.0, beta=0.5)  # alpha >= beta
    with pytest.raises(ValueError):
        power_diff(alpha=0.5, beta=1.5)  # beta > 1
    with pytest.raises(ValueError):
        PotentialSpec("power_diff", p=2.0, q=1.0, ndim=1, alpha=-1.5, beta=1.0)
    # in one and two dimensions the p-q exponent bound has a nonpositive
    # right-hand side, so every admissible pair satisfies it
    PotentialSpec("log2d", p=200.0, q=1.0, ndim=2)


def test_split_examples():
    assert split(newton(), 6.0) == (0.0, 2.0)
    assert split(newton(), 0.0) == (1.0, 0.0)
    vplus, vminus = split(log2d(), (math.e, 0.0))
    assert vplus == 0.0
    assert vminus == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-14)


def test_split_consistency(rng):
    spec = power_diff()
    for x in rng.uniform(0.1, 30.0, 50):
        vplus, vminus = split(spec, float(x))
        assert vplus >= 0 and vminus >= 0
        assert min(vplus, vminus) == 0.0
        assert vplus - vminus == pytest.approx(spec.eval(float(x)), rel=1e-14)


def test_evenness_exact(rng):
    specs = [newton(), power_diff(), constant_minus_one()]
    for spec in specs:
        for x in rng.uniform(0.1, 10.0, 20):
            assert spec.eval(float(x)) == spec.eval(float(-x))
    for spec in [log2d(), aniso((1.0, 2.0))]:
        pts = rng.uniform(0.1, 10.0, (20, 2))
        assert np.array_equal(spec.eval_points(pts), spec.eval_points(-pts))


def test_relaxation_semantics():
    spec = newton()
    rel = relax(spec, 3.0)
    # max{V(x0), -lam} at a point where V = -7.2: x = 16.4
    assert rel.eval(16.4) == pytest.approx(-3.0)
    assert rel.eval(0.0) == pytest.approx(1.0)  # positive values unchanged
    rel0 = relax(spec, 0.0)
    assert rel0.eval(10.0) == 0.0  # lam = 0 is the positive part
    with pytest.raises(NegativeLambda):
        relax(spec, -1.0)


def test_relaxation_sandwich_and_monotonicity(rng):
    spec = newton()
    xs = rng.uniform(0.0, 40.0, 200)
    pts = xs[:, None]
    v = spec.eval_points(pts)
    for lam1, lam2 in [(0.0, 1.0), (1.0, 5.0), (5.0, 50.0)]:
        v1 = RelaxedPotential(spec, lam1).eval_points(pts)
        v2 = RelaxedPotential(spec, lam2).eval_points(pts)
        assert np.all(v1 >= v2)  # smaller lam truncates more
        assert np.all(v2 >= v)
        assert np.all(v1 >= -lam1)


def test_positive_negative_parts_vectorized(rng):
    spec = log2d()
    pts = rng.uniform(-5, 5, (100, 2))
    vals = spec.eval_points(pts)
    pos = PositivePart(spec).eval_points(pts)
    neg = NegativePart(spec).eval_points(pts)
    assert np.allclose(pos - neg, vals)
    assert np.all(np.minimum(pos, neg) == 0.0)


def test_coarse_modulus_newton_is_half():
    # V^- = max(|x|/2 - 1, 0) has slope 1/2; sup over unit pairs is exactly 0.5
    assert coarse_modulus(newton()) == pytest.approx(0.5, abs=1e-12)


def test_coarse_modulus_log2d():
    # oscillation of (1/2pi) max(log r, 0) over [r, r+1] peaks at r = 1
    expected = math.log(2.0) / (2.0 * math.pi)
    assert coarse_modulus(log2d()) == pytest.approx(expected, rel=1e-9)


def test_coarse_modulus_constant_potential():
    assert coarse_modulus(constant_minus_one()) == 0.0


def test_coarse_modulus_power_diff_near_one():
    # V^- -> (r - sqrt(r)) for r > 1: window oscillation approaches 1
    m = coarse_modulus(power_diff(), search_radius=64.0)
    assert 0.8 < m < 1.0


def test_coarse_lipschitz_bound_from_modulus(rng):
    # |V^-(x) - V^-(y)| <= (|x-y| + 1) * modulus on sampled pairs
    spec = newton()
    m = coarse_modulus(spec, search_radius=34.0)
    xs = rng.uniform(-30, 30, 200)
    ys = rng.uniform(-30, 30, 200)
    neg = NegativePart(spec)
    vx = neg.eval_points(xs[:, None])
    vy = neg.eval_points(ys[:, None])
    assert np.all(np.abs(vx - vy) <= (np.abs(xs - ys) + 1.0) * m + 1e-12)


def test_check_assumptions_accepts_catalogue():
    cases = [
        (newton(), Grid(1, 20.0, 256)),
        (log2d(), Grid(2, 8.0, 64)),
        (power_diff(), Grid(1, 20.0, 256)),
        (aniso((1.0, 2.0)), Grid(2, 8.0, 64)),
    ]
    for spec, grid in cases:
        report = check_assumptions(spec, default_bump(grid))
        assert report.all_passed, f"{spec.family}: failed {report.failed}"


def test_check_assumptions_rejects_constant():
    grid = Grid(1, 20.0, 256)
    report = check_assumptions(constant_minus_one(), default_bump(grid))
    assert not report.all_passed
    assert "positive_interaction" in report.failed
    assert "confinement" in report.failed
    assert report.integrability and report.coarse_continuity


def test_check_assumptions_flags_bad_riesz_integrability():
    # a Riesz kernel is never in a single Lebesgue class on the whole space
    spec = PotentialSpec("riesz", p=2.0, q=1.0, ndim=2, alpha=1.0)
    report = check_assumptions(spec, default_bump(Grid(2, 8.0, 64)))
    assert not report.integrability
    assert not report.confinement  # positive kernel cannot sink below zero


def test_custom_profile_out_of_range():
    spec = PotentialSpec(
        "custom", p=2.0, q=1.0, ndim=1, profile=((0.0, 5.0), (1.0, -1.0))
    )
    with pytest.raises(DomainError):
        spec.eval(6.0)


def test_custom_profile_validation():
    with pytest.raises(ValueError):
        PotentialSpec("custom", p=2.0, q=1.0, ndim=1, profile=((0.0,), (1.0,)))
    with pytest.raises(ValueError):
        PotentialSpec(
            "custom", p=2.0, q=1.0, ndim=1, profile=((1.0, 0.5), (1.0, 2.0))
        )
