import numpy as np
import pytest

from choquard.convolution import conv_bruteforce, sample_kernel
from choquard.errors import BadBracket, UnsupportedProblem
from choquard.functional import ProblemSpec, el_residual
from choquard.grid import Field, Grid
from choquard.oracle import (
    BLOWUP,
    CROSSED_ZERO,
    find_groundstate_radial,
    linf_relative_gap,
    shoot_radial,
)
from choquard.potentials import PotentialSpec

# critical shooting parameter of the scaled 1d system at dr = 1e-3, r_max = 14
U0_NEWTON_REFERENCE = 1.5583977884816


def test_shot_classification_monotone_in_u0():
    assert shoot_radial("newton1d", 0.05).event == CROSSED_ZERO
    assert shoot_radial("newton1d", 30.0).event == BLOWUP
    assert shoot_radial("log2d", 0.05).event == CROSSED_ZERO
    assert shoot_radial("log2d", 30.0).event == BLOWUP


def test_unsupported_problem():
    with pytest.raises(UnsupportedProblem):
        shoot_radial("newton1d", 1.0, p=3.0)
    with pytest.raises(UnsupportedProblem):
        shoot_radial("aniso_log", 1.0)


def test_bad_bracket():
    with pytest.raises(BadBracket):
        find_groundstate_radial("newton1d", (0.01, 0.02))  # both undershoot
    with pytest.raises(BadBracket):
        find_groundstate_radial("newton1d", (30.0, 40.0))  # both blow up
    with pytest.raises(BadBracket):
        find_groundstate_radial("newton1d", (2.0, 1.0))


def test_tiny_bracket_returns_midpoint_shot():
    lo = U0_NEWTON_REFERENCE - 5e-14
    hi = U0_NEWTON_REFERENCE + 5e-14
    profile = find_groundstate_radial("newton1d", (lo, hi), tol=1e-12)
    assert profile.u0 == pytest.approx(0.5 * (lo + hi), abs=1e-12)


def test_bisected_u0_reference_value(oracle_profile):
    assert oracle_profile.u0 == pytest.approx(U0_NEWTON_REFERENCE, abs=1e-10)
    # peak of the scaled shot is its initial value; physical peak is sigma^2 u0
    assert np.max(oracle_profile.u) == pytest.approx(
        oracle_profile.sigma**2 * oracle_profile.u0, rel=1e-12
    )


def test_rk4_fourth_order_in_dr():
    u0s = []
    for dr in (4e-3, 2e-3, 1e-3):
        prof = find_groundstate_radial("newton1d", (0.1, 8.0), tol=1e-13, dr=dr)
        u0s.append(prof.u0)
    d1 = abs(u0s[0] - u0s[1])
    d2 = abs(u0s[1] - u0s[2])
    assert 8.0 < d1 / d2 < 32.0  # ratio of successive defects near 16


def test_ode_potential_matches_convolution(oracle_profile):
    # Phi from the shooting system must agree with the grid convolution of
    # the interpolated profile: validates the reduction constants and signs
    grid = Grid(1, 20.0, 1024)
    u = oracle_profile.to_field(grid)
    pot = PotentialSpec("newton1d", p=2.0, q=1.0, ndim=1)
    kern = sample_kernel(pot, grid)
    phi_conv = conv_bruteforce(kern, Field(grid, u.values**2)).values
    phi_ode = np.interp(
        np.abs(grid.axis()), oracle_profile.r, oracle_profile.phi
    )
    inside = np.abs(grid.axis()) < 8.0
    assert np.max(np.abs(phi_conv - phi_ode)[inside]) < 1e-3


def test_log2d_groundstate_consistency():
    profile = find_groundstate_radial("log2d", (0.5, 20.0), tol=1e-11, r_max=10.0)
    grid = Grid(2, 8.0, 128)
    u = profile.to_field(grid)
    pot = PotentialSpec("log2d", p=2.0, q=2.0, ndim=2)
    kern = sample_kernel(pot, grid)
    from choquard.convolution import conv_fft

    phi_conv = conv_fft(kern, Field(grid, u.values**2)).values
    phi_ode = np.interp(grid.radii(), profile.r, profile.phi)
    # compare only where the profile tabulates Phi (interp clamps beyond)
    inside = grid.radii() < 0.9 * profile.r[-1]
    scale = np.max(np.abs(phi_ode[inside]))
    assert np.max(np.abs(phi_conv - phi_ode)[inside]) < 2e-2 * scale


def test_oracle_beats_solver_residual(ref_report, oracle_profile):
    grid = ref_report.u.grid
    spec = ProblemSpec(PotentialSpec("newton1d", p=2.0, q=1.0, ndim=1), grid, 0.0)
    r_solver = el_residual(spec, ref_report.u, relaxed=False)
    r_oracle = el_residual(spec, oracle_profile.to_field(grid), relaxed=False)
    assert r_oracle < r_solver


def test_solver_matches_oracle(ref_report, oracle_profile):
    gap = linf_relative_gap(ref_report.u, oracle_profile)
    assert gap < 1e-2


def test_profile_csv_roundtrip(tmp_path, oracle_profile):
    path = tmp_path / "profile.csv"
    oracle_profile.write_csv(path)
    rows = np.loadtxt(path, delimiter=",", skiprows=1)
    assert rows.shape[1] == 3
    assert rows[0, 1] == pytest.approx(np.max(oracle_profile.u))
