"""Independent radial solutions by shooting, for cross-validating the solver.

Reduction (derived here, unit-tested against the brute-force convolution):
for the quadratic interaction (p = 2) the equation couples u with the
induced interaction potential Phi = V * u^2.  Writing S = 1 - Phi turns the
pair into the local autonomous-in-structure system

    1d kernel 1 - |x|/2:  u'' = S u,            S'' = u^2
    2d kernel log:        Lap_r u = S u,        Lap_r S = u^2

because the affine/log kernels solve a Poisson-type identity:
d^2/dx^2 (V * f) = -f for the 1d kernel (the slope of 1 - |x|/2 integrates
the mass; the affine offset contributes the total mass to Phi(0)), and
Lap((1/2pi) log(1/|x|) * f) = -f in 2d.  The system is invariant under
(u, S) -> (c^2 u(c .), c^2 S(c .)), so one shoots the scaled frame with
S(0) = -1 and a single parameter u0 = u(0): undershoots cross zero,
overshoots blow up, and the separatrix between them is the groundstate.

The physical solution is recovered as u = sigma^2 u_hat(sigma x), where
sigma restores the one identity the scaling broke, namely the value of
Phi(0) as an integral of the solution itself:

    1d:  Phi(0) = 2 I0 - I1,   I0 = int u^2 dr, I1 = int r u^2 dr
    2d:  Phi(0) = -int r log(r) u^2 dr

which combined with Phi(0) = 1 + sigma^2 gives one scalar root problem in
sigma with exactly one positive root.

This reduction is specific to p = 2 (the classical quadratic case); other
exponents have no such scaling and are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BadBracket, UnsupportedProblem
from .grid import Field, Grid, recenter

NEWTON_1D = "newton1d"
LOG_2D = "log2d"

BLOWUP = "blowup"
CROSSED_ZERO = "crossed_zero"
DECAYED = "decayed"

_BLOWUP_FACTOR = 1.05


def _check_problem(problem: str, p: float) -> None:
    if problem not in (NEWTON_1D, LOG_2D):
        raise UnsupportedProblem(f"no radial reduction for problem {problem!r}")
    if p != 2.0:
        raise UnsupportedProblem(
            f"radial reduction only available for p = 2, got p = {p}"
        )


@dataclass
class RadialShot:
    """One integration of the scaled system from r = 0.

    ``event`` is the sign of the first divergence: ``crossed_zero`` under-
    shoots, ``blowup`` overshoots, ``decayed`` reached r_max without either
    (classified as an undershoot for bracketing purposes).
    """

    problem: str
    u0: float
    r: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    event: str = DECAYED

    @property
    def undershoot(self) -> bool:
        return self.event in (CROSSED_ZERO, DECAYED)


@dataclass
class RadialProfile:
    """Physical groundstate profile from the bisected separatrix."""

    problem: str
    u0: float
    sigma: float
    r: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)

    def to_field(self, grid: Grid) -> Field:
        """Interpolate the radial profile onto a grid (zero beyond range)."""
        radii = grid.radii()
        return Field(grid, np.interp(radii, self.r, self.u, right=0.0))

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("r,u,phi\n")
            for r, u, phi in zip(self.r, self.u, self.phi):
                fh.write(f"{float(r)!r},{float(u)!r},{float(phi)!r}\n")


def shoot_radial(
    problem: str,
    u0: float,
    r_max: float = 14.0,
    dr: float = 1e-3,
    p: float = 2.0,
) -> RadialShot:
    """Integrate the scaled radial system by classical RK4 from the center.

    Even symmetry gives u'(0) = S'(0) = 0; the 2d system starts one step out
    with the Taylor values implied by the regularity of the radial Laplacian.
    """
    _check_problem(problem, p)
    if u0 <= 0:
        raise ValueError("u0 must be positive")
    if dr <= 0 or r_max <= dr:
        raise ValueError("need 0 < dr < r_max")
    steps = int(round(r_max / dr))
    us = np.empty(steps + 1)
    ss = np.empty(steps + 1)
    us[0], ss[0] = u0, -1.0

    if problem == NEWTON_1D:
        start = 1
        y = (u0, 0.0, -1.0, 0.0)
        rs_off = 0.0

        def deriv(r, y):
            u, up, s, sp = y
            return (up, s * u, sp, u * u)

    else:
        # regularized start: Lap_r f(0) = 2 f''(0) in 2d
        start = 2
        us[1] = u0 - u0 * dr * dr / 4.0
        ss[1] = -1.0 + u0 * u0 * dr * dr / 4.0
        y = (us[1], -u0 * dr / 2.0, ss[1], u0 * u0 * dr / 2.0)
        rs_off = dr

        def deriv(r, y):
            u, up, s, sp = y
            return (up, s * u - up / r, sp, u * u - sp / r)

    limit = _BLOWUP_FACTOR * u0
    event = DECAYED
    stop = steps
    r = rs_off if start == 2 else 0.0
    for i in range(start, steps + 1):
        k1 = deriv(r, y)
        y2 = tuple(y[j] + 0.5 * dr * k1[j] for j in range(4))
        k2 = deriv(r + 0.5 * dr, y2)
        y3 = tuple(y[j] + 0.5 * dr * k2[j] for j in range(4))
        k3 = deriv(r + 0.5 * dr, y3)
        y4 = tuple(y[j] + dr * k3[j] for j in range(4))
        k4 = deriv(r + dr, y4)
        y = tuple(
            y[j] + dr / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            for j in range(4)
        )
        r += dr
        us[i], ss[i] = y[0], y[2]
        if y[0] < 0.0:
            event, stop = CROSSED_ZERO, i
            break
        if y[0] > limit:
            event, stop = BLOWUP, i
            break
    rs = dr * np.arange(stop + 1)
    return RadialShot(problem, u0, rs, us[: stop + 1], ss[: stop + 1], event)


def _separatrix_cut(shot: RadialShot) -> int:
    """Index where the trajectory leaves the decaying separatrix."""
    return int(np.argmin(np.abs(shot.u))) + 1


def _rescale(shot: RadialShot) -> RadialProfile:
    """Solve the consistency equation for sigma and build the physical profile."""
    cut = _separatrix_cut(shot)
    r = shot.r[:cut]
    u = shot.u[:cut]
    s = shot.s[:cut]
    if shot.problem == NEWTON_1D:
        i0 = float(np.trapezoid(u * u, r))
        i1 = float(np.trapezoid(r * u * u, r))

        def g(sigma):
            return 1.0 + sigma**2 * (1.0 + i1) - 2.0 * sigma**3 * i0

    else:
        i0 = float(np.trapezoid(r * u * u, r))
        with np.errstate(divide="ignore", invalid="ignore"):
            rlogr = np.where(r > 0, r * np.log(np.maximum(r, 1e-300)), 0.0)
        iln = float(np.trapezoid(rlogr * u * u, r))

        def g(sigma):
            return 1.0 + sigma**2 * (1.0 + iln - np.log(sigma) * i0)

    hi = 1.0
    while g(hi) > 0.0:
        hi *= 2.0
        if hi > 1e8:
            raise BadBracket("no physical rescaling found")
    sigma = float(brentq(g, 1e-8, hi, xtol=1e-14, rtol=8.9e-16))
    return RadialProfile(
        problem=shot.problem,
        u0=shot.u0,
        sigma=sigma,
        r=r / sigma,
        u=sigma**2 * u,
        phi=1.0 - sigma**2 * s,
    )


def find_groundstate_radial(
    problem: str,
    bracket: tuple[float, float],
    tol: float = 1e-13,
    r_max: float = 14.0,
    dr: float = 1e-3,
    p: float = 2.0,
) -> RadialProfile:
    """Bisect the shooting parameter across the separatrix.

    ``bracket`` must classify as (undershoot, overshoot); the returned
    profile is the physical groundstate built from the midpoint shot.
    """
    _check_problem(problem, p)
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0 < lo < hi:
        raise BadBracket(f"need 0 < lo < hi, got ({lo}, {hi})")
    shot_lo = shoot_radial(problem, lo, r_max, dr, p)
    shot_hi = shoot_radial(problem, hi, r_max, dr, p)
    if not shot_lo.undershoot or shot_hi.undershoot:
        raise BadBracket(
            f"bracket classifies as ({shot_lo.event}, {shot_hi.event}); "
            "need (undershoot, blowup)"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if shoot_radial(problem, mid, r_max, dr, p).undershoot:
            lo = mid
        else:
            hi = mid
    final = shoot_radial(problem, 0.5 * (lo + hi), r_max, dr, p)
    return _rescale(final)


def bisected_u0(
    problem: str,
    bracket: tuple[float, float],
    tol: float = 1e-13,
    r_max: float = 14.0,
    dr: float = 1e-3,
) -> float:
    """Just the critical shooting parameter (scaled frame)."""
    profile = find_groundstate_radial(problem, bracket, tol, r_max, dr)
    return profile.u0


def linf_relative_gap(u: Field, profile: RadialProfile) -> float:
    """Sup-norm distance between a solver field and the oracle profile,
    after recentering and sign alignment, relative to the profile peak."""
    centered, _ = recenter(u, "peak")
    vals = centered.values
    peak = vals[np.unravel_index(np.argmax(np.abs(vals)), vals.shape)]
    if peak < 0:
        vals = -vals
    reference = profile.to_field(u.grid).values
    return float(np.max(np.abs(vals - reference)) / np.max(np.abs(reference)))
