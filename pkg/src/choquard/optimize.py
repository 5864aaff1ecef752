"""Maximization of the relaxed objective over the discrete H^1 unit sphere.

The ascent direction is the H^1 Riesz representative of the L^2 gradient:
with A = grad^T grad + I (the operator behind the discrete H^1 form), the
step moves along d = A^{-1} g and renormalizes.  This is the sphere-tangent
conversion of the exposed L^2 gradient; along d the first-order change of
the normalized objective is <g, A^{-1} g> - <g, w>^2 >= 0 by Cauchy-Schwarz
in the A metric, so backtracking always terminates away from critical
points.  (Stepping along the raw L^2 gradient is *not* monotone under H^1
renormalization - the two metrics disagree - which is why the solve stalls
without the Riesz solve; see the decision notes.)

Everything here is deterministic: no randomness, no iteration-order
ambiguity, and sign-flipped initial data produces the bitwise-identical
objective trace.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solveh_banded
from scipy.sparse.linalg import factorized

from .convolution import SampledKernel, conv_values
from .errors import (
    DidNotConverge,
    LineSearchFailed,
    NonpositiveObjective,
    StageDiverged,
)
from .functional import ProblemSpec, eval_J, grad_J
from .grid import Field, Grid, gaussian, h1_norm_sq, normalize_h1, recenter

MAX_HALVINGS = 40


@dataclass
class SolverState:
    """One iterate of the sphere ascent.

    ``objective`` always equals eval_J(w) of the stored iterate;
    ``step`` is the current trial step, ``streak`` counts consecutive
    full-step acceptances (five in a row double the step), ``stalls`` counts
    line-search failures absorbed as convergence signals.
    """

    w: Field
    lam: float
    objective: float
    step: float
    iters: int = 0
    streak: int = 0
    stalls: int = 0


_riesz_cache: dict[Grid, object] = {}


def _riesz_solver(grid: Grid):
    """Cached solver for A d = g with A = grad^T grad + identity."""
    # benign race under concurrent solves: both threads build the same
    # deterministic solver and the dict write is atomic
    solver = _riesz_cache.get(grid)
    if solver is not None:
        return solver
    n, h = grid.n, grid.h
    c = 1.0 / (4.0 * h * h)
    # grad^T grad diagonal drops to c at the endpoints (one gradient row each)
    diag = np.full(n, 2.0 * c)
    diag[0] = diag[-1] = c
    if grid.ndim == 1:
        ab = np.zeros((3, n))
        ab[2, :] = 1.0 + diag
        ab[0, 2:] = -c
        solver = lambda g: solveh_banded(ab, g, lower=False)  # noqa: E731
    else:
        wide = sp.diags(
            [diag, -c * np.ones(n - 2), -c * np.ones(n - 2)],
            [0, 2, -2],
            format="csc",
        )
        eye = sp.identity(n, format="csc")
        mat = (
            sp.identity(n * n, format="csc")
            + sp.kron(wide, eye, format="csc")
            + sp.kron(eye, wide, format="csc")
        )
        lu = factorized(mat)
        solver = lambda g: lu(g.ravel()).reshape(n, n)  # noqa: E731
    _riesz_cache[grid] = solver
    return solver


def riesz_gradient(g: Field) -> Field:
    """H^1 representative of an L^2 gradient field."""
    return Field(g.grid, _riesz_solver(g.grid)(g.values))


def tangential_gradient_norm(spec: ProblemSpec, w: Field) -> float:
    """Relative H^1 norm of the sphere-tangent part of the ascent direction.

    The dual-pairing coefficient of the radial part is <g, w>_{L^2}; at a
    constrained critical point the tangential remainder vanishes.
    """
    g = grad_J(spec, w)
    d = riesz_gradient(g)
    theta = w.grid.cell_volume * float(np.sum(g.values * w.values))
    tang = Field(w.grid, d.values - theta * w.values)
    denom = h1_norm_sq(d)
    if denom == 0.0:
        return 0.0
    return float(np.sqrt(h1_norm_sq(tang) / denom))


def _objective(spec: ProblemSpec, w_values: np.ndarray) -> float:
    dens = np.abs(w_values) ** spec.p
    conv = conv_values(spec.relaxed_kernel, dens)
    return spec.grid.cell_volume * float(np.sum(conv * dens))


def ascend_step(spec: ProblemSpec, state: SolverState) -> SolverState:
    """One backtracking ascent step; the objective never decreases.

    Raises :class:`LineSearchFailed` when forty halvings of the step produce
    no non-decreasing candidate, which signals a critical point (or the step
    floor) rather than a fault.
    """
    g = grad_J(spec, state.w)
    d = riesz_gradient(g).values
    tau = state.step
    for halving in range(MAX_HALVINGS):
        cand = state.w.values + tau * d
        nrm = h1_norm_sq(Field(state.w.grid, cand))
        if nrm > 0.0:
            cand = cand / np.sqrt(nrm)
            obj = _objective(spec, cand)
            if obj >= state.objective:
                if not np.isfinite(obj):
                    raise StageDiverged(f"objective became {obj} at lam={state.lam}")
                streak = state.streak + 1 if halving == 0 else 0
                step = tau
                if streak >= 5:
                    step, streak = 2.0 * step, 0
                return SolverState(
                    w=Field(state.w.grid, cand),
                    lam=state.lam,
                    objective=obj,
                    step=step,
                    iters=state.iters + 1,
                    streak=streak,
                    stalls=state.stalls,
                )
        tau *= 0.5
    raise LineSearchFailed(
        f"no ascent after {MAX_HALVINGS} halvings at objective {state.objective!r}"
    )


def default_init(grid: Grid) -> Field:
    """Centered Gaussian with width an eighth of the box half-width."""
    return gaussian(grid, sigma=grid.half_width / 8.0)


def solve_relaxed(
    spec: ProblemSpec,
    init: Field | None = None,
    tol: float = 1e-10,
    max_iter: int = 20000,
    recenter_period: int = 25,
    trace: list | None = None,
) -> SolverState:
    """Ascend to a maximizer of the relaxed objective on the unit sphere.

    Stops when the relative objective change over a ten-iteration window
    drops below ``tol`` (or a line search exhausts, which means the iterate
    is critical to machine precision).  Every ``recenter_period`` accepted
    steps the iterate is recentered by a lattice shift of its peak; shifts
    truncate only boundary mass, and the objective is recomputed after them.

    Raises :class:`DidNotConverge` (carrying the best state) when the
    iteration budget runs out, and :class:`NonpositiveObjective` when the
    final objective is not positive.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = normalize_h1(init if init is not None else default_init(spec.grid))
    state = SolverState(
        w=w, lam=spec.lam, objective=eval_J(spec, w), step=0.5, iters=0
    )
    window: deque[float] = deque(maxlen=11)
    window.append(state.objective)
    converged = False
    while state.iters < max_iter:
        try:
            state = ascend_step(spec, state)
        except LineSearchFailed:
            state.stalls += 1
            converged = True
            break
        if not np.isfinite(state.objective):
            raise StageDiverged(f"objective became {state.objective} at lam={spec.lam}")
        shift_mag = 0
        if recenter_period and state.iters % recenter_period == 0:
            shifted, shift = recenter(state.w, "peak")
            shift_mag = int(np.abs(shift).sum())
            if shift_mag:
                state.w = normalize_h1(shifted)
                state.objective = eval_J(spec, state.w)
                window.clear()
        window.append(state.objective)
        if trace is not None:
            trace.append(
                {
                    "iter": state.iters,
                    "lambda": spec.lam,
                    "objective": state.objective,
                    "step": state.step,
                    "tangential_gradient_norm": tangential_gradient_norm(spec, state.w),
                    "recenter_shift": shift_mag,
                }
            )
        if len(window) == window.maxlen:
            scale = max(abs(window[-1]), 1e-300)
            if abs(window[-1] - window[0]) / scale < tol:
                converged = True
                break
    if not converged and state.iters >= max_iter:
        raise DidNotConverge(f"no convergence in {max_iter} iterations", state=state)
    if state.objective <= 0.0:
        raise NonpositiveObjective(
            f"final objective {state.objective!r} is not positive at lam={spec.lam}"
        )
    return state


def lions_concentration(u: Field, r: float, exponent: float) -> float:
    """Largest windowed mass sup_x of the |u|^exponent integral over balls
    of radius r centered at grid points, via box-sum convolution with the
    ball indicator."""
    if r <= 0:
        raise ValueError("ball radius must be positive")
    grid = u.grid
    m = 2 * grid.n
    j = np.arange(m)
    offs = np.where(j < grid.n, j, j - m) * grid.h
    if grid.ndim == 1:
        dist = np.abs(offs)
    else:
        ox, oy = np.meshgrid(offs, offs, indexing="ij")
        dist = np.sqrt(ox * ox + oy * oy)
    indicator = SampledKernel(grid, (dist <= r).astype(np.float64))
    windowed = conv_values(indicator, np.abs(u.values) ** exponent)
    return float(windowed.max())
