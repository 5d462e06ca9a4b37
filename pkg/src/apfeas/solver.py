"""Solve loops: the dissolving step, its plain iteration, the globalized
hybrid method (aphl), the classical alternating-projection baseline (apm),
and runtime diagnostics."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    CONVERGED,
    LINEAR_SOLVE_FAILURE,
    MAX_ITERS,
    STALLED_LINE_SEARCH,
    AssembledSystem,
    ConstraintSystem,
    IterRecord,
    IterateTrace,
    LinearSolveFailure,
    ProjectiveSet,
    SolverConfig,
    UnsupportedProblem,
    as_point,
    assemble_gram,
    solve_regularized,
)

#: residuals at or below this are treated as exactly feasible (guarded path)
FEASIBLE_ATOL = 1e-14


@dataclass
class StepReport:
    """One dissolving step: direction, shifted trial point, residuals.

    ``d_vec`` is J(x) y with y the regularized Gram solve; ``q_step`` is
    Q(x) d_vec, computed as QJ y; ``trial`` is the unprojected point
    x - q_step.  ``residual_after`` is ||c(trial)|| recomputed at the trial.
    """

    d_vec: np.ndarray
    q_step: np.ndarray
    trial: np.ndarray
    residual_before: float
    residual_after: float
    tau_used: float
    system: AssembledSystem


def dissolving_direction(cs: ConstraintSystem, xset: ProjectiveSet,
                         x: np.ndarray, cfg: SolverConfig = SolverConfig(),
                         system: Optional[AssembledSystem] = None) -> StepReport:
    """Compute the regularized Newton-like direction and the shifted point.

    Solves (G + tau(||c||) I) y = c with G = J^T Q(x) J, then forms
    d_vec = J y and q_step = QJ y.  At a feasible point the direction is
    zero and the shifted point is x itself.
    """
    asm = system if system is not None else assemble_gram(cs, xset, x)
    r = float(np.linalg.norm(asm.c))
    if r <= FEASIBLE_ATOL:
        zero = np.zeros(cs.n)
        return StepReport(zero, zero.copy(), as_point(x, cs.n).copy(),
                          r, r, 0.0, asm)
    tau = cfg.tau(r)
    y = solve_regularized(asm.G, tau, asm.c)
    d_vec = np.asarray(asm.J @ y, dtype=float).ravel()
    q_step = np.asarray(asm.QJ @ y, dtype=float).ravel()
    trial = x - q_step
    return StepReport(d_vec, q_step, trial, r,
                      cs.residual_norm(trial), tau, asm)


def ap_step(cs: ConstraintSystem, xset: ProjectiveSet, x: np.ndarray,
            cfg: SolverConfig = SolverConfig()) -> np.ndarray:
    """One step of the inexact scheme: project the shifted point back to the set.

    The projection is requested with absolute tolerance
    min(base_proj_tol, proj_tol_scale * ||c(x)||^2), which keeps the
    projection error within the quadratic inexactness budget.  Points that
    are already feasible (to 1e-14) are returned unchanged.
    """
    x = as_point(x, cs.n)
    rep = dissolving_direction(cs, xset, x, cfg)
    if rep.residual_before <= FEASIBLE_ATOL:
        return x.copy()
    y, _ = xset.project(rep.trial, cfg.projection_tol(rep.residual_before))
    return y


@dataclass
class PgResult:
    point: np.ndarray
    j: int
    eta: float
    stalled: bool
    residual_after: float


def pg_step(cs: ConstraintSystem, xset: ProjectiveSet, x: np.ndarray,
            cfg: SolverConfig = SolverConfig()) -> PgResult:
    """Projected-gradient step on 0.5||c||^2 with backtracking.

    Accepts the smallest j <= max_linesearch whose trial
    x+ = project(x - alpha^j eta_max J c) satisfies
    0.5||c(x+)||^2 <= 0.5||c(x)||^2 - ||x+ - x||^2 / (4 alpha^j eta_max).
    When no depth satisfies it, the deepest trial is returned with the
    stalled flag set; the caller decides whether to continue.
    """
    x = as_point(x, cs.n)
    c = cs.residual(x)
    r = float(np.linalg.norm(c))
    if cs.jac_sparse is not None:
        grad = np.asarray(cs.jac_sparse(x) @ c, dtype=float).ravel()
    else:
        grad = np.asarray(cs.jac(x), dtype=float) @ c
    half_sq = 0.5 * r * r
    last = None
    for j in range(cfg.max_linesearch + 1):
        eta = (cfg.alpha ** j) * cfg.eta_max
        y, _ = xset.project(x - eta * grad, cfg.base_proj_tol)
        r_new = cs.residual_norm(y)
        decrease = half_sq - 0.25 / eta * float(np.sum((y - x) ** 2))
        last = PgResult(y, j, eta, False, r_new)
        if 0.5 * r_new * r_new <= decrease:
            return last
    last.stalled = True
    return last


def _sigma_min_sym(G: np.ndarray) -> float:
    return float(max(np.linalg.eigvalsh(G)[0], 0.0))


def _track_sigma(cfg: SolverConfig, p: int) -> bool:
    if cfg.track_sigma_min is None:
        return p <= 400
    return cfg.track_sigma_min


def solve_aphl(cs: ConstraintSystem, xset: ProjectiveSet, x0: np.ndarray,
               cfg: SolverConfig = SolverConfig()):
    """Globalized solve: dissolving trials with a projected-gradient fallback.

    Each iteration computes the dissolving trial; if it fails to cut the
    residual below (1 - kappa) times the current one, a line-searched
    projected-gradient step is taken instead.  Terminates on
    ||c(x_k)|| <= tol, the iteration cap, a linear-solve failure (partial
    trace), or a projected-gradient step that stalls without moving.
    """
    x = xset.require_member(as_point(x0, cs.n))
    trace = IterateTrace()
    track = _track_sigma(cfg, cs.p)
    r = cs.residual_norm(x)
    k = 0
    while True:
        if r <= cfg.tol:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = CONVERGED
            return x, trace
        if k >= cfg.max_iters:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = MAX_ITERS
            return x, trace
        t0 = time.perf_counter()
        try:
            rep = dissolving_direction(cs, xset, x, cfg)
        except LinearSolveFailure:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = LINEAR_SOLVE_FAILURE
            return x, trace
        sigma = _sigma_min_sym(rep.system.G) if track else None
        x_trial, _ = xset.project(rep.trial, cfg.projection_tol(r))
        r_trial = cs.residual_norm(x_trial)
        if r_trial >= (1.0 - cfg.kappa) * r:
            pg = pg_step(cs, xset, x, cfg)
            x_next, r_next = pg.point, pg.residual_after
            rec = IterRecord(k=k, residual=r, step_type="projected-gradient",
                             ls_depth=pg.j, eta=pg.eta, sigma_min_G=sigma,
                             step_norm=float(np.linalg.norm(x_next - x)),
                             stalled=pg.stalled)
            rec.wall_ms = (time.perf_counter() - t0) * 1e3
            trace.append(rec)
            if pg.stalled and rec.step_norm == 0.0:
                # dead fixed point of the line search: iterating cannot move
                trace.append(IterRecord(k=k + 1, residual=r_next))
                trace.status = STALLED_LINE_SEARCH
                return x_next, trace
        else:
            x_next, r_next = x_trial, r_trial
            rec = IterRecord(k=k, residual=r, step_type="dissolving",
                             ls_depth=0, sigma_min_G=sigma,
                             step_norm=float(np.linalg.norm(x_next - x)))
            rec.wall_ms = (time.perf_counter() - t0) * 1e3
            trace.append(rec)
        x, r = x_next, r_next
        k += 1


def solve_plain(cs: ConstraintSystem, xset: ProjectiveSet, x0: np.ndarray,
                cfg: SolverConfig = SolverConfig()):
    """Iterate the dissolving step only (the local scheme, no globalization)."""
    x = xset.require_member(as_point(x0, cs.n))
    trace = IterateTrace()
    track = _track_sigma(cfg, cs.p)
    r = cs.residual_norm(x)
    k = 0
    while True:
        if r <= cfg.tol:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = CONVERGED
            return x, trace
        if k >= cfg.max_iters:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = MAX_ITERS
            return x, trace
        t0 = time.perf_counter()
        try:
            rep = dissolving_direction(cs, xset, x, cfg)
        except LinearSolveFailure:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = LINEAR_SOLVE_FAILURE
            return x, trace
        sigma = _sigma_min_sym(rep.system.G) if track else None
        x_next, _ = xset.project(rep.trial, cfg.projection_tol(r))
        r_next = cs.residual_norm(x_next)
        rec = IterRecord(k=k, residual=r, step_type="dissolving", ls_depth=0,
                         sigma_min_G=sigma,
                         step_norm=float(np.linalg.norm(x_next - x)))
        rec.wall_ms = (time.perf_counter() - t0) * 1e3
        trace.append(rec)
        x, r = x_next, r_next
        k += 1


def solve_apm(cs: ConstraintSystem, xset: ProjectiveSet, x0: np.ndarray,
              cfg: SolverConfig = SolverConfig(),
              proj_m: Optional[Callable[[np.ndarray], np.ndarray]] = None):
    """Classical alternating projections, for problems with closed-form
    projection onto the constraint manifold (affine constraints only).

    Iterates x_{k+1} = project_set(proj_m(x_k)) from a point of the set and
    measures the residual at the set-side iterates.
    """
    if proj_m is None:
        raise UnsupportedProblem(
            "alternating projections need a closed-form constraint projection")
    x = xset.require_member(as_point(x0, cs.n))
    trace = IterateTrace()
    r = cs.residual_norm(x)
    k = 0
    while True:
        if r <= cfg.tol:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = CONVERGED
            return x, trace
        if k >= cfg.max_iters:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = MAX_ITERS
            return x, trace
        t0 = time.perf_counter()
        y = as_point(proj_m(x), cs.n)
        x_next, _ = xset.project(y, cfg.base_proj_tol)
        r_next = cs.residual_norm(x_next)
        rec = IterRecord(k=k, residual=r, step_type="alternating",
                         step_norm=float(np.linalg.norm(x_next - x)))
        rec.wall_ms = (time.perf_counter() - t0) * 1e3
        trace.append(rec)
        x, r = x_next, r_next
        k += 1


@dataclass(frozen=True)
class NondegeneracyReport:
    """Smallest singular values of the Gram matrix and the Jacobian at a point.

    ``degenerate`` is set when sigma_min(G) falls below 1e-10 ||G||, the
    practical sign that the surjectivity condition of the constraint
    Jacobian on the set's tangent space is violated.
    """

    sigma_xQ: float
    sigma_xc: float
    degenerate: bool


def nondegeneracy_report(cs: ConstraintSystem, xset: ProjectiveSet,
                         x: np.ndarray) -> NondegeneracyReport:
    asm = assemble_gram(cs, xset, x)
    lam = np.linalg.eigvalsh(asm.G)
    sigma_q = float(max(lam[0], 0.0))
    norm_g = float(max(abs(lam[0]), abs(lam[-1])))
    J = asm.J
    if not isinstance(J, np.ndarray):
        J = np.asarray(J.todense())
    sigma_c = float(np.linalg.svd(J, compute_uv=False)[-1]) if min(J.shape) else 0.0
    degenerate = norm_g == 0.0 or sigma_q < 1e-10 * norm_g
    return NondegeneracyReport(sigma_xQ=sigma_q, sigma_xc=sigma_c,
                               degenerate=degenerate)


def distance_bounds_check(cs: ConstraintSystem, xset: ProjectiveSet,
                          x_near: np.ndarray,
                          proj_m: Optional[Callable[[np.ndarray], np.ndarray]]):
    """Empirically verify the two-sided bound between ||c(y)|| and the
    distance to the constraint manifold near a feasible point.

    Checks ||c(y)|| / M <= dist(y, M) <= 2 ||c(y)|| / sigma with M and
    sigma the largest/smallest singular values of the Jacobian at the
    nearest constraint-manifold point.  Test-suite utility, not a solver
    path; returns (lower_ok, upper_ok).
    """
    if proj_m is None:
        raise UnsupportedProblem("distance bound check needs a closed-form "
                                 "constraint projection")
    y = as_point(x_near, cs.n)
    z = as_point(proj_m(y), cs.n)
    J = np.asarray(cs.jac(z), dtype=float)
    svals = np.linalg.svd(J, compute_uv=False)
    big, small = float(svals[0]), float(svals[-1])
    dist = float(np.linalg.norm(y - z))
    cy = cs.residual_norm(y)
    slack = 1e-12 * max(1.0, cy)
    lower_ok = cy / big <= dist + slack
    upper_ok = dist <= 2.0 * cy / small + slack if small > 0 else False
    return lower_ok, upper_ok
