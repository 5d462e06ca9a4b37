"""Mirror-map variant of the dissolving step for convex sets with a
projective Bregman kernel: x+ = (grad phi)^{-1}(grad phi(x) - d(x)),
where d(x) uses Q := W_phi(x), the extension of the inverse Hessian of phi."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .core import (
    CONVERGED,
    DIVERGED,
    MAX_ITERS,
    ConstraintSystem,
    DomainViolation,
    IterRecord,
    IterateTrace,
    ProjectiveSet,
    SolverConfig,
    as_point,
)
from .sets import Box, Orthant
from .solver import FEASIBLE_ATOL, _sigma_min_sym, _track_sigma, dissolving_direction

#: smallest value a coordinate is clamped to when the mirror map underflows
UNDERFLOW_CLAMP = 1e-300


class _KernelQSet(ProjectiveSet):
    """Adapter exposing W_phi as the projective mapping of the kernel's domain."""

    def __init__(self, kernel: "BregmanKernel"):
        self.kernel = kernel
        self.dim = kernel.domain_set.dim
        self.kind = f"W_phi[{kernel.name}]"

    def contains(self, x, tol: float = 1e-9):
        return self.kernel.domain_set.contains(x, tol)

    def apply_Q(self, x, v):
        return self.kernel.w_diag(x) * v

    def apply_Q_columns(self, x, cols):
        d = self.kernel.w_diag(x)
        if sp.issparse(cols):
            return cols.multiply(d[:, None]).tocsc()
        return d[:, None] * cols

    def project(self, z, tol: float = 1e-12):
        return self.kernel.domain_set.project(z, tol)

    def normal_generators(self, x, tol: float = 1e-8):
        return self.kernel.domain_set.normal_generators(x, tol)


@dataclass(frozen=True)
class BregmanKernel:
    """A projective Bregman kernel: mirror map, its inverse, and the
    diagonal of W_phi (both shipped kernels have diagonal Hessians).

    grad_phi maps the domain interior to R^n, inv_grad_phi is its inverse,
    and w_diag(x) extends diag(hessian(phi)(x))^{-1} continuously to the
    whole domain, vanishing exactly along the normal cone at the boundary.
    """

    name: str
    domain_set: ProjectiveSet
    grad_phi: Callable[[np.ndarray], np.ndarray]
    inv_grad_phi: Callable[[np.ndarray], np.ndarray]
    w_diag: Callable[[np.ndarray], np.ndarray]
    interior: Callable[[np.ndarray], bool]
    clamp: Callable[[np.ndarray], np.ndarray]

    def q_set(self) -> _KernelQSet:
        return _KernelQSet(self)

    def w_apply(self, x, v):
        return self.w_diag(x) * v


def entropy_kernel(n: int) -> BregmanKernel:
    """phi(x) = sum(x log x - x) on the nonnegative orthant.

    grad phi = log, inverse = exp, W_phi(x) = Diag(x): coincides with the
    orthant's catalog projective mapping.
    """
    def clamp(x):
        return np.maximum(x, UNDERFLOW_CLAMP)

    return BregmanKernel(
        name="entropy",
        domain_set=Orthant(n),
        grad_phi=lambda x: np.log(x),
        inv_grad_phi=lambda g: np.exp(g),
        w_diag=lambda x: x.copy(),
        interior=lambda x: bool(np.all(x > 0.0)),
        clamp=clamp,
    )


def fermi_dirac_kernel(n: int) -> BregmanKernel:
    """phi(x) = sum(x log x + (1-x) log(1-x)) on the unit box.

    grad phi = logit, inverse = the logistic function,
    W_phi(x) = Diag(x (1-x)): coincides with the box mapping under the
    default per-coordinate weight (s - l)(u - s) on [0, 1].
    """
    upper = np.nextafter(1.0, 0.0)  # 1 - 1e-300 is not representable

    def clamp(x):
        return np.clip(x, UNDERFLOW_CLAMP, upper)

    return BregmanKernel(
        name="fermi_dirac",
        domain_set=Box(np.zeros(n), np.ones(n)),
        grad_phi=lambda x: np.log(x) - np.log1p(-x),
        inv_grad_phi=lambda g: expit(g),
        w_diag=lambda x: x * (1.0 - x),
        interior=lambda x: bool(np.all(x > 0.0) and np.all(x < 1.0)),
        clamp=clamp,
    )


KERNELS = {"entropy": entropy_kernel, "fermi_dirac": fermi_dirac_kernel}


def _step_full(cs: ConstraintSystem, kernel: BregmanKernel, x: np.ndarray,
               cfg: SolverConfig):
    x = as_point(x, cs.n)
    if not kernel.interior(x):
        raise DomainViolation(
            f"{kernel.name} kernel requires a strictly interior point")
    rep = dissolving_direction(cs, kernel.q_set(), x, cfg)
    if rep.residual_before <= FEASIBLE_ATOL:
        return x.copy(), rep, False
    x_next = kernel.inv_grad_phi(kernel.grad_phi(x) - rep.d_vec)
    clamped = not kernel.interior(x_next)
    if clamped:
        x_next = kernel.clamp(x_next)
    return x_next, rep, clamped


def bregman_step(cs: ConstraintSystem, kernel: BregmanKernel, x: np.ndarray,
                 cfg: SolverConfig = SolverConfig()) -> np.ndarray:
    """One mirror update from a strictly interior point.

    Feasible points (to 1e-14) are fixed: the direction vanishes and the
    mirror map composes to the identity.
    """
    x_next, _, _ = _step_full(cs, kernel, x, cfg)
    return x_next


def solve_bregman(cs: ConstraintSystem, kernel: BregmanKernel, x0: np.ndarray,
                  cfg: SolverConfig = SolverConfig()):
    """Iterate the mirror update until ||c|| <= tol; no globalization.

    This is a local method: the run is flagged Diverged when the residual
    grows by 1e6x from its starting value.
    """
    x = as_point(x0, cs.n)
    if not kernel.interior(x):
        raise DomainViolation("starting point must be strictly interior")
    trace = IterateTrace()
    track = _track_sigma(cfg, cs.p)
    r0 = cs.residual_norm(x)
    r = r0
    k = 0
    while True:
        if r <= cfg.tol:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = CONVERGED
            return x, trace
        if r > 1e6 * max(r0, cfg.tol):
            trace.append(IterRecord(k=k, residual=r))
            trace.status = DIVERGED
            return x, trace
        if k >= cfg.max_iters:
            trace.append(IterRecord(k=k, residual=r))
            trace.status = MAX_ITERS
            return x, trace
        t0 = time.perf_counter()
        x_next, rep, clamped = _step_full(cs, kernel, x, cfg)
        rec = IterRecord(
            k=k, residual=r, step_type="bregman", ls_depth=0,
            sigma_min_G=_sigma_min_sym(rep.system.G) if track else None,
            step_norm=float(np.linalg.norm(x_next - x)), stalled=clamped)
        rec.wall_ms = (time.perf_counter() - t0) * 1e3
        trace.append(rec)
        x = x_next
        r = cs.residual_norm(x)
        k += 1
