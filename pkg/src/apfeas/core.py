"""Shared numeric abstractions: problem data, set interface, config, traces.

Conventions used throughout the package:

* points are flat float64 vectors of length ``n``; matrix variables are
  stored row-major flattened, and the owning set records the matrix shape
  and reshapes internally,
* a constraint system holds a smooth map ``c: R^n -> R^p`` together with
  its Jacobian ``J(x) in R^{n x p}`` whose *columns* are the constraint
  gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp


class FeasibilityError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(FeasibilityError):
    """Invalid configuration: bad dimensions, unknown keys, bad parameters."""


class LinearSolveFailure(FeasibilityError):
    """Cholesky factorization failed even after a ridge retry."""


class DomainViolation(FeasibilityError):
    """A point violates a strict domain requirement (e.g. interior-only kernels)."""


class StalledInnerSolve(FeasibilityError):
    """An inner iterative subsolver hit its cap without meeting its tolerance."""


class DegenerateInstance(FeasibilityError):
    """A problem generator produced an unusable instance."""


class UnsupportedOracle(FeasibilityError):
    """Requested test oracle is not available for this set kind."""


class UnsupportedProblem(FeasibilityError):
    """Requested operation needs structure this problem does not expose."""


# Terminal statuses recorded on a trace.
CONVERGED = "Converged"
MAX_ITERS = "MaxIters"
LINEAR_SOLVE_FAILURE = "LinearSolveFailure"
STALLED_LINE_SEARCH = "StalledLineSearch"
DIVERGED = "Diverged"


def as_point(x, n: Optional[int] = None) -> np.ndarray:
    """Validate and return ``x`` as a finite 1-D float64 vector."""
    x = np.ascontiguousarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("point contains non-finite coordinates")
    if n is not None and x.size != n:
        raise ConfigurationError(f"point has length {x.size}, expected {n}")
    return x


def tau_value(rule: str, t: float) -> float:
    """Regularization weight as a function of the residual norm.

    ``min``: tau(t) = min(t, 1) -- locally Lipschitz, strictly increasing on
    [0, 1], tau(0) = 0; the clamp keeps the regularizer bounded far from
    feasibility.  ``square``: tau(t) = t^2, selectable for experiments.
    """
    if rule == "min":
        return min(t, 1.0)
    if rule == "square":
        return t * t
    raise ConfigurationError(f"unknown tau rule {rule!r}")


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by all solve loops.

    kappa: sufficient-decrease fraction for accepting a dissolving trial
        (the trial is kept when the residual falls below (1-kappa) times
        the current one).
    eta_max / alpha / max_linesearch: projected-gradient line search:
        stepsizes eta = alpha**j * eta_max for j = 0..max_linesearch.
    tau_rule: name of the regularization rule, see :func:`tau_value`.
    tol: terminate when ||c(x_k)|| <= tol.
    max_iters: iteration cap.
    proj_tol_scale: inexact projections are requested with absolute
        tolerance min(base_proj_tol, proj_tol_scale * ||c(x_k)||**2).
    track_sigma_min: record sigma_min of the Gram matrix per iteration.
        None means automatic: tracked only when p <= 400 (the dense
        eigensolve would otherwise dominate the iteration cost).
    """

    kappa: float = 0.5
    eta_max: float = 1.0
    alpha: float = 0.7
    max_linesearch: int = 10
    tau_rule: str = "min"
    tol: float = 1e-10
    max_iters: int = 5000
    proj_tol_scale: float = 1.0
    base_proj_tol: float = 1e-12
    track_sigma_min: Optional[bool] = None

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ConfigurationError("kappa must lie in (0, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError("alpha must lie in (0, 1)")
        if self.eta_max <= 0.0:
            raise ConfigurationError("eta_max must be positive")
        if self.tol <= 0.0:
            raise ConfigurationError("tol must be positive")
        if self.max_iters < 0 or self.max_linesearch < 0:
            raise ConfigurationError("iteration caps must be nonnegative")
        if self.proj_tol_scale <= 0.0:
            raise ConfigurationError("proj_tol_scale must be positive")
        # tau axioms: tau(0) = 0 and strictly increasing on [0, 1].
        if tau_value(self.tau_rule, 0.0) != 0.0:
            raise ConfigurationError("tau(0) must be 0")
        grid = np.linspace(0.0, 1.0, 17)
        vals = [tau_value(self.tau_rule, t) for t in grid]
        if not all(b > a for a, b in zip(vals, vals[1:])):
            raise ConfigurationError("tau must be strictly increasing on [0, 1]")

    def tau(self, t: float) -> float:
        return tau_value(self.tau_rule, t)

    def projection_tol(self, residual: float) -> float:
        return min(self.base_proj_tol, self.proj_tol_scale * residual * residual)


@dataclass(frozen=True)
class ConstraintSystem:
    """Smooth equality constraints c(x) = 0 with analytic Jacobian.

    fun: x -> c(x), shape (p,).
    jac: x -> J(x), shape (n, p); column i is the gradient of c_i.
    jac_sparse: optional x -> scipy CSC matrix of shape (n, p) carrying the
        per-constraint support structure; used for structured Gram assembly.
    """

    n: int
    p: int
    fun: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    jac_sparse: Optional[Callable[[np.ndarray], sp.spmatrix]] = None

    def residual(self, x: np.ndarray) -> np.ndarray:
        c = np.asarray(self.fun(x), dtype=float).ravel()
        if c.size != self.p:
            raise ConfigurationError(f"c(x) has length {c.size}, expected {self.p}")
        return c

    def residual_norm(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(self.residual(x)))


class ProjectiveSet:
    """A closed set with a cheap projection and a projective mapping Q.

    Subclasses implement ``project``, ``apply_Q`` and ``contains``;
    ``normal_generators`` is a test oracle available only for kinds with a
    known closed-form normal-cone structure.  ``Q(x)`` must be a symmetric
    positive semidefinite operator whose null space spans the normal cone
    at ``x`` and which keeps ``x + Q(x)d`` within O(||d||^2) of the set.
    """

    kind: str = "abstract"
    dim: int = 0
    #: scalar used only by the quadratic distance-bound test suite
    rho_test: float = 1.0

    def project(self, z: np.ndarray, tol: float = 1e-12):
        """Return ``(y, err)``: a point of the set and an error-bound estimate.

        Exact-projection kinds ignore ``tol`` and report ``err = 0``.
        """
        raise NotImplementedError

    def apply_Q(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        raise NotImplementedError

    def normal_generators(self, x: np.ndarray, tol: float = 1e-8):
        raise UnsupportedOracle(f"no normal-cone oracle for kind {self.kind!r}")

    def apply_Q_columns(self, x: np.ndarray, cols):
        """Apply Q(x) to every column of ``cols`` (dense or sparse n x p).

        Generic fallback loops over densified columns; structured sets
        override this with batched or sparsity-aware versions.
        """
        if sp.issparse(cols):
            cols = np.asarray(cols.todense())
        cols = np.atleast_2d(np.asarray(cols, dtype=float))
        out = np.empty_like(cols)
        for j in range(cols.shape[1]):
            out[:, j] = self.apply_Q(x, cols[:, j])
        return out

    def require_member(self, x: np.ndarray, tol: float = 1e-8) -> np.ndarray:
        x = as_point(x, self.dim)
        if not self.contains(x, tol):
            raise DomainViolation(f"point is not in the set (kind {self.kind!r})")
        return x


@dataclass(frozen=True)
class AssembledSystem:
    """Output of :func:`assemble_gram`: everything the dissolving step needs."""

    G: np.ndarray          # p x p, symmetrized J^T Q J
    QJ: object             # n x p, Q applied columnwise to J (dense or sparse)
    c: np.ndarray          # residual c(x)
    J: object              # the Jacobian used (dense or sparse)


def assemble_gram(cs: ConstraintSystem, xset: ProjectiveSet, x: np.ndarray,
                  *, dense: bool = False) -> AssembledSystem:
    """Assemble G = J^T Q(x) J, QJ and c(x) at a point of the set.

    Uses the sparse Jacobian when the constraint system provides one (and
    ``dense`` is not forced); the two paths agree to high relative accuracy
    and the sparse one exploits per-constraint support patterns.
    """
    if cs.n != xset.dim:
        raise ConfigurationError(
            f"constraint system dimension {cs.n} != set dimension {xset.dim}")
    x = xset.require_member(x)
    c = cs.residual(x)
    if cs.jac_sparse is not None and not dense:
        J = cs.jac_sparse(x).tocsc()
        if J.shape != (cs.n, cs.p):
            raise ConfigurationError("sparse Jacobian has wrong shape")
    else:
        J = np.asarray(cs.jac(x), dtype=float)
        if J.shape != (cs.n, cs.p):
            raise ConfigurationError(
                f"Jacobian has shape {J.shape}, expected {(cs.n, cs.p)}")
    QJ = xset.apply_Q_columns(x, J)
    G = J.T @ QJ
    if sp.issparse(G):
        G = np.asarray(G.todense())
    G = 0.5 * (G + G.T)
    return AssembledSystem(G=G, QJ=QJ, c=c, J=J)


def solve_regularized(G: np.ndarray, tau: float, c: np.ndarray) -> np.ndarray:
    """Solve (G + tau I) y = c by Cholesky, with one ridge retry.

    G is PSD by construction and tau > 0 makes the system PD; a persistent
    factorization failure signals severe degeneracy and is surfaced as
    :class:`LinearSolveFailure`.
    """
    p = G.shape[0]
    M = G + tau * np.eye(p)
    try:
        cf = sla.cho_factor(M, lower=True, check_finite=False)
    except sla.LinAlgError:
        ridge = 1e-14 * np.trace(G) / max(p, 1)
        try:
            cf = sla.cho_factor(M + ridge * np.eye(p), lower=True,
                                check_finite=False)
        except sla.LinAlgError as exc:
            raise LinearSolveFailure(
                "Cholesky failed after ridge retry; the Gram matrix is "
                "severely degenerate") from exc
    return sla.cho_solve(cf, c, check_finite=False)


@dataclass
class IterRecord:
    """One row of an iterate trace.

    ``residual`` is ||c(x_k)|| at the iterate the row describes; the step
    fields describe the step taken *from* that iterate (``None`` on the
    terminal row).  ``step_norm`` is ||x_{k+1} - x_k||.
    """

    k: int
    residual: float
    step_type: Optional[str] = None     # "dissolving" | "projected-gradient" | ...
    ls_depth: Optional[int] = None
    eta: Optional[float] = None
    sigma_min_G: Optional[float] = None
    wall_ms: float = 0.0
    step_norm: Optional[float] = None
    stalled: bool = False


@dataclass
class IterateTrace:
    """Per-iteration records plus the terminal status of a solve."""

    records: list = field(default_factory=list)
    status: str = MAX_ITERS

    def append(self, rec: IterRecord):
        if self.records and rec.k <= self.records[-1].k:
            raise ValueError("trace indices must be strictly increasing")
        if not np.isfinite(rec.residual):
            raise ValueError("trace residual must be finite")
        self.records.append(rec)

    @property
    def residuals(self) -> np.ndarray:
        return np.array([r.residual for r in self.records])

    @property
    def iterations(self) -> int:
        """Number of steps taken (the terminal row is not a step)."""
        return max(len(self.records) - 1, 0)

    @property
    def final_residual(self) -> float:
        return self.records[-1].residual if self.records else float("nan")

    def rows_of_type(self, step_type: str):
        return [r for r in self.records if r.step_type == step_type]
