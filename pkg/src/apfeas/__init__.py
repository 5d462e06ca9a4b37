"""Feasibility solver for intersections X ∩ {c(x) = 0}: constraint-dissolving
alternating projections with a globalized hybrid loop, a Bregman variant,
a catalog of projectable sets, and seeded benchmark problem generators."""

from .core import (
    CONVERGED,
    DIVERGED,
    LINEAR_SOLVE_FAILURE,
    MAX_ITERS,
    STALLED_LINE_SEARCH,
    ConfigurationError,
    ConstraintSystem,
    DegenerateInstance,
    DomainViolation,
    FeasibilityError,
    IterateTrace,
    IterRecord,
    LinearSolveFailure,
    ProjectiveSet,
    SolverConfig,
    StalledInnerSolve,
    UnsupportedOracle,
    UnsupportedProblem,
    assemble_gram,
)
from .bregman import BregmanKernel, KERNELS, bregman_step, entropy_kernel, \
    fermi_dirac_kernel, solve_bregman
from .problems import FAMILIES, ProblemInstance, generate, gen_correlation, \
    gen_lowrank_affine, gen_lq_affine, gen_qp_orthant, gen_toy_orthant_affine
from .sets import make_set, set_kinds
from .solver import (
    NondegeneracyReport,
    StepReport,
    ap_step,
    dissolving_direction,
    distance_bounds_check,
    nondegeneracy_report,
    pg_step,
    solve_aphl,
    solve_apm,
    solve_plain,
)

__version__ = "0.1.0"
