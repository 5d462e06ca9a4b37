"""Seeded generators for the four benchmark families plus a hand-checkable toy.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64); the
draw order inside each generator is fixed, so identical (family, dims,
seed) yield bit-identical instances.  Every instance carries a feasible
witness ``x_ref`` and a starting point ``x0`` inside the set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .core import ConstraintSystem, DegenerateInstance, ProjectiveSet
from .sets import LowRankVariety, LqBall, Orthant, PsdCone

RNG_ID = "numpy.default_rng(PCG64)"


@dataclass
class ProblemInstance:
    cs: ConstraintSystem
    xset: ProjectiveSet
    x0: np.ndarray
    x_ref: np.ndarray
    meta: dict = field(default_factory=dict)
    affine_projector: Optional[Callable[[np.ndarray], np.ndarray]] = None


def gen_correlation(n: int, density: float, seed: int) -> ProblemInstance:
    """Sparse correlation matrix feasibility: X PSD, unit diagonal, and a
    prescribed zero pattern on off-diagonal entries.

    The witness is the Gram matrix of a column-normalized sparse factor;
    the zero pattern is read off the witness's strict upper triangle.
    Constraint gradients are entrywise-sparse, so the instance ships a
    sparse Jacobian for structured Gram assembly, and the affine part
    (diagonal + zero entries) admits a closed-form projection.
    """
    if n < 2 or not 0.0 < density < 1.0:
        raise DegenerateInstance("need n >= 2 and density in (0, 1)")
    rng = np.random.default_rng(seed)
    W = sp.random(n, n, density=density, random_state=rng,
                  data_rvs=rng.standard_normal).tocsc()
    col_norms = np.sqrt(np.asarray(W.multiply(W).sum(axis=0)).ravel())
    empty = np.nonzero(col_norms == 0.0)[0]
    if empty.size:
        # degenerate draw: an empty column cannot be normalized
        rows = rng.integers(0, n, size=empty.size)
        W = (W + sp.coo_matrix((np.ones(empty.size), (rows, empty)),
                               shape=(n, n))).tocsc()
        col_norms[empty] = 1.0
    W = W.multiply(1.0 / col_norms[None, :]).tocsc()
    X_ref = (W.T @ W).toarray()
    X_ref = 0.5 * (X_ref + X_ref.T)

    iu, ju = np.triu_indices(n, k=1)
    zero_mask = X_ref[iu, ju] == 0.0
    pair_i, pair_j = iu[zero_mask], ju[zero_mask]
    n_pairs = pair_i.size
    if n_pairs == 0:
        raise DegenerateInstance("witness has no zero off-diagonal entries")
    p = n + n_pairs

    diag_flat = np.arange(n) * n + np.arange(n)
    ij_flat = pair_i * n + pair_j
    ji_flat = pair_j * n + pair_i

    def fun(x):
        return np.concatenate([x[diag_flat] - 1.0,
                               0.5 * (x[ij_flat] + x[ji_flat])])

    rows = np.concatenate([diag_flat, ij_flat, ji_flat])
    cols = np.concatenate([np.arange(n),
                           n + np.arange(n_pairs),
                           n + np.arange(n_pairs)])
    data = np.concatenate([np.ones(n), np.full(2 * n_pairs, 0.5)])
    J_const = sp.coo_matrix((data, (rows, cols)), shape=(n * n, p)).tocsc()

    cs = ConstraintSystem(
        n=n * n, p=p, fun=fun,
        jac=lambda x: J_const.toarray(),
        jac_sparse=lambda x: J_const,
    )
    xset = PsdCone(n)

    def affine_projector(z):
        Z = z.reshape(n, n).copy()
        Z[np.arange(n), np.arange(n)] = 1.0
        mean = 0.5 * (Z[pair_i, pair_j] + Z[pair_j, pair_i])
        Z[pair_i, pair_j] -= mean
        Z[pair_j, pair_i] -= mean
        return Z.ravel()

    M = rng.standard_normal((n, n))
    x0, _ = xset.project((5.0 * (M + M.T) + X_ref).ravel())
    meta = {"family": "correlation", "n": n, "density": density,
            "seed": seed, "p": p, "rng": RNG_ID}
    return ProblemInstance(cs=cs, xset=xset, x0=x0, x_ref=X_ref.ravel(),
                           meta=meta, affine_projector=affine_projector)


def gen_lowrank_affine(n: int, m: int, p: int, r: int,
                       seed: int) -> ProblemInstance:
    """Rank-bounded matrix meeting p dense affine measurements.

    The witness is the rank-r truncation of a Gaussian matrix (truncation,
    not eigenvalue clipping: clipping a generic Gaussian's singular values
    at zero changes nothing and leaves it full rank).  The measurements'
    Gram matrix gives a closed-form least-norm affine correction.
    """
    if r > min(n, m) or p >= n * m:
        raise DegenerateInstance("need r <= min(n, m) and p < n*m")
    rng = np.random.default_rng(seed)

    def draw():
        H = rng.standard_normal((p, n, m))
        Hflat = H.reshape(p, n * m)
        gram = Hflat @ Hflat.T
        try:
            import scipy.linalg as sla
            cf = sla.cho_factor(gram, lower=True)
        except Exception:
            return None
        return Hflat, cf

    drawn = draw()
    if drawn is None:
        drawn = draw()
    if drawn is None:
        raise DegenerateInstance("measurement Gram matrix is singular")
    Hflat, gram_cf = drawn

    xset = LowRankVariety(n, m, r)
    U, sig, Vt = np.linalg.svd(rng.standard_normal((n, m)),
                               full_matrices=False)
    sig[r:] = 0.0
    X_ref = (U * sig) @ Vt
    b = Hflat @ X_ref.ravel()

    cs = ConstraintSystem(
        n=n * m, p=p,
        fun=lambda x: Hflat @ x - b,
        jac=lambda x: Hflat.T,
    )

    import scipy.linalg as sla

    def affine_projector(z):
        lam = sla.cho_solve(gram_cf, Hflat @ z - b)
        return z - Hflat.T @ lam

    x0, _ = xset.project(rng.standard_normal((n, m)).ravel())
    meta = {"family": "lowrank_affine", "n": n, "m": m, "p": p, "r": r,
            "seed": seed, "rng": RNG_ID}
    return ProblemInstance(cs=cs, xset=xset, x0=x0, x_ref=X_ref.ravel(),
                           meta=meta, affine_projector=affine_projector)


def gen_qp_orthant(n: int, p: int, seed: int) -> ProblemInstance:
    """Nonnegative vector on p quadric surfaces <x, H_i x> = b_i.

    The H_i are symmetrized Gaussians, the witness is a componentwise
    absolute Gaussian, and the start is the witness plus noise projected
    back onto the orthant.  No closed-form constraint projection exists.
    """
    if p < 1:
        raise DegenerateInstance("need p >= 1")
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((p, n, n))
    H = 0.5 * (M + M.transpose(0, 2, 1))
    x_ref = np.abs(rng.standard_normal(n))
    b = np.einsum("i,pij,j->p", x_ref, H, x_ref)

    def fun(x):
        return np.einsum("i,pij,j->p", x, H, x) - b

    def jac(x):
        return 2.0 * np.einsum("pij,j->pi", H, x).T

    cs = ConstraintSystem(n=n, p=p, fun=fun, jac=jac)
    x0 = np.maximum(x_ref + 0.1 * rng.standard_normal(n), 0.0)
    meta = {"family": "qp_orthant", "n": n, "p": p, "seed": seed,
            "rng": RNG_ID}
    return ProblemInstance(cs=cs, xset=Orthant(n), x0=x0, x_ref=x_ref,
                           meta=meta)


def gen_lq_affine(n: int, p: int, q: float, seed: int) -> ProblemInstance:
    """Point of the lq ball meeting p affine measurements H^T x = b.

    b is defined through a projected-Gaussian witness, and the start is a
    1e-5-perturbed witness projected back into the ball.  The constraints
    are affine (consistent with how b is generated), but no closed-form
    constraint projection is attached: this family is solved by the
    dissolving methods only.
    """
    if p < 1 or not 0.0 < q <= 1.0:
        raise DegenerateInstance("need p >= 1 and q in (0, 1]")
    rng = np.random.default_rng(seed)
    xset = LqBall(n, q)
    x_ref, _ = xset.project(rng.standard_normal(n), tol=1e-12)
    H = rng.standard_normal((n, p))
    b = H.T @ x_ref
    cs = ConstraintSystem(n=n, p=p, fun=lambda x: H.T @ x - b,
                          jac=lambda x: H)
    x0, _ = xset.project(x_ref + 1e-5 * rng.standard_normal(n), tol=1e-12)
    meta = {"family": "lq_affine", "n": n, "p": p, "q": q, "seed": seed,
            "rng": RNG_ID}
    return ProblemInstance(cs=cs, xset=xset, x0=x0, x_ref=x_ref, meta=meta)


def gen_toy_orthant_affine() -> ProblemInstance:
    """Two-dimensional regression anchor: R^2_+ meeting x1 + x2 = 1.

    From x0 = (2, 0) the dissolving iteration follows an exact rational
    trajectory with residuals 1, 1/3, 1/15, 1/255, ... (each step maps a
    residual 1/s to 1/(s(s+2))), which tests pin down digit-for-digit.
    """
    J = np.array([[1.0], [1.0]])
    cs = ConstraintSystem(
        n=2, p=1,
        fun=lambda x: np.array([x[0] + x[1] - 1.0]),
        jac=lambda x: J,
    )

    def affine_projector(z):
        c = z[0] + z[1] - 1.0
        return z - 0.5 * c * np.ones(2)

    meta = {"family": "toy", "seed": 0, "rng": "deterministic"}
    return ProblemInstance(cs=cs, xset=Orthant(2), x0=np.array([2.0, 0.0]),
                           x_ref=np.array([1.0, 0.0]), meta=meta,
                           affine_projector=affine_projector)


#: family name -> (generator, ordered dimension parameters)
FAMILIES = {
    "correlation": (gen_correlation, ("n", "density")),
    "lowrank_affine": (gen_lowrank_affine, ("n", "m", "p", "r")),
    "qp_orthant": (gen_qp_orthant, ("n", "p")),
    "lq_affine": (gen_lq_affine, ("n", "p", "q")),
    "toy": (gen_toy_orthant_affine, ()),
}


def generate(family: str, dims: dict, seed: int) -> ProblemInstance:
    if family not in FAMILIES:
        raise DegenerateInstance(
            f"unknown family {family!r}; known: {', '.join(sorted(FAMILIES))}")
    gen, names = FAMILIES[family]
    if family == "toy":
        return gen()
    missing = [nm for nm in names if nm not in dims]
    extra = [nm for nm in dims if nm not in names]
    if missing or extra:
        raise DegenerateInstance(
            f"family {family!r} takes dims {list(names)}; "
            f"missing {missing}, unknown {extra}")
    return gen(seed=seed, **{nm: dims[nm] for nm in names})
