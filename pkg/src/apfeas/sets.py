"""Catalog of closed sets with exact projections and projective mappings.

Every set works on flat float64 vectors; matrix kinds record their shape
and reshape internally (row-major).  Symmetric-matrix kinds live in the
full flattened ambient space: members are symmetric matrices, the operator
Q symmetrizes its input, and the normal-cone oracle therefore includes the
antisymmetric complement alongside the classical cone generators.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .core import (
    ConfigurationError,
    ProjectiveSet,
    StalledInnerSolve,
    UnsupportedOracle,
    as_point,
)


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def project_simplex(z: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {y >= 0, sum(y) = radius} by sort-and-threshold."""
    z = np.asarray(z, dtype=float)
    srt = np.sort(z)[::-1]
    csum = np.cumsum(srt) - radius
    ks = np.arange(1, z.size + 1)
    cond = srt - csum / ks > 0
    rho = int(np.nonzero(cond)[0][-1]) + 1
    theta = csum[rho - 1] / rho
    return np.maximum(z - theta, 0.0)


def project_l1_ball(z: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {||y||_1 <= radius}."""
    z = np.asarray(z, dtype=float)
    if np.abs(z).sum() <= radius:
        return z.copy()
    mags = project_simplex(np.abs(z), radius)
    return np.sign(z) * mags


# ---------------------------------------------------------------------------
# vector kinds


class Box(ProjectiveSet):
    """{x : l <= x <= u} with Q(x) = Diag((x_i - l_i)(u_i - x_i))."""

    kind = "Box"

    def __init__(self, l, u):
        self.l = np.asarray(l, dtype=float).ravel()
        self.u = np.asarray(u, dtype=float).ravel()
        if self.l.shape != self.u.shape or not np.all(self.l < self.u):
            raise ConfigurationError("Box requires l < u componentwise")
        self.dim = self.l.size
        w = float(np.max(self.u - self.l))
        self.rho_test = (1.0 + w) ** 3

    def _qdiag(self, x):
        return (x - self.l) * (self.u - x)

    def project(self, z, tol: float = 1e-12):
        return np.clip(as_point(z, self.dim), self.l, self.u), 0.0

    def apply_Q(self, x, v):
        return self._qdiag(x) * v

    def apply_Q_columns(self, x, cols):
        d = self._qdiag(x)
        if sp.issparse(cols):
            return cols.multiply(d[:, None]).tocsc()
        return d[:, None] * cols

    def contains(self, x, tol: float = 1e-9):
        return bool(np.all(x >= self.l - tol) and np.all(x <= self.u + tol))

    def normal_generators(self, x, tol: float = 1e-8):
        gens = []
        for i in range(self.dim):
            if x[i] <= self.l[i] + tol or x[i] >= self.u[i] - tol:
                e = np.zeros(self.dim)
                e[i] = 1.0
                gens.append(e)
        return gens


class Orthant(ProjectiveSet):
    """Nonnegative orthant with Q(x) = Diag(x)."""

    kind = "Orthant"
    rho_test = 1.0  # x + Diag(x)d stays in the orthant for ||d|| <= 1

    def __init__(self, n: int):
        self.dim = int(n)

    def project(self, z, tol: float = 1e-12):
        return np.maximum(as_point(z, self.dim), 0.0), 0.0

    def apply_Q(self, x, v):
        return x * v

    def apply_Q_columns(self, x, cols):
        if sp.issparse(cols):
            return cols.multiply(x[:, None]).tocsc()
        return x[:, None] * cols

    def contains(self, x, tol: float = 1e-9):
        return bool(np.all(x >= -tol))

    def normal_generators(self, x, tol: float = 1e-8):
        gens = []
        for i in np.nonzero(x <= tol)[0]:
            e = np.zeros(self.dim)
            e[i] = 1.0
            gens.append(e)
        return gens


class L2Ball(ProjectiveSet):
    """{x : ||x|| <= u} with Q(x) = I - x x^T / u^2."""

    kind = "L2Ball"

    def __init__(self, n: int, u: float = 1.0):
        if u <= 0:
            raise ConfigurationError("L2Ball radius must be positive")
        self.dim = int(n)
        self.u = float(u)
        self.rho_test = max(1.0, 1.0 / u)

    def project(self, z, tol: float = 1e-12):
        z = as_point(z, self.dim)
        nz = np.linalg.norm(z)
        if nz <= self.u:
            return z.copy(), 0.0
        return z * (self.u / nz), 0.0

    def apply_Q(self, x, v):
        return v - x * (x @ v) / (self.u ** 2)

    def apply_Q_columns(self, x, cols):
        if sp.issparse(cols):
            cols = np.asarray(cols.todense())
        return cols - np.outer(x, x @ cols) / (self.u ** 2)

    def contains(self, x, tol: float = 1e-9):
        return bool(np.linalg.norm(x) <= self.u + tol)

    def normal_generators(self, x, tol: float = 1e-8):
        nx = np.linalg.norm(x)
        if nx >= self.u - tol:
            return [x / nx]
        return []


class _RankOnePlusDiag(ProjectiveSet):
    """Shared Q-application for the Diag(.) - x x^T + scalar * I family."""

    def _qparts(self, x):
        """Return (diag_vector, scalar) so Q = Diag(d) - x x^T + s I."""
        raise NotImplementedError

    def apply_Q(self, x, v):
        d, s = self._qparts(x)
        return d * v - x * (x @ v) + s * v

    def apply_Q_columns(self, x, cols):
        if sp.issparse(cols):
            cols = np.asarray(cols.todense())
        d, s = self._qparts(x)
        return d[:, None] * cols - np.outer(x, x @ cols) + s * cols


class L1Ball(_RankOnePlusDiag):
    """{x : ||x||_1 <= 1} with Q(x) = (Diag(|x|) - x x^T) + (1 - ||x||_1) I."""

    kind = "L1Ball"

    def __init__(self, n: int):
        self.dim = int(n)
        self.rho_test = 8.0 * np.sqrt(n)

    def _qparts(self, x):
        return np.abs(x), 1.0 - np.abs(x).sum()

    def project(self, z, tol: float = 1e-12):
        return project_l1_ball(as_point(z, self.dim), 1.0), 0.0

    def contains(self, x, tol: float = 1e-9):
        return bool(np.abs(x).sum() <= 1.0 + tol)

    def normal_generators(self, x, tol: float = 1e-8):
        if np.abs(x).sum() < 1.0 - tol:
            return []
        gens = []
        support = np.abs(x) > tol
        s = np.where(support, np.sign(x), 0.0)
        gens.append(s / np.linalg.norm(s))
        for i in np.nonzero(~support)[0]:
            e = np.zeros(self.dim)
            e[i] = 1.0
            gens.append(e)
        return gens


class Simplex(_RankOnePlusDiag):
    """Probability simplex with Q(x) = Diag(x) - x x^T."""

    kind = "Simplex"

    def __init__(self, n: int):
        self.dim = int(n)
        self.rho_test = 8.0 * np.sqrt(n)

    def _qparts(self, x):
        return x.copy(), 0.0

    def project(self, z, tol: float = 1e-12):
        return project_simplex(as_point(z, self.dim), 1.0), 0.0

    def contains(self, x, tol: float = 1e-9):
        return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)

    def normal_generators(self, x, tol: float = 1e-8):
        gens = [np.ones(self.dim) / np.sqrt(self.dim)]
        for i in np.nonzero(x <= tol)[0]:
            e = np.zeros(self.dim)
            e[i] = 1.0
            gens.append(e)
        return gens


class L0Ball(ProjectiveSet):
    """{x : nnz(x) <= u} with Q(x) = Diag(x^2) and top-u magnitude projection.

    Excluded from the normal-cone test suite: its tangent-cone variants
    differ and the catalog keeps it only for the projection and Q surface.
    """

    kind = "L0Ball"
    rho_test = 1.0  # x + Diag(x^2)d preserves the support, distance is 0

    def __init__(self, n: int, u: int):
        if not 0 < int(u) <= int(n):
            raise ConfigurationError("L0Ball sparsity level must be in 1..n")
        self.dim = int(n)
        self.u = int(u)

    def project(self, z, tol: float = 1e-12):
        z = as_point(z, self.dim)
        # stable argsort: ties at the cut resolved by index order
        order = np.argsort(-np.abs(z), kind="stable")
        y = np.zeros_like(z)
        keep = order[: self.u]
        y[keep] = z[keep]
        return y, 0.0

    def apply_Q(self, x, v):
        return x * x * v

    def apply_Q_columns(self, x, cols):
        if sp.issparse(cols):
            return cols.multiply((x * x)[:, None]).tocsc()
        return (x * x)[:, None] * cols

    def contains(self, x, tol: float = 1e-9):
        return int(np.count_nonzero(np.abs(x) > tol)) <= self.u


class LqBall(_RankOnePlusDiag):
    """{x : sum |x_i|^q <= 1}, 0 < q <= 1, a nonconvex non-regular set.

    Q(x) = (Diag(|x|^{2-q}) - x x^T) + (1 - ||x||_q^q) I.  The projection is
    inexact: a damped reweighted fixed-point loop where each inner step is a
    weighted soft-threshold whose threshold is bisected so the iterate lands
    on the q-sphere, with smoothing eps_t = max(1e-3 * 0.5^t, 1e-12).
    """

    kind = "LqBall"
    max_outer = 200

    def __init__(self, n: int, q: float):
        if not 0.0 < q <= 1.0:
            raise ConfigurationError("LqBall exponent must satisfy 0 < q <= 1")
        self.dim = int(n)
        self.q = float(q)
        self.rho_test = 8.0 * n ** max(1.0 / q - 0.5, 0.5)

    def qnorm_q(self, x) -> float:
        return float(np.sum(np.abs(x) ** self.q))

    def _qparts(self, x):
        a = np.abs(x)
        return a ** (2.0 - self.q), 1.0 - float(np.sum(a ** self.q))

    def _threshold(self, z_abs, w, theta):
        return np.maximum(z_abs - theta * w, 0.0)

    def _bisect_on_sphere(self, z_abs, w):
        """Find theta with ||soft(z, theta*w)||_q^q = 1, from the feasible side."""
        q = self.q
        lo, hi = 0.0, float(np.max(z_abs / w)) + 1.0
        y_hi = None
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            y = self._threshold(z_abs, w, mid)
            g = float(np.sum(y ** q)) - 1.0
            if g > 0.0:
                lo = mid
            else:
                hi = mid
                y_hi = y
            if abs(g) <= 1e-13:
                break
        if y_hi is None:
            y_hi = self._threshold(z_abs, w, hi)
        return y_hi

    def project(self, z, tol: float = 1e-12):
        z = as_point(z, self.dim)
        if self.qnorm_q(z) <= 1.0:
            return z.copy(), 0.0
        q = self.q
        z_abs = np.abs(z)
        floor = 64 * np.finfo(float).eps * max(1.0, float(np.max(z_abs)))
        stop = max(tol, floor)
        y = z_abs.copy()
        move = np.inf
        for t in range(self.max_outer):
            eps = max(1e-3 * 0.5 ** t, 1e-12)
            w = q * (y + eps) ** (q - 1.0)
            y_new = self._bisect_on_sphere(z_abs, w)
            move = float(np.linalg.norm(y_new - y))
            y = y_new
            if move <= stop:
                break
        else:
            if move > stop:
                raise StalledInnerSolve(
                    f"lq reweighting did not reach tol={tol:g} within "
                    f"{self.max_outer} iterations (last movement {move:g})")
        return np.sign(z) * y, move

    def contains(self, x, tol: float = 1e-9):
        return self.qnorm_q(x) <= 1.0 + tol

    def normal_generators(self, x, tol: float = 1e-8):
        if self.qnorm_q(x) < 1.0 - tol:
            return []
        scale = max(1.0, float(np.max(np.abs(x))))
        support = np.abs(x) > 1e-13 * scale
        u = np.zeros(self.dim)
        u[support] = np.sign(x[support]) * np.abs(x[support]) ** (self.q - 1.0)
        gens = [u / np.linalg.norm(u)]
        for i in np.nonzero(~support)[0]:
            e = np.zeros(self.dim)
            e[i] = 1.0
            gens.append(e)
        return gens


# ---------------------------------------------------------------------------
# matrix kinds


class _MatrixSet(ProjectiveSet):
    """Base for matrix variables stored row-major flattened."""

    shape: tuple

    def _mat(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float).reshape(self.shape)

    def _flat(self, M) -> np.ndarray:
        return np.ascontiguousarray(M, dtype=float).ravel()


def _antisym_basis(s: int):
    """Unit generators of the antisymmetric complement, flattened (s x s)."""
    gens = []
    for i in range(s):
        for j in range(i + 1, s):
            g = np.zeros((s, s))
            g[i, j] = 1.0 / np.sqrt(2.0)
            g[j, i] = -1.0 / np.sqrt(2.0)
            gens.append(g.ravel())
    return gens


def _sym_block_generators(u2: np.ndarray):
    """Unit generators of {U2 M U2^T : M symmetric}, flattened."""
    gens = []
    k = u2.shape[1]
    for a in range(k):
        for b in range(a, k):
            if a == b:
                g = np.outer(u2[:, a], u2[:, a])
            else:
                g = (np.outer(u2[:, a], u2[:, b])
                     + np.outer(u2[:, b], u2[:, a])) / np.sqrt(2.0)
            gens.append(g.ravel())
    return gens


class _LyapunovSet(_MatrixSet):
    """Symmetric-matrix kinds whose Q is S -> (M(x) S + S M(x)) / 2.

    The operator symmetrizes its input first, so its null space picks up
    the antisymmetric complement, matching the normal cone of a set that
    lives inside the symmetric subspace of the flattened ambient space.
    """

    rho_test = 200.0

    def __init__(self, s: int):
        self.s = int(s)
        self.shape = (self.s, self.s)
        self.dim = self.s * self.s

    def _operator_matrix(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply_Q(self, x, v):
        X = self._mat(x)
        S = _sym(self._mat(v))
        M = self._operator_matrix(X)
        return self._flat(0.5 * (M @ S + S @ M))

    def apply_Q_columns(self, x, cols):
        X = self._mat(x)
        M = self._operator_matrix(X)
        if sp.issparse(cols):
            return self._apply_columns_sparse(M, cols)
        p = cols.shape[1]
        D = cols.T.reshape(p, self.s, self.s)
        S = 0.5 * (D + D.transpose(0, 2, 1))
        out = 0.5 * (M @ S + S @ M)
        return out.reshape(p, self.dim).T

    def _apply_columns_sparse(self, M, cols):
        """Sparsity-aware columnwise application.

        Each input entry v at matrix position (a, b) contributes four
        length-s strips (columns a and b, rows a and b of M, each scaled
        by v/4) to the output column; duplicates are summed on conversion.
        """
        s = self.s
        coo = cols.tocoo()
        a = coo.row // s
        b = coo.row % s
        v4 = coo.data / 4.0
        idx = np.arange(s)
        rows = np.concatenate([
            (idx[None, :] * s + b[:, None]).ravel(),
            (idx[None, :] * s + a[:, None]).ravel(),
            (a[:, None] * s + idx[None, :]).ravel(),
            (b[:, None] * s + idx[None, :]).ravel(),
        ])
        vals = np.concatenate([
            (M.T[a] * v4[:, None]).ravel(),
            (M.T[b] * v4[:, None]).ravel(),
            (M[b] * v4[:, None]).ravel(),
            (M[a] * v4[:, None]).ravel(),
        ])
        out_cols = np.tile(np.repeat(coo.col, s), 4)
        qj = sp.coo_matrix((vals, (rows, out_cols)), shape=(self.dim, cols.shape[1]))
        return qj.tocsc()

    def _eigh(self, x):
        return np.linalg.eigh(_sym(self._mat(x)))

    def _is_symmetric(self, x, tol):
        X = self._mat(x)
        scale = max(1.0, float(np.abs(X).max()))
        return float(np.abs(X - X.T).max()) <= tol * scale


class PsdCone(_LyapunovSet):
    """Positive semidefinite cone; Q(X)[Y] = (X sym(Y) + sym(Y) X) / 2."""

    kind = "PsdCone"

    def _operator_matrix(self, X):
        return X

    def project(self, z, tol: float = 1e-12):
        lam, U = self._eigh(z)
        lam = np.maximum(lam, 0.0)
        return self._flat((U * lam) @ U.T), 0.0

    def contains(self, x, tol: float = 1e-9):
        if not self._is_symmetric(x, tol):
            return False
        lam = np.linalg.eigvalsh(_sym(self._mat(x)))
        return bool(lam[0] >= -tol * max(1.0, lam[-1]))

    def normal_generators(self, x, tol: float = 1e-8):
        lam, U = self._eigh(x)
        null = lam <= tol * max(1.0, float(lam[-1]))
        gens = _sym_block_generators(U[:, null]) if np.any(null) else []
        return gens + _antisym_basis(self.s)


class PsdSpectral(_LyapunovSet):
    """{X symmetric : 0 <= X <= I}; Q(X)[Y] = ((X - X^2) sym(Y) + sym(Y)(X - X^2)) / 2."""

    kind = "PsdSpectral"

    def _operator_matrix(self, X):
        return X - X @ X

    def project(self, z, tol: float = 1e-12):
        lam, U = self._eigh(z)
        lam = np.clip(lam, 0.0, 1.0)
        return self._flat((U * lam) @ U.T), 0.0

    def contains(self, x, tol: float = 1e-9):
        if not self._is_symmetric(x, tol):
            return False
        lam = np.linalg.eigvalsh(_sym(self._mat(x)))
        return bool(lam[0] >= -tol and lam[-1] <= 1.0 + tol)


class SymLowRank(_LyapunovSet):
    """Symmetric matrices of rank <= r; Q(X)[Y] = (X^2 sym(Y) + sym(Y) X^2) / 2."""

    kind = "SymLowRank"

    def __init__(self, m: int, r: int):
        super().__init__(m)
        if not 0 < int(r) <= int(m):
            raise ConfigurationError("rank must be in 1..m")
        self.r = int(r)

    def _operator_matrix(self, X):
        return X @ X

    def project(self, z, tol: float = 1e-12):
        lam, U = self._eigh(z)
        order = np.argsort(-np.abs(lam), kind="stable")
        keep = order[: self.r]
        out = (U[:, keep] * lam[keep]) @ U[:, keep].T
        return self._flat(out), 0.0

    def contains(self, x, tol: float = 1e-9):
        if not self._is_symmetric(x, tol):
            return False
        alam = np.sort(np.abs(np.linalg.eigvalsh(_sym(self._mat(x)))))[::-1]
        if self.r >= self.s:
            return True
        return bool(alam[self.r] <= tol * max(1.0, alam[0]))

    def normal_generators(self, x, tol: float = 1e-8):
        lam, U = self._eigh(x)
        null = np.abs(lam) <= tol * max(1.0, float(np.abs(lam).max()))
        gens = _sym_block_generators(U[:, null]) if np.any(null) else []
        return gens + _antisym_basis(self.s)


class LowRankPsd(_LyapunovSet):
    """PSD matrices of rank <= r; Q(X)[Y] = (X sym(Y) + sym(Y) X) / 2."""

    kind = "LowRankPsd"

    def __init__(self, m: int, r: int):
        super().__init__(m)
        if not 0 < int(r) <= int(m):
            raise ConfigurationError("rank must be in 1..m")
        self.r = int(r)

    def _operator_matrix(self, X):
        return X

    def project(self, z, tol: float = 1e-12):
        lam, U = self._eigh(z)
        keep = np.argsort(-lam, kind="stable")[: self.r]
        vals = np.maximum(lam[keep], 0.0)
        return self._flat((U[:, keep] * vals) @ U[:, keep].T), 0.0

    def contains(self, x, tol: float = 1e-9):
        if not self._is_symmetric(x, tol):
            return False
        lam = np.linalg.eigvalsh(_sym(self._mat(x)))
        if lam[0] < -tol * max(1.0, lam[-1]):
            return False
        if self.r >= self.s:
            return True
        lam_desc = lam[::-1]
        return bool(lam_desc[self.r] <= tol * max(1.0, lam_desc[0]))

    def normal_generators(self, x, tol: float = 1e-8):
        lam, U = self._eigh(x)
        null = lam <= tol * max(1.0, float(lam[-1]))
        gens = _sym_block_generators(U[:, null]) if np.any(null) else []
        return gens + _antisym_basis(self.s)


class SpectralBall(_MatrixSet):
    """{X in R^{m x s} : ||X||_2 <= 1}; Q(X)[Y] = Y - X sym(X^T Y)."""

    kind = "SpectralBall"
    rho_test = 200.0

    def __init__(self, m: int, s: int):
        self.shape = (int(m), int(s))
        self.dim = int(m) * int(s)

    def project(self, z, tol: float = 1e-12):
        U, sig, Vt = np.linalg.svd(self._mat(z), full_matrices=False)
        sig = np.minimum(sig, 1.0)
        return self._flat((U * sig) @ Vt), 0.0

    def apply_Q(self, x, v):
        X = self._mat(x)
        Y = self._mat(v)
        return self._flat(Y - X @ _sym(X.T @ Y))

    def apply_Q_columns(self, x, cols):
        if sp.issparse(cols):
            cols = np.asarray(cols.todense())
        X = self._mat(x)
        p = cols.shape[1]
        Y = cols.T.reshape((p,) + self.shape)
        W = X.T @ Y
        out = Y - X @ (0.5 * (W + W.transpose(0, 2, 1)))
        return out.reshape(p, self.dim).T

    def contains(self, x, tol: float = 1e-9):
        sig = np.linalg.svd(self._mat(x), compute_uv=False)
        return bool(sig[0] <= 1.0 + tol)


class LowRankVariety(_MatrixSet):
    """{X in R^{m x q} : rank(X) <= r}; Q(X)[D] = (X X^T D + D X^T X) / 2."""

    kind = "LowRankVariety"
    rho_test = 200.0

    def __init__(self, m: int, q: int, r: int):
        if not 0 < int(r) <= min(int(m), int(q)):
            raise ConfigurationError("rank must be in 1..min(m, q)")
        self.shape = (int(m), int(q))
        self.dim = int(m) * int(q)
        self.r = int(r)

    def project(self, z, tol: float = 1e-12):
        U, sig, Vt = np.linalg.svd(self._mat(z), full_matrices=False)
        sig = sig.copy()
        sig[self.r:] = 0.0  # first r in the decomposition's output order
        return self._flat((U * sig) @ Vt), 0.0

    def apply_Q(self, x, v):
        X = self._mat(x)
        D = self._mat(v)
        return self._flat(0.5 * ((X @ X.T) @ D + D @ (X.T @ X)))

    def apply_Q_columns(self, x, cols):
        if sp.issparse(cols):
            cols = np.asarray(cols.todense())
        X = self._mat(x)
        A = X @ X.T
        B = X.T @ X
        p = cols.shape[1]
        D = cols.T.reshape((p,) + self.shape)
        out = 0.5 * (A @ D + D @ B)
        return out.reshape(p, self.dim).T

    def contains(self, x, tol: float = 1e-9):
        sig = np.linalg.svd(self._mat(x), compute_uv=False)
        if self.r >= sig.size:
            return True
        return bool(sig[self.r] <= tol * max(1.0, sig[0]))

    def normal_generators(self, x, tol: float = 1e-8):
        U, sig, Vt = np.linalg.svd(self._mat(x))
        d = int(np.sum(sig > tol * max(1.0, float(sig[0]) if sig.size else 1.0)))
        U2 = U[:, d:]
        V2 = Vt.T[:, d:]
        gens = []
        for a in range(U2.shape[1]):
            for b in range(V2.shape[1]):
                gens.append(np.outer(U2[:, a], V2[:, b]).ravel())
        return gens


# ---------------------------------------------------------------------------
# factory

_CATALOG = {
    "Box": (Box, ("l", "u")),
    "Orthant": (Orthant, ("n",)),
    "L2Ball": (L2Ball, ("n", "u")),
    "L1Ball": (L1Ball, ("n",)),
    "Simplex": (Simplex, ("n",)),
    "L0Ball": (L0Ball, ("n", "u")),
    "LqBall": (LqBall, ("n", "q")),
    "SpectralBall": (SpectralBall, ("m", "s")),
    "PsdCone": (PsdCone, ("s",)),
    "PsdSpectral": (PsdSpectral, ("s",)),
    "LowRankVariety": (LowRankVariety, ("m", "q", "r")),
    "SymLowRank": (SymLowRank, ("m", "r")),
    "LowRankPsd": (LowRankPsd, ("m", "r")),
}


def set_kinds():
    return sorted(_CATALOG)


def make_set(kind: str, **params) -> ProjectiveSet:
    """Instantiate a catalog set by kind name (the names used in CLI configs)."""
    if kind not in _CATALOG:
        raise ConfigurationError(
            f"unknown set kind {kind!r}; known kinds: {', '.join(set_kinds())}")
    cls, names = _CATALOG[kind]
    unknown = set(params) - set(names)
    if unknown:
        raise ConfigurationError(
            f"unknown parameter(s) {sorted(unknown)} for set kind {kind!r}")
    if kind == "L2Ball":
        params.setdefault("u", 1.0)
    missing = [nm for nm in names if nm not in params and not (kind == "L2Ball" and nm == "u")]
    if missing:
        raise ConfigurationError(f"set kind {kind!r} requires parameters {missing}")
    return cls(**{nm: params[nm] for nm in names if nm in params})
