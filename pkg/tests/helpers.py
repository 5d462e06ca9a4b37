"""Shared test utilities: set samplers, dense operator assembly, slope fits."""

from __future__ import annotations

import numpy as np


def dense_Q(xset, x):
    """Assemble the projective mapping as a dense dim x dim matrix."""
    return np.asarray(xset.apply_Q_columns(x, np.eye(xset.dim)))


def fit_loglog_slope(xs, ys):
    """Least-squares slope of log(ys) against log(xs)."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    return float(np.linalg.lstsq(A, ly, rcond=None)[0][0])


def tail_transitions(residuals, max_count=3, floor=1e-12):
    """Last residual transitions usable for a convergence-rate fit.

    Drops transitions that land below ``floor`` (the round-off level of
    residual evaluation, far under the solve tolerance): those values carry
    no rate information.  Returns (before, after) arrays, newest last.
    """
    r = np.asarray(residuals, float)
    pairs = [(r[i], r[i + 1]) for i in range(len(r) - 1)
             if r[i] > floor and r[i + 1] > floor]
    pairs = pairs[-max_count:]
    if not pairs:
        return np.array([]), np.array([])
    before, after = zip(*pairs)
    return np.array(before), np.array(after)


def rate_slope(residuals, max_count=3, floor=1e-12):
    """Log-log slope of r_{k+1} against r_k over the usable tail, or None."""
    before, after = tail_transitions(residuals, max_count, floor)
    if before.size < 2:
        return None
    return fit_loglog_slope(before, after)


def sample_set_points(xset, rng, count):
    """Draw a mix of interior and boundary points of a catalog set."""
    kind, n = xset.kind, xset.dim
    pts = []
    for t in range(count):
        if kind == "Box":
            x = rng.uniform(xset.l, xset.u)
            if t % 2:
                idx = rng.choice(n, size=max(1, n // 4), replace=False)
                x[idx] = np.where(rng.random(idx.size) < 0.5,
                                  xset.l[idx], xset.u[idx])
        elif kind == "Orthant":
            x = np.abs(rng.standard_normal(n))
            if t % 2:
                x[rng.choice(n, size=max(1, n // 3), replace=False)] = 0.0
        elif kind == "L2Ball":
            d = rng.standard_normal(n)
            d /= np.linalg.norm(d)
            x = d * (xset.u if t % 2 else xset.u * rng.random())
        elif kind == "L1Ball":
            z = rng.standard_normal(n) * (2.0 if t % 2 else 0.03)
            x, _ = xset.project(z)
        elif kind == "LqBall":
            z = rng.standard_normal(n)
            if t % 2:
                x, _ = xset.project(2.0 * z, tol=1e-8)
                # land exactly on the q-sphere: the projection's slack (up
                # to its tolerance) would otherwise masquerade as a tiny
                # positive-definite term in the mapping
                qq = np.sum(np.abs(x) ** xset.q)
                if qq > 0:
                    x = x * (1.0 / qq) ** (1.0 / xset.q)
            else:
                # interior point by analytic rescaling (no inner solve needed)
                qq = np.sum(np.abs(z) ** xset.q)
                x = z * (0.7 / qq) ** (1.0 / xset.q)
        elif kind == "Simplex":
            w = np.abs(rng.standard_normal(n)) + 1e-3
            if t % 2:
                w[rng.choice(n, size=n // 2, replace=False)] = 0.0
            x = w / w.sum()
        elif kind == "L0Ball":
            x = np.zeros(n)
            nnz = xset.u if t % 2 else max(1, xset.u // 2)
            idx = rng.choice(n, size=nnz, replace=False)
            x[idx] = rng.standard_normal(nnz)
        elif kind == "PsdCone":
            s = xset.s
            rank = s if t % 2 == 0 else int(rng.integers(1, s))
            B = rng.standard_normal((s, rank))
            x = (B @ B.T).ravel()
        elif kind == "PsdSpectral":
            s = xset.s
            Qm, _ = np.linalg.qr(rng.standard_normal((s, s)))
            lam = rng.random(s)
            if t % 2:
                lam[0] = 0.0
            if t % 4 == 3:
                lam[-1] = 1.0
            x = ((Qm * lam) @ Qm.T).ravel()
        elif kind == "SpectralBall":
            m, s = xset.shape
            U, _, Vt = np.linalg.svd(rng.standard_normal((m, s)),
                                     full_matrices=False)
            sig = rng.random(min(m, s))
            if t % 2:
                sig[0] = 1.0
            x = ((U * sig) @ Vt).ravel()
        elif kind == "LowRankVariety":
            m, q = xset.shape
            rank = xset.r if t % 2 == 0 else int(rng.integers(1, xset.r + 1))
            x = (rng.standard_normal((m, rank))
                 @ rng.standard_normal((rank, q))).ravel()
        elif kind == "SymLowRank":
            s = xset.s
            rank = xset.r if t % 2 == 0 else int(rng.integers(1, xset.r + 1))
            B = rng.standard_normal((s, rank))
            sgn = np.sign(rng.standard_normal(rank))
            x = ((B * sgn) @ B.T).ravel()
        elif kind == "LowRankPsd":
            s = xset.s
            rank = xset.r if t % 2 == 0 else int(rng.integers(1, xset.r + 1))
            B = rng.standard_normal((s, rank))
            x = (B @ B.T).ravel()
        else:
            raise ValueError(f"no sampler for kind {kind!r}")
        pts.append(np.asarray(x, float).ravel())
    return pts


def matrix_rank_floor(M, rel=1e-8, abs_floor=1e-12):
    """Rank by singular values above rel * sigma_max, with an absolute floor:
    an operator whose largest singular value is itself at round-off level
    has rank zero (a relative cut would count pure noise)."""
    sv = np.linalg.svd(np.asarray(M, float), compute_uv=False)
    if sv.size == 0 or sv[0] <= abs_floor:
        return 0
    return int(np.sum(sv > rel * sv[0]))


def span_dim(vectors, rel=1e-8):
    if not len(vectors):
        return 0
    return matrix_rank_floor(np.asarray(vectors, float), rel)
