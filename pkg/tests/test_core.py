"""Core abstractions: Gram assembly, config validation, trace invariants."""

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from apfeas.core import (
    ConfigurationError,
    ConstraintSystem,
    IterRecord,
    IterateTrace,
    SolverConfig,
    assemble_gram,
    tau_value,
)
from apfeas.sets import Box, LowRankVariety, Orthant, PsdCone, Simplex
from helpers import dense_Q


def affine_cs(J, b):
    J = np.asarray(J, float)
    b = np.asarray(b, float)
    return ConstraintSystem(n=J.shape[0], p=J.shape[1],
                            fun=lambda x: J.T @ x - b,
                            jac=lambda x: J)


def test_gram_orthant_toy():
    # nonnegative quadrant, Q = Diag(x), single affine constraint
    cs = affine_cs([[1.0], [1.0]], [1.0])
    asm = assemble_gram(cs, Orthant(2), np.array([2.0, 0.0]))
    assert asm.G.shape == (1, 1)
    assert asm.G[0, 0] == pytest.approx(2.0, abs=0)
    assert asm.c[0] == pytest.approx(1.0, abs=0)


def test_gram_identity_Q_reduces_to_JtJ():
    # box [-1, 1]^n at the center has unit per-coordinate weights
    rng = np.random.default_rng(0)
    n, p = 6, 3
    J = rng.standard_normal((n, p))
    cs = affine_cs(J, np.zeros(p))
    box = Box(-np.ones(n), np.ones(n))
    asm = assemble_gram(cs, box, np.zeros(n))
    assert np.allclose(asm.G, J.T @ J, rtol=0, atol=1e-14)


def test_gram_psd_cone_identity_point():
    e11 = np.zeros((2, 2))
    e11[0, 0] = 1.0
    cs = affine_cs(e11.ravel()[:, None], [0.0])
    asm = assemble_gram(cs, PsdCone(2), np.eye(2).ravel())
    assert asm.G[0, 0] == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("make", [
    lambda rng: (Orthant(8), np.abs(rng.standard_normal(8))),
    lambda rng: (Box(-np.ones(5), 2 * np.ones(5)), rng.uniform(-1, 2, 5)),
    lambda rng: (Simplex(6), rng.dirichlet(np.ones(6))),
    lambda rng: (PsdCone(4), (lambda B: (B @ B.T).ravel())(
        rng.standard_normal((4, 2)))),
    lambda rng: (LowRankVariety(4, 3, 2), (
        rng.standard_normal((4, 2)) @ rng.standard_normal((2, 3))).ravel()),
])
def test_gram_is_psd(make):
    rng = np.random.default_rng(3)
    xset, x = make(rng)
    p = 4
    J = rng.standard_normal((xset.dim, p))
    cs = affine_cs(J, np.zeros(p))
    asm = assemble_gram(cs, xset, x)
    assert np.allclose(asm.G, asm.G.T)
    lam = np.linalg.eigvalsh(asm.G)
    assert lam[0] >= -1e-10 * max(abs(lam[0]), abs(lam[-1]), 1e-30)


def test_sparse_dense_agreement():
    rng = np.random.default_rng(5)
    s = 9
    xset = PsdCone(s)
    B = rng.standard_normal((s, 5))
    x = (B @ B.T).ravel()
    # random sparse symmetric-support constraint gradients
    p = 12
    J = sp.random(s * s, p, density=0.05, random_state=rng,
                  data_rvs=rng.standard_normal).tocsc()
    cs = ConstraintSystem(n=s * s, p=p,
                          fun=lambda z: np.asarray(J.T @ z).ravel(),
                          jac=lambda z: J.toarray(),
                          jac_sparse=lambda z: J)
    asm_sparse = assemble_gram(cs, xset, x)
    asm_dense = assemble_gram(cs, xset, x, dense=True)
    scale = np.max(np.abs(asm_dense.G))
    assert np.max(np.abs(asm_sparse.G - asm_dense.G)) <= 1e-12 * scale


def test_dimension_mismatch_is_configuration_error():
    cs = affine_cs(np.ones((3, 1)), [0.0])
    with pytest.raises(ConfigurationError):
        assemble_gram(cs, Orthant(2), np.zeros(2))


def test_sparse_columns_match_dense_apply():
    rng = np.random.default_rng(11)
    s = 6
    xset = PsdCone(s)
    B = rng.standard_normal((s, 3))
    x = (B @ B.T).ravel()
    cols = sp.random(s * s, 7, density=0.1, random_state=rng,
                     data_rvs=rng.standard_normal).tocsc()
    fast = np.asarray(xset.apply_Q_columns(x, cols).todense())
    dense = np.column_stack([xset.apply_Q(x, np.asarray(cols[:, j].todense()).ravel())
                             for j in range(cols.shape[1])])
    assert np.allclose(fast, dense, atol=1e-13)


class TestSolverConfig:
    def test_defaults_follow_benchmark_settings(self):
        cfg = SolverConfig()
        assert cfg.eta_max == 1.0
        assert cfg.alpha == 0.7
        assert cfg.max_linesearch == 10
        assert cfg.tol == 1e-10
        assert cfg.max_iters == 5000

    @pytest.mark.parametrize("bad", [
        dict(kappa=0.0), dict(kappa=1.0), dict(alpha=1.5),
        dict(eta_max=-1.0), dict(tol=0.0), dict(proj_tol_scale=0.0),
        dict(tau_rule="bogus"),
    ])
    def test_rejects_bad_values(self, bad):
        with pytest.raises(ConfigurationError):
            SolverConfig(**bad)

    def test_projection_tolerance_budget(self):
        cfg = SolverConfig()
        assert cfg.projection_tol(10.0) == 1e-12      # capped
        assert cfg.projection_tol(1e-8) == pytest.approx(1e-16, rel=1e-12)


@given(st.floats(min_value=1e-6, max_value=1.0),
       st.floats(min_value=1e-6, max_value=1.0))
def test_tau_strictly_increasing_on_unit_interval(a, b):
    lo, hi = sorted((a, b))
    for rule in ("min", "square"):
        assert tau_value(rule, 0.0) == 0.0
        if hi > lo:
            assert tau_value(rule, hi) > tau_value(rule, lo)


@given(st.floats(min_value=0.0, max_value=1e6))
def test_tau_min_rule_is_clamped(t):
    assert tau_value("min", t) <= 1.0


def test_trace_rejects_bad_rows():
    tr = IterateTrace()
    tr.append(IterRecord(k=0, residual=1.0))
    with pytest.raises(ValueError):
        tr.append(IterRecord(k=0, residual=0.5))
    with pytest.raises(ValueError):
        tr.append(IterRecord(k=1, residual=float("nan")))
    tr.append(IterRecord(k=1, residual=0.5))
    assert tr.iterations == 1
    assert tr.final_residual == 0.5


def test_dense_Q_helper_matches_apply():
    rng = np.random.default_rng(2)
    xset = Orthant(5)
    x = np.abs(rng.standard_normal(5))
    Q = dense_Q(xset, x)
    v = rng.standard_normal(5)
    assert np.allclose(Q @ v, xset.apply_Q(x, v))
