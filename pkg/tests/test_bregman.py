"""Mirror-map kernels and the interior dissolving variant."""

import numpy as np
import pytest

import apfeas as af
from apfeas.bregman import _KernelQSet
from apfeas.core import DIVERGED, DomainViolation
from apfeas.sets import Box, Orthant
from helpers import fit_loglog_slope, rate_slope


@pytest.fixture
def toy():
    return af.gen_toy_orthant_affine()


class TestKernels:
    @pytest.mark.parametrize("make,interior", [
        (af.entropy_kernel, lambda rng, n: np.abs(rng.standard_normal(n)) + 0.1),
        (af.fermi_dirac_kernel, lambda rng, n: rng.uniform(0.05, 0.95, n)),
    ], ids=["entropy", "fermi_dirac"])
    def test_mirror_map_round_trip(self, make, interior):
        rng = np.random.default_rng(0)
        kern = make(7)
        x = interior(rng, 7)
        back = kern.inv_grad_phi(kern.grad_phi(x))
        assert np.max(np.abs(back - x)) <= 1e-10

    @pytest.mark.parametrize("make,interior", [
        (af.entropy_kernel, lambda rng, n: np.abs(rng.standard_normal(n)) + 0.2),
        (af.fermi_dirac_kernel, lambda rng, n: rng.uniform(0.1, 0.9, n)),
    ], ids=["entropy", "fermi_dirac"])
    def test_w_matches_finite_difference_inverse_hessian(self, make, interior):
        rng = np.random.default_rng(1)
        n = 5
        kern = make(n)
        x = interior(rng, n)
        h = 1e-5
        H = np.zeros((n, n))
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            H[:, j] = (kern.grad_phi(x + e) - kern.grad_phi(x - e)) / (2 * h)
        W_fd = np.linalg.inv(H)
        assert np.max(np.abs(np.diag(W_fd) - kern.w_diag(x))) <= 1e-4

    def test_w_vanishes_on_boundary_normals(self):
        kern = af.entropy_kernel(4)
        x = np.array([0.7, 0.0, 1.3, 0.0])
        for g in kern.domain_set.normal_generators(x):
            assert np.linalg.norm(kern.w_apply(x, g)) == 0.0
        kern = af.fermi_dirac_kernel(3)
        x = np.array([0.0, 0.4, 1.0])
        for g in kern.domain_set.normal_generators(x):
            assert np.linalg.norm(kern.w_apply(x, g)) == 0.0

    def test_entropy_w_equals_orthant_Q(self):
        rng = np.random.default_rng(2)
        kern = af.entropy_kernel(9)
        xset = Orthant(9)
        x = np.abs(rng.standard_normal(9))
        x[2] = 0.0
        for _ in range(5):
            v = rng.standard_normal(9)
            assert np.max(np.abs(kern.w_apply(x, v)
                                 - xset.apply_Q(x, v))) <= 1e-14

    def test_fermi_dirac_w_equals_unit_box_Q(self):
        rng = np.random.default_rng(3)
        kern = af.fermi_dirac_kernel(6)
        box = Box(np.zeros(6), np.ones(6))
        x = rng.uniform(0, 1, 6)
        x[4] = 1.0
        for _ in range(5):
            v = rng.standard_normal(6)
            assert np.max(np.abs(kern.w_apply(x, v)
                                 - box.apply_Q(x, v))) <= 1e-14


class TestBregmanStep:
    def test_closed_form_toy_update(self, toy):
        kern = af.entropy_kernel(2)
        x = np.array([2.0, 0.5])
        # c = 3/2, weighted Gram = 5/2, tau = 1, so the direction is 3/7
        out = af.bregman_step(toy.cs, kern, x)
        assert np.max(np.abs(out - x * np.exp(-3 / 7))) <= 1e-12

    def test_feasible_point_is_fixed(self, toy):
        kern = af.entropy_kernel(2)
        x = np.array([0.25, 0.75])
        assert np.array_equal(af.bregman_step(toy.cs, kern, x), x)

    def test_boundary_point_rejected(self, toy):
        with pytest.raises(DomainViolation):
            af.bregman_step(toy.cs, af.entropy_kernel(2),
                            np.array([2.0, 0.0]))

    def test_agreement_with_projection_step(self):
        # the mirror update deviates from project(shifted point) by O(||c||^2)
        inst = af.gen_qp_orthant(25, 3, seed=2)
        kern = af.entropy_kernel(25)
        rng = np.random.default_rng(4)
        rs, diffs = [], []
        for eps in np.geomspace(3e-6, 3e-3, 9):
            y = inst.x_ref * np.exp(eps * rng.standard_normal(25))
            r = inst.cs.residual_norm(y)
            d = np.linalg.norm(af.bregman_step(inst.cs, kern, y)
                               - af.ap_step(inst.cs, inst.xset, y))
            if r > 0 and d > 0:
                rs.append(r)
                diffs.append(d)
        ratios = np.array(diffs) / np.array(rs) ** 2
        assert np.max(ratios) <= 50 * np.min(ratios)
        assert fit_loglog_slope(rs, diffs) >= 1.8

    def test_mirror_update_minimizes_linearized_bregman_objective(self, toy):
        # grid search over the interior at n = 2
        kern = af.entropy_kernel(2)
        x = np.array([0.9, 0.6])
        rep = af.dissolving_direction(toy.cs, _KernelQSet(kern), x)
        step = af.bregman_step(toy.cs, kern, x)
        grid = np.linspace(1e-3, 3.0, 601)
        Y1, Y2 = np.meshgrid(grid, grid, indexing="ij")

        def phi(a):
            return a * np.log(a) - a

        div = (phi(Y1) + phi(Y2) - phi(x[0]) - phi(x[1])
               - np.log(x[0]) * (Y1 - x[0]) - np.log(x[1]) * (Y2 - x[1]))
        obj = (Y1 - x[0]) * rep.d_vec[0] + (Y2 - x[1]) * rep.d_vec[1] + div
        i, j = np.unravel_index(np.argmin(obj), obj.shape)
        spacing = grid[1] - grid[0]
        assert abs(grid[i] - step[0]) <= spacing
        assert abs(grid[j] - step[1]) <= spacing


class TestSolveBregman:
    def test_toy_quadratic_tail(self, toy):
        kern = af.entropy_kernel(2)
        x, tr = af.solve_bregman(toy.cs, kern, np.array([2.0, 0.5]))
        assert tr.status == af.CONVERGED
        slope = rate_slope(tr.residuals)
        assert slope is not None and slope >= 1.7

    def test_qp_interior_regression(self):
        inst = af.gen_qp_orthant(20, 2, seed=0)
        kern = af.entropy_kernel(20)
        rng = np.random.default_rng(1)
        x0 = inst.x_ref * np.exp(0.05 * rng.standard_normal(20))
        x, tr = af.solve_bregman(inst.cs, kern, x0)
        assert tr.status == af.CONVERGED and tr.iterations <= 10
        assert np.all(x > 0)

    def test_feasible_interior_start_converges_immediately(self):
        inst = af.gen_qp_orthant(12, 2, seed=3)
        assert np.all(inst.x_ref > 0)
        kern = af.entropy_kernel(12)
        _, tr = af.solve_bregman(inst.cs, kern, inst.x_ref)
        assert tr.status == af.CONVERGED and tr.iterations == 0

    def test_divergence_guard(self):
        # a wrong-signed Jacobian turns the update into mirror ascent
        cs = af.ConstraintSystem(n=1, p=1,
                                 fun=lambda x: np.array([x[0] - 1.0]),
                                 jac=lambda x: np.array([[-1.0]]))
        kern = af.entropy_kernel(1)
        _, tr = af.solve_bregman(cs, kern, np.array([3.0]),
                                 af.SolverConfig(max_iters=2000))
        assert tr.status == DIVERGED
