"""Kernel evaluation, branch inverses, maximizers, axis fixed points."""

import math

import numpy as np
import pytest

from quarterwalk.errors import NoNegativeJumps, OutOfBranch
from quarterwalk.kernel import (
    axis_fixed_points,
    conjugate_alpha,
    conjugate_beta,
    curve_samples_csv,
    exp_transform_eval,
    find_branch_maximizers,
    kernel_eval,
)
from quarterwalk.model import Jump, StepDistribution, atom, step

SQRT5 = math.sqrt(5.0)


def swap(dist):
    return StepDistribution({Jump(j.l, j.k): w for j, w in dist.items()})


@pytest.fixture(scope="module")
def fib_curve(fib_ref):
    return find_branch_maximizers(fib_ref.model.interior)


class TestKernelEval:
    def test_normalization_point(self, fib_ref):
        assert kernel_eval(fib_ref.model.interior, 1.0, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_fibonacci_sequence_point(self, fib_ref):
        # (1/2, 1/5) is the pair (alpha_1, beta_1)
        assert abs(kernel_eval(fib_ref.model.interior, 0.5, 0.2)) < 1e-15

    def test_axis_root_point(self, fib_ref):
        # beta = 1: K = (2 alpha^2 - 3 alpha + 1)/3 vanishes at 1/2
        assert abs(kernel_eval(fib_ref.model.interior, 0.5, 1.0)) < 1e-15

    def test_exp_transform_identity(self, demo_ref):
        w = demo_ref.model.interior
        for x, y in [(-0.3, 0.1), (-1.0, -0.5), (0.2, 0.4), (0.0, 0.0)]:
            lhs = kernel_eval(w, math.exp(x), math.exp(y))
            rhs = math.exp(x + y) * exp_transform_eval(w, x, y)
            assert lhs == pytest.approx(rhs, abs=1e-14)


class TestBranchMaximizers:
    def test_fibonacci_analytic(self, fib_curve):
        assert fib_curve.alpha_hat == pytest.approx(SQRT5 / 3, abs=1e-12)
        assert fib_curve.beta_hat == pytest.approx(SQRT5 / 2, abs=1e-12)
        assert fib_curve.alpha_tilde == pytest.approx(SQRT5 / 2, abs=1e-12)
        assert fib_curve.beta_tilde == pytest.approx(SQRT5 / 3, abs=1e-12)

    def test_residuals_on_level_set(self, fib_curve, demo_ref):
        w = fib_curve.weights
        assert abs(kernel_eval(w, fib_curve.alpha_hat, fib_curve.beta_hat)) <= 1e-10
        assert abs(kernel_eval(w, fib_curve.alpha_tilde, fib_curve.beta_tilde)) <= 1e-10
        c = find_branch_maximizers(demo_ref.model.interior)
        assert abs(kernel_eval(c.weights, c.alpha_hat, c.beta_hat)) <= 1e-10

    def test_symmetric_model_swaps(self, fib_curve):
        # the Fibonacci interior is swap-invariant
        assert fib_curve.alpha_hat == pytest.approx(fib_curve.beta_tilde, abs=1e-10)
        assert fib_curve.beta_hat == pytest.approx(fib_curve.alpha_tilde, abs=1e-10)

    def test_biased_walk_stationarity(self, fgs_ref):
        # non-singular oval still has a well-defined top point
        w = fgs_ref.model.interior
        c = find_branch_maximizers(w)
        for d in (-1e-6, 1e-6):
            assert abs(c.u(c.alpha_hat + d) - c.beta_hat) < 1e-10

    def test_coordinate_swap_symmetry(self):
        w = step({(1, -1): 0.3, (-1, 1): 0.2, (1, 1): 0.3, (0, 1): 0.2})
        a = find_branch_maximizers(w)
        b = find_branch_maximizers(swap(w))
        assert a.alpha_hat == pytest.approx(b.beta_tilde, abs=1e-10)
        assert a.beta_hat == pytest.approx(b.alpha_tilde, abs=1e-10)
        assert a.alpha_tilde == pytest.approx(b.beta_hat, abs=1e-10)


class TestBranchInverses:
    def test_known_values(self, fib_curve):
        assert fib_curve.u_star(1.0) == pytest.approx(0.5, abs=1e-12)
        assert fib_curve.v_star(0.5) == pytest.approx(0.2, abs=1e-12)
        assert fib_curve.u_star(0.2) == pytest.approx(1 / 13, abs=1e-12)
        # v*(1) lands on the beta_{-1} branch value, not on u's root 1
        assert fib_curve.v_star(1.0) == pytest.approx(0.5, abs=1e-12)

    def test_zero_maps_to_zero(self, fib_curve):
        assert fib_curve.u_star(0.0) == 0.0
        assert fib_curve.v_star(0.0) == 0.0

    def test_residual_and_range_on_grid(self, fib_curve):
        w = fib_curve.weights
        for beta in np.linspace(0.0, fib_curve.beta_hat, 41):
            a = fib_curve.u_star(float(beta))
            assert a <= fib_curve.alpha_hat + 1e-12
            assert abs(kernel_eval(w, a, float(beta))) <= 1e-10

    def test_monotone_on_grid(self, fib_curve, demo_ref):
        for curve in (fib_curve, find_branch_maximizers(demo_ref.model.interior)):
            grid = np.linspace(0.0, curve.beta_hat, 60)
            vals = [curve.u_star(float(b)) for b in grid]
            assert all(x <= y + 1e-12 for x, y in zip(vals, vals[1:]))
            grid = np.linspace(0.0, curve.alpha_tilde, 60)
            vals = [curve.v_star(float(a)) for a in grid]
            assert all(x <= y + 1e-12 for x, y in zip(vals, vals[1:]))

    def test_inverse_hits_maximizer(self, fib_curve):
        assert fib_curve.u_star(fib_curve.beta_hat) == pytest.approx(
            fib_curve.alpha_hat, abs=1e-8)
        assert fib_curve.v_star(fib_curve.alpha_tilde) == pytest.approx(
            fib_curve.beta_tilde, abs=1e-8)

    def test_clamp_and_out_of_branch(self, fib_curve):
        fib_curve.u_star(fib_curve.beta_hat + 0.9e-12)  # clamped
        with pytest.raises(OutOfBranch):
            fib_curve.u_star(fib_curve.beta_hat + 1e-6)
        with pytest.raises(OutOfBranch):
            fib_curve.v_star(fib_curve.alpha_tilde + 1e-6)

    def test_curve_samples_csv(self, fib_curve):
        text = curve_samples_csv(fib_curve, count=20)
        lines = text.strip().splitlines()
        assert lines[0] == "alpha,u_alpha"
        assert len(lines) == 21


class TestAxisFixedPoints:
    def test_fibonacci(self, fib_ref):
        fp = axis_fixed_points(fib_ref.model.interior)
        assert fp.alpha_1 == pytest.approx(0.5, abs=1e-12)
        assert fp.beta_minus1 == pytest.approx(0.5, abs=1e-12)

    def test_biased_simple_walk(self, fgs_ref):
        fp = axis_fixed_points(fgs_ref.model.interior)
        assert fp.alpha_1 == pytest.approx(1 / 3, abs=1e-12)
        assert fp.beta_minus1 == pytest.approx(1 / 3, abs=1e-12)

    def test_residual(self, demo_ref):
        w = demo_ref.model.interior
        fp = axis_fixed_points(w)
        marg_k = {}
        for j, wt in w.items():
            marg_k[j.k] = marg_k.get(j.k, 0.0) + wt
        resid = fp.alpha_1 - sum(wt * fp.alpha_1 ** (k + 1)
                                 for k, wt in marg_k.items())
        assert abs(resid) <= 1e-12

    def test_unique_sign_change(self, fib_ref):
        # the defect changes sign exactly once on a fine grid of (0,1)
        w = fib_ref.model.interior
        marg = {}
        for j, wt in w.items():
            marg[j.k] = marg.get(j.k, 0.0) + wt

        def defect(a):
            return a - sum(wt * a ** (k + 1) for k, wt in marg.items())

        grid = np.linspace(1e-6, 1 - 1e-9, 4000)
        signs = np.sign([defect(a) for a in grid])
        changes = np.sum(signs[:-1] != signs[1:])
        assert changes == 1

    def test_pure_drift_rejected(self):
        with pytest.raises(NoNegativeJumps):
            axis_fixed_points(atom(1, 1))

    def test_swap_symmetry(self):
        w = step({(1, -1): 0.3, (-1, 1): 0.2, (1, 1): 0.3, (0, 1): 0.2})
        a = axis_fixed_points(w)
        b = axis_fixed_points(swap(w))
        assert a.alpha_1 == pytest.approx(b.beta_minus1, abs=1e-10)
        assert a.beta_minus1 == pytest.approx(b.alpha_1, abs=1e-10)


class TestConjugateRoots:
    def test_finite_group_cycle(self, fgs_ref):
        w = fgs_ref.model.interior
        a1 = conjugate_alpha(w, 1.0, 1.0)
        assert a1 == pytest.approx(1 / 3, abs=1e-12)
        b1 = conjugate_beta(w, a1, 1.0)
        assert b1 == pytest.approx(1 / 3, abs=1e-12)
        a2 = conjugate_alpha(w, b1, a1)
        assert a2 == pytest.approx(1.0, abs=1e-12)
