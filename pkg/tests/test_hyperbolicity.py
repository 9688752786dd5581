"""Verdict logic, the two-condition system check, and region scans."""

import numpy as np
import pytest

from hymo.hme1d import assemble_grad_A, build_system_by_deduction, regularize
from hymo.hyperbolicity import (analyze, check_abs_system, scan_grad_region,
                                symmetry_criterion)
from hymo.moment13 import (Moment13State, assemble_system_13, eigenspeeds_13,
                           sample_state_13)
from hymo.momentnd import orthonormalized_convection, sample_state_nd
from hymo.state1d import MomentState1D, QuasiLinearSystem


def reachable_from(field, start):
    """Cells of a boolean field connected to start by 4-neighbor steps."""
    seen = np.zeros_like(field, dtype=bool)
    if not field[start]:
        return seen
    stack = [start]
    seen[start] = True
    while stack:
        i, j = stack.pop()
        for a, b in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if 0 <= a < field.shape[0] and 0 <= b < field.shape[1] \
                    and field[a, b] and not seen[a, b]:
                seen[a, b] = True
                stack.append((a, b))
    return seen


class TestAnalyze:
    def test_identity_is_hyperbolic(self):
        report = analyze(np.eye(4))
        assert report.verdict == "hyperbolic"
        assert report.diagonalizable
        np.testing.assert_allclose(report.eigenvalues, np.ones(4), atol=0)

    def test_rotation_generator_is_not(self):
        report = analyze([[0.0, 1.0], [-1.0, 0.0]])
        assert report.verdict == "not_hyperbolic"
        np.testing.assert_allclose(np.sort(report.eigenvalues.imag),
                                   [-1.0, 1.0], atol=1e-14)

    def test_random_symmetric_is_hyperbolic(self, rng):
        B = rng.standard_normal((8, 8))
        assert analyze(B + B.T).verdict == "hyperbolic"

    def test_marginal_band(self):
        # eigenvalues +-1e-8 i: above tol*scale but below 1000x of it
        report = analyze([[0.0, 1.0], [-1e-16, 0.0]])
        assert report.verdict == "marginal"
        assert not report.diagonalizable

    def test_jordan_block_fails_on_conditioning(self):
        report = analyze([[0.0, 1.0], [0.0, 0.0]])
        assert report.verdict == "not_hyperbolic"
        assert report.max_imag == 0.0
        assert not np.isfinite(report.eigvec_condition) \
            or report.eigvec_condition >= report.cond_cap

    def test_eigenvalues_sorted_by_real_part(self, rng):
        A = rng.standard_normal((7, 7))
        lam = analyze(A).eigenvalues
        assert np.all(np.diff(lam.real) >= 0)

    def test_scale_relative_tolerance(self):
        # same shape as the rotation generator but 1e6 larger: the
        # verdict must not change under uniform scaling
        assert analyze([[0.0, 1e6], [-1e6, 0.0]]).verdict == "not_hyperbolic"

    def test_invalid_matrices_rejected(self):
        with pytest.raises(ValueError):
            analyze(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            analyze([[np.nan, 0.0], [0.0, 1.0]])

    def test_regularized_grad_states(self, rng, make_state_1d):
        for M in range(3, 11):
            s = make_state_1d(M, rng)
            Ahat = regularize(assemble_grad_A(s), s)
            assert analyze(Ahat).verdict == "hyperbolic"


class TestCheckAbsSystem:
    def test_deduction_system_passes(self, rng, make_state_1d):
        rep = check_abs_system(build_system_by_deduction(make_state_1d(5, rng)))
        assert rep.passed and rep.d_invertible and rep.all_hyperbolic

    def test_zero_derivative_matrix_fails(self):
        sys = QuasiLinearSystem(D=np.zeros((3, 3)), Mk=[np.eye(3)])
        rep = check_abs_system(sys)
        assert not rep.d_invertible
        assert not rep.passed

    def test_thirteen_moment_axis_direction(self, rng):
        state = sample_state_13(rng)
        sys13 = assemble_system_13(state)
        rep = check_abs_system(sys13, n_directions=5)
        assert rep.passed
        # the first axis direction carries the minimal-polynomial speeds
        res = analyze(sys13.Mk[0])
        speeds, mult = eigenspeeds_13(state, 1)
        expanded = np.sort(np.repeat(speeds, mult))
        np.testing.assert_allclose(res.eigenvalues.real, expanded, atol=1e-9)

    def test_seeded_directions_are_reproducible(self, rng, make_state_1d):
        sys = build_system_by_deduction(make_state_1d(4, rng))
        a = check_abs_system(sys, n_directions=6, seed=11)
        b = check_abs_system(sys, n_directions=6, seed=11)
        np.testing.assert_array_equal(np.stack(a.directions),
                                      np.stack(b.directions))


class TestSymmetryCriterion:
    def test_symmetric_list(self, rng):
        B = rng.standard_normal((5, 5))
        assert symmetry_criterion([B + B.T, np.eye(5)])

    def test_asymmetric_matrix(self):
        assert not symmetry_criterion([np.array([[0.0, 1.0], [0.0, 0.0]])])

    def test_orthonormalized_moment_matrices(self, rng):
        state = sample_state_nd(2, 3, "generalized", rng)
        assert symmetry_criterion(orthonormalized_convection(state))

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            symmetry_criterion([np.zeros((2, 3))])


class TestGradRegionScan:
    def test_order_three_region(self):
        grid = np.linspace(-1.0, 1.0, 21)
        res = scan_grad_region(3, grid, grid)
        origin = (10, 10)
        assert res.hyperbolic[origin]
        assert not res.hyperbolic.all()
        assert res.fraction_hyperbolic() == pytest.approx(63.0 / 441.0)
        # the hyperbolic region is connected and contains the origin
        seen = reachable_from(res.hyperbolic, origin)
        np.testing.assert_array_equal(seen, res.hyperbolic)
        # f_2 is structurally zero at order 3, so rows are identical
        assert np.array_equal(res.hyperbolic[0], res.hyperbolic[-1])

    @pytest.mark.parametrize("M", [4, 5])
    def test_higher_order_regions(self, M):
        grid = np.linspace(-1.0, 1.0, 11)
        res = scan_grad_region(M, grid, grid)
        origin = (5, 5)
        assert res.hyperbolic[origin]
        assert not res.hyperbolic.all()
        seen = reachable_from(res.hyperbolic, origin)
        np.testing.assert_array_equal(seen, res.hyperbolic)

    @pytest.mark.parametrize("M", [3, 4, 5])
    def test_regularized_scan_is_full(self, M):
        grid = np.linspace(-1.0, 1.0, 9)
        res = scan_grad_region(M, grid, grid, matrix="regularized")
        assert res.fraction_hyperbolic() == 1.0

    def test_large_coefficient_not_hyperbolic(self):
        s = MomentState1D(M=3, rho=1.0, u=0.0, theta=1.0, f=[10.0])
        assert analyze(assemble_grad_A(s)).verdict == "not_hyperbolic"

    def test_matrix_name_checked(self):
        with pytest.raises(ValueError):
            scan_grad_region(3, [0.0], [0.0], matrix="plain")
