"""Multi-dimensional systems: probing, reductions, and frame changes.

Two independent oracles guard the probe assembly. The derivative
matrix is checked against central finite differences of the actual
distribution function, projected back onto the basis in the
Gaussian-weighted inner product (grades are orthogonal there, so the
truncated grade M+1 component drops out exactly). The convection
matrix is checked against a quadrature expansion of xi_k times the
distribution in the order M+1 basis.
"""

import math

import numpy as np
import pytest

from hymo.hermite import hermite_gauss
from hymo.hme1d import assemble_D, assemble_Mmat, build_system_by_deduction
from hymo.hyperbolicity import analyze, check_abs_system
from hymo.momentnd import (MomentStateND, _poly_eval, _unknown_tangent,
                           assemble_D_nd, assemble_M_nd, assemble_system_nd,
                           basis_polynomials, bgk_source_nd,
                           classic_reduction_jacobian, enumerate_indices,
                           multinomial, orthonormalized_convection,
                           rotate_state, sample_state_nd, validate_nd)
from hymo.state1d import bgk_source


def nd_from_1d(s):
    """Classic one-dimensional embedding of a 1D moment state."""
    f = {(a,): s.fcoef(a) for a in range(3, s.M + 1)}
    return MomentStateND(dim=1, order=s.M, kind="classic", rho=s.rho,
                         u=np.array([s.u]), theta=s.theta, f=f)


def shifted_state(state, alpha, eps):
    """State moved by eps along the unknown tangent paired with alpha."""
    drho, du, dTh, df = _unknown_tangent(state, alpha)
    f = dict(state.f)
    for k, v in df.items():
        f[k] = f.get(k, 0.0) + eps * v
    if state.kind == "classic":
        theta = state.theta + (eps * dTh[0, 0] if np.any(dTh) else 0.0)
    else:
        theta = state.theta + eps * dTh
    return MomentStateND(dim=state.dim, order=state.order, kind=state.kind,
                         rho=state.rho + eps * drho, u=state.u + eps * du,
                         theta=theta, f=f)


def gaussian_density(points, u, Th):
    dim = len(u)
    c = points - u
    quad = np.einsum("pi,ij,pj->p", c, np.linalg.inv(Th), c)
    return np.exp(-0.5 * quad) \
        / math.sqrt((2.0 * math.pi) ** dim * np.linalg.det(Th))


def distribution_values(state, points):
    """F(xi) = sum_alpha f_alpha P_alpha(xi - u) N(xi - u; Theta)."""
    polys = basis_polynomials(state)
    gauss = gaussian_density(points, state.u, state.theta_tensor())
    c = points - state.u
    out = np.zeros(points.shape[0])
    for alpha in enumerate_indices(state.dim, state.order):
        coef = state.fcoef(alpha)
        if coef != 0.0:
            out += coef * _poly_eval(polys[alpha], c) * gauss
    return out


def tensor_quadrature(dim, n_nodes):
    nodes, weights = hermite_gauss(n_nodes)
    grids = np.meshgrid(*([nodes] * dim), indexing="ij")
    xi = np.stack([g.ravel() for g in grids], axis=1)
    wg = np.meshgrid(*([weights] * dim), indexing="ij")
    w = np.prod(np.stack([g.ravel() for g in wg], axis=1), axis=1)
    return xi, w


def finite_difference_D(state, eps=1e-6):
    """Central-difference twin of assemble_D_nd built from F itself."""
    indices = enumerate_indices(state.dim, state.order)
    xi, w = tensor_quadrature(state.dim, state.order + 2)
    cpts = xi @ np.linalg.cholesky(state.theta_tensor()).T
    points = cpts + state.u
    polys = basis_polynomials(state)
    P = np.stack([_poly_eval(polys[a], cpts) for a in indices], axis=0)
    gram = (P * w) @ P.T
    gram = 0.5 * (gram + gram.T)
    n0 = gaussian_density(points, state.u, state.theta_tensor())
    cols = []
    for alpha in indices:
        dF = (distribution_values(shifted_state(state, alpha, eps), points)
              - distribution_values(shifted_state(state, alpha, -eps),
                                    points)) / (2.0 * eps)
        cols.append(np.linalg.solve(gram, (P * w) @ (dF / n0)))
    return np.stack(cols, axis=1)


def quadrature_M_apply(state, k, v):
    """Coefficients of xi_k F expanded one order higher, then truncated."""
    dim, order = state.dim, state.order
    lifted = MomentStateND(dim=dim, order=order + 1, kind="generalized",
                           rho=state.rho, u=state.u.copy(),
                           theta=state.theta_tensor())
    polys = basis_polynomials(lifted)
    idx_lo = enumerate_indices(dim, order)
    idx_hi = enumerate_indices(dim, order + 1)
    xi, w = tensor_quadrature(dim, order + 2)
    cpts = xi @ np.linalg.cholesky(state.theta_tensor()).T
    vel_k = state.u[k - 1] + cpts[:, k - 1]
    vals_hi = np.stack([_poly_eval(polys[a], cpts) for a in idx_hi], axis=0)
    vals_lo = vals_hi[[idx_hi.index(a) for a in idx_lo]]
    gram = (vals_hi * w) @ vals_hi.T
    b = (vals_hi * w) @ (vel_k * (v @ vals_lo))
    coeffs = np.linalg.solve(0.5 * (gram + gram.T), b)
    return np.array([coeffs[idx_hi.index(a)] for a in idx_lo])


class TestEnumeration:
    def test_pinned_orders(self):
        assert enumerate_indices(1, 3) == [(0,), (1,), (2,), (3,)]
        assert enumerate_indices(2, 1) == [(0, 0), (0, 1), (1, 0)]

    @pytest.mark.parametrize("dim,order", [(2, 3), (3, 3), (3, 5), (4, 2)])
    def test_count_and_grading(self, dim, order):
        idx = enumerate_indices(dim, order)
        assert len(idx) == math.comb(order + dim, dim)
        assert idx == sorted(idx, key=lambda a: (sum(a), a))
        assert len(set(idx)) == len(idx)

    def test_arguments_checked(self):
        with pytest.raises(ValueError):
            enumerate_indices(0, 3)

    def test_multinomial(self):
        assert multinomial((0, 0)) == 1
        assert multinomial((2, 1)) == 3
        assert multinomial((2, 2, 1)) == 30


class TestStateND:
    def test_structural_coefficients(self, rng):
        s = sample_state_nd(2, 4, "generalized", rng)
        assert s.fcoef((0, 0)) == s.rho
        assert s.fcoef((1, 0)) == 0.0
        assert s.fcoef((1, 1)) == 0.0  # generalized grade 2 vanishes
        assert s.fcoef((-1, 2)) == 0.0
        assert s.fcoef((5, 0)) == 0.0
        c = sample_state_nd(2, 4, "classic", rng)
        assert c.fcoef((1, 1)) == c.f[(1, 1)]

    def test_classic_grade_two_trace_free(self, rng):
        for dim in (2, 3):
            s = sample_state_nd(dim, 4, "classic", rng)
            trace = sum(s.fcoef(tuple(2 if e == d else 0 for e in range(dim)))
                        for d in range(dim))
            assert abs(trace) < 1e-13

    def test_validation(self, rng):
        for kind in ("classic", "generalized"):
            assert validate_nd(sample_state_nd(2, 3, kind, rng)) == []
        bad = MomentStateND(dim=2, order=3, kind="generalized", rho=1.0,
                            u=np.zeros(2), theta=-np.eye(2))
        assert any("positive definite" in p for p in validate_nd(bad))
        with pytest.raises(ValueError):
            MomentStateND(dim=2, order=3, kind="other", rho=1.0,
                          u=np.zeros(2), theta=1.0)
        with pytest.raises(ValueError):
            MomentStateND(dim=2, order=3, kind="classic", rho=1.0,
                          u=np.zeros(2), theta=1.0, f={(1, 0): 0.5})

    def test_json_round_trip(self, rng):
        for kind in ("classic", "generalized"):
            s = sample_state_nd(3, 4, kind, rng)
            t = MomentStateND.from_json_dict(s.to_json_dict())
            assert t.f == s.f
            np.testing.assert_array_equal(t.u, s.u)
            np.testing.assert_array_equal(np.asarray(t.theta),
                                          np.asarray(s.theta))

    def test_theta_tensor(self, rng):
        s = sample_state_nd(2, 3, "classic", rng)
        np.testing.assert_array_equal(s.theta_tensor(),
                                      s.theta * np.eye(2))


class TestOneDimensionalReduction:
    @pytest.mark.parametrize("M", [3, 4, 5, 6])
    def test_matches_deduction_route(self, M, rng, make_state_1d):
        s1 = make_state_1d(M, rng)
        snd = nd_from_1d(s1)
        T = classic_reduction_jacobian(M)
        np.testing.assert_array_equal(assemble_D_nd(snd) @ T, assemble_D(s1))
        np.testing.assert_array_equal(assemble_M_nd(snd, 1),
                                      assemble_Mmat(s1.u, s1.theta, M))
        np.testing.assert_array_equal(bgk_source_nd(snd, 1.4),
                                      bgk_source(s1, 1.4))

    def test_transport_matrices_agree(self, rng, make_state_1d):
        s1 = make_state_1d(5, rng)
        ref = build_system_by_deduction(s1).transport_matrix()
        T = classic_reduction_jacobian(5)
        sysnd = assemble_system_nd(nd_from_1d(s1))
        got = np.linalg.solve(sysnd.D @ T, sysnd.Mk[0] @ sysnd.D @ T)
        np.testing.assert_allclose(got, ref, atol=1e-11 * max(1, np.abs(ref).max()))


class TestDerivativeMatrix:
    @pytest.mark.parametrize("dim,order", [(2, 3), (2, 4), (3, 3)])
    def test_generalized_literally_triangular(self, dim, order, rng):
        s = sample_state_nd(dim, order, "generalized", rng)
        D = assemble_D_nd(s)
        np.testing.assert_array_equal(np.triu(D, 1), np.zeros_like(D))
        assert np.all(np.diag(D) != 0.0)

    @pytest.mark.parametrize("dim,order", [(2, 3), (3, 3)])
    def test_generalized_determinant(self, dim, order, rng):
        s = sample_state_nd(dim, order, "generalized", rng)
        ref = s.rho ** (2 * dim + dim * (dim - 1) // 2) / 2.0 ** dim
        assert np.linalg.det(assemble_D_nd(s)) == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("dim,order", [(2, 3), (3, 3), (3, 5)])
    def test_classic_block_triangular_with_density_determinant(
            self, dim, order, rng):
        s = sample_state_nd(dim, order, "classic", rng)
        indices = enumerate_indices(dim, order)
        D = assemble_D_nd(s)
        grades = np.array([sum(a) for a in indices])
        # rows of lower grade never couple to higher-grade unknowns
        mask = grades[:, None] < grades[None, :]
        assert np.abs(D[mask]).max() == 0.0
        assert np.linalg.det(D) == pytest.approx(s.rho ** (dim + 1),
                                                 rel=1e-10)

    def test_classic_triangular_at_unit_density(self, rng):
        s = sample_state_nd(2, 4, "classic", rng)
        s = MomentStateND(dim=2, order=4, kind="classic", rho=1.0, u=s.u,
                          theta=s.theta, f=s.f)
        D = assemble_D_nd(s)
        np.testing.assert_array_equal(np.triu(D, 1), np.zeros_like(D))

    @pytest.mark.parametrize("dim,order,kind", [
        (1, 4, "classic"), (2, 3, "classic"),
        (2, 4, "generalized"), (3, 3, "generalized")])
    def test_finite_difference_oracle(self, dim, order, kind, rng):
        s = sample_state_nd(dim, order, kind, rng)
        D = assemble_D_nd(s)
        err = np.abs(finite_difference_D(s) - D).max()
        assert err < 1e-7 * max(1.0, np.abs(D).max())


class TestConvectionMatrix:
    def test_axis_checked(self, rng):
        with pytest.raises(ValueError):
            assemble_M_nd(sample_state_nd(2, 3, "classic", rng), 3)

    def test_top_grade_cutoff(self, rng):
        s = sample_state_nd(2, 3, "classic", rng)
        indices = enumerate_indices(2, 3)
        M = assemble_M_nd(s, 1)
        for r, alpha in enumerate(indices):
            if sum(alpha) == 3:
                for c, beta in enumerate(indices):
                    if sum(beta) == 3 and beta != alpha:
                        assert M[r, c] == 0.0
                assert M[r, r] == s.u[0]

    @pytest.mark.parametrize("dim,order,kind", [
        (2, 3, "classic"), (2, 4, "generalized"), (3, 3, "generalized")])
    def test_quadrature_oracle(self, dim, order, kind, rng):
        s = sample_state_nd(dim, order, kind, rng)
        v = rng.normal(size=len(enumerate_indices(dim, order)))
        for k in range(1, dim + 1):
            ref = assemble_M_nd(s, k) @ v
            got = quadrature_M_apply(s, k, v)
            assert np.abs(ref - got).max() < 1e-12 * max(1.0, np.abs(ref).max())


class TestSourceAndSystem:
    def test_bgk_pattern(self, rng):
        s = sample_state_nd(2, 4, "classic", rng)
        q = bgk_source_nd(s, 2.0)
        indices = enumerate_indices(2, 4)
        for r, alpha in enumerate(indices):
            if sum(alpha) < 2:
                assert q[r] == 0.0
            else:
                assert q[r] == -s.fcoef(alpha) / 2.0
        # trace of the grade-2 sources vanishes: energy is conserved
        trace = sum(q[indices.index(tuple(2 if e == d else 0
                                          for e in range(2)))]
                    for d in range(2))
        assert abs(trace) < 1e-13
        with pytest.raises(ValueError):
            bgk_source_nd(s, -1.0)

    def test_generalized_grade_two_source_vanishes(self, rng):
        s = sample_state_nd(3, 3, "generalized", rng)
        q = bgk_source_nd(s, 1.0)
        for r, alpha in enumerate(enumerate_indices(3, 3)):
            if sum(alpha) == 2:
                assert q[r] == 0.0

    @pytest.mark.parametrize("kind", ["classic", "generalized"])
    def test_system_dimensions_and_conditions(self, kind, rng):
        s = sample_state_nd(2, 4, kind, rng)
        sysnd = assemble_system_nd(s)
        assert sysnd.dim == math.comb(6, 2)
        assert sysnd.n_directions == 2
        assert check_abs_system(sysnd, n_directions=10).passed


class TestOrthonormalizedForm:
    @pytest.mark.parametrize("dim,order,kind", [
        (2, 3, "classic"), (2, 5, "classic"),
        (2, 4, "generalized"), (3, 3, "generalized")])
    def test_matrices_symmetric(self, dim, order, kind, rng):
        s = sample_state_nd(dim, order, kind, rng)
        for Mt in orthonormalized_convection(s):
            scale = max(1.0, np.abs(Mt).max())
            assert np.abs(Mt - Mt.T).max() < 1e-12 * scale

    def test_conjugation_preserves_spectrum(self, rng):
        s = sample_state_nd(2, 3, "generalized", rng)
        tilde = orthonormalized_convection(s)
        for k in (1, 2):
            lam = np.sort(np.linalg.eigvalsh(tilde[k - 1]))
            ref = np.sort(np.linalg.eigvals(assemble_M_nd(s, k)).real)
            np.testing.assert_allclose(lam, ref, atol=1e-9)


class TestFrameChanges:
    def test_identity_rotation(self, rng):
        s = sample_state_nd(2, 4, "generalized", rng)
        t = rotate_state(s, np.eye(2))
        assert set(t.f) == set(s.f)
        for k in s.f:
            assert t.f[k] == pytest.approx(s.f[k], rel=1e-12)

    def test_orthogonality_enforced(self, rng):
        with pytest.raises(ValueError):
            rotate_state(sample_state_nd(2, 3, "generalized", rng),
                         np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_rotation_covariance_of_spectra(self, rng):
        for dim in (2, 3):
            s = sample_state_nd(dim, 4, "generalized", rng)
            A = rng.standard_normal((dim, dim))
            R = np.linalg.qr(A)[0]
            t = rotate_state(s, R)
            n = rng.normal(size=dim)
            n /= np.linalg.norm(n)
            combo_s = sum(nk * assemble_M_nd(s, k + 1)
                          for k, nk in enumerate(n))
            combo_t = sum(nk * assemble_M_nd(t, k + 1)
                          for k, nk in enumerate(R @ n))
            lam_s = np.sort(np.linalg.eigvals(combo_s).real)
            lam_t = np.sort(np.linalg.eigvals(combo_t).real)
            np.testing.assert_allclose(lam_t, lam_s, atol=1e-9)

    def test_classic_equilibrium_is_isotropic(self, rng):
        s = MomentStateND.equilibrium(3, 4, kind="classic", rho=1.3,
                                      theta=0.8)
        spectra = []
        for _ in range(2):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            combo = sum(nk * assemble_M_nd(s, k + 1)
                        for k, nk in enumerate(n))
            spectra.append(np.sort(np.linalg.eigvals(combo).real))
        np.testing.assert_allclose(spectra[0], spectra[1], atol=1e-9)
        assert analyze(combo).verdict == "hyperbolic"
