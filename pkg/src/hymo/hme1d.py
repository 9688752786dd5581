"""1D moment-system matrices: Grad closure, regularization, and factors.

Two independent construction routes are provided on purpose. The
assemble_* functions transcribe the printed matrix forms entry by
entry. build_system_by_deduction instead probes the linear recursions
that map parameter derivatives to expansion-coefficient derivatives
(G) and those to convection coefficients (J). The two routes must
agree: D^{-1} M D equals the regularized matrix.

Row and column indexing follows the state vector (rho, u, theta,
f_3..f_M); index alpha >= 3 refers to the f_alpha slot.
"""

from __future__ import annotations

import numpy as np

from .state1d import MomentState1D, QuasiLinearSystem, bgk_source, validate

__all__ = [
    "assemble_grad_A",
    "regularize",
    "assemble_D",
    "assemble_Mmat",
    "derivative_coeffs_1d",
    "convection_coeffs_1d",
    "build_system_by_deduction",
]


def _require_valid(state):
    problems = validate(state)
    if problems:
        raise ValueError("invalid state: " + "; ".join(problems))


def assemble_grad_A(state):
    """Coefficient matrix of the Grad-closed system, entry by entry.

    Rows 0..2 are the Euler block; rows alpha >= 3 carry the
    f-coupling terms. Closure sets f_{M+1} = 0.
    """
    _require_valid(state)
    M, rho, u, theta = state.M, state.rho, state.u, state.theta
    A = np.zeros((M + 1, M + 1))
    A[0, 0] = u
    A[0, 1] = rho
    A[1, 0] = theta / rho
    A[1, 1] = u
    A[1, 2] = 1.0
    A[2, 1] = 2.0 * theta
    A[2, 2] = u
    A[2, 3] = 6.0 / rho
    for a in range(3, M + 1):
        A[a, 0] += -theta * state.fcoef(a - 1) / rho
        A[a, 1] += (a + 1) * state.fcoef(a)
        A[a, 2] += 0.5 * (theta * state.fcoef(a - 3) + (a - 1) * state.fcoef(a - 1))
        A[a, 3] += -3.0 * state.fcoef(a - 2) / rho
        if a - 1 >= 3:
            A[a, a - 1] += theta
        A[a, a] += u
        if a + 1 <= M:
            A[a, a + 1] += a + 1
    return A


def regularize(A, state):
    """Apply the last-row correction that makes the system hyperbolic.

    Only the last row changes: (M+1) f_M is subtracted from the u
    column and (M+1)/2 f_{M-1} from the theta column.
    """
    M = state.M
    A = np.asarray(A, dtype=float)
    if A.shape != (M + 1, M + 1):
        raise ValueError("matrix shape does not match state order")
    out = A.copy()
    out[M, 1] -= (M + 1) * state.fcoef(M)
    out[M, 2] -= 0.5 * (M + 1) * state.fcoef(M - 1)
    return out


def assemble_D(state):
    """Derivative-coefficient matrix D(w), printed block form.

    Block lower-triangular: diag{1, rho, rho/2, 1} in the upper-left
    4x4, identity below, and rows (0, f_{alpha-1}, f_{alpha-2}/2, 0)
    for alpha = 4..M coupling into the (rho, u, theta) columns.
    """
    _require_valid(state)
    M, rho = state.M, state.rho
    D = np.eye(M + 1)
    D[1, 1] = rho
    D[2, 2] = 0.5 * rho
    for a in range(4, M + 1):
        D[a, 1] = state.fcoef(a - 1)
        D[a, 2] = 0.5 * state.fcoef(a - 2)
    return D


def assemble_Mmat(u, theta, M):
    """Multiply-truncate matrix M(u, theta).

    Tridiagonal: u on the diagonal, theta on the subdiagonal, and
    1, 2, ..., M on the superdiagonal. Realizes "multiply a truncated
    Hermite series by xi, then drop the highest-degree term"; its
    eigenvalues are u + c_j sqrt(theta) with He_{M+1}(c_j) = 0.
    """
    if not theta > 0:
        raise ValueError("theta must be positive")
    n = M + 1
    mat = u * np.eye(n)
    for a in range(1, n):
        mat[a, a - 1] = theta
    for a in range(n - 1):
        mat[a, a + 1] = a + 1
    return mat


def derivative_coeffs_1d(state, dw):
    """Expansion-coefficient derivatives G_0..G_M for a parameter tangent.

    dw holds (d rho, d u, d theta, d f_3..d f_M). The recursion
    G_alpha = d f_alpha + f_{alpha-1} du + (1/2) f_{alpha-2} d theta
    covers every row once the structural coefficients are substituted
    (d f_0 = d rho, d f_1 = d f_2 = 0).
    """
    dw = np.asarray(dw, dtype=float)
    M = state.M
    if dw.shape != (M + 1,):
        raise ValueError("tangent length must be M + 1")
    G = np.zeros(M + 1)
    for a in range(M + 1):
        if a == 0:
            g = dw[0]
        elif a in (1, 2):
            g = 0.0
        else:
            g = dw[a]
        G[a] = g + dw[1] * state.fcoef(a - 1) + 0.5 * dw[2] * state.fcoef(a - 2)
    return G


def convection_coeffs_1d(state, G):
    """Convection coefficients J_0..J_M from G_0..G_M.

    J_alpha = theta G_{alpha-1} + u G_alpha + (alpha+1) G_{alpha+1},
    with the top-order term dropped at alpha = M. This is the
    multiply-truncate action in coefficient space.
    """
    G = np.asarray(G, dtype=float)
    M = state.M
    J = np.zeros(M + 1)
    for a in range(M + 1):
        v = state.u * G[a]
        if a >= 1:
            v += state.theta * G[a - 1]
        if a + 1 <= M:
            v += (a + 1) * G[a + 1]
        J[a] = v
    return J


def build_system_by_deduction(state, tau=1.0):
    """Assemble the quasilinear system by probing the two recursions.

    Columns of D(w) are derivative_coeffs_1d applied to unit parameter
    tangents; columns of M are convection_coeffs_1d applied to unit
    G-vectors. The source is the projected BGK vector. The resulting
    D^{-1} M D reproduces the regularized coefficient matrix without
    ever forming the Grad matrix or the last-row correction.
    """
    _require_valid(state)
    n = state.M + 1
    D = np.empty((n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0
        D[:, c] = derivative_coeffs_1d(state, e)
    Mmat = np.empty((n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0
        Mmat[:, c] = convection_coeffs_1d(state, e)
    sys = QuasiLinearSystem(D=D, Mk=[Mmat], q=bgk_source(state, tau))
    if not np.isfinite(sys.d_condition()):
        raise ArithmeticError("derivative matrix is numerically singular")
    return sys
