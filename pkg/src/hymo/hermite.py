"""Probabilists' Hermite polynomials, their roots, and the weighted basis.

Everything here uses the probabilists' convention: He_0 = 1, He_1 = x,
He_{k+1}(x) = x He_k(x) - k He_{k-1}(x), orthogonal under the weight
exp(-x^2/2). The weighted basis functions of order alpha are

    (2 pi)^{-1/2} / (m_g theta^{(alpha+1)/2}) He_alpha(v) exp(-v^2/2),
    v = (xi - u) / sqrt(theta).

The plain recursion is used for evaluation; it is accurate for the
documented range k <= 50, |x| <= 10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "HermiteBasisParams",
    "hermite_eval",
    "hermite_roots",
    "hermite_gauss",
    "eval_basis_1d",
    "reconstruct_distribution",
]


@dataclass(frozen=True)
class HermiteBasisParams:
    """Shift, scale, and mass parameters of the weighted basis."""

    theta: float
    m_g: float = 1.0
    u: float = 0.0

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if not self.m_g > 0:
            raise ValueError("m_g must be positive")


def hermite_eval(k, x):
    """Evaluate He_k(x) by the three-term recursion.

    Parameters
    ----------
    k : int
        Polynomial degree, k >= 0.
    x : float or array_like
        Evaluation points.

    Returns
    -------
    float or ndarray
        He_k at the given points; a scalar input gives a float.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    prev = np.ones_like(xa)
    if k == 0:
        return float(prev) if scalar else prev
    cur = xa.copy()
    for n in range(1, k):
        prev, cur = cur, xa * cur - n * prev
    return float(cur) if scalar else cur


def _jacobi_matrix(k):
    off = np.sqrt(np.arange(1.0, k))
    return np.diag(off, 1) + np.diag(off, -1)


def hermite_roots(k, tol=1e-12):
    """Roots of He_k, sorted ascending.

    Eigenvalues of the symmetric Jacobi matrix of the recurrence, then
    one Newton polish step, then exact symmetrization c_j = -c_{k-1-j}.

    Convergence is checked on the Newton correction |He_k / (k He_{k-1})|
    relative to max(1, |c_j|). The raw residual |He_k(c_j)| grows with
    the local derivative (about 1e15 near the extreme roots at k = 20)
    and is not a usable absolute measure for large k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return np.zeros(1)
    c = np.linalg.eigvalsh(_jacobi_matrix(k))
    c = c - hermite_eval(k, c) / (k * hermite_eval(k - 1, c))
    c = 0.5 * (c - c[::-1])
    correction = np.abs(hermite_eval(k, c) / (k * hermite_eval(k - 1, c)))
    if not np.all(correction < tol * np.maximum(1.0, np.abs(c))):
        raise RuntimeError(f"Newton polish did not converge for k={k}")
    return np.sort(c)


def hermite_gauss(k):
    """Gauss nodes and weights for the weight exp(-x^2/2)/sqrt(2 pi).

    Golub-Welsch: nodes are the Jacobi-matrix eigenvalues (the roots of
    He_k) and weights the squared first eigenvector components. The
    weights sum to one because the weight function is normalized.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return np.zeros(1), np.ones(1)
    nodes, vecs = np.linalg.eigh(_jacobi_matrix(k))
    return nodes, vecs[0, :] ** 2


def eval_basis_1d(alpha, params, xi):
    """Evaluate the weighted basis function of order alpha at xi.

    Returns m_g^{-1} (2 pi)^{-1/2} theta^{-(alpha+1)/2} He_alpha(v)
    exp(-v^2/2) with v = (xi - u)/sqrt(theta).
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    xa = np.asarray(xi, dtype=float)
    scalar = xa.ndim == 0
    v = (xa - params.u) / math.sqrt(params.theta)
    norm = 1.0 / (
        params.m_g * math.sqrt(2.0 * math.pi) * params.theta ** ((alpha + 1) / 2.0)
    )
    out = norm * hermite_eval(alpha, v) * np.exp(-0.5 * v * v)
    return float(out) if scalar else np.asarray(out)


def reconstruct_distribution(state, xi_grid, m_g=1.0):
    """Sum the truncated expansion of a 1D moment state on a velocity grid.

    The coefficients are f_0 = rho, f_1 = f_2 = 0, and the stored
    f_3..f_M; each multiplies the weighted basis function of its order.
    """
    xi = np.asarray(xi_grid, dtype=float)
    params = HermiteBasisParams(theta=state.theta, m_g=m_g, u=state.u)
    out = state.rho * eval_basis_1d(0, params, xi)
    for alpha in range(3, state.M + 1):
        coef = state.fcoef(alpha)
        if coef != 0.0:
            out = out + coef * eval_basis_1d(alpha, params, xi)
    return np.asarray(out)
