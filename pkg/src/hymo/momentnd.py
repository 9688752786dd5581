"""Multi-dimensional full-moment systems.

Two closure families share one assembly path:

* classic: scalar temperature, moment coefficients stored for grades
  2..M with the grade-2 diagonal coefficients summing to zero (the
  trace is carried by the temperature),
* generalized: a full symmetric positive definite temperature tensor
  absorbs the whole second moment, so grade-2 coefficients vanish
  identically and the tensor entries become unknowns.

Rows of every matrix are the basis coefficients in graded
lexicographic order of the multi-index. Columns (the state unknowns)
are aligned with the rows grade by grade: density pairs with the
zeroth row, the velocity component u_j with the grade-1 row e_j, the
grade-2 unknown built from alpha with the row alpha, and the plain
coefficient f_alpha with every higher row. With this pairing the
generalized derivative matrix is literally lower triangular and the
classic one is block lower triangular with an invertible grade-2
block of determinant rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .hermite import hermite_gauss
from .state1d import QuasiLinearSystem

__all__ = [
    "enumerate_indices",
    "multinomial",
    "MomentStateND",
    "validate_nd",
    "sample_state_nd",
    "assemble_D_nd",
    "assemble_M_nd",
    "bgk_source_nd",
    "assemble_system_nd",
    "orthonormalized_convection",
    "rotate_state",
    "classic_reduction_jacobian",
]


def enumerate_indices(dim, order):
    """All multi-indices with |alpha| <= order, graded lexicographic.

    Within a grade the plain tuple order applies, e.g. for dim=2,
    order=1 the list is [(0, 0), (0, 1), (1, 0)].
    """
    if dim < 1 or order < 0:
        raise ValueError("need dim >= 1 and order >= 0")
    indices = [alpha for alpha in product(range(order + 1), repeat=dim)
               if sum(alpha) <= order]
    indices.sort(key=lambda alpha: (sum(alpha), alpha))
    return indices


def multinomial(alpha):
    """|alpha|! / prod(alpha_d!), the number of index tuples of alpha."""
    out = math.factorial(sum(alpha))
    for a in alpha:
        out //= math.factorial(a)
    return out


def _unit(dim, axis):
    e = [0] * dim
    e[axis] = 1
    return tuple(e)


def _add(alpha, beta):
    return tuple(a + b for a, b in zip(alpha, beta))


def _sub(alpha, beta):
    return tuple(a - b for a, b in zip(alpha, beta))


@dataclass
class MomentStateND:
    """Moment state in `dim` space dimensions, order `order`.

    `theta` is a scalar for kind="classic" and a (dim, dim) symmetric
    positive definite matrix for kind="generalized". `f` maps stored
    multi-indices to coefficients: grades 2..order for classic (with
    trace-free grade 2), grades 3..order for generalized.
    """

    dim: int
    order: int
    kind: str
    rho: float
    u: np.ndarray
    theta: object
    f: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("classic", "generalized"):
            raise ValueError("kind must be 'classic' or 'generalized'")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if self.order < 2:
            raise ValueError("order must be at least 2")
        self.u = np.asarray(self.u, dtype=float).copy()
        if self.u.shape != (self.dim,):
            raise ValueError(f"u must have shape ({self.dim},)")
        if self.kind == "classic":
            self.theta = float(self.theta)
        else:
            self.theta = np.asarray(self.theta, dtype=float).copy()
            if self.theta.shape != (self.dim, self.dim):
                raise ValueError("generalized theta must be a square matrix")
        self.f = {tuple(k): float(v) for k, v in self.f.items()}
        lo = 2 if self.kind == "classic" else 3
        for alpha in self.f:
            if len(alpha) != self.dim:
                raise ValueError(f"index {alpha} has wrong dimension")
            if not lo <= sum(alpha) <= self.order:
                raise ValueError(f"index {alpha} outside stored grades")

    @classmethod
    def equilibrium(cls, dim, order, kind="classic", rho=1.0, theta=1.0):
        th = theta if kind == "classic" else theta * np.eye(dim)
        return cls(dim=dim, order=order, kind=kind, rho=rho,
                   u=np.zeros(dim), theta=th)

    def theta_tensor(self):
        """Temperature as a (dim, dim) matrix for either kind."""
        if self.kind == "classic":
            return self.theta * np.eye(self.dim)
        return self.theta.copy()

    def fcoef(self, alpha):
        """Coefficient value including the structural slots.

        Grade 0 is the density, grade 1 vanishes, grade 2 vanishes for
        the generalized kind, anything outside 0 <= |alpha| <= order
        is zero.
        """
        if any(a < 0 for a in alpha):
            return 0.0
        n = sum(alpha)
        if n > self.order:
            return 0.0
        if n == 0:
            return self.rho
        if n == 1:
            return 0.0
        if n == 2 and self.kind == "generalized":
            return 0.0
        return self.f.get(tuple(alpha), 0.0)

    def to_json_dict(self):
        theta = self.theta if self.kind == "classic" \
            else [[float(v) for v in row] for row in self.theta]
        return {
            "dim": self.dim,
            "order": self.order,
            "kind": self.kind,
            "rho": self.rho,
            "u": [float(v) for v in self.u],
            "theta": theta,
            "f": {",".join(map(str, k)): v for k, v in sorted(self.f.items())},
        }

    @classmethod
    def from_json_dict(cls, data):
        try:
            f = {tuple(int(s) for s in k.split(",")): float(v)
                 for k, v in data.get("f", {}).items()}
            return cls(dim=int(data["dim"]), order=int(data["order"]),
                       kind=data["kind"], rho=float(data["rho"]),
                       u=np.asarray(data["u"], dtype=float),
                       theta=data["theta"] if isinstance(data["theta"], (int, float))
                       else np.asarray(data["theta"], dtype=float),
                       f=f)
        except KeyError as exc:
            raise ValueError(f"missing state field: {exc}") from exc


def validate_nd(state):
    """Return the list of violated invariants (empty means valid)."""
    problems = []
    if not np.isfinite(state.rho) or not state.rho > 0:
        problems.append("density must be positive and finite")
    if not np.all(np.isfinite(state.u)):
        problems.append("velocity entries not finite")
    if state.kind == "classic":
        if not np.isfinite(state.theta) or not state.theta > 0:
            problems.append("temperature must be positive and finite")
        trace = sum(state.fcoef(tuple(2 if e == d else 0 for e in range(state.dim)))
                    for d in range(state.dim))
        if abs(trace) > 1e-12 * max(1.0, abs(state.theta)):
            problems.append("grade-2 coefficients must be trace free")
    else:
        Th = state.theta
        if not np.all(np.isfinite(Th)):
            problems.append("temperature entries not finite")
        elif np.max(np.abs(Th - Th.T)) > 1e-12 * max(1.0, np.max(np.abs(Th))):
            problems.append("temperature tensor must be symmetric")
        elif np.min(np.linalg.eigvalsh(0.5 * (Th + Th.T))) <= 0:
            problems.append("temperature tensor must be positive definite")
    if not all(np.isfinite(v) for v in state.f.values()):
        problems.append("coefficients not finite")
    return problems


def _require_valid(state):
    problems = validate_nd(state)
    if problems:
        raise ValueError("invalid state: " + "; ".join(problems))


def sample_state_nd(dim, order, kind, rng):
    """Random valid state, broad enough to exercise every matrix entry."""
    rho = float(rng.uniform(0.3, 3.0))
    u = rng.uniform(-1.5, 1.5, size=dim)
    f = {}
    if kind == "classic":
        theta = float(rng.uniform(0.3, 3.0))
        lo = 2
    else:
        vals = rng.uniform(0.3, 3.0, size=dim)
        Q = np.linalg.qr(rng.standard_normal((dim, dim)))[0]
        theta = Q @ np.diag(vals) @ Q.T
        theta = 0.5 * (theta + theta.T)
        lo = 3
    mean_theta = theta if kind == "classic" else float(np.trace(theta)) / dim
    for alpha in enumerate_indices(dim, order):
        n = sum(alpha)
        if lo <= n <= order:
            f[alpha] = float(rng.normal(0.0, 0.15 * rho * mean_theta ** (n / 2.0)))
    if kind == "classic":
        diag = [_unit(dim, d) for d in range(dim)]
        diag = [tuple(2 * e for e in a) for a in diag]
        trace = sum(f[a] for a in diag) / dim
        for a in diag:
            f[a] -= trace
    return MomentStateND(dim=dim, order=order, kind=kind, rho=rho, u=u,
                         theta=theta, f=f)


def _unknown_tangent(state, alpha):
    """Unit tangent of the unknown paired with row alpha.

    Returns (drho, du, dTh, df) where dTh is always a full matrix
    (scalar temperature variations enter as multiples of the identity).
    """
    dim = state.dim
    drho = 0.0
    du = np.zeros(dim)
    dTh = np.zeros((dim, dim))
    df = {}
    n = sum(alpha)
    if n == 0:
        drho = 1.0
    elif n == 1:
        du[alpha.index(1)] = 1.0
    elif n == 2:
        nz = [d for d, a in enumerate(alpha) if a > 0]
        if state.kind == "generalized":
            i, j = (nz[0], nz[0]) if len(nz) == 1 else (nz[0], nz[1])
            dTh[i, j] += 1.0
            if i != j:
                dTh[j, i] += 1.0
        else:
            if len(nz) == 1:
                # g = theta/2 + f_alpha with the trace carried by theta
                i = nz[0]
                dTh += (2.0 / dim) * np.eye(dim)
                for d in range(dim):
                    beta = tuple(2 if d == e else 0 for e in range(dim))
                    df[beta] = (1.0 if d == i else 0.0) - 1.0 / dim
            else:
                df[tuple(alpha)] = 1.0
    else:
        df[tuple(alpha)] = 1.0
    return drho, du, dTh, df


def derivative_coeffs_nd(state, drho, du, dTh, df):
    """Coefficients of the derivative of the distribution.

    G_alpha = df_alpha + sum_i du_i f_{alpha-e_i}
            + (1/2) sum_{ij} dTh_ij f_{alpha-e_i-e_j},
    with df on the structural slots given by drho at grade 0 and zero
    at grade 1.
    """
    dim = state.dim
    indices = enumerate_indices(dim, state.order)
    du = np.asarray(du, dtype=float)
    dTh = np.asarray(dTh, dtype=float)

    def dflookup(alpha):
        n = sum(alpha)
        if n == 0:
            return drho
        if n == 1:
            return 0.0
        if n == 2 and state.kind == "generalized":
            return 0.0
        return df.get(tuple(alpha), 0.0)

    out = np.zeros(len(indices))
    for r, alpha in enumerate(indices):
        acc = dflookup(alpha)
        for i in range(dim):
            if alpha[i] > 0 and du[i] != 0.0:
                acc += du[i] * state.fcoef(_sub(alpha, _unit(dim, i)))
        for i in range(dim):
            for j in range(dim):
                if dTh[i, j] != 0.0:
                    beta = _sub(_sub(alpha, _unit(dim, i)), _unit(dim, j))
                    acc += 0.5 * dTh[i, j] * state.fcoef(beta)
        out[r] = acc
    return out


def assemble_D_nd(state):
    """Derivative-coefficient matrix by probing each unknown."""
    _require_valid(state)
    indices = enumerate_indices(state.dim, state.order)
    n = len(indices)
    D = np.zeros((n, n))
    for c, alpha in enumerate(indices):
        drho, du, dTh, df = _unknown_tangent(state, alpha)
        D[:, c] = derivative_coeffs_nd(state, drho, du, dTh, df)
    return D


def assemble_M_nd(state, k):
    """Convection matrix along axis k in 1..dim, acting on coefficients.

    Row alpha of M v collects u_k v_alpha + (alpha_k + 1) v_{alpha+e_k}
    (dropped at the top grade) + sum_l Theta_kl v_{alpha-e_l}.
    """
    _require_valid(state)
    if not 1 <= k <= state.dim:
        raise ValueError(f"k must be in 1..{state.dim}")
    a = k - 1
    indices = enumerate_indices(state.dim, state.order)
    col = {alpha: c for c, alpha in enumerate(indices)}
    Th = state.theta_tensor()
    uk = float(state.u[a])
    n = len(indices)
    M = np.zeros((n, n))
    for r, alpha in enumerate(indices):
        M[r, r] += uk
        if sum(alpha) < state.order:
            M[r, col[_add(alpha, _unit(state.dim, a))]] += alpha[a] + 1.0
        for l in range(state.dim):
            if alpha[l] > 0:
                M[r, col[_sub(alpha, _unit(state.dim, l))]] += Th[a, l]
    return M


def bgk_source_nd(state, tau):
    """Relaxation source in coefficient space: -f_alpha / tau for
    every nonconserved coefficient (grades 2 and up)."""
    _require_valid(state)
    if not tau > 0:
        raise ValueError("tau must be positive")
    indices = enumerate_indices(state.dim, state.order)
    q = np.zeros(len(indices))
    for r, alpha in enumerate(indices):
        if sum(alpha) >= 2:
            q[r] = -state.fcoef(alpha) / tau
    return q


def assemble_system_nd(state, tau=1.0):
    """Full quasilinear system for either closure family."""
    D = assemble_D_nd(state)
    Mk = [assemble_M_nd(state, k) for k in range(1, state.dim + 1)]
    sys = QuasiLinearSystem(D=D, Mk=Mk, q=bgk_source_nd(state, tau))
    if not np.isfinite(sys.d_condition()):
        raise ArithmeticError("derivative matrix is singular")
    return sys


# -- orthonormalized form ---------------------------------------------------

def _poly_mul_var(poly, axis, coeff, dim):
    out = {}
    for expo, c in poly.items():
        key = _add(expo, _unit(dim, axis))
        out[key] = out.get(key, 0.0) + coeff * c
    return out


def _poly_diff(poly, axis, dim):
    out = {}
    for expo, c in poly.items():
        if expo[axis] > 0:
            key = _sub(expo, _unit(dim, axis))
            out[key] = out.get(key, 0.0) + expo[axis] * c
    return out


def _poly_add(p, q):
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0.0) + v
    return out


def _poly_eval(poly, points):
    vals = np.zeros(points.shape[0])
    for expo, c in poly.items():
        term = np.full(points.shape[0], c)
        for d, e in enumerate(expo):
            if e:
                term *= points[:, d] ** e
        vals += term
    return vals


def basis_polynomials(state):
    """Polynomial parts of the basis, keyed by multi-index.

    P_0 = 1 and P_{alpha+e_i} = (Theta^{-1} c)_i P_alpha - d_i P_alpha,
    evaluated in the particle-velocity offset c. Each polynomial is a
    dict from exponent tuples to coefficients.
    """
    dim = state.dim
    Thinv = np.linalg.inv(state.theta_tensor())
    polys = {tuple([0] * dim): {tuple([0] * dim): 1.0}}
    for alpha in enumerate_indices(dim, state.order):
        if sum(alpha) == 0:
            continue
        i = next(d for d, a in enumerate(alpha) if a > 0)
        prev = polys[_sub(alpha, _unit(dim, i))]
        lifted = {}
        for j in range(dim):
            if Thinv[i, j] != 0.0:
                lifted = _poly_add(lifted, _poly_mul_var(prev, j, Thinv[i, j], dim))
        deriv = _poly_diff(prev, i, dim)
        polys[alpha] = _poly_add(lifted, {k: -v for k, v in deriv.items()})
    return polys


def orthonormalized_convection(state):
    """Convection matrices rewritten in an orthonormal basis.

    The Gram matrix of the basis polynomials under the Gaussian with
    covariance Theta is integrated exactly by tensorized quadrature,
    Cholesky-factored as G = L L^T, and each M_k is conjugated to
    Mtilde_k = L^T M_k L^{-T}. Symmetry of every Mtilde_k certifies
    hyperbolicity of the system in all directions.
    """
    _require_valid(state)
    indices = enumerate_indices(state.dim, state.order)
    polys = basis_polynomials(state)
    nodes, weights = hermite_gauss(state.order + 1)
    grids = np.meshgrid(*([nodes] * state.dim), indexing="ij")
    xi = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([weights] * state.dim), indexing="ij")
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    L_cov = np.linalg.cholesky(state.theta_tensor())
    points = xi @ L_cov.T
    vals = np.stack([_poly_eval(polys[a], points) for a in indices], axis=0)
    gram = (vals * w) @ vals.T
    gram = 0.5 * (gram + gram.T)
    L = np.linalg.cholesky(gram)
    Linv_T = np.linalg.inv(L).T
    return [L.T @ assemble_M_nd(state, k) @ Linv_T
            for k in range(1, state.dim + 1)]


# -- frame changes ----------------------------------------------------------

def _index_tuple(alpha):
    axes = []
    for d, a in enumerate(alpha):
        axes.extend([d] * a)
    return tuple(axes)


def rotate_state(state, R):
    """State seen in a rotated frame x' = R x.

    The velocity and temperature transform as a vector and a bilinear
    form; each grade-n coefficient family transforms as a symmetric
    tensor of order n, with f_alpha = multinomial(alpha) times the
    tensor entry at any index tuple of alpha.
    """
    _require_valid(state)
    R = np.asarray(R, dtype=float)
    dim = state.dim
    if R.shape != (dim, dim):
        raise ValueError("rotation has wrong shape")
    if np.max(np.abs(R @ R.T - np.eye(dim))) > 1e-10:
        raise ValueError("rotation must be orthogonal")
    u_new = R @ state.u
    theta_new = state.theta if state.kind == "classic" else R @ state.theta @ R.T
    lo = 2 if state.kind == "classic" else 3
    f_new = {}
    for n in range(lo, state.order + 1):
        grade = [a for a in enumerate_indices(dim, state.order) if sum(a) == n]
        if not any(state.fcoef(a) != 0.0 for a in grade):
            continue
        T = np.zeros((dim,) * n)
        for idx in product(range(dim), repeat=n):
            alpha = tuple(idx.count(d) for d in range(dim))
            T[idx] = state.fcoef(alpha) / multinomial(alpha)
        for ax in range(n):
            T = np.moveaxis(np.tensordot(R, T, axes=(1, ax)), 0, ax)
        for alpha in grade:
            f_new[alpha] = multinomial(alpha) * float(T[_index_tuple(alpha)])
    return MomentStateND(dim=dim, order=state.order, kind=state.kind,
                         rho=state.rho, u=u_new, theta=theta_new, f=f_new)


def classic_reduction_jacobian(order):
    """Jacobian of the one-dimensional classic unknowns with respect to
    the (rho, u, theta, f_3..f_M) parameters: the grade-2 unknown is
    theta/2, everything else is the identity."""
    T = np.eye(order + 1)
    T[2, 2] = 0.5
    return T
