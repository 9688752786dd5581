"""The globally hyperbolic 13-moment system.

State layout: w = (rho, u_1..u_3, theta_11, theta_22, theta_33,
theta_12, theta_13, theta_23, q_1..q_3). The coefficient basis behind
D(w) and M_k(w) is ordered the same way: the weight function slot,
three first-order slots, six symmetric second-order slots, and three
contracted third-order slots.

M_1 is the printed closed form; M_2 and M_3 are produced by
relabeling the coordinate axes (conjugation by the slot permutation
that swaps axis 1 with axis k). The probe assembly from the projected
convection formula is kept in the test suite as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .state1d import QuasiLinearSystem

__all__ = [
    "SYM_PAIRS",
    "Moment13State",
    "sample_state_13",
    "validate_13",
    "assemble_D13",
    "assemble_M13",
    "eigenspeeds_13",
    "collision_13",
    "assemble_system_13",
    "rhs_explicit_13",
]

# symmetric-pair order of the theta slots: 11, 22, 33, 12, 13, 23
SYM_PAIRS = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]


def sym_index(i, j):
    """Slot of the (i, j) symmetric pair in the 6-entry theta layout."""
    return SYM_PAIRS.index((min(i, j), max(i, j)))


@dataclass
class Moment13State:
    """Density, velocity, symmetric temperature tensor, and heat flux."""

    rho: float
    u: np.ndarray
    theta: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float).copy()
        self.theta = np.asarray(self.theta, dtype=float).copy()
        self.q = np.asarray(self.q, dtype=float).copy()
        if self.u.shape != (3,) or self.theta.shape != (6,) or self.q.shape != (3,):
            raise ValueError("expected u[3], theta[6], q[3]")

    @classmethod
    def equilibrium(cls, rho=1.0, theta=1.0):
        return cls(rho=rho, u=np.zeros(3),
                   theta=np.array([theta, theta, theta, 0.0, 0.0, 0.0]),
                   q=np.zeros(3))

    @property
    def theta_mean(self):
        """theta = theta_kk / 3."""
        return float(self.theta[0] + self.theta[1] + self.theta[2]) / 3.0

    def theta_matrix(self):
        T = np.empty((3, 3))
        for s, (i, j) in enumerate(SYM_PAIRS):
            T[i, j] = self.theta[s]
            T[j, i] = self.theta[s]
        return T

    def theta_dev(self):
        """Deviatoric part theta_ij - delta_ij theta (trace-free)."""
        return self.theta_matrix() - self.theta_mean * np.eye(3)

    def as_vector(self):
        return np.concatenate(([self.rho], self.u, self.theta, self.q))

    @classmethod
    def from_vector(cls, w):
        w = np.asarray(w, dtype=float)
        if w.shape != (13,):
            raise ValueError("state vector must have length 13")
        return cls(rho=float(w[0]), u=w[1:4], theta=w[4:10], q=w[10:13])

    def to_json_dict(self):
        return {
            "rho": self.rho,
            "u": [float(v) for v in self.u],
            "theta": [float(v) for v in self.theta],
            "q": [float(v) for v in self.q],
        }

    @classmethod
    def from_json_dict(cls, data):
        try:
            return cls(rho=float(data["rho"]),
                       u=np.asarray(data["u"], dtype=float),
                       theta=np.asarray(data["theta"], dtype=float),
                       q=np.asarray(data["q"], dtype=float))
        except KeyError as exc:
            raise ValueError(f"missing state field: {exc}") from exc


def sample_state_13(rng):
    """Random admissible state with a positive definite temperature
    tensor and nontrivial anisotropy and heat flux."""
    rho = float(rng.uniform(0.3, 3.0))
    u = rng.uniform(-1.5, 1.5, size=3)
    tm = float(rng.uniform(0.3, 3.0))
    dev = rng.normal(0.0, 0.2 * tm, size=(3, 3))
    dev = 0.5 * (dev + dev.T)
    dev -= (np.trace(dev) / 3.0) * np.eye(3)
    while np.min(np.linalg.eigvalsh(tm * np.eye(3) + dev)) <= 0.05 * tm:
        dev *= 0.5
    T = tm * np.eye(3) + dev
    theta = np.array([T[i, j] for i, j in SYM_PAIRS])
    q = rng.normal(0.0, 0.3 * rho * tm ** 1.5, size=3)
    return Moment13State(rho=rho, u=u, theta=theta, q=q)


def validate_13(state):
    """Return the list of violated invariants (empty means valid)."""
    problems = []
    vec = state.as_vector()
    if not np.all(np.isfinite(vec)):
        problems.append("state entries not finite")
    if not state.rho > 0:
        problems.append("density nonpositive")
    if not state.theta_mean > 0:
        problems.append("mean temperature nonpositive")
    return problems


def _require_valid(state):
    problems = validate_13(state)
    if problems:
        raise ValueError("invalid state: " + "; ".join(problems))


def assemble_D13(state):
    """Derivative-coefficient matrix, lower triangular.

    Diagonal (1, rho, rho, rho, rho/2, rho/2, rho/2, rho, rho, rho,
    1/5, 1/5, 1/5). The theta-slot rows couple the deviatoric tensor
    against the density column and the q rows couple rho*theta_dev/5
    against the velocity columns; both vanish at equilibrium.
    """
    _require_valid(state)
    rho = state.rho
    dev = state.theta_dev()
    D = np.zeros((13, 13))
    D[0, 0] = 1.0
    for i in range(3):
        D[1 + i, 1 + i] = rho
    for s, (i, j) in enumerate(SYM_PAIRS):
        r = 4 + s
        if i == j:
            D[r, r] = 0.5 * rho
            D[r, 0] = 0.5 * dev[i, j]
        else:
            D[r, r] = rho
            D[r, 0] = dev[i, j]
    for j in range(3):
        r = 10 + j
        D[r, r] = 0.2
        for k in range(3):
            D[r, 1 + k] = 0.2 * rho * dev[j, k]
    return D


def _m1_closed_form(u1, theta):
    M = u1 * np.eye(13)
    M[0, 1] = 1.0
    M[1, 0] = theta
    M[1, 4] = 2.0
    M[2, 7] = 1.0
    M[3, 8] = 1.0
    M[4, 1] = theta
    M[4, 10] = 3.0
    M[5, 10] = 1.0
    M[6, 10] = 1.0
    M[7, 2] = theta
    M[7, 11] = 2.0
    M[8, 3] = theta
    M[8, 12] = 2.0
    M[10, 4] = 0.6 * theta
    M[10, 5] = 0.2 * theta
    M[10, 6] = 0.2 * theta
    M[11, 7] = 0.2 * theta
    M[12, 8] = 0.2 * theta
    return M


def _axis_swap_permutation(k):
    """Slot permutation induced by exchanging coordinate axes 1 and k."""
    sigma = [0, 1, 2]
    sigma[0], sigma[k - 1] = sigma[k - 1], sigma[0]
    P = np.zeros((13, 13))
    P[0, 0] = 1.0
    for i in range(3):
        P[1 + sigma[i], 1 + i] = 1.0
    for s, (i, j) in enumerate(SYM_PAIRS):
        P[4 + sym_index(sigma[i], sigma[j]), 4 + s] = 1.0
    for j in range(3):
        P[10 + sigma[j], 10 + j] = 1.0
    return P


def _axis_swap_state(state, k):
    sigma = [0, 1, 2]
    sigma[0], sigma[k - 1] = sigma[k - 1], sigma[0]
    T = state.theta_matrix()[np.ix_(sigma, sigma)]
    theta = np.array([T[i, j] for i, j in SYM_PAIRS])
    return Moment13State(rho=state.rho, u=state.u[sigma], theta=theta,
                         q=state.q[sigma])


def assemble_M13(state, k):
    """Convection matrix along axis k in {1, 2, 3}.

    k = 1 is the printed closed form (it depends only on u_1 and the
    mean temperature). k = 2, 3 conjugate that form with the slot
    permutation of the axis swap 1 <-> k applied to a relabeled state.
    """
    _require_valid(state)
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2, or 3")
    if k == 1:
        return _m1_closed_form(float(state.u[0]), state.theta_mean)
    P = _axis_swap_permutation(k)
    swapped = _axis_swap_state(state, k)
    return P.T @ _m1_closed_form(float(swapped.u[0]), swapped.theta_mean) @ P


def eigenspeeds_13(state, k):
    """Distinct characteristic speeds along axis k and their multiplicities.

    The speeds are u_k, u_k +- sqrt(7 theta / 5), and
    u_k +- sqrt((13 +- sqrt(94)) theta / 5); multiplicities
    (1, 2, 1, 5, 1, 2, 1) in ascending speed order, summing to 13.
    """
    _require_valid(state)
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2, or 3")
    uk = float(state.u[k - 1])
    theta = state.theta_mean
    a = math.sqrt(7.0 * theta / 5.0)
    b = math.sqrt((13.0 + math.sqrt(94.0)) * theta / 5.0)
    c = math.sqrt((13.0 - math.sqrt(94.0)) * theta / 5.0)
    speeds = np.array([uk - b, uk - a, uk - c, uk, uk + c, uk + a, uk + b])
    multiplicities = np.array([1, 2, 1, 5, 1, 2, 1])
    return speeds, multiplicities


def collision_13(state, chi23, m_g):
    """Maxwell-molecule collision source in explicit (state-variable) form.

    Zero on the density, velocity, and trace-temperature slots;
    -(3 rho / m_g) chi theta_dev_ij on the theta slots and
    -(2 rho / m_g) chi q_j on the heat-flux slots. This equals
    D13^{-1} applied to the projected coefficient-space source.
    """
    _require_valid(state)
    if not chi23 > 0:
        raise ValueError("chi23 must be positive")
    if not m_g > 0:
        raise ValueError("m_g must be positive")
    dev = state.theta_dev()
    out = np.zeros(13)
    coef = 3.0 * state.rho * chi23 / m_g
    for s, (i, j) in enumerate(SYM_PAIRS):
        out[4 + s] = -coef * dev[i, j]
    for j in range(3):
        out[10 + j] = -(2.0 * state.rho * chi23 / m_g) * state.q[j]
    return out


def assemble_system_13(state, chi23=1.0, m_g=1.0):
    """Full quasilinear system: D, the three M_k, and q = D * collision."""
    D = assemble_D13(state)
    Mk = [assemble_M13(state, k) for k in (1, 2, 3)]
    q = D @ collision_13(state, chi23, m_g)
    return QuasiLinearSystem(D=D, Mk=Mk, q=q)


def rhs_explicit_13(state, gradients, chi23, m_g):
    """Time derivatives from the printed explicit equations.

    gradients[s, k] is the spatial derivative of state slot s along
    x_k. The printed equations are in material-derivative form; the
    u . grad part is subtracted to return plain time derivatives.
    Must agree with -D^{-1} sum_k M_k D grad_k + collision_13.
    """
    _require_valid(state)
    g = np.asarray(gradients, dtype=float)
    if g.shape != (13, 3):
        raise ValueError("gradients must have shape (13, 3)")
    rho, u = state.rho, state.u
    T = state.theta_matrix()
    theta = state.theta_mean
    dev = state.theta_dev()
    drho = g[0]
    du = g[1:4]
    dT = np.empty((3, 3, 3))  # dT[i, j, k] = d theta_ij / d x_k
    for s, (i, j) in enumerate(SYM_PAIRS):
        dT[i, j] = g[4 + s]
        dT[j, i] = g[4 + s]
    dq = g[10:13]
    div_u = du[0, 0] + du[1, 1] + du[2, 2]
    div_q = dq[0, 0] + dq[1, 1] + dq[2, 2]
    source = collision_13(state, chi23, m_g)

    out = np.zeros(13)
    out[0] = -u @ drho - rho * div_u
    for i in range(3):
        acc = -u @ du[i]
        for k in range(3):
            acc -= dT[i, k, k] + T[i, k] * drho[k] / rho
        out[1 + i] = acc
    for s, (i, j) in enumerate(SYM_PAIRS):
        acc = -u @ dT[i, j]
        acc += T[i, j] * div_u
        acc -= 0.6 * theta * (du[i, j] + du[j, i] + (div_u if i == j else 0.0))
        grp = T[i] @ du[:, j] + T[j] @ du[:, i]
        if i == j:
            grp += np.einsum("kl,kl->", T, du)
        acc -= 0.4 * grp
        grp = dq[i, j] + dq[j, i] + (div_q if i == j else 0.0)
        acc -= 0.4 * grp / rho
        out[4 + s] = acc + source[4 + s]
    div_T = np.array([sum(dT[i, k, k] for k in range(3)) for i in range(3)])
    for j in range(3):
        acc = -u @ dq[j]
        acc += np.einsum("i,ik,k->", dev[j], dev, drho)
        acc += rho * (T[j] @ div_T)
        for i in range(3):
            acc -= 2.0 * rho * theta * dT[i, j, i]
        acc -= 0.5 * rho * theta * (dT[0, 0, j] + dT[1, 1, j] + dT[2, 2, j])
        out[10 + j] = acc + source[10 + j]
    return out
