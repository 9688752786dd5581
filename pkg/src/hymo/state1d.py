"""1D moment state, validity rules, BGK source, and the system container.

The state vector is w = (rho, u, theta, f_3, ..., f_M). The structural
constraints f_0 = rho and f_1 = f_2 = 0 are built into the accessors;
f_1 and f_2 are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["MomentState1D", "QuasiLinearSystem", "validate", "bgk_source"]


@dataclass
class MomentState1D:
    """Moment coefficients of a truncated 1D Hermite expansion.

    f holds f_3..f_M, so len(f) == M - 2 and f[0] means f_3.
    """

    M: int
    rho: float
    u: float
    theta: float
    f: np.ndarray

    def __post_init__(self):
        if self.M < 3:
            raise ValueError("M must be >= 3")
        self.f = np.atleast_1d(np.asarray(self.f, dtype=float)).copy()
        if self.f.shape != (self.M - 2,):
            raise ValueError(f"f must have length M - 2 = {self.M - 2}")

    @classmethod
    def equilibrium(cls, M, rho=1.0, u=0.0, theta=1.0):
        return cls(M=M, rho=rho, u=u, theta=theta, f=np.zeros(M - 2))

    @classmethod
    def from_vector(cls, M, w):
        w = np.asarray(w, dtype=float)
        if w.shape != (M + 1,):
            raise ValueError(f"state vector must have length M + 1 = {M + 1}")
        return cls(M=M, rho=float(w[0]), u=float(w[1]), theta=float(w[2]), f=w[3:])

    def as_vector(self):
        """Return w = (rho, u, theta, f_3..f_M) of length M + 1."""
        return np.concatenate(([self.rho, self.u, self.theta], self.f))

    def fcoef(self, alpha):
        """f_alpha with the structural values f_0 = rho, f_1 = f_2 = 0.

        Indices outside [0, M] return 0 so recursions can be written
        without boundary cases.
        """
        if alpha == 0:
            return self.rho
        if alpha < 0 or alpha in (1, 2) or alpha > self.M:
            return 0.0
        return float(self.f[alpha - 3])

    def to_json_dict(self):
        return {
            "M": self.M,
            "rho": self.rho,
            "u": self.u,
            "theta": self.theta,
            "f": [float(v) for v in self.f],
        }

    @classmethod
    def from_json_dict(cls, data):
        try:
            return cls(
                M=int(data["M"]),
                rho=float(data["rho"]),
                u=float(data["u"]),
                theta=float(data["theta"]),
                f=np.asarray(data["f"], dtype=float),
            )
        except KeyError as exc:
            raise ValueError(f"missing state field: {exc}") from exc


def validate(state):
    """Return the list of violated state invariants (empty means valid)."""
    problems = []
    if not np.isfinite(state.rho) or state.rho <= 0:
        problems.append("density nonpositive or not finite")
    if not np.isfinite(state.theta) or state.theta <= 0:
        problems.append("temperature nonpositive or not finite")
    if not np.isfinite(state.u):
        problems.append("velocity not finite")
    if not np.all(np.isfinite(state.f)):
        problems.append("moment coefficients not finite")
    return problems


def bgk_source(state, tau):
    """BGK relaxation source in the projected coefficient space.

    The Hermite expansion of (f_eq - f)/tau is diagonal: the local
    Maxwellian shares (rho, u, theta) with the state, so the source is
    -f_alpha/tau for alpha >= 3 and zero on the first three slots.
    Mass, momentum, and energy are therefore exact collision
    invariants. The returned vector plays the role of q in
    D dw/dt + M D dw/dx = q; the unprojected operator is never needed.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    q = np.zeros(state.M + 1)
    q[3:] = -state.f / tau
    return q


@dataclass
class QuasiLinearSystem:
    """Container for D(w) dw/dt + sum_k M_k D(w) dw/dx_k = q."""

    D: np.ndarray
    Mk: list = field(default_factory=list)
    q: np.ndarray = None

    def __post_init__(self):
        self.D = np.asarray(self.D, dtype=float)
        n = self.D.shape[0]
        if self.D.shape != (n, n):
            raise ValueError("D must be square")
        self.Mk = [np.asarray(m, dtype=float) for m in self.Mk]
        for m in self.Mk:
            if m.shape != (n, n):
                raise ValueError("all M_k must match D's shape")
        if self.q is None:
            self.q = np.zeros(n)
        self.q = np.asarray(self.q, dtype=float)
        if self.q.shape != (n,):
            raise ValueError("q must have length equal to D's size")

    @property
    def dim(self):
        return self.D.shape[0]

    @property
    def n_directions(self):
        return len(self.Mk)

    def d_condition(self):
        """Condition number of D (inf when numerically singular)."""
        return float(np.linalg.cond(self.D))

    def transport_matrix(self, direction=None):
        """D^{-1} (sum_k n_k M_k) D for a direction n (default: axis 1)."""
        if direction is None:
            combo = self.Mk[0]
        else:
            direction = np.asarray(direction, dtype=float)
            combo = sum(nk * mk for nk, mk in zip(direction, self.Mk))
        return np.linalg.solve(self.D, combo @ self.D)
