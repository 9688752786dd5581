"""Finite-volume integrator for the one-dimensional moment system.

The quasilinear form D(w) dw/dt + M D(w) dw/dx = q(w) is advanced by
a first-order path-consistent local Lax-Friedrichs step (segment
paths in the state variables), followed by exact exponential
relaxation of the nonconserved coefficients. Only the density row is
stepped as a conservative flux, so mass is conserved to round-off;
momentum and energy are monitored through conserved_totals.

The per-interface sweep lives in a compiled extension when available
(hymo._transport) with a pure-numpy twin (hymo._transport_np) as
fallback; both produce the same update up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hermite import hermite_roots
from .state1d import MomentState1D, validate

try:
    from ._transport import transport_step as _transport_compiled
except ImportError:
    _transport_compiled = None
from ._transport_np import transport_step as _transport_numpy

HAVE_COMPILED = _transport_compiled is not None

__all__ = [
    "HAVE_COMPILED",
    "Grid1D",
    "SimConfig",
    "SimResult",
    "transport_backends",
    "max_speed_factor",
    "max_wavespeed",
    "step",
    "run",
    "conserved_totals",
]


def transport_backends():
    """Available kernel implementations, keyed by name."""
    backends = {"numpy": _transport_numpy}
    if HAVE_COMPILED:
        backends["compiled"] = _transport_compiled
    return backends


_SPEED_FACTOR_CACHE = {}


def max_speed_factor(M):
    """Largest characteristic speed at u=0, theta=1: the largest root
    of the degree M+1 Hermite polynomial."""
    if M not in _SPEED_FACTOR_CACHE:
        _SPEED_FACTOR_CACHE[M] = float(np.max(np.abs(hermite_roots(M + 1))))
    return _SPEED_FACTOR_CACHE[M]


def max_wavespeed(state):
    """|u| + c_max sqrt(theta) for a single state."""
    return abs(state.u) + max_speed_factor(state.M) * math.sqrt(state.theta)


@dataclass
class Grid1D:
    """Uniform grid of cell states, stored as the (n_cells, M+1) array
    of state vectors. Treated as an immutable snapshot: step() returns
    a new grid."""

    x_min: float
    x_max: float
    W: np.ndarray

    def __post_init__(self):
        self.W = np.array(self.W, dtype=float)
        if self.W.ndim != 2 or self.W.shape[1] < 4:
            raise ValueError("W must be (n_cells, M+1) with M >= 3")
        if self.W.shape[0] < 4:
            raise ValueError("need at least 4 cells")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        self.W.setflags(write=False)

    @property
    def n_cells(self):
        return self.W.shape[0]

    @property
    def M(self):
        return self.W.shape[1] - 1

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_cells

    def centers(self):
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def state(self, i):
        return MomentState1D.from_vector(self.M, self.W[i])

    def states(self):
        return [self.state(i) for i in range(self.n_cells)]

    @classmethod
    def from_states(cls, x_min, x_max, states):
        return cls(x_min=x_min, x_max=x_max,
                   W=np.stack([s.as_vector() for s in states]))

    @classmethod
    def from_function(cls, x_min, x_max, n_cells, fn):
        """Sample fn(x) -> MomentState1D at the cell centers."""
        dx = (x_max - x_min) / n_cells
        centers = x_min + (np.arange(n_cells) + 0.5) * dx
        return cls.from_states(x_min, x_max, [fn(x) for x in centers])

    def validate_cells(self):
        """Problem descriptions over all cells (empty means valid)."""
        problems = []
        if not np.all(np.isfinite(self.W)):
            bad = int(np.argwhere(~np.isfinite(self.W).all(axis=1))[0, 0])
            problems.append(f"non-finite state in cell {bad}")
        if np.any(self.W[:, 0] <= 0):
            bad = int(np.argmax(self.W[:, 0] <= 0))
            problems.append(f"nonpositive density in cell {bad}")
        if np.any(self.W[:, 2] <= 0):
            bad = int(np.argmax(self.W[:, 2] <= 0))
            problems.append(f"nonpositive temperature in cell {bad}")
        return problems


@dataclass
class SimConfig:
    """Run parameters for the integrator."""

    M: int
    t_end: float
    tau: float = 1.0
    cfl: float = 0.45
    bc: str = "periodic"
    output_stride: int = 1
    backend: str = "auto"

    def __post_init__(self):
        if self.M < 3:
            raise ValueError("M must be at least 3")
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not self.t_end >= 0:
            raise ValueError("t_end must be nonnegative")
        if self.bc not in ("periodic", "copy"):
            raise ValueError("bc must be 'periodic' or 'copy'")
        if self.output_stride < 1:
            raise ValueError("output_stride must be at least 1")
        if self.backend not in ("auto", "compiled", "numpy"):
            raise ValueError("backend must be 'auto', 'compiled', or 'numpy'")

    def kernel(self):
        if self.backend == "numpy":
            return _transport_numpy
        if self.backend == "compiled":
            if not HAVE_COMPILED:
                raise RuntimeError("compiled transport kernel not available")
            return _transport_compiled
        return _transport_compiled if HAVE_COMPILED else _transport_numpy

    def to_json_dict(self):
        return {"M": self.M, "t_end": self.t_end, "tau": self.tau,
                "cfl": self.cfl, "bc": self.bc,
                "output_stride": self.output_stride, "backend": self.backend}


def _grid_max_wavespeed(grid):
    W = grid.W
    return float(np.max(np.abs(W[:, 1])
                        + max_speed_factor(grid.M) * np.sqrt(W[:, 2])))


def step(grid, config, dt):
    """One transport + relaxation step; returns a new grid.

    Raises RuntimeError when dt violates the CFL bound or when any
    cell leaves the admissible region afterwards.
    """
    if grid.M != config.M:
        raise ValueError("grid order does not match config")
    problems = grid.validate_cells()
    if problems:
        raise RuntimeError("invalid input grid: " + "; ".join(problems))
    bound = config.cfl * grid.dx / _grid_max_wavespeed(grid)
    if dt > bound * (1.0 + 1e-12):
        raise RuntimeError(f"CFL violation: dt={dt!r} exceeds bound={bound!r}")
    kernel = config.kernel()
    W = kernel(grid.W, grid.dx, dt, max_speed_factor(grid.M),
               config.bc == "periodic")
    W[:, 3:] *= math.exp(-dt / config.tau)
    out = Grid1D(x_min=grid.x_min, x_max=grid.x_max, W=W)
    problems = out.validate_cells()
    if problems:
        raise RuntimeError("state invalid after update: " + "; ".join(problems))
    return out


def conserved_totals(grid):
    """(mass, momentum, energy) = sum of dx (rho, rho u, rho u^2/2 + rho theta/2)."""
    rho = grid.W[:, 0]
    u = grid.W[:, 1]
    theta = grid.W[:, 2]
    dx = grid.dx
    mass = float(np.sum(rho) * dx)
    momentum = float(np.sum(rho * u) * dx)
    energy = float(np.sum(0.5 * rho * u ** 2 + 0.5 * rho * theta) * dx)
    return mass, momentum, energy


@dataclass
class SimResult:
    """Trajectory of a run: snapshot times, grids, and step diagnostics."""

    config: SimConfig
    times: list = field(default_factory=list)
    grids: list = field(default_factory=list)
    dt_history: list = field(default_factory=list)
    totals: list = field(default_factory=list)

    @property
    def n_steps(self):
        return len(self.dt_history)

    @property
    def final(self):
        return self.grids[-1]


def run(config, grid):
    """Advance to t_end with adaptive CFL time steps.

    Snapshots (including the initial and final grids) are recorded
    every output_stride steps together with the conserved totals.
    """
    result = SimResult(config=config)
    result.times.append(0.0)
    result.grids.append(grid)
    result.totals.append(conserved_totals(grid))
    t = 0.0
    n = 0
    while t < config.t_end:
        dt = config.cfl * grid.dx / _grid_max_wavespeed(grid)
        dt = min(dt, config.t_end - t)
        if not dt > 0 or not math.isfinite(dt):
            raise RuntimeError(f"time step degenerated to dt={dt!r} at t={t!r}")
        grid = step(grid, config, dt)
        t += dt
        n += 1
        result.dt_history.append(dt)
        if n % config.output_stride == 0 or t >= config.t_end:
            result.times.append(t)
            result.grids.append(grid)
            result.totals.append(conserved_totals(grid))
    return result
