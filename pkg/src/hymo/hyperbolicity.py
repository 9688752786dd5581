"""Numerical hyperbolicity checks and the Grad region scan.

Real diagonalizability is decided numerically: eigenvalue imaginary
parts must stay below tol relative to the spectral radius and the
eigenvector matrix must be well conditioned. A marginal band flags
states close to the boundary instead of misclassifying them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hme1d
from .state1d import MomentState1D

__all__ = [
    "HyperbolicityReport",
    "AbsSystemReport",
    "ScanResult",
    "analyze",
    "check_abs_system",
    "symmetry_criterion",
    "scan_grad_region",
]

DEFAULT_TOL = 1e-9
DEFAULT_COND_CAP = 1e8
MARGINAL_FACTOR = 1e3


@dataclass
class HyperbolicityReport:
    """Eigenstructure summary of one coefficient matrix."""

    eigenvalues: np.ndarray
    max_imag: float
    diagonalizable: bool
    eigvec_condition: float
    verdict: str
    tol: float
    cond_cap: float

    def to_json_dict(self):
        return {
            "eigenvalues_re": [float(v) for v in self.eigenvalues.real],
            "eigenvalues_im": [float(v) for v in self.eigenvalues.imag],
            "max_imag": float(self.max_imag),
            "diagonalizable": bool(self.diagonalizable),
            "eigvec_condition": float(self.eigvec_condition),
            "verdict": self.verdict,
            "tol": float(self.tol),
            "cond_cap": float(self.cond_cap),
        }


def analyze(matrix, tol=DEFAULT_TOL, cond_cap=DEFAULT_COND_CAP):
    """Classify a real matrix as hyperbolic, marginal, or not hyperbolic.

    hyperbolic requires max |Im lambda| < tol * scale and eigenvector
    condition below cond_cap, with scale = max(1, spectral radius).
    marginal means max_imag falls in [tol*scale, 1000*tol*scale).
    np.linalg.LinAlgError propagates if the eigensolver fails.
    """
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    eigvals, eigvecs = np.linalg.eig(A)
    order = np.lexsort((eigvals.imag, eigvals.real))
    eigvals = eigvals[order]
    scale = max(1.0, float(np.abs(eigvals).max()))
    max_imag = float(np.abs(eigvals.imag).max())
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        cond = float(np.linalg.cond(eigvecs))
    if not np.isfinite(cond):
        cond = np.inf
    diagonalizable = max_imag < tol * scale and cond < cond_cap
    if diagonalizable:
        verdict = "hyperbolic"
    elif tol * scale <= max_imag < MARGINAL_FACTOR * tol * scale:
        verdict = "marginal"
    else:
        verdict = "not_hyperbolic"
    return HyperbolicityReport(
        eigenvalues=eigvals,
        max_imag=max_imag,
        diagonalizable=diagonalizable,
        eigvec_condition=cond,
        verdict=verdict,
        tol=tol,
        cond_cap=cond_cap,
    )


@dataclass
class AbsSystemReport:
    """Outcome of the two-condition check on a quasilinear system."""

    d_condition: float
    d_invertible: bool
    directions: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    worst_max_imag: float = 0.0
    all_hyperbolic: bool = True

    @property
    def passed(self):
        return self.d_invertible and self.all_hyperbolic

    def to_json_dict(self):
        return {
            "d_condition": float(self.d_condition),
            "d_invertible": bool(self.d_invertible),
            "directions": [[float(c) for c in n] for n in self.directions],
            "verdicts": list(self.verdicts),
            "worst_max_imag": float(self.worst_max_imag),
            "all_hyperbolic": bool(self.all_hyperbolic),
            "passed": bool(self.passed),
        }


def check_abs_system(sys, n_directions=20, tol=DEFAULT_TOL,
                     cond_cap=DEFAULT_COND_CAP, seed=0):
    """Verify both hyperbolicity conditions of a quasilinear system.

    Condition 1: D invertible (condition number reported). Condition 2:
    every linear combination sum_k n_k M_k is real diagonalizable,
    sampled over the axis directions plus n_directions random unit
    directions drawn from a seeded generator.
    """
    d_condition = sys.d_condition()
    d_invertible = np.isfinite(d_condition)
    ndim = sys.n_directions
    directions = [np.eye(ndim)[k] for k in range(ndim)]
    rng = np.random.default_rng(seed)
    for _ in range(n_directions):
        n = rng.normal(size=ndim)
        norm = np.linalg.norm(n)
        while norm < 1e-12:
            n = rng.normal(size=ndim)
            norm = np.linalg.norm(n)
        directions.append(n / norm)
    report = AbsSystemReport(d_condition=d_condition, d_invertible=d_invertible)
    for n in directions:
        combo = sum(nk * mk for nk, mk in zip(n, sys.Mk))
        res = analyze(combo, tol=tol, cond_cap=cond_cap)
        report.directions.append(n)
        report.verdicts.append(res.verdict)
        report.worst_max_imag = max(report.worst_max_imag, res.max_imag)
        if res.verdict != "hyperbolic":
            report.all_hyperbolic = False
    return report


def symmetry_criterion(mk_tilde, tol=1e-10):
    """True iff every matrix is symmetric within tol.

    This is the sufficient condition for real diagonalizability of all
    linear combinations: symmetric matrices in an orthonormal basis
    stay symmetric under linear combination. The tolerance is applied
    relative to max(1, largest entry magnitude) of each matrix.
    """
    for mat in mk_tilde:
        A = np.asarray(mat, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("matrices must be square")
        scale = max(1.0, float(np.abs(A).max()))
        if float(np.abs(A - A.T).max()) > tol * scale:
            return False
    return True


@dataclass
class ScanResult:
    """Hyperbolicity field over a normalized (f_{M-1}, f_M) grid."""

    M: int
    matrix: str
    gm1_grid: np.ndarray
    gm_grid: np.ndarray
    hyperbolic: np.ndarray
    max_imag: np.ndarray

    def fraction_hyperbolic(self):
        return float(self.hyperbolic.mean())


def scan_grad_region(M, gm1_grid, gm_grid, matrix="grad",
                     tol=DEFAULT_TOL, cond_cap=DEFAULT_COND_CAP):
    """Scan hyperbolicity over normalized top-order coefficients.

    The base state is rho = theta = 1, u = 0 with f_alpha = 0 for
    3 <= alpha <= M - 2. The grids are in the normalized variables
    f_{M-1} / (rho theta^{(M-1)/2}) and f_M / (rho theta^{M/2}); at the
    base state the normalization factors are one. For M = 3 the
    f_{M-1} slot is f_2, which is structurally zero, so the first grid
    axis is recorded but cannot perturb the state.

    matrix selects the Grad matrix ("grad") or its regularized form
    ("regularized").
    """
    if matrix not in ("grad", "regularized"):
        raise ValueError("matrix must be 'grad' or 'regularized'")
    gm1_grid = np.asarray(gm1_grid, dtype=float)
    gm_grid = np.asarray(gm_grid, dtype=float)
    shape = (gm1_grid.size, gm_grid.size)
    hyper = np.zeros(shape, dtype=bool)
    imag = np.zeros(shape)
    for i, g1 in enumerate(gm1_grid):
        for j, g2 in enumerate(gm_grid):
            f = np.zeros(M - 2)
            if M >= 4:
                f[M - 1 - 3] = g1
            f[M - 3] = g2
            state = MomentState1D(M=M, rho=1.0, u=0.0, theta=1.0, f=f)
            A = hme1d.assemble_grad_A(state)
            if matrix == "regularized":
                A = hme1d.regularize(A, state)
            res = analyze(A, tol=tol, cond_cap=cond_cap)
            hyper[i, j] = res.verdict == "hyperbolic"
            imag[i, j] = res.max_imag
    return ScanResult(M=M, matrix=matrix, gm1_grid=gm1_grid, gm_grid=gm_grid,
                      hyperbolic=hyper, max_imag=imag)
