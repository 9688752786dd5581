"""Globally hyperbolic moment systems for kinetic equations.

Hermite-basis machinery, the one-dimensional moment hierarchy with its
Grad and regularized coefficient matrices, numerical hyperbolicity
analysis, the 13-moment system, multi-dimensional full-moment systems,
and a 1D finite-volume BGK solver, all behind one command-line tool.
"""

__version__ = "0.1.0"

from .hermite import (HermiteBasisParams, eval_basis_1d, hermite_eval,
                      hermite_gauss, hermite_roots,
                      reconstruct_distribution)
from .state1d import MomentState1D, QuasiLinearSystem, bgk_source, validate
from .hme1d import (assemble_D, assemble_Mmat, assemble_grad_A,
                    build_system_by_deduction, regularize)
from .hyperbolicity import (AbsSystemReport, HyperbolicityReport, ScanResult,
                            analyze, check_abs_system, scan_grad_region,
                            symmetry_criterion)
from .moment13 import (Moment13State, assemble_D13, assemble_M13,
                       assemble_system_13, collision_13, eigenspeeds_13,
                       rhs_explicit_13, sample_state_13, validate_13)
from .momentnd import (MomentStateND, assemble_D_nd, assemble_M_nd,
                       assemble_system_nd, classic_reduction_jacobian,
                       enumerate_indices, orthonormalized_convection,
                       rotate_state, sample_state_nd, validate_nd)
from .solver1d import (HAVE_COMPILED, Grid1D, SimConfig, SimResult,
                       conserved_totals, max_wavespeed, run, step,
                       transport_backends)

__all__ = [
    "__version__",
    "HermiteBasisParams", "eval_basis_1d", "hermite_eval", "hermite_gauss",
    "hermite_roots", "reconstruct_distribution",
    "MomentState1D", "QuasiLinearSystem", "bgk_source", "validate",
    "assemble_D", "assemble_Mmat", "assemble_grad_A",
    "build_system_by_deduction", "regularize",
    "AbsSystemReport", "HyperbolicityReport", "ScanResult", "analyze",
    "check_abs_system", "scan_grad_region", "symmetry_criterion",
    "Moment13State", "assemble_D13", "assemble_M13", "assemble_system_13",
    "collision_13", "eigenspeeds_13", "rhs_explicit_13", "sample_state_13",
    "validate_13",
    "MomentStateND", "assemble_D_nd", "assemble_M_nd", "assemble_system_nd",
    "classic_reduction_jacobian", "enumerate_indices",
    "orthonormalized_convection", "rotate_state", "sample_state_nd",
    "validate_nd",
    "HAVE_COMPILED", "Grid1D", "SimConfig", "SimResult", "conserved_totals",
    "max_wavespeed", "run", "step", "transport_backends",
]
