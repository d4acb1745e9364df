"""Perturbative hidden-symmetry operator of the PT-symmetric square well.

Exact eigenpairs, closed-form perturbative kernels, a quadrature operator
algebra that keeps delta parts exact, and numerical checks tying them together.
"""

from .exact import (EigenSolution, ModeMismatchError, NormalizationError, SolverError,
                    eigenfunction_value, matching_residual, pt_normalize, solve_eigenvalue,
                    solve_normalized)
from .model import (Convention, DomainError, GridError, KernelExpansion, KernelGrid, QuadGrid,
                    Scheme, WellSpec, heaviside, make_grid, sgn_step, to_original, to_symmetric)
from .opalg import (ConvergenceError, DiscreteOperator, build_C, compose, extract_Q, hermitize,
                    parity_op, spectral_sum_C)
from .perturb import a_coeff, c1_kernel, c1_kernel_original, c2_kernel, c2_kernel_region3, energy, phi, q_kernel
from .series import FourierSumSpec, fourier_sum
from .verify import VerificationReport, run_suite

__version__ = "0.1.0"
