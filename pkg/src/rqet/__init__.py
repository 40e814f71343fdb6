"""Analytic phase factors for the iterated matrix-sign transform, with
dense block-encoding drivers and independent cross-checks."""

from .blockenc import (BlockEncoding, ancilla_rotation, dilate_general,
                       dilate_hermitian, extract)
from .errors import DomainError, InputError, NumericError
from .linalg import (hermitian_eig, load_matrix, matrix_function_hermitian,
                     matrix_sign, operator_norm, polar_oracle, save_matrix,
                     unitarity_check)
from .poly import (ComplexPolynomial, check_qet_conditions,
                   deflate_pade_square, load_poly, pade, poly_eval,
                   polynomial, roots_in_u, save_poly)
from .qet import (IterationReport, ScalarSignTable, check_flattened_structure,
                  coherent_perturb, complexity_estimate, compose_phases,
                  distinct_nonzero_angles, error_bound, flatten_sign_phases,
                  qet_assemble, qet_recursive_step, query_count,
                  recovery_cost, run_sign, scalar_sign_iterate,
                  sign_iterations)
from .qsp import (analytic_pade_phases, canonicalize_angles,
                  chebyshev_reflection_phases, complementary_poly,
                  find_phases_rotation, load_phases, pade_phases,
                  qsp_reflection_eval, qsp_rotation_eval,
                  reflection_upper_left, rotation_to_reflection, save_phases)
from .qsvt import (FilterResult, PreparationResult, QsvtEncoding,
                   encode_for_qsvt, filtering_operator, preparation_projector,
                   project_state, qsvt_assemble, restricted_block, run_polar)

__version__ = "0.1.0"
