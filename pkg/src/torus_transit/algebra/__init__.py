"""Exact integer/rational linear algebra behind the transitivity criteria."""

from .matrix import (as_int_matrix, as_matrix, char_poly, compound_matrix,
                     determinant, format_matrix, identity, is_diagonalizable,
                     is_left_eigenvector, leading_principal_minors, matmul,
                     matvec, minimal_polynomial, positive_definite, rank,
                     rational_kernel, restriction_determinant_divides,
                     restriction_matrix, transpose,
                     transverse_invariant_hyperplane)
from .poly import (cyclotomic, format_poly, integer_eigenvalues,
                   no_root_of_unity_eigenvalue)
from .smith import SmithDecomposition, smith_normal_form

__all__ = [
    "SmithDecomposition", "as_int_matrix", "as_matrix", "char_poly",
    "compound_matrix", "cyclotomic", "determinant", "format_matrix",
    "format_poly", "identity", "integer_eigenvalues", "is_diagonalizable",
    "is_left_eigenvector", "leading_principal_minors", "matmul", "matvec",
    "minimal_polynomial", "no_root_of_unity_eigenvalue", "positive_definite",
    "rank", "rational_kernel", "restriction_determinant_divides",
    "restriction_matrix", "smith_normal_form", "transpose",
    "transverse_invariant_hyperplane",
]
