"""Haar-distributed random orthogonal matrices.

Recursive sampler, conditional constructors, a sign-corrected QR oracle,
and the statistical harness that checks them against each other.
"""

from .entry_law import EntryLaw
from .harness import (
    TestReport,
    invariance_test,
    ks_one_sample,
    ks_two_sample,
    moment_test,
)
from .linalg import OrthogonalMatrix, determinant, matmul, orthogonality_residual
from .reflectors import Reflector
from .rng import RngStream
from .sampler import (
    ConditionalInput,
    HaarSample,
    assemble,
    conditional_gamma22,
    cross_section_matrix,
    haar_matrices,
    haar_matrix,
    haar_sample,
    qr_matrices,
    qr_matrix,
    qr_oracle,
    sample_row_col,
)
from .sphere import basis_vector_e1, sample_uniform_sphere, sample_uniform_sphere_many
from .verify import run_battery

__all__ = [
    "ConditionalInput",
    "EntryLaw",
    "HaarSample",
    "OrthogonalMatrix",
    "Reflector",
    "RngStream",
    "TestReport",
    "assemble",
    "basis_vector_e1",
    "conditional_gamma22",
    "cross_section_matrix",
    "determinant",
    "haar_matrices",
    "haar_matrix",
    "haar_sample",
    "invariance_test",
    "ks_one_sample",
    "ks_two_sample",
    "matmul",
    "moment_test",
    "orthogonality_residual",
    "qr_matrices",
    "qr_matrix",
    "qr_oracle",
    "run_battery",
    "sample_row_col",
    "sample_uniform_sphere",
    "sample_uniform_sphere_many",
    "cross_section_matrix",
]

__version__ = "0.1.0"
