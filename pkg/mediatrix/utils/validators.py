"""Matrix validation utilities."""

import numpy as np
from numpy.typing import NDArray

ComplexMatrix = NDArray[np.complex128]


def hermiticity_deviation(matrix: ComplexMatrix) -> float:
    """Max absolute entry of M - M^dagger."""
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def min_eigenvalue(matrix: ComplexMatrix) -> float:
    """Smallest eigenvalue of the Hermitian part of a matrix."""
    hermitian_part = (matrix + matrix.conj().T) / 2
    return float(np.linalg.eigvalsh(hermitian_part)[0])


def identity_deviation(matrix: ComplexMatrix) -> float:
    """Max absolute entry of M - I."""
    return max_entry_distance(matrix, np.eye(matrix.shape[0], dtype=complex))


def max_entry_distance(left: ComplexMatrix, right: ComplexMatrix) -> float:
    """Max absolute entry of left - right (0 for empty matrices)."""
    if left.shape != right.shape:
        raise ValueError(f"Cannot compare shapes {left.shape} and {right.shape}")
    if left.size == 0:
        return 0.0
    return float(np.max(np.abs(left - right)))


def as_complex_matrix(data: object) -> ComplexMatrix:
    """Copy input into a read-only complex128 2-D array of finite entries."""
    matrix = np.array(data, dtype=np.complex128)
    if matrix.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix, got an array with {matrix.ndim} dimensions")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Matrix has non-finite entries")
    matrix.flags.writeable = False
    return matrix
