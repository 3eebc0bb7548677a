"""Dense complex linear-algebra kernel.

Everything in the package runs on plain numpy complex128 square arrays;
this module holds the few operations the rest builds on: a general
matrix exponential, Hermitian eigendecomposition with a fixed ordering
convention, and the commutator.  All in 64-bit precision.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg


def as_matrix(a):
    """Validate and return a square complex128 matrix with finite entries."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def matexp(a):
    """Matrix exponential e^a.

    Delegates to scipy's scaling-and-squaring Pade scheme, which holds
    the accuracy needed here for the generally non-normal inputs coming
    out of the split-signature algebra.  Exact for the zero matrix.
    """
    a = as_matrix(a)
    if not a.any():
        return np.eye(a.shape[0], dtype=np.complex128)
    return scipy.linalg.expm(a)


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition A = U diag(w) U^dagger of a Hermitian matrix.

    ``eigenvalues`` is real and ascending; column i of ``eigenvectors``
    is the unit eigenvector for ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh(a, tol=1e-10):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Rejects inputs whose Hermiticity residual ||A - A^dagger||_F exceeds
    ``tol * max(1, ||A||_F)``; the default tolerance accommodates
    matrices assembled as X X^dagger products.
    """
    a = as_matrix(a)
    scale = max(1.0, float(np.linalg.norm(a)))
    residual = float(np.linalg.norm(a - a.conj().T))
    if residual > tol * scale:
        raise ValueError(
            f"matrix is not Hermitian: ||A - A^dagger|| = {residual:.3e} "
            f"exceeds {tol:.1e} * max(1, ||A||)"
        )
    w, u = np.linalg.eigh(a)
    return HermitianEigen(eigenvalues=w, eigenvectors=u)


def commutator(a, b):
    """Matrix commutator [a, b] = ab - ba."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a
