"""Dense symmetric and generalized eigensolvers.

Matrices are dense float64 numpy arrays; data matrices hold one sample per
column. Both solvers return the full spectrum as ``(values, vectors)`` with
eigenvalues ascending and eigenvectors in the matching columns. Eigenvector
signs are fixed by making the first component whose magnitude exceeds a
small threshold positive, so repeated runs (and serialized models) are
bit-identical on one platform.
"""

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    NonFiniteError,
    NonSquareError,
    NonSymmetricError,
    SingularConstraintError,
)

# Relative asymmetry tolerated before a matrix is rejected as non-symmetric.
SYMMETRY_RTOL = 1e-10

# Default ridge added to the constraint matrix of the generalized problem,
# scaled by trace(M)/n. Image data has feature dim >> sample count, so the
# constraint is singular in every realistic fit; the ridge keeps the
# whitening Cholesky well posed.
DEFAULT_RIDGE = 1e-8

_SIGN_EPS = 1e-9


def _as_matrix(A, name="matrix"):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return A


def _require_symmetric(A, name="matrix"):
    if A.shape[0] != A.shape[1]:
        raise NonSquareError(f"{name} must be square, got shape {A.shape}")
    asym = np.linalg.norm(A - A.T)
    if asym > SYMMETRY_RTOL * (1.0 + np.linalg.norm(A)):
        raise NonSymmetricError(
            f"{name} is asymmetric beyond tolerance (||A-A^T||={asym:.3e})"
        )


def _fix_signs(V):
    """Make the first non-negligible component of each column positive."""
    for j in range(V.shape[1]):
        col = V[:, j]
        idx = np.flatnonzero(np.abs(col) > _SIGN_EPS)
        if idx.size and col[idx[0]] < 0.0:
            V[:, j] = -col
    return V


def sym_eig(A):
    """Full eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    A : (n, n) array, symmetric within ``SYMMETRY_RTOL``.

    Returns
    -------
    values : (n,) array, ascending.
    vectors : (n, n) array, unit-norm columns, sign-fixed.
    """
    A = _as_matrix(A, "A")
    _require_symmetric(A, "A")
    values, vectors = np.linalg.eigh(0.5 * (A + A.T))
    return values, _fix_signs(vectors)


def effective_ridge(M, ridge):
    """Scaled ridge actually added to the constraint: ridge * trace(M)/n.

    Falls back to the raw ridge when the trace is not positive (e.g. a zero
    constraint matrix), so the regularized matrix is still definite.
    """
    n = M.shape[0]
    scale = np.trace(M) / n
    if scale <= 0.0:
        scale = 1.0
    return ridge * scale


def gen_eig(A, M, ridge=DEFAULT_RIDGE):
    """Solve the symmetric-definite generalized problem A w = lambda M w.

    M is regularized to ``M + effective_ridge(M, ridge) * I`` and whitened by
    its Cholesky factor; the symmetric eigenproblem of the whitened operator
    is then solved with :func:`sym_eig`. Returned vectors are orthonormal
    with respect to the regularized constraint (so M-orthonormal up to the
    ridge perturbation).

    Parameters
    ----------
    A : (n, n) symmetric array.
    M : (n, n) symmetric positive semi-definite array.
    ridge : float >= 0, relative ridge for the constraint.

    Returns
    -------
    values : (n,) array, ascending.
    vectors : (n, n) array; column j solves A w = values[j] * M_reg w.
    """
    A = _as_matrix(A, "A")
    M = _as_matrix(M, "M")
    _require_symmetric(A, "A")
    _require_symmetric(M, "M")
    if A.shape != M.shape:
        raise DimensionMismatchError(
            f"A and M must have the same shape, got {A.shape} and {M.shape}"
        )
    if ridge < 0.0:
        raise ValueError("ridge must be >= 0")

    M_reg = 0.5 * (M + M.T)
    if ridge > 0.0:
        M_reg = M_reg + effective_ridge(M, ridge) * np.eye(M.shape[0])
    try:
        # lower Cholesky factor: M_reg = L L^T
        L = np.linalg.cholesky(M_reg)
    except np.linalg.LinAlgError as exc:
        raise SingularConstraintError(
            f"constraint matrix is not positive definite (ridge={ridge:g})"
        ) from exc

    # whitened operator L^-1 A L^-T, solved by triangular substitution
    half = scipy.linalg.solve_triangular(L, 0.5 * (A + A.T), lower=True)
    C = scipy.linalg.solve_triangular(L, half.T, lower=True)
    values, U = np.linalg.eigh(0.5 * (C + C.T))
    vectors = scipy.linalg.solve_triangular(L.T, U, lower=False)
    return values, _fix_signs(vectors)


def gen_eig_residual(A, M, values, vectors, ridge=DEFAULT_RIDGE):
    """Max 2-norm of A w - lambda M_reg w over the given pairs.

    Uses the same ridge rule as :func:`gen_eig`, so a solver output checked
    against the problem it actually solved reports pure numerical error.
    """
    M_reg = M
    if ridge > 0.0:
        M_reg = M + effective_ridge(M, ridge) * np.eye(M.shape[0])
    R = A @ vectors - (M_reg @ vectors) * values[np.newaxis, :]
    if R.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(R, axis=0)))


def center_columns(X):
    """Subtract the per-row mean of the columns.

    Returns ``(Xc, mean)`` where ``mean`` is the average column and every
    column of ``Xc`` is the corresponding column of ``X`` minus ``mean``.
    """
    X = _as_matrix(X, "X")
    if X.shape[1] < 1:
        raise DimensionMismatchError("need at least one column to center")
    mean = X.mean(axis=1)
    return X - mean[:, np.newaxis], mean
