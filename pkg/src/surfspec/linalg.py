"""Dense complex linear algebra contract for the eigensolver.

Thin wrappers over LAPACK (via numpy/scipy) that pin down the behaviour the
rest of the package relies on: partial pivoting with an explicit
singularity test, descending singular values, and residual-bounded
eigenpairs.  Double precision throughout.
"""
import numpy as np
import scipy.linalg

from .errors import NumericError, SingularMatrixError


def lu_factor(a):
    """LU factorization with partial pivoting and a pivot-magnitude check.

    Raises SingularMatrixError (carrying the offending pivot) when the
    smallest |U_ii| falls below n * eps * max|A|.
    """
    a = np.asarray(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("lu_factor requires a square matrix")
    amax = np.abs(a).max()
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    threshold = len(a) * np.finfo(float).eps * amax
    small = pivots.min(initial=np.inf)
    if small <= threshold:
        raise SingularMatrixError(
            f"numerically singular matrix (pivot {small:.3e} <= {threshold:.3e})",
            pivot=float(small))
    return lu, piv


def lu_apply(factor, b):
    lu, piv = factor
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def lu_solve(a, b):
    """Solve A X = B with partial pivoting."""
    return lu_apply(lu_factor(a), b)


def svd(a):
    """A = U diag(s) V^H with s descending >= 0."""
    try:
        u, s, vh = np.linalg.svd(np.asarray(a), full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed to converge: {exc}") from exc
    return u, s, vh.conj().T


def eig_dense(a):
    """Eigendecomposition of a small dense matrix: (values, vectors)."""
    try:
        w, v = np.linalg.eig(np.asarray(a))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"dense eigendecomposition failed: {exc}") from exc
    return w, v


def cholesky_check(a):
    """True iff the Hermitian part of a factorizes with positive pivots."""
    h = 0.5 * (a + np.asarray(a).conj().T)
    try:
        np.linalg.cholesky(h)
        return True
    except np.linalg.LinAlgError:
        return False
