import numpy as np
import pytest

from surfspec import linalg
from surfspec.errors import SingularMatrixError


def test_identity_solve():
    b = np.arange(6.0).reshape(3, 2)
    assert np.array_equal(linalg.lu_solve(np.eye(3), b), b)


def test_permutation_solve():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    b = np.array([[1.0], [2.0]])
    x = linalg.lu_solve(a, b)
    assert np.allclose(x, [[2.0], [1.0]])


def test_random_residual(rng):
    a = rng.standard_normal((50, 50)) + 1j * rng.standard_normal((50, 50))
    b = rng.standard_normal((50, 3))
    x = linalg.lu_solve(a, b)
    assert np.linalg.norm(a @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_singular_matrix_reported():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError) as exc:
        linalg.lu_solve(a, np.eye(2))
    assert exc.value.pivot is not None


def test_lu_roundtrip_well_conditioned(rng):
    q1, _ = np.linalg.qr(rng.standard_normal((40, 40)))
    q2, _ = np.linalg.qr(rng.standard_normal((40, 40)))
    a = q1 @ np.diag(np.linspace(1.0, 1e4, 40)) @ q2  # condition 1e4
    x0 = rng.standard_normal((40, 2))
    x = linalg.lu_solve(a, a @ x0)
    assert np.linalg.norm(x - x0) <= 1e-9 * np.linalg.norm(x0)


def test_svd_diagonal():
    _, s, _ = linalg.svd(np.diag([3.0, 1.0]))
    assert np.allclose(s, [3.0, 1.0])


def test_svd_rank_one(rng):
    u = rng.standard_normal(10)
    v = rng.standard_normal(8)
    _, s, _ = linalg.svd(np.outer(u, v))
    assert s[1] <= 1e-13 * s[0]


def test_svd_reconstruction(rng):
    a = rng.standard_normal((12, 9)) + 1j * rng.standard_normal((12, 9))
    u, s, v = linalg.svd(a)
    assert np.all(np.diff(s) <= 0)
    assert np.linalg.norm(a - u @ np.diag(s) @ v.conj().T) <= 1e-12 * np.linalg.norm(a)


def test_svd_transpose_invariance(rng):
    a = rng.standard_normal((7, 11))
    _, s1, _ = linalg.svd(a)
    _, s2, _ = linalg.svd(a.T)
    assert np.allclose(s1, s2, rtol=1e-12)


def test_eig_diagonal():
    w, _ = linalg.eig_dense(np.diag([2.0, 5.0]))
    assert sorted(w.real) == [2.0, 5.0]


def test_eig_near_defective():
    eps = 1e-8
    a = np.array([[1.0, 1.0], [eps, 1.0]])
    w, _ = linalg.eig_dense(a)
    exact = np.array([1.0 - np.sqrt(eps), 1.0 + np.sqrt(eps)])
    assert np.allclose(np.sort(w.real), exact, atol=1e-6)


def test_eig_companion():
    # z^2 - 3 z + 2 -> eigenvalues {1, 2}
    comp = np.array([[0.0, -2.0], [1.0, 3.0]])
    w, _ = linalg.eig_dense(comp)
    assert np.allclose(np.sort(w.real), [1.0, 2.0], atol=1e-12)


def test_eig_residual(rng):
    a = rng.standard_normal((30, 30))
    w, v = linalg.eig_dense(a)
    for i in range(30):
        r = np.linalg.norm(a @ v[:, i] - w[i] * v[:, i])
        assert r <= 1e-10 * np.linalg.norm(a)


def test_cholesky_check():
    assert linalg.cholesky_check(np.eye(4))
    assert not linalg.cholesky_check(-np.eye(4))
