"""Contour-integral (Beyn) solver for holomorphic eigenproblems F(z)x = 0.

The two moments

    A0 = (1/(i N_q)) sum_j F(z_j)^{-1} Vhat z'_j
    A1 = (1/(i N_q)) sum_j z_j F(z_j)^{-1} Vhat z'_j

are trapezoid sums over an elliptic contour; a rank-revealing SVD of A0
reduces the problem to a k x k linear eigenproblem B = U_k^* A1 W_k S_k^{-1}
whose eigenvalues approximate all eigenvalues of F inside the contour.
Candidates are filtered by containment in the ellipse and by the recomputed
residual ||F(lambda) x|| / ||x||.

When F(conj z) = conj F(z) (real-coefficient problems) and the contour is
symmetric about the real axis, only the nodes in the closed upper half
plane are factorized; the remaining terms are conjugate mirrors.
"""
import math
import warnings

import numpy as np

from . import linalg
from .errors import ContourError, SingularMatrixError

_SUSPECT_IMAG = 1e-6


class Contour:
    """Elliptic contour z(t) = c + a cos t + i b sin t with trapezoid nodes
    t_j = 2 pi j / N_q."""

    __slots__ = ("center", "a", "b", "n_nodes")

    def __init__(self, center, a, b, n_nodes=32):
        if a <= 0 or b <= 0:
            raise ValueError("contour semi-axes must be positive")
        if n_nodes < 8 or n_nodes % 2 != 0:
            raise ValueError("node count must be even and >= 8")
        self.center = complex(center)
        self.a = float(a)
        self.b = float(b)
        self.n_nodes = int(n_nodes)

    def nodes(self):
        """(z_j, z'_j) trapezoid nodes and parameter derivatives."""
        t = 2.0 * np.pi * np.arange(self.n_nodes) / self.n_nodes
        z = self.center + self.a * np.cos(t) + 1j * self.b * np.sin(t)
        dz = -self.a * np.sin(t) + 1j * self.b * np.cos(t)
        return z, dz

    def contains(self, z):
        x = (np.real(z) - self.center.real) / self.a
        y = (np.imag(z) - self.center.imag) / self.b
        return x * x + y * y < 1.0

    def as_dict(self):
        return {"c": self.center.real, "a": self.a, "b": self.b,
                "n_nodes": self.n_nodes}

    def __repr__(self):
        return (f"Contour(c={self.center.real:g}, a={self.a:g}, b={self.b:g}, "
                f"N_q={self.n_nodes})")


def contour_nodes(contour):
    z, dz = contour.nodes()
    return list(zip(z, dz))


class EigenResult:
    """Eigenvalues inside the contour with eigenvectors and diagnostics.

    residuals[i] = ||F(lambda_i) x_i||_2 / ||x_i||_2, recomputed after the
    reduction.  suspect flags mark eigenvalues whose imaginary part exceeds
    1e-6 * (1 + |Re|), which self-adjoint problems should not produce.
    """

    __slots__ = ("eigenvalues", "eigenvectors", "residuals", "detected_rank",
                 "singular_value_gap", "suspect", "warnings")

    def __init__(self, eigenvalues, eigenvectors, residuals, detected_rank,
                 singular_value_gap, suspect, warns):
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors
        self.residuals = residuals
        self.detected_rank = detected_rank
        self.singular_value_gap = singular_value_gap
        self.suspect = suspect
        self.warnings = warns

    def __repr__(self):
        vals = ", ".join(f"{v:.6g}" for v in self.eigenvalues)
        return f"EigenResult(rank={self.detected_rank}, eigenvalues=[{vals}])"


def _factor_solve(fmat, z, probes):
    try:
        return linalg.lu_apply(linalg.lu_factor(fmat), probes)
    except SingularMatrixError as exc:
        raise ContourError(
            f"F(z) numerically singular at contour node z={z:.8g}; "
            "the contour passes through (or too close to) an eigenvalue",
            node=z) from exc


def beyn_solve(f, contour, probe_count=16, rank_tol=1e-8, residual_tol=1e-6,
               seed=0, use_conjugate_symmetry=None):
    """All eigenvalues of the holomorphic matrix family inside the contour.

    Parameters
    ----------
    f : callable z -> (n, n) complex matrix; an attribute
        `real_symmetric` (F(conj z) = conj F(z)) enables the half-contour
        fast path on real-axis-symmetric contours.  `size` (or a probe
        evaluation) supplies n.
    probe_count : number of random probe columns (>= expected eigenvalue
        count + 2).
    rank_tol : relative singular value cut s_k / s_1.
    residual_tol : post-hoc filter on ||F(lambda) x|| / ||x||.
    seed : probe matrix seed (fixed default for reproducibility).
    """
    n = getattr(f, "size", None)
    if n is None:
        n = f(contour.center + contour.a * 1j * 0 + 0j).shape[0]
    rng = np.random.default_rng(seed)
    probes = rng.standard_normal((n, probe_count))

    if use_conjugate_symmetry is None:
        use_conjugate_symmetry = bool(getattr(f, "real_symmetric", False)) \
            and contour.center.imag == 0.0

    z, dz = contour.nodes()
    nq = contour.n_nodes
    a0 = np.zeros((n, probe_count), dtype=np.complex128)
    a1 = np.zeros((n, probe_count), dtype=np.complex128)
    if use_conjugate_symmetry:
        # nodes j and N_q - j are conjugate; F(conj z)^{-1} P = conj(F(z)^{-1} P)
        for j in range(nq // 2 + 1):
            s = _factor_solve(f(z[j]), z[j], probes)
            if j == 0 or j == nq // 2:
                a0 += s * dz[j]
                a1 += s * (z[j] * dz[j])
            else:
                a0 += 2j * np.imag(s * dz[j])
                a1 += 2j * np.imag(s * (z[j] * dz[j]))
    else:
        for j in range(nq):
            s = _factor_solve(f(z[j]), z[j], probes)
            a0 += s * dz[j]
            a1 += s * (z[j] * dz[j])
    a0 /= 1j * nq
    a1 /= 1j * nq

    u, sv, w = linalg.svd(a0)
    warns = []
    if sv[0] == 0.0:
        return EigenResult(np.empty(0, complex), np.empty((n, 0), complex),
                           np.empty(0), 0, 0.0, np.empty(0, bool), warns)
    keep = sv / sv[0] > rank_tol
    k = int(np.count_nonzero(keep))
    if k == probe_count:
        msg = (f"detected rank equals probe count ({probe_count}); rerun with "
               "a larger probe_count to be sure no eigenvalue is missed")
        warns.append(msg)
        warnings.warn(msg)
    gap = float(sv[k - 1] / sv[k]) if k < len(sv) else float("inf")

    uk = u[:, :k]
    wk = w[:, :k]
    b = uk.conj().T @ a1 @ wk / sv[:k]
    vals, vecs = linalg.eig_dense(b)

    lam_list = []
    vec_list = []
    res_list = []
    sus_list = []
    order = np.argsort(vals.real, kind="stable")
    for idx in order:
        lam = vals[idx]
        if not contour.contains(lam):
            continue
        x = uk @ vecs[:, idx]
        x = x / np.linalg.norm(x)
        res = float(np.linalg.norm(f(lam) @ x))
        if res > residual_tol:
            continue
        lam_list.append(lam)
        vec_list.append(x)
        res_list.append(res)
        sus_list.append(abs(lam.imag) > _SUSPECT_IMAG * (1.0 + abs(lam.real)))
    eigenvalues = np.array(lam_list, dtype=complex)
    eigenvectors = (np.stack(vec_list, axis=1) if vec_list
                    else np.empty((n, 0), dtype=complex))
    return EigenResult(eigenvalues, eigenvectors, np.array(res_list),
                       k, gap, np.array(sus_list, dtype=bool), warns)


def eoc(errors, mesh_sizes):
    """Experimental order of convergence between consecutive refinement
    levels: eoc_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k)."""
    errors = np.asarray(errors, dtype=float)
    mesh_sizes = np.asarray(mesh_sizes, dtype=float)
    if len(errors) != len(mesh_sizes) or len(errors) < 2:
        raise ValueError("need >= 2 matching (error, mesh_size) entries")
    if np.any(errors <= 0.0) or np.any(mesh_sizes <= 0.0):
        raise ValueError("errors and mesh sizes must be positive")
    return [math.log(errors[k - 1] / errors[k]) / math.log(mesh_sizes[k - 1] / mesh_sizes[k])
            for k in range(1, len(errors))]


def cluster_eigenvalues(values, rel_gap=1e-3):
    """Group near-degenerate eigenvalues (sorted by real part) into clusters
    with relative gap below rel_gap.  Returns a list of index arrays."""
    if len(values) == 0:
        return []
    order = np.argsort(np.real(values), kind="stable")
    clusters = [[order[0]]]
    for idx in order[1:]:
        prev = values[clusters[-1][-1]]
        scale = max(abs(prev), 1e-30)
        if abs(values[idx] - prev) <= rel_gap * scale:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return [np.array(c, dtype=int) for c in clusters]
