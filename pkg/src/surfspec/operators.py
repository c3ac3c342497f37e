"""Galerkin assembly of the boundary operator matrices at a spectral point.

Operators (P = -Delta - lambda, kernel G = e^{ikr}/(4 pi r), k = sqrt(lambda),
Im k >= 0):

* V   single layer,          S0 x S0:  V_ij = int int G
* K   double layer,          test S0 x trial S1 (closed meshes)
* K'  adjoint double layer,  test S1 x trial S0 (closed meshes)
* D   hypersingular, S1 x S1, assembled in the integration-by-parts form

      <D psi, chi> = int int G(x,y) [ curl_G psi(y).curl_G chi(x)
                                      - lambda psi(y) chi(x) nu(x).nu(y) ]

  so only weakly singular integrals ever appear; the surface curl of a hat
  function is piecewise constant.
* mass matrices (S0 diagonal, S1 exact per-panel blocks, mixed S0 x S1)
* the Birman-Schwinger system builders F(z) for the delta problem
  (M + diag(alpha) V(z)) and the delta-prime problem (M_{beta^-1} + D(z)),
  and the 2x2 Calderon block matrix used by identity tests.

Assembly parallelizes over panels with per-row ownership (or a vertex
coloring for the S1 scatter); sums accumulate in a fixed order, so repeated
runs are bit-identical.
"""
import numpy as np

from . import _assembly
from .errors import UnsupportedOperationError
from .geometry import (COMMON_EDGE, COMMON_VERTEX, IDENTICAL, DofSpace,
                       classify_pair, panel_neighbors)
from .kernel import SpectralPoint
from .quadrature import gauss_triangle, sauter_schwab_rule

FOUR_PI = 4.0 * np.pi


class AssemblySettings:
    """Quadrature orders and pair-selection thresholds.

    far_order / near_order are TriangleRule polynomial orders for disjoint
    pairs (far: centroid distance > far_factor * max panel diameter);
    singular_order is the 1-D Gauss point count of the Sauter-Schwab rules.
    """

    __slots__ = ("far_order", "near_order", "singular_order", "far_factor")

    def __init__(self, far_order=4, near_order=6, singular_order=8, far_factor=2.0):
        self.far_order = far_order
        self.near_order = near_order
        self.singular_order = singular_order
        self.far_factor = far_factor

    def key(self):
        return (self.far_order, self.near_order, self.singular_order, self.far_factor)

    def as_dict(self):
        return {"far_order": self.far_order, "near_order": self.near_order,
                "singular_order": self.singular_order, "far_factor": self.far_factor}


class OperatorMatrix:
    """Dense complex Galerkin matrix of a boundary operator at one lambda."""

    __slots__ = ("entries", "trial_space", "test_space", "lam")

    def __init__(self, entries, trial_space, test_space, lam):
        entries.flags.writeable = False  # assembled matrices are immutable
        self.entries = entries
        self.trial_space = trial_space
        self.test_space = test_space
        self.lam = complex(lam)

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]


# ----------------------------------------------------------------------
# cached per-mesh assembly data

_mesh_cache = {}


class _MeshData:
    def __init__(self, mesh, settings):
        tri = mesh.vertices[mesh.panels]
        self.verts = mesh.vertices
        self.panels = mesh.panels
        self.areas = mesh.panel_areas
        self.normals = mesh.panel_normals
        self.cent = mesh.panel_centroids
        self.diam = mesh.panel_diameters

        def panel_points(order):
            rule = gauss_triangle(order)
            u = rule.points[:, 0]
            v = rule.points[:, 1]
            # x = V0 + u (V1-V0) + v (V2-V0); hats = (1-u-v, u, v)
            pts = (tri[:, None, 0]
                   + u[None, :, None] * (tri[:, None, 1] - tri[:, None, 0])
                   + v[None, :, None] * (tri[:, None, 2] - tri[:, None, 0]))
            wts = rule.weights[None, :] * (2.0 * mesh.panel_areas[:, None])
            hats = np.stack([1.0 - u - v, u, v], axis=1)
            return np.ascontiguousarray(pts), np.ascontiguousarray(wts), \
                np.ascontiguousarray(hats)

        self.pts_f, self.wts_f, self.hats_f = panel_points(settings.far_order)
        self.pts_n, self.wts_n, self.hats_n = panel_points(settings.near_order)

        self.noff, self.nids = panel_neighbors(mesh)

        # ordered singular pair list with matched permutations
        si, sj, scls, pi, pj = [], [], [], [], []
        for i in range(mesh.n_panels):
            si.append(i)
            sj.append(i)
            scls.append(IDENTICAL)
            pi.append((0, 1, 2))
            pj.append((0, 1, 2))
            for j in self.nids[self.noff[i]:self.noff[i + 1]]:
                cls = classify_pair(mesh, i, int(j))
                si.append(i)
                sj.append(int(j))
                scls.append(cls.kind)
                pi.append(cls.perm_i)
                pj.append(cls.perm_j)
        self.sing_i = np.array(si, dtype=np.int64)
        self.sing_j = np.array(sj, dtype=np.int64)
        self.sing_cls = np.array(scls, dtype=np.int64)
        self.sing_perm_i = np.array(pi, dtype=np.int64)
        self.sing_perm_j = np.array(pj, dtype=np.int64)

        # Sauter-Schwab rules packed per class: offsets indexed by class id
        rules = {c: sauter_schwab_rule(c, settings.singular_order)
                 for c in (COMMON_VERTEX, COMMON_EDGE, IDENTICAL)}
        npts = {c: rules[c].n_points for c in rules}
        off = np.zeros(5, dtype=np.int64)
        for c in (COMMON_VERTEX, COMMON_EDGE, IDENTICAL):
            off[c + 1] = npts[c]
        off = np.cumsum(off)
        total = off[-1]
        self.ss_pts = np.zeros((total, 4))
        self.ss_wts = np.zeros(total)
        for c in (COMMON_VERTEX, COMMON_EDGE, IDENTICAL):
            self.ss_pts[off[c]:off[c + 1]] = rules[c].points
            self.ss_wts[off[c]:off[c + 1]] = rules[c].weights
        self.ss_off = off

        # per-panel hat curls: curl of hat at local vertex s is
        # (v_{s+1} - v_{s+2}) / (2 area)
        curls = np.empty((mesh.n_panels, 3, 3))
        for s in range(3):
            curls[:, s, :] = (tri[:, (s + 1) % 3] - tri[:, (s + 2) % 3]) \
                / (2.0 * mesh.panel_areas[:, None])
        self.curls = curls


def mesh_data(mesh, settings):
    key = (id(mesh), settings.key())
    if key not in _mesh_cache:
        _mesh_cache[key] = _MeshData(mesh, settings)
    return _mesh_cache[key]


def _identity_dofs(mesh, s1_space):
    if s1_space is None:
        s1_space = DofSpace(mesh, "S1")
    return s1_space


# ----------------------------------------------------------------------
# operator assemblies

def assemble_V(mesh, sp, settings=None):
    """Single layer Galerkin matrix on S0 x S0."""
    settings = settings or AssemblySettings()
    sp = sp if isinstance(sp, SpectralPoint) else SpectralPoint(sp)
    md = mesh_data(mesh, settings)
    n = mesh.n_panels
    out = np.zeros((n, n), dtype=np.complex128)
    _assembly.v_regular_upper(md.pts_f, md.wts_f, md.pts_n, md.wts_n,
                              md.cent, md.diam, md.noff, md.nids,
                              sp.k, settings.far_factor, out)
    out += out.T.copy()  # kernel symmetric; disjoint pairs mirrored exactly
    _assembly.v_singular(md.verts, md.panels, md.areas,
                         md.sing_i, md.sing_j, md.sing_cls,
                         md.sing_perm_i, md.sing_perm_j,
                         md.ss_pts, md.ss_wts, md.ss_off, sp.k, out)
    return OperatorMatrix(out, "S0", "S0", sp.lam)


def assemble_D(mesh, sp, settings=None, s1_space=None):
    """Hypersingular Galerkin matrix on S1 x S1 (regularized form)."""
    import numba

    settings = settings or AssemblySettings()
    sp = sp if isinstance(sp, SpectralPoint) else SpectralPoint(sp)
    md = mesh_data(mesh, settings)
    space = _identity_dofs(mesh, s1_space)
    v2d = space.vertex_to_dof
    nd = space.dof_count
    n_chunks = min(numba.get_num_threads(), mesh.n_panels)
    private = np.zeros((n_chunks, nd, nd), dtype=np.complex128)
    _assembly.d_regular_upper(md.pts_f, md.wts_f, md.hats_f,
                              md.pts_n, md.wts_n, md.hats_n,
                              md.cent, md.diam, md.normals, md.panels, v2d,
                              md.curls, md.noff, md.nids,
                              sp.k, sp.lam, settings.far_factor,
                              n_chunks, private)
    out = private.sum(axis=0)
    del private
    _assembly.d_singular(md.verts, md.panels, md.areas, md.normals, v2d,
                         md.curls, md.sing_i, md.sing_j, md.sing_cls,
                         md.sing_perm_i, md.sing_perm_j,
                         md.ss_pts, md.ss_wts, md.ss_off, sp.k, sp.lam, out)
    return OperatorMatrix(out, "S1", "S1", sp.lam)


def _require_closed(mesh, op):
    if not mesh.is_closed:
        raise UnsupportedOperationError(f"{op} requires a closed mesh")


def assemble_K(mesh, sp, settings=None, s1_space=None):
    """Double layer Galerkin matrix, trial S1, test S0 (closed meshes).

    Identical-panel contributions vanish for flat panels and are skipped.
    """
    _require_closed(mesh, "double layer")
    settings = settings or AssemblySettings()
    sp = sp if isinstance(sp, SpectralPoint) else SpectralPoint(sp)
    md = mesh_data(mesh, settings)
    space = _identity_dofs(mesh, s1_space)
    v2d = space.vertex_to_dof
    out = np.zeros((mesh.n_panels, space.dof_count), dtype=np.complex128)
    _assembly.k_regular(md.pts_f, md.wts_f, md.hats_f,
                        md.pts_n, md.wts_n, md.hats_n,
                        md.cent, md.diam, md.normals, md.panels, v2d,
                        md.noff, md.nids, sp.k, settings.far_factor, out)
    keep = md.sing_cls != IDENTICAL
    _assembly.k_singular(md.verts, md.panels, md.areas, md.normals, v2d,
                         md.sing_i[keep], md.sing_j[keep], md.sing_cls[keep],
                         md.sing_perm_i[keep], md.sing_perm_j[keep],
                         md.ss_pts, md.ss_wts, md.ss_off, sp.k, out)
    return OperatorMatrix(out, "S1", "S0", sp.lam)


def assemble_Kp(mesh, sp, settings=None, s1_space=None):
    """Adjoint double layer Galerkin matrix, trial S0, test S1 (closed)."""
    _require_closed(mesh, "adjoint double layer")
    settings = settings or AssemblySettings()
    sp = sp if isinstance(sp, SpectralPoint) else SpectralPoint(sp)
    md = mesh_data(mesh, settings)
    space = _identity_dofs(mesh, s1_space)
    v2d = space.vertex_to_dof
    out = np.zeros((space.dof_count, mesh.n_panels), dtype=np.complex128)
    _assembly.kp_regular(md.pts_f, md.wts_f, md.hats_f,
                         md.pts_n, md.wts_n, md.hats_n,
                         md.cent, md.diam, md.normals, md.panels, v2d,
                         md.noff, md.nids, sp.k, settings.far_factor, out)
    keep = md.sing_cls != IDENTICAL
    _assembly.kp_singular(md.verts, md.panels, md.areas, md.normals, v2d,
                          md.sing_i[keep], md.sing_j[keep], md.sing_cls[keep],
                          md.sing_perm_i[keep], md.sing_perm_j[keep],
                          md.ss_pts, md.ss_wts, md.ss_off, sp.k, out)
    return OperatorMatrix(out, "S0", "S1", sp.lam)


def assemble_mass(mesh, kind, weights=None, s1_space=None):
    """Mass matrices: "S0" diagonal areas, "S1" exact hat blocks, "mixed"
    S0-test x S1-trial.  Optional per-panel weights multiply the blocks."""
    w = np.ones(mesh.n_panels) if weights is None else np.asarray(weights, dtype=float)
    if kind == "S0":
        return OperatorMatrix(np.diag(mesh.panel_areas * w).astype(np.complex128),
                              "S0", "S0", 0.0)
    space = _identity_dofs(mesh, s1_space)
    v2d = space.vertex_to_dof
    if kind == "S1":
        out = np.zeros((space.dof_count, space.dof_count), dtype=np.complex128)
        block = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
        for ip, panel in enumerate(mesh.panels):
            dofs = v2d[panel]
            scale = mesh.panel_areas[ip] * w[ip]
            for a in range(3):
                if dofs[a] < 0:
                    continue
                for b in range(3):
                    if dofs[b] >= 0:
                        out[dofs[a], dofs[b]] += scale * block[a, b]
        return OperatorMatrix(out, "S1", "S1", 0.0)
    if kind == "mixed":
        out = np.zeros((mesh.n_panels, space.dof_count), dtype=np.complex128)
        for ip, panel in enumerate(mesh.panels):
            dofs = v2d[panel]
            for a in range(3):
                if dofs[a] >= 0:
                    out[ip, dofs[a]] += mesh.panel_areas[ip] * w[ip] / 3.0
        return OperatorMatrix(out, "S1", "S0", 0.0)
    raise ValueError(f"unknown mass kind {kind!r}")


# ----------------------------------------------------------------------
# Birman-Schwinger builders and the Calderon block

def bs_delta(z, mesh, alpha_per_panel, settings=None):
    """F(z) = M_S0 + diag(alpha) V(z): the delta-problem Galerkin matrix.

    Valid for panel-constant alpha: test functions are panel indicators, so
    (alpha S0(z) phi_j, psi_i) = alpha_i V(z)_ij.
    """
    alpha = np.broadcast_to(np.asarray(alpha_per_panel, dtype=float),
                            (mesh.n_panels,))
    v = assemble_V(mesh, z, settings).entries
    f = alpha[:, None] * v
    f[np.diag_indices_from(f)] += mesh.panel_areas
    return f


def bs_deltaprime(z, mesh, betainv_per_panel, settings=None, s1_space=None):
    """F(z) = M_{beta^-1} + D(z): the delta-prime-problem Galerkin matrix."""
    betainv = np.broadcast_to(np.asarray(betainv_per_panel, dtype=float),
                              (mesh.n_panels,))
    d = assemble_D(mesh, z, settings, s1_space).entries
    m = assemble_mass(mesh, "S1", weights=betainv, s1_space=s1_space).entries
    return m + d


def calderon_block(z, mesh, settings=None):
    """Galerkin matrix of the 2x2 boundary operator block (closed meshes;
    identity tests only, no eigenvalue hunt).

    The analytic formulation sums the two one-sided traces, which is twice
    the principal-value operators assembled by assemble_K / assemble_Kp;
    the half-identity terms absorb that factor, giving the blocks
    [[V, -M/2 + K], [M^T/2 - K', D]].
    """
    _require_closed(mesh, "Calderon block")
    sp = SpectralPoint(z)
    v = assemble_V(mesh, sp, settings).entries
    kk = assemble_K(mesh, sp, settings).entries
    kp = assemble_Kp(mesh, sp, settings).entries
    d = assemble_D(mesh, sp, settings).entries
    m = assemble_mass(mesh, "mixed").entries
    n0, n1 = v.shape[0], d.shape[0]
    out = np.zeros((n0 + n1, n0 + n1), dtype=np.complex128)
    out[:n0, :n0] = v
    out[:n0, n0:] = -0.5 * m + kk
    out[n0:, :n0] = 0.5 * m.T - kp
    out[n0:, n0:] = d
    return out


class NonlinearMatrixFunction:
    """Holomorphic matrix family z -> F(z) fed to the contour eigensolver.

    kind "delta":        F(z) = M_S0 + diag(alpha) V(z)      (S0 dofs)
    kind "delta_prime":  F(z) = M_{beta^-1} + D(z)           (S1 dofs)

    Assembly is deterministic: equal z yields identical matrices.
    real_symmetric means F(conj z) = conj F(z), which holds for real
    coefficients; the eigensolver exploits it on real-symmetric contours.
    """

    def __init__(self, kind, mesh, coefficient, settings=None, s1_space=None):
        if kind not in ("delta", "delta_prime"):
            raise ValueError(f"unknown problem kind {kind!r}")
        self.kind = kind
        self.mesh = mesh
        self.coefficient = np.broadcast_to(
            np.asarray(coefficient, dtype=float), (mesh.n_panels,))
        self.settings = settings or AssemblySettings()
        if kind == "delta_prime" and s1_space is None:
            s1_space = DofSpace(mesh, "S1")
        self.s1_space = s1_space
        self.real_symmetric = True

    @property
    def size(self):
        if self.kind == "delta":
            return self.mesh.n_panels
        return self.s1_space.dof_count

    def matrix(self, z):
        if self.kind == "delta":
            return bs_delta(z, self.mesh, self.coefficient, self.settings)
        return bs_deltaprime(z, self.mesh, self.coefficient, self.settings,
                             self.s1_space)

    def __call__(self, z):
        return self.matrix(z)


def dump_matrix(entries, path):
    """Debug dump of a dense complex matrix.

    CSV of "re,im" pairs in row-major order when path ends in .csv;
    otherwise raw interleaved float64 (re, im) in row-major order.
    """
    entries = np.asarray(entries, dtype=np.complex128)
    if str(path).endswith(".csv"):
        with open(path, "w") as fh:
            for row in entries:
                fh.write(",".join(f"{v.real:.17g},{v.imag:.17g}" for v in row))
                fh.write("\n")
    else:
        entries.astype(np.complex128).tofile(path)


# ----------------------------------------------------------------------
# slow reference assembly (tests cross-validate the numba path against it)

def assemble_V_reference(mesh, sp, settings=None):
    """Pure-numpy single layer assembly via integrate_pair; O(n^2) python
    loop, for small test meshes only."""
    from .kernel import green
    from .quadrature import integrate_pair, tensor_pair_rule

    settings = settings or AssemblySettings()
    sp = sp if isinstance(sp, SpectralPoint) else SpectralPoint(sp)
    tri_f = gauss_triangle(settings.far_order)
    tri_n = gauss_triangle(settings.near_order)
    rule_f = tensor_pair_rule(tri_f, tri_f)
    rule_n = tensor_pair_rule(tri_n, tri_n)
    rules = {c: sauter_schwab_rule(c, settings.singular_order)
             for c in (COMMON_VERTEX, COMMON_EDGE, IDENTICAL)}
    n = mesh.n_panels
    out = np.empty((n, n), dtype=np.complex128)
    kern = lambda x, y: green(sp, x, y)
    for i in range(n):
        for j in range(n):
            cls = classify_pair(mesh, i, j)
            if cls.kind == 0:
                d = np.linalg.norm(mesh.panel_centroids[i] - mesh.panel_centroids[j])
                far = d > settings.far_factor * max(mesh.panel_diameters[i],
                                                    mesh.panel_diameters[j])
                rule = rule_f if far else rule_n
            else:
                rule = rules[cls.kind]
            out[i, j] = integrate_pair(mesh, i, j, kern, rule,
                                       cls.perm_i, cls.perm_j)
    return OperatorMatrix(out, "S0", "S0", sp.lam)
