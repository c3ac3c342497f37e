"""Off-surface evaluation of layer potentials and planar grid export.

Evaluation is distance-graded per panel: far panels use a fixed triangle
rule, moderately near panels a higher-order rule, and (on request) very
near panels a singularity split in which the static 1/(4 pi r) part of the
kernel is integrated with the classical flat-triangle closed forms (edge
logarithms and the Van Oosterom-Strackee solid angle) and only the smooth
remainder (e^{ikr}-1)/(4 pi r) is left to quadrature.

By default, points closer than eps_near = 2 * local panel diameter are
reported as excluded and their value set to NaN; passing allow_near=True
activates the closed-form near machinery instead (used by the jump- and
continuity-relation tests).
"""
import numpy as np

from .kernel import FOUR_PI, SpectralPoint
from .quadrature import gauss_triangle

_FAR_ORDER = 6
_MID_ORDER = 10
_MID_FACTOR = 5.0   # panel diameters
_NEAR_FACTOR = 1.0


def solid_angle(x, v1, v2, v3):
    """Unsigned solid angle subtended by a triangle (Van Oosterom-Strackee)."""
    a = v1 - x
    b = v2 - x
    c = v3 - x
    la = np.linalg.norm(a)
    lb = np.linalg.norm(b)
    lc = np.linalg.norm(c)
    num = np.dot(a, np.cross(b, c))
    den = la * lb * lc + np.dot(a, b) * lc + np.dot(b, c) * la + np.dot(c, a) * lb
    return abs(2.0 * np.arctan2(num, den))


def tri_static_potential(x, tri, normal):
    """Closed-form integral of 1/|x-y| over a flat triangle."""
    w0 = np.dot(x - tri[0], normal)
    rho = x - w0 * normal
    total = 0.0
    for e in range(3):
        a, b = tri[e], tri[(e + 1) % 3]
        t = b - a
        t = t / np.linalg.norm(t)
        m = np.cross(normal, t)
        pperp = np.dot(rho - a, m)
        sa = np.dot(a - rho, t)
        sb = np.dot(b - rho, t)
        ra = np.linalg.norm(x - a)
        rb = np.linalg.norm(x - b)
        num = rb + sb
        den = ra + sa
        if num > 0.0 and den > 0.0:
            total += pperp * np.log(num / den)
    return total - abs(w0) * solid_angle(x, tri[0], tri[1], tri[2])


def tri_static_gradient(x, tri, normal):
    """Closed-form gradient (w.r.t. x) of the integral of 1/|x-y| over a
    flat triangle."""
    w0 = np.dot(x - tri[0], normal)
    g = np.zeros(3)
    rho = x - w0 * normal
    for e in range(3):
        a, b = tri[e], tri[(e + 1) % 3]
        t = b - a
        t = t / np.linalg.norm(t)
        m = np.cross(t, normal)
        sa = np.dot(a - rho, t)
        sb = np.dot(b - rho, t)
        ra = np.linalg.norm(x - a)
        rb = np.linalg.norm(x - b)
        num = rb + sb
        den = ra + sa
        if num > 0.0 and den > 0.0:
            g -= m * np.log(num / den)
    g -= normal * np.sign(w0) * solid_angle(x, tri[0], tri[1], tri[2])
    return g


def _panel_rules():
    far = gauss_triangle(_FAR_ORDER)
    mid = gauss_triangle(_MID_ORDER)
    return far, mid


def _physical_points(tri, rule):
    u = rule.points[:, 0][:, None]
    v = rule.points[:, 1][:, None]
    return tri[0] + u * (tri[1] - tri[0]) + v * (tri[2] - tri[0])


def exclusion_distances(mesh, points, eps_factor=2.0):
    """Signed clearance of each point from the panel bounding spheres minus
    eps_near = eps_factor * panel diameter (negative => excluded)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    cent = mesh.panel_centroids
    rad = np.linalg.norm(mesh.vertices[mesh.panels] - cent[:, None, :],
                         axis=2).max(axis=1)
    margin = rad + eps_factor * mesh.panel_diameters
    d = np.linalg.norm(pts[:, None, :] - cent[None, :, :], axis=2) - margin[None, :]
    return d.min(axis=1)


def eval_single_layer(mesh, sp, phi, points, allow_near=False):
    """SL(lambda)phi at off-surface points for a piecewise-constant density.

    Points violating the eps_near exclusion are set to NaN unless
    allow_near=True, in which case the static closed forms take over.
    """
    sp = sp if isinstance(sp, SpectralPoint) else SpectralPoint(sp)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    phi = np.asarray(phi)
    far, mid = _panel_rules()
    out = np.zeros(len(pts), dtype=np.complex128)
    excluded = np.zeros(len(pts), dtype=bool)
    clearance = exclusion_distances(mesh, pts)
    tri_all = mesh.vertices[mesh.panels]
    k = sp.k
    for ip, x in enumerate(pts):
        if clearance[ip] < 0.0 and not allow_near:
            excluded[ip] = True
            out[ip] = np.nan
            continue
        acc = 0.0 + 0.0j
        d = np.linalg.norm(mesh.panel_centroids - x, axis=1)
        for j in range(mesh.n_panels):
            diam = mesh.panel_diameters[j]
            tri = tri_all[j]
            if allow_near and d[j] < _NEAR_FACTOR * diam + 0.7 * diam:
                # static part in closed form, smooth remainder by quadrature
                stat = tri_static_potential(x, tri, mesh.panel_normals[j])
                y = _physical_points(tri, mid)
                r = np.linalg.norm(x - y, axis=1)
                rem = np.expm1(1j * k * r) / r
                val = (stat + 2.0 * mesh.panel_areas[j] * np.dot(mid.weights, rem)) / FOUR_PI
            else:
                rule = mid if d[j] < _MID_FACTOR * diam else far
                y = _physical_points(tri, rule)
                r = np.linalg.norm(x - y, axis=1)
                vals = np.exp(1j * k * r) / (FOUR_PI * r)
                val = 2.0 * mesh.panel_areas[j] * np.dot(rule.weights, vals)
            acc += phi[j] * val
        out[ip] = acc
    return out, excluded


def eval_single_layer_gradient(mesh, sp, phi, points, allow_near=True):
    """Gradient of SL(lambda)phi at off-surface points (S0 density).

    Near panels use the closed-form static gradient plus a quadrature of
    the bounded remainder gradient; intended for jump-relation probes at
    distances well below a panel diameter.
    """
    sp = sp if isinstance(sp, SpectralPoint) else SpectralPoint(sp)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    phi = np.asarray(phi)
    far, mid = _panel_rules()
    out = np.zeros((len(pts), 3), dtype=np.complex128)
    tri_all = mesh.vertices[mesh.panels]
    k = sp.k
    for ip, x in enumerate(pts):
        acc = np.zeros(3, dtype=np.complex128)
        d = np.linalg.norm(mesh.panel_centroids - x, axis=1)
        for j in range(mesh.n_panels):
            diam = mesh.panel_diameters[j]
            tri = tri_all[j]
            if allow_near and d[j] < _NEAR_FACTOR * diam + 0.7 * diam:
                gstat = tri_static_gradient(x, tri, mesh.panel_normals[j])
                y = _physical_points(tri, mid)
                dvec = x - y
                r = np.linalg.norm(dvec, axis=1)
                # grad_x (e^{ikr}-1)/r = rhat ((ikr-1)e^{ikr}+1)/r^2, bounded
                scal = ((1j * k * r - 1.0) * np.exp(1j * k * r) + 1.0) / (r ** 3)
                rem = 2.0 * mesh.panel_areas[j] * (mid.weights @ (scal[:, None] * dvec))
                g = (gstat + rem) / FOUR_PI
            else:
                rule = mid if d[j] < _MID_FACTOR * diam else far
                y = _physical_points(tri, rule)
                dvec = x - y
                r = np.linalg.norm(dvec, axis=1)
                scal = np.exp(1j * k * r) / (FOUR_PI * r * r) * (1j * k - 1.0 / r)
                g = 2.0 * mesh.panel_areas[j] * (rule.weights @ (scal[:, None] * dvec))
            acc += phi[j] * g
        out[ip] = acc
    return out


def eval_double_layer(mesh, sp, psi, points, s1_space=None, allow_near=False):
    """DL(lambda)psi at off-surface points for a continuous piecewise-linear
    density given by vertex values psi.

    Near panels split the density into its panel mean (static double layer
    = signed solid angle, closed form) plus quadrature terms.
    """
    sp = sp if isinstance(sp, SpectralPoint) else SpectralPoint(sp)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    psi = np.asarray(psi)
    if s1_space is not None and s1_space.vertex_to_dof is not None:
        full = np.zeros(mesh.n_vertices, dtype=psi.dtype)
        sel = s1_space.vertex_to_dof >= 0
        full[sel] = psi[s1_space.vertex_to_dof[sel]]
        psi = full
    far, mid = _panel_rules()
    out = np.zeros(len(pts), dtype=np.complex128)
    excluded = np.zeros(len(pts), dtype=bool)
    clearance = exclusion_distances(mesh, pts)
    tri_all = mesh.vertices[mesh.panels]
    k = sp.k
    hats_far = np.stack([1.0 - far.points[:, 0] - far.points[:, 1],
                         far.points[:, 0], far.points[:, 1]], axis=1)
    hats_mid = np.stack([1.0 - mid.points[:, 0] - mid.points[:, 1],
                         mid.points[:, 0], mid.points[:, 1]], axis=1)
    for ip, x in enumerate(pts):
        if clearance[ip] < 0.0 and not allow_near:
            excluded[ip] = True
            out[ip] = np.nan
            continue
        acc = 0.0 + 0.0j
        d = np.linalg.norm(mesh.panel_centroids - x, axis=1)
        for j in range(mesh.n_panels):
            tri = tri_all[j]
            nrm = mesh.panel_normals[j]
            vals_v = psi[mesh.panels[j]]
            diam = mesh.panel_diameters[j]
            near = allow_near and d[j] < _NEAR_FACTOR * diam + 0.7 * diam
            rule, hats = (mid, hats_mid) if (near or d[j] < _MID_FACTOR * diam) \
                else (far, hats_far)
            y = _physical_points(tri, rule)
            dens = hats @ vals_v
            dvec = x - y
            r = np.linalg.norm(dvec, axis=1)
            dn = dvec @ nrm
            if near:
                mean = vals_v.mean()
                # static constant part: integral of d_nu(y) 1/(4 pi r) is the
                # signed solid angle
                w0 = np.dot(x - tri[0], nrm)
                stat = np.sign(w0) * solid_angle(x, tri[0], tri[1], tri[2]) / FOUR_PI
                # remainder: full kernel with (dens - mean) + smooth kernel
                # difference with the mean density
                kern_full = dn * np.exp(1j * k * r) / (FOUR_PI * r ** 2) * (1.0 / r - 1j * k)
                kern_stat = dn / (FOUR_PI * r ** 3)
                osc = kern_full * (dens - mean) + (kern_full - kern_stat) * mean
                acc += mean * stat + 2.0 * mesh.panel_areas[j] * np.dot(rule.weights, osc)
            else:
                kern = dn * np.exp(1j * k * r) / (FOUR_PI * r ** 2) * (1.0 / r - 1j * k)
                acc += 2.0 * mesh.panel_areas[j] * np.dot(rule.weights, kern * dens)
        out[ip] = acc
    return out, excluded


class PlanarGrid:
    """Axis-aligned evaluation grid for the xy/xz/yz-plane figures.

    axis is the fixed coordinate ("x", "y" or "z"), at value `offset`;
    bounds = (umin, umax, vmin, vmax) span the two free coordinates in
    axis order; resolution = (nu, nv).  Points within eps_near of any panel
    (bounding-sphere test) are excluded.
    """

    _AXES = {"x": (1, 2), "y": (0, 2), "z": (0, 1)}

    def __init__(self, axis, offset, bounds, resolution, mesh=None, eps_factor=2.0):
        if axis not in self._AXES:
            raise ValueError(f"unknown plane axis {axis!r}")
        self.axis = axis
        self.offset = float(offset)
        self.bounds = tuple(float(b) for b in bounds)
        nu, nv = resolution if np.iterable(resolution) else (resolution, resolution)
        self.resolution = (int(nu), int(nv))
        iu, iv = self._AXES[axis]
        ifix = 3 - iu - iv
        us = np.linspace(self.bounds[0], self.bounds[1], self.resolution[0])
        vs = np.linspace(self.bounds[2], self.bounds[3], self.resolution[1])
        pts = np.empty((self.resolution[0] * self.resolution[1], 3))
        uu, vv = np.meshgrid(us, vs, indexing="ij")
        pts[:, iu] = uu.ravel()
        pts[:, iv] = vv.ravel()
        pts[:, ifix] = self.offset
        self.points = pts
        if mesh is not None:
            self.retained = exclusion_distances(mesh, pts, eps_factor) >= 0.0
        else:
            self.retained = np.ones(len(pts), dtype=bool)

    @property
    def n_points(self):
        return len(self.points)


def export_grid(values, grid, path):
    """CSV export with header x,y,z,re,im,abs; NaN markers become empty
    fields.  Row order is row-major in (u, v)."""
    values = np.asarray(values)
    with open(path, "w") as fh:
        fh.write("x,y,z,re,im,abs\n")
        for p, v in zip(grid.points, values):
            if np.isnan(v.real) or np.isnan(v.imag):
                fh.write(f"{p[0]:.9g},{p[1]:.9g},{p[2]:.9g},,,\n")
            else:
                fh.write(f"{p[0]:.9g},{p[1]:.9g},{p[2]:.9g},"
                         f"{v.real:.12g},{v.imag:.12g},{abs(v):.12g}\n")
